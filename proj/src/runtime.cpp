#include "pwaq/runtime.hpp"

#include <cmath>

#include "pwaq/errors.hpp"
#include "pwaq/reach.hpp"

namespace pwaq {

namespace {

// Raw xorshift64* keeps seeded runs bit-identical across platforms.
struct NoiseRng {
  uint64_t s;
  explicit NoiseRng(uint64_t seed) : s(seed ? seed : 0x106689d45497fdb5ULL) {}
  double uniform_pm1() {
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    const uint64_t v = s * 0x2545f4914f6cdd1dULL;
    return 2.0 * (static_cast<double>(v >> 11) * (1.0 / 9007199254740992.0)) -
           1.0;
  }
};

bool in_domain(const PwaSystem& sys, const Vec& x) {
  return contains(sys.total_space, x, kTieTol);
}

}  // namespace

std::pair<Vec, StepRecord> step_input_q(const PwaSystem& sys,
                                        const AffineController& ctrl,
                                        const UniformQuantizer& quant,
                                        const ZoomState& z, const Vec& x) {
  StepRecord rec;
  rec.x = x;
  rec.mu = z.mu;
  rec.mode = mode_of(sys, x);
  const int i = rec.mode;
  const Vec xi = ctrl.gains[i].K * x + ctrl.gains[i].g;
  if (xi.norm() > z.mu * quant.M + 1e-12) rec.saturation = true;
  rec.q = quantize_zoomed(quant, z, xi);
  rec.u = rec.q;
  const Vec xp = sys.cells[i].A * x + sys.cells[i].B * rec.u + sys.cells[i].f;
  return {xp, rec};
}

std::pair<Vec, bool> requantize_value(const PwaSystem& sys,
                                      const UniformQuantizer& quant,
                                      const ZoomState& z, int mode,
                                      const Vec& q_transmitted) {
  const double r = z.mu * quant.delta;
  const HPolytope box = HPolytope::box(q_transmitted, r);
  // Box strictly inside the active cell cannot meet another cell's closure.
  const HPolytope& own = sys.cells[mode].region;
  if (own.rows() > 0) {
    const Vec slack =
        own.v - own.U * q_transmitted - r * own.U.cwiseAbs().rowwise().sum();
    if ((slack.array() > 1e-12).all()) return {q_transmitted, false};
  }
  // Straddle test: does the box meet any other cell's closure?
  bool straddles = false;
  for (int c = 0; c < sys.num_cells() && !straddles; ++c) {
    if (c == mode) continue;
    if (!is_empty(intersect(sys.cells[c].region, box))) straddles = true;
  }
  if (!straddles) return {q_transmitted, false};
  const HPolytope A = intersect(sys.cells[mode].region, box);
  if (is_empty(A)) return {q_transmitted, false};
  try {
    const auto [center, radius] = chebyshev_center_inf(A);
    (void)radius;
    return {center, true};
  } catch (const UnboundedError&) {
    return {q_transmitted, false};  // controller keeps the original value
  }
}

std::pair<Vec, StepRecord> step_state_q(const PwaSystem& sys,
                                        const AffineController& ctrl,
                                        const UniformQuantizer& quant,
                                        const ZoomState& z, const Vec& x,
                                        bool requantize) {
  StepRecord rec;
  rec.x = x;
  rec.mu = z.mu;
  rec.mode = mode_of(sys, x);
  const int i = rec.mode;
  if (x.norm() > z.mu * quant.M + 1e-12) rec.saturation = true;
  rec.q = quantize_zoomed(quant, z, x);
  Vec q_used = rec.q;
  if (requantize) {
    auto [qn, applied] = requantize_value(sys, quant, z, i, rec.q);
    if (applied) {
      q_used = qn;
      rec.requantized = true;
    }
  }
  rec.u = ctrl.gains[i].K * q_used + ctrl.gains[i].g;
  const Vec xp = sys.cells[i].A * x + sys.cells[i].B * rec.u + sys.cells[i].f;
  return {xp, rec};
}

namespace {

Trace run_quantized(const PwaSystem& sys, const AffineController& ctrl,
                    const UniformQuantizer& quant,
                    const StabilityConstants& consts, const SimConfig& cfg,
                    bool state_case) {
  Trace tr;
  Vec x = cfg.x0;
  ZoomState z;
  z.mu = cfg.mu0;

  if (!in_domain(sys, x))
    throw OutOfDomainError("simulate: initial state outside the total space");

  double omega = 1.0;
  try {
    omega = zoom_rate(consts);
  } catch (const GapViolated&) {
    if (!cfg.force) throw;
    tr.failed_guarantee = true;
    tr.failure = "gap condition violated; zoom disabled";
  }

  int steps_since_event = 0;
  const double k0 = consts.k0_bar;
  for (int k = 0; k < cfg.max_steps; ++k) {
    // Event test against the previous-level zoom.
    bool event = false;
    if (omega < 1.0) {
      if (state_case) {
        const Vec q_pre = quantize_zoomed(quant, z, x);
        event = q_pre.norm() <= z.mu * consts.m_tilde;
      } else {
        event = x.norm() <= z.mu * consts.m;
      }
    }
    if (event) {
      z.zoom(omega);
      ++tr.zoom_events;
      steps_since_event = 0;
    } else {
      ++steps_since_event;
      if (std::isfinite(k0) && steps_since_event > std::ceil(k0) + 1) {
        tr.failed_guarantee = true;
        tr.failure = "inter-event time exceeded k0_bar";
      }
    }

    auto [xp, rec] = state_case
                         ? step_state_q(sys, ctrl, quant, z, x, cfg.requantize)
                         : step_input_q(sys, ctrl, quant, z, x);
    rec.k = k;
    rec.zoom_event = event;
    if (rec.saturation) {
      tr.failed_guarantee = true;
      tr.failure = "quantizer saturation";
    }
    tr.steps.push_back(rec);

    if (!in_domain(sys, xp)) {
      tr.failed_guarantee = true;
      tr.failure = "state left the total space";
      tr.x_final = xp;
      return tr;
    }
    x = xp;
    if (x.norm() <= cfg.stop_radius) break;
  }
  tr.x_final = x;
  return tr;
}

}  // namespace

Trace simulate_input_q(const PwaSystem& sys, const AffineController& ctrl,
                       const UniformQuantizer& quant,
                       const StabilityConstants& consts,
                       const SimConfig& cfg) {
  return run_quantized(sys, ctrl, quant, consts, cfg, /*state_case=*/false);
}

Trace simulate_state_q(const PwaSystem& sys, const AffineController& ctrl,
                       const UniformQuantizer& quant,
                       const StabilityConstants& consts,
                       const SimConfig& cfg) {
  return run_quantized(sys, ctrl, quant, consts, cfg, /*state_case=*/true);
}

Trace simulate_disturbed(const PwaSystem& sys, const AffineController& ctrl,
                         const SimConfig& cfg, double delta) {
  Trace tr;
  Vec x = cfg.x0;
  if (!in_domain(sys, x))
    throw OutOfDomainError("simulate: initial state outside the total space");
  NoiseRng rng(cfg.seed);
  const int dd = sys.disturbance_dim;
  const auto corners = disturbance_box_vertices(dd, delta);
  for (int k = 0; k < cfg.max_steps; ++k) {
    StepRecord rec;
    rec.k = k;
    rec.x = x;
    rec.mode = mode_of(sys, x);
    rec.mu = 1.0;
    Vec d(dd);
    if (cfg.noise == NoiseSource::WorstCorner && !corners.empty()) {
      d = corners[k % corners.size()];
    } else {
      for (int l = 0; l < dd; ++l) d[l] = delta * rng.uniform_pm1();
    }
    rec.q = d;
    const int i = rec.mode;
    rec.u = ctrl.gains[i].K * x + ctrl.gains[i].g;
    const Vec xp = sys.cells[i].A * x + sys.cells[i].B * rec.u +
                   sys.cells[i].f + sys.cells[i].D * d;
    tr.steps.push_back(rec);
    if (!in_domain(sys, xp)) {
      tr.failed_guarantee = true;
      tr.failure = "state left the total space";
      tr.x_final = xp;
      return tr;
    }
    x = xp;
    if (x.norm() <= cfg.stop_radius) break;
  }
  tr.x_final = x;
  return tr;
}

}  // namespace pwaq
