#include "pwaq/synth.hpp"

#include <algorithm>
#include <cmath>

#include "pwaq/errors.hpp"
#include "pwaq/lp.hpp"

namespace pwaq {

namespace {

constexpr double kEpsPsd = 1e-6;
constexpr double kTighten = 1e-6;

std::vector<std::vector<int>> full_map(int s) {
  std::vector<std::vector<int>> m(s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) m[i].push_back(j);
  return m;
}

HPolytope tightened(const HPolytope& Z) {
  if (Z.rows() == 0) return Z;
  return HPolytope(Z.U, Z.v - kTighten * Z.U.cwiseAbs().rowwise().sum());
}

bool x_bounded(const HPolytope& X) {
  try {
    bounding_box(X);
    return true;
  } catch (const UnboundedError&) {
    return false;
  }
}

// All confinement targets for one synthesis round: the user-declared pairs,
// plus every-cell confinement to X when X is bounded. Targets are shrunk so
// images land strictly inside, which keeps the successor map prunable.
std::vector<std::pair<int, HPolytope>> assemble_targets(
    const SynthesisProblem& prob) {
  std::vector<std::pair<int, HPolytope>> targets;
  for (const auto& [i, Z] : prob.confinements)
    targets.emplace_back(i, tightened(Z));
  if (x_bounded(prob.sys.total_space)) {
    const HPolytope Xs = tightened(prob.sys.total_space);
    for (int i = 0; i < prob.sys.num_cells(); ++i) targets.emplace_back(i, Xs);
  }
  return targets;
}

void check_variant(const SynthesisProblem& prob) {
  if (prob.variant == SynthesisProblem::Variant::Asymptotic) {
    for (int i = 0; i < prob.sys.num_cells(); ++i) {
      if (prob.sys.cells[i].f.lpNorm<Eigen::Infinity>() > 1e-12 ||
          (prob.sys.cells[i].D.size() > 0 &&
           prob.sys.cells[i].D.cwiseAbs().maxCoeff() > 1e-12))
        throw ValidationError(
            "synthesis: the asymptotic variant requires f_i = 0 and D_i = 0 "
            "(cell " +
            std::to_string(i + 1) + "); use the ISS variant");
    }
  } else if (!(prob.nu1 > 0 && prob.nu2 > 0 && prob.nu1 * prob.nu2 > 1)) {
    throw ValidationError("synthesis: ISS variant requires nu1 nu2 > 1");
  }
}

}  // namespace

LmiSystem build_lmis(const SynthesisProblem& prob,
                     const std::vector<std::vector<int>>& succ_map) {
  check_variant(prob);
  const PwaSystem& sys = prob.sys;
  const int n = sys.state_dim;
  const int m = sys.input_dim;
  const int s = sys.num_cells();

  LmiSystem L;
  L.n = n;
  L.m = m;
  L.s = s;
  for (int i = 0; i < s; ++i) {
    L.Pv.push_back(L.sdp.add_sym_var(n));
    L.Qv.push_back(L.sdp.add_sym_var(n));
    std::vector<int> kv;
    for (int e = 0; e < m * n; ++e) kv.push_back(L.sdp.add_scalar_var());
    L.Kv.push_back(std::move(kv));
  }

  const bool iss = prob.variant == SynthesisProblem::Variant::Iss;
  const Mat In = Mat::Identity(n, n);

  for (int i = 0; i < s; ++i) {
    const Mat E = homogeneous_cone_rows(sys.cells[i].region);
    for (int j : succ_map[i]) {
      L.pairs.emplace_back(i, j);
      SymVar Mij;
      if (E.rows() > 0) {
        Mij = L.sdp.add_sym_var(static_cast<int>(E.rows()));
        for (int a = 0; a < Mij.n; ++a)
          for (int b = a; b < Mij.n; ++b)
            L.sdp.add_linear_ineq({{Mij.index(a, b), -1.0}}, 0.0);
      }
      L.Mv.push_back(Mij);

      const int dim = iss ? 4 * n : 2 * n;
      MatExpr blk(dim);
      blk.add_sym_product_at(L.Pv[i], 0, 0, In, In);
      if (E.rows() > 0)
        blk.add_sym_product_at(Mij, 0, 0, -E.transpose(), E);
      blk.add_constant(-kEpsPsd * Mat::Identity(dim, dim));

      // (A_i + B_i K_i) placed per variant sign pattern
      auto add_Abar_at = [&](int row0, double sign) {
        blk.add_constant_at(row0, 0, sign * sys.cells[i].A);
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < n; ++b) {
            Mat C = Mat::Zero(n, n);
            C.col(b) += sign * sys.cells[i].B.col(a);
            blk.add_coeff_at(L.Kv[i][a * n + b], row0, 0, C);
          }
      };

      if (!iss) {
        add_Abar_at(n, +1.0);
        blk.add_sym_product_at(L.Qv[j], n, n, In, In);
      } else {
        add_Abar_at(n, -1.0);
        add_Abar_at(2 * n, -1.0);
        add_Abar_at(3 * n, +1.0);
        blk.add_sym_product_at(L.Qv[j], n, n, prob.nu1 * In, In);
        blk.add_sym_product_at(L.Qv[j], 2 * n, n, -In, In);
        blk.add_sym_product_at(L.Qv[j], 2 * n, 2 * n, prob.nu2 * In, In);
        blk.add_sym_product_at(L.Qv[j], 3 * n, 3 * n, In, In);
      }
      L.sdp.add_psd_block(blk);
    }
  }

  // coupling and positive-definiteness
  for (int i = 0; i < s; ++i) {
    MatExpr cpl(2 * n);
    cpl.add_sym_product_at(L.Pv[i], 0, 0, In, In);
    cpl.add_sym_product_at(L.Qv[i], n, n, In, In);
    cpl.add_constant_at(n, 0, In);
    L.sdp.add_psd_block(cpl);

    MatExpr pd(n), qd(n);
    pd.add_sym_product_at(L.Pv[i], 0, 0, In, In);
    pd.add_constant(-kEpsPsd * In);
    qd.add_sym_product_at(L.Qv[i], 0, 0, In, In);
    qd.add_constant(-kEpsPsd * In);
    L.sdp.add_psd_block(pd);
    L.sdp.add_psd_block(qd);
  }

  // confinement rows; the affine term g_i is fixed to zero here
  for (const auto& [i, Z] : assemble_targets(prob)) {
    const ConfinementConstraint cc =
        confinement_constraints(sys, i, Z, prob.delta, prob.channel);
    for (int r = 0; r < cc.count(); ++r) {
      std::vector<std::pair<int, double>> terms;
      for (int e = 0; e < m * n; ++e)
        if (cc.W(r, e) != 0.0) terms.emplace_back(L.Kv[i][e], cc.W(r, e));
      L.sdp.add_linear_ineq(terms, cc.w[r]);
    }
  }

  // input-polytope rows: K_i x (+ channel error) must stay in U on each cell
  if (prob.input.R.rows() > 0) {
    int ddim = 0;
    switch (prob.channel) {
      case Channel::StateQ: ddim = n; break;
      case Channel::InputQ: ddim = m; break;
      case Channel::Physical: ddim = 0; break;
    }
    const auto dverts = disturbance_box_vertices(ddim, prob.delta);
    for (int i = 0; i < s; ++i) {
      const VertexList vl = vertices(sys.cells[i].region);
      for (const Vec& xi : vl.vertices)
        for (const Vec& d : dverts) {
          Vec w_vec = xi;
          Vec shift = Vec::Zero(static_cast<int>(prob.input.R.rows()));
          if (prob.channel == Channel::StateQ)
            w_vec = xi + d;
          else if (prob.channel == Channel::InputQ)
            shift = prob.input.R * d;
          for (int r = 0; r < prob.input.R.rows(); ++r) {
            std::vector<std::pair<int, double>> terms;
            for (int a = 0; a < m; ++a)
              for (int b = 0; b < n; ++b)
                terms.emplace_back(L.Kv[i][a * n + b],
                                   prob.input.R(r, a) * w_vec[b]);
            L.sdp.add_linear_ineq(terms, prob.input.r[r] - shift[r]);
          }
        }
    }
  }
  return L;
}

// --- certificate refit with frozen gains ---------------------------------

namespace {

struct FitResult {
  std::vector<Mat> P;
  std::vector<Mat> M;
  double gamma = 0.0;
};

// Margin-maximizing linear SDP in P (pre-Schur form); variant selects the
// nominal n x n or the ISS 3n x 3n block.
FitResult fit_impl(const PwaSystem& sys, const AffineController& ctrl,
                   const std::vector<std::vector<int>>& succ_map, double tau,
                   SynthesisProblem::Variant variant, double nu1, double nu2) {
  const int n = sys.state_dim;
  const int s = sys.num_cells();
  const Mat In = Mat::Identity(n, n);
  SdpProblem sdp;
  std::vector<SymVar> Pv;
  for (int i = 0; i < s; ++i) Pv.push_back(sdp.add_sym_var(n));
  const int gv = sdp.add_scalar_var("gamma");
  std::vector<SymVar> Mv;
  std::vector<std::pair<int, int>> pairs;

  const bool iss = variant == SynthesisProblem::Variant::Iss;
  for (int i = 0; i < s; ++i) {
    const Mat E = homogeneous_cone_rows(sys.cells[i].region);
    const Mat Abar = closed_loop_A(sys, ctrl, i);
    for (int j : succ_map[i]) {
      pairs.emplace_back(i, j);
      SymVar Mij;
      if (E.rows() > 0) {
        Mij = sdp.add_sym_var(static_cast<int>(E.rows()));
        for (int a = 0; a < Mij.n; ++a)
          for (int b = a; b < Mij.n; ++b)
            sdp.add_linear_ineq({{Mij.index(a, b), -1.0}}, 0.0);
      }
      Mv.push_back(Mij);

      if (!iss) {
        MatExpr blk(n);  // P_i - Abar' P_j Abar - E'ME - gamma I >= 0
        blk.add_sym_product_at(Pv[i], 0, 0, In, In);
        blk.add_sym_product_at(Pv[j], 0, 0, -Abar.transpose(), Abar);
        if (E.rows() > 0) blk.add_sym_product_at(Mij, 0, 0, -E.transpose(), E);
        blk.add_coeff(gv, -In);
        sdp.add_psd_block(blk);
      } else {
        MatExpr blk(3 * n);
        blk.add_sym_product_at(Pv[i], 0, 0, In, In);
        blk.add_sym_product_at(Pv[j], 0, 0, -Abar.transpose(), Abar);
        if (E.rows() > 0) blk.add_sym_product_at(Mij, 0, 0, -E.transpose(), E);
        blk.add_sym_product_at(Pv[j], n, 0, -In, Abar);
        blk.add_sym_product_at(Pv[j], 2 * n, 0, -In, Abar);
        blk.add_sym_product_at(Pv[j], n, n, nu1 * In, In);
        blk.add_sym_product_at(Pv[j], 2 * n, n, -In, In);
        blk.add_sym_product_at(Pv[j], 2 * n, 2 * n, nu2 * In, In);
        blk.add_coeff(gv, -Mat::Identity(3 * n, 3 * n));
        sdp.add_psd_block(blk);
      }
    }
    MatExpr lo(n);  // P_i >= I
    lo.add_sym_product_at(Pv[i], 0, 0, In, In);
    lo.add_constant(-In);
    sdp.add_psd_block(lo);
    MatExpr hi(n);  // P_i <= tau I
    hi.add_sym_product_at(Pv[i], 0, 0, -In, In);
    hi.add_constant(tau * In);
    sdp.add_psd_block(hi);
  }
  sdp.add_linear_ineq({{gv, 1.0}}, 10.0 * tau);  // keep the margin bounded
  sdp.set_objective({{gv, -1.0}});
  const SdpResult res = sdp.solve();
  if (res.status != SdpStatus::Optimal || res.y[gv] <= 1e-9)
    throw VerificationFailed(
        "certificate fit infeasible at spread tau = " + std::to_string(tau));
  FitResult out;
  for (int i = 0; i < s; ++i) out.P.push_back(res.sym_value(Pv[i]));
  for (const SymVar& mv : Mv)
    out.M.push_back(mv.n > 0 ? res.sym_value(mv) : Mat(0, 0));
  out.gamma = res.y[gv];
  return out;
}

}  // namespace

std::vector<Mat> fit_certificate(const PwaSystem& sys,
                                 const AffineController& ctrl,
                                 const std::vector<std::vector<int>>& succ_map,
                                 double tau, double* gamma_out) {
  const FitResult fr = fit_impl(sys, ctrl, succ_map, tau,
                                SynthesisProblem::Variant::Asymptotic, 2, 2);
  if (gamma_out) *gamma_out = fr.gamma;
  return fr.P;
}

std::vector<Mat> fit_best_certificate(
    const PwaSystem& sys, const AffineController& ctrl,
    const std::vector<std::vector<int>>& succ_map,
    const std::optional<UniformQuantizer>& quant, QuantizationMode qmode,
    double eps, double delta_param, double* tau_out, double* gamma_out) {
  const double taus[] = {3.0, 6.0, 12.0, 30.0, 100.0};
  std::vector<Mat> best;
  double best_score = std::numeric_limits<double>::infinity();
  double best_tau = 0.0, best_gamma = 0.0;
  for (double tau : taus) {
    std::vector<Mat> P;
    double g = 0.0;
    try {
      P = fit_certificate(sys, ctrl, succ_map, tau, &g);
    } catch (const VerificationFailed&) {
      continue;
    }
    double score;
    if (quant) {
      // true achieved zoom rate (lower is better); failures rank last
      try {
        PwqCertificate cert;
        cert.P = P;
        cert.state_dim = sys.state_dim;
        cert.succ_map = succ_map;
        Vec gam(sys.num_cells());
        for (int i = 0; i < sys.num_cells(); ++i) {
          double gi = std::numeric_limits<double>::infinity();
          for (int j : succ_map[i])
            gi = std::min(gi, certify_pair_gamma(sys, ctrl, P, i, j));
          gam[i] = gi;
        }
        cert.gamma = gam;
        double a = std::numeric_limits<double>::infinity(), b = 0;
        for (int i = 0; i < sys.num_cells(); ++i) {
          a = std::min(a, sym_eig_min(P[i]));
          b = std::max(b, sym_eig_max(P[i]));
        }
        cert.alpha = a;
        cert.beta = b;
        const StabilityConstants c =
            qmode == QuantizationMode::Input
                ? input_constants(cert, sys, ctrl, *quant, eps, delta_param)
                : state_constants(cert, sys, ctrl, *quant, eps, delta_param);
        score = zoom_rate(c);
      } catch (const Error&) {
        score = std::numeric_limits<double>::infinity();
      }
    } else {
      score = tau / g;  // prefer large margin per unit spread
    }
    if (score < best_score) {
      best_score = score;
      best = P;
      best_tau = tau;
      best_gamma = g;
    }
  }
  if (best.empty())
    throw VerificationFailed("certificate fit infeasible at every spread");
  if (tau_out) *tau_out = best_tau;
  if (gamma_out) *gamma_out = best_gamma;
  return best;
}

// --- CCL ------------------------------------------------------------------

SynthesisResult ccl_solve(const SynthesisProblem& prob,
                          const std::vector<std::vector<int>>& succ_map_in,
                          int max_iter, double ccl_tol) {
  const PwaSystem& sys = prob.sys;
  const int n = sys.state_dim;
  const int s = sys.num_cells();
  const std::vector<std::vector<int>> succ_map =
      succ_map_in.empty() ? full_map(s) : succ_map_in;

  LmiSystem L = build_lmis(prob, succ_map);

  std::vector<Mat> Pprev(s, Mat::Identity(n, n));
  std::vector<Mat> Qprev(s, Mat::Identity(n, n));

  SynthesisResult out;
  out.succ_map = succ_map;
  double trace_now = 0.0;
  int stall = 0;
  double last_trace = std::numeric_limits<double>::infinity();
  Vec warm;
  bool have_warm = false;

  std::vector<Mat> Pcur, Qcur;
  std::vector<Mat> Kcur;
  int t = 0;
  for (; t < max_iter; ++t) {
    std::vector<std::pair<int, double>> obj;
    for (int i = 0; i < s; ++i) {
      for (auto& term : SdpProblem::trace_terms(L.Pv[i], Qprev[i]))
        obj.push_back(term);
      for (auto& term : SdpProblem::trace_terms(L.Qv[i], Pprev[i]))
        obj.push_back(term);
    }
    L.sdp.set_objective(obj);
    const SdpResult res =
        have_warm ? L.sdp.solve_warm(warm) : L.sdp.solve();
    if (res.status != SdpStatus::Optimal)
      throw CclStalled("ccl: LMI system infeasible");
    warm = res.y;
    have_warm = true;
    out.linearized_objective.push_back(res.objective);

    Pcur.clear();
    Qcur.clear();
    Kcur.clear();
    for (int i = 0; i < s; ++i) {
      Pcur.push_back(res.sym_value(L.Pv[i]));
      Qcur.push_back(res.sym_value(L.Qv[i]));
      Mat K(L.m, L.n);
      for (int a = 0; a < L.m; ++a)
        for (int b = 0; b < L.n; ++b) K(a, b) = res.y[L.Kv[i][a * L.n + b]];
      Kcur.push_back(K);
    }
    // tr(PQ) + tr(QP): the quantity the coupling LMI bounds below by 2n
    trace_now = 0.0;
    for (int i = 0; i < s; ++i) trace_now += 2.0 * (Pcur[i] * Qcur[i]).trace();

    if (trace_now <= 2.0 * n * s + ccl_tol) {
      ++t;
      break;
    }
    if (trace_now > last_trace - 1e-8) {
      if (++stall >= 5)
        throw CclStalled("ccl: no trace decrease over 5 iterations (trace " +
                         std::to_string(trace_now) + ")");
    } else {
      stall = 0;
    }
    last_trace = trace_now;
    Pprev = Pcur;
    Qprev = Qcur;
  }
  if (trace_now > 2.0 * n * s + ccl_tol)
    throw CclStalled("ccl: iteration limit without reaching the trace target");

  out.iterations = t;
  out.trace_value = trace_now;
  out.residual = trace_now - 2.0 * n * s;
  out.ctrl.gains.resize(s);
  for (int i = 0; i < s; ++i) {
    out.ctrl.gains[i].K = Kcur[i];
    out.ctrl.gains[i].g = Vec::Zero(L.m);
  }

  // Refit P with K frozen; pick the spread by achieved zoom rate when a
  // quantizer context is present.
  double tau = 0.0, gmargin = 0.0;
  std::vector<Mat> Pfit;
  if (prob.variant == SynthesisProblem::Variant::Asymptotic) {
    Pfit = fit_best_certificate(sys, out.ctrl, succ_map, prob.quant,
                                prob.qmode, prob.eps, prob.delta_param, &tau,
                                &gmargin);
  } else {
    // ISS pre-Schur fit at a moderate spread sweep
    const double taus[] = {6.0, 30.0, 200.0};
    bool done = false;
    for (double tcand : taus) {
      try {
        const FitResult fr = fit_impl(sys, out.ctrl, succ_map, tcand,
                                      prob.variant, prob.nu1, prob.nu2);
        Pfit = fr.P;
        out.M = fr.M;
        gmargin = fr.gamma;
        tau = tcand;
        done = true;
        break;
      } catch (const VerificationFailed&) {
      }
    }
    if (!done)
      throw VerificationFailed("ccl: ISS certificate refit infeasible");
  }
  if (prob.variant == SynthesisProblem::Variant::Asymptotic) {
    // recover multipliers for the chosen spread
    const FitResult fr = fit_impl(sys, out.ctrl, succ_map, tau, prob.variant,
                                  prob.nu1, prob.nu2);
    Pfit = fr.P;
    out.M = fr.M;
    gmargin = fr.gamma;
  }
  out.P = Pfit;
  out.tau = tau;
  out.gamma_margin = gmargin;
  out.Q.clear();
  for (int i = 0; i < s; ++i) out.Q.push_back(Pfit[i].inverse());

  // Re-verification with Q := P^{-1} substituted exactly.
  const bool iss = prob.variant == SynthesisProblem::Variant::Iss;
  for (size_t p = 0; p < L.pairs.size(); ++p) {
    const auto [i, j] = L.pairs[p];
    const Mat E = homogeneous_cone_rows(sys.cells[i].region);
    const Mat Abar = closed_loop_A(sys, out.ctrl, i);
    Mat EME = Mat::Zero(n, n);
    if (E.rows() > 0 && out.M[p].size() > 0)
      EME = E.transpose() * out.M[p] * E;
    Mat blk;
    if (!iss) {
      blk = Mat::Zero(2 * n, 2 * n);
      blk.topLeftCorner(n, n) = Pfit[i] - EME;
      blk.block(n, 0, n, n) = Abar;
      blk.block(0, n, n, n) = Abar.transpose();
      blk.block(n, n, n, n) = out.Q[j];
    } else {
      blk = Mat::Zero(4 * n, 4 * n);
      blk.topLeftCorner(n, n) = Pfit[i] - EME;
      auto put = [&](int r0, int c0, const Mat& M) {
        blk.block(r0, c0, n, n) = M;
        blk.block(c0, r0, n, n) = M.transpose();
      };
      put(n, 0, -Abar);
      put(2 * n, 0, -Abar);
      put(3 * n, 0, Abar);
      blk.block(n, n, n, n) = prob.nu1 * out.Q[j];
      put(2 * n, n, -out.Q[j]);
      blk.block(2 * n, 2 * n, n, n) = prob.nu2 * out.Q[j];
      blk.block(3 * n, 3 * n, n, n) = out.Q[j];
    }
    if (sym_eig_min(blk) < -1e-7)
      throw VerificationFailed("ccl: decrease LMI fails with Q = P^-1 (pair " +
                               std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + ")");
  }
  for (int i = 0; i < s; ++i) {
    Mat cpl = Mat::Zero(2 * n, 2 * n);
    cpl.topLeftCorner(n, n) = Pfit[i];
    cpl.block(0, n, n, n) = Mat::Identity(n, n);
    cpl.block(n, 0, n, n) = Mat::Identity(n, n);
    cpl.block(n, n, n, n) = out.Q[i];
    if (sym_eig_min(cpl) < -1e-7)
      throw VerificationFailed("ccl: coupling LMI fails after inversion");
  }
  for (const auto& [i, Z] : assemble_targets(prob)) {
    const ConfinementConstraint cc =
        confinement_constraints(sys, i, Z, prob.delta, prob.channel);
    if (!confinement_constraints_satisfied(cc, out.ctrl.gains[i].K,
                                           out.ctrl.gains[i].g))
      throw VerificationFailed("ccl: confinement constraint violated (cell " +
                               std::to_string(i + 1) + ")");
  }

  out.cert = verify_certificate(sys, out.ctrl, Pfit, succ_map, prob.channel,
                                prob.delta);
  if (prob.quant) {
    const StabilityConstants c =
        prob.qmode == QuantizationMode::Input
            ? input_constants(out.cert, sys, out.ctrl, *prob.quant, prob.eps,
                              prob.delta_param)
            : state_constants(out.cert, sys, out.ctrl, *prob.quant, prob.eps,
                              prob.delta_param);
    try {
      out.omega = zoom_rate(c);
    } catch (const GapViolated&) {
      out.omega.reset();
    }
  }
  out.feasible = true;
  return out;
}

SynthesisResult synthesize(const SynthesisProblem& prob) {
  const PwaSystem& sys = prob.sys;
  const int s = sys.num_cells();

  // Seed: controller-free successors, pruned to full-dimensional overlaps
  // with the (tightened) confinement targets.
  const double delta_T =
      prob.channel == Channel::Physical ? prob.delta : 0.0;
  std::vector<std::vector<int>> map(s);
  for (int i = 0; i < s; ++i)
    map[i] = successors_controller_free(sys, prob.input, i, delta_T).successors;
  if (!prob.succ_map.empty()) map = prob.succ_map;

  for (const auto& [i, Z] : prob.confinements) {
    std::vector<int> kept;
    for (int j : map[i]) {
      const HPolytope overlap = intersect(sys.cells[j].region, Z);
      if (is_empty(overlap)) continue;
      double r = 0.0;
      try {
        r = inradius_inf(overlap);
      } catch (const UnboundedError&) {
        r = 1.0;
      }
      if (r > kTieTol) kept.push_back(j);
    }
    map[i] = kept;
  }

  SynthesisResult result;
  for (int round = 1; round <= 5; ++round) {
    result = ccl_solve(prob, map, prob.max_iter, prob.ccl_tol);
    result.outer_rounds = round;
    bool grew = false;
    for (int i = 0; i < s; ++i) {
      const SuccessorSet sb =
          successors_exact(sys, result.ctrl, i, prob.delta, prob.channel);
      for (int j : sb.successors)
        if (std::find(map[i].begin(), map[i].end(), j) == map[i].end()) {
          map[i].push_back(j);
          grew = true;
        }
      std::sort(map[i].begin(), map[i].end());
    }
    if (!grew) return result;
  }
  throw FixpointDiverged("synthesize: successor map failed to close in 5 rounds");
}

}  // namespace pwaq
