#include "pwaq/model.hpp"

#include <cmath>

#include "pwaq/errors.hpp"

namespace pwaq {

InputPolytope InputPolytope::box(int m, double bound) {
  InputPolytope u;
  u.R = Mat::Zero(2 * m, m);
  u.r = Vec::Constant(2 * m, bound);
  for (int j = 0; j < m; ++j) {
    u.R(2 * j, j) = 1.0;
    u.R(2 * j + 1, j) = -1.0;
  }
  return u;
}

int mode_of(const PwaSystem& sys, const Vec& x, double tie_tol) {
  if (x.size() != sys.state_dim)
    throw DimensionError("mode_of: state dimension mismatch");
  if (!contains(sys.total_space, x, tie_tol))
    throw OutOfDomainError("mode_of: state outside the total space");
  for (int i = 0; i < sys.num_cells(); ++i)
    if (contains(sys.cells[i].region, x, tie_tol)) return i;
  throw OutOfDomainError("mode_of: no cell contains the state");
}

Vec quantize(const UniformQuantizer& q, const Vec& xi) {
  const double w = 2.0 * q.delta;
  Vec out(xi.size());
  for (int l = 0; l < xi.size(); ++l)
    out[l] = w * std::ceil(xi[l] / w - 0.5);  // ties toward -inf
  return out;
}

Vec quantize_zoomed(const UniformQuantizer& q, double mu, const Vec& xi) {
  if (!(mu > 0)) throw ValidationError("quantize_zoomed: mu must be positive");
  return mu * quantize(q, xi / mu);
}

Mat channel_matrix(const PwaSystem& sys, const AffineController* ctrl, int i,
                   Channel ch) {
  switch (ch) {
    case Channel::Physical:
      return sys.cells[i].D;
    case Channel::InputQ:
      return sys.cells[i].B;
    case Channel::StateQ:
      if (!ctrl)
        throw ValidationError("channel BK requires a controller");
      return sys.cells[i].B * ctrl->gains[i].K;
  }
  throw ValidationError("channel_matrix: unknown channel");
}

Mat closed_loop_A(const PwaSystem& sys, const AffineController& ctrl, int i) {
  return sys.cells[i].A + sys.cells[i].B * ctrl.gains[i].K;
}

Vec closed_loop_f(const PwaSystem& sys, const AffineController& ctrl, int i) {
  return sys.cells[i].f + sys.cells[i].B * ctrl.gains[i].g;
}

namespace {

// Deterministic xorshift for the coverage sampler.
struct SampleRng {
  uint64_t s = 0x9e3779b97f4a7c15ULL;
  double next() {  // uniform in [0,1)
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return static_cast<double>(s >> 11) * (1.0 / 9007199254740992.0);
  }
};

}  // namespace

void validate_system(const PwaSystem& sys) {
  const int n = sys.state_dim;
  if (n <= 0) throw ValidationError("system: state_dim must be positive");
  if (sys.cells.empty()) throw ValidationError("system: no cells");
  if (sys.total_space.dim() != n)
    throw ValidationError("system: total space dimension mismatch");
  for (int i = 0; i < sys.num_cells(); ++i) {
    const Cell& c = sys.cells[i];
    if (c.region.dim() != n || c.A.rows() != n || c.A.cols() != n ||
        c.B.rows() != n || c.B.cols() != sys.input_dim || c.f.size() != n ||
        c.D.rows() != n || c.D.cols() != sys.disturbance_dim)
      throw ValidationError("system: cell " + std::to_string(i + 1) +
                            " has inconsistent dimensions");
    if (contains(c.region, Vec::Zero(n), kTieTol) &&
        c.f.lpNorm<Eigen::Infinity>() > 1e-12)
      throw ValidationError("system: cell " + std::to_string(i + 1) +
                            " contains the origin but has f != 0");
  }

  // Pairwise interiors disjoint: the intersection's inscribed inf-ball
  // must vanish.
  for (int i = 0; i < sys.num_cells(); ++i)
    for (int j = i + 1; j < sys.num_cells(); ++j) {
      const HPolytope I = intersect(sys.cells[i].region, sys.cells[j].region);
      if (is_empty(I)) continue;
      double r;
      try {
        r = inradius_inf(I);
      } catch (const UnboundedError&) {
        throw ValidationError("system: cells " + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) +
                              " overlap in an unbounded set");
      }
      if (r > kTieTol)
        throw ValidationError("system: cells " + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) +
                              " have overlapping interiors");
    }

  // Sampled coverage of X by the union of the cells.
  std::pair<Vec, Vec> bb;
  try {
    bb = bounding_box(sys.total_space);
  } catch (const UnboundedError&) {
    return;  // unbounded X: coverage sampling not applicable
  }
  SampleRng rng;
  int hits = 0;
  const int wanted = 10000;
  int tried = 0;
  while (hits < wanted && tried < 100 * wanted) {
    ++tried;
    Vec x(n);
    for (int l = 0; l < n; ++l)
      x[l] = bb.first[l] + rng.next() * (bb.second[l] - bb.first[l]);
    if (!contains(sys.total_space, x, 0.0)) continue;
    ++hits;
    bool inside = false;
    for (const Cell& c : sys.cells)
      if (contains(c.region, x, kTieTol)) {
        inside = true;
        break;
      }
    if (!inside)
      throw ValidationError("system: sampled point of X lies in no cell");
  }
}

void validate_controller(const PwaSystem& sys, const AffineController& ctrl) {
  if (static_cast<int>(ctrl.gains.size()) != sys.num_cells())
    throw ValidationError("controller: one gain per cell required");
  for (int i = 0; i < sys.num_cells(); ++i) {
    const auto& g = ctrl.gains[i];
    if (g.K.rows() != sys.input_dim || g.K.cols() != sys.state_dim ||
        g.g.size() != sys.input_dim)
      throw ValidationError("controller: gain " + std::to_string(i + 1) +
                            " has inconsistent dimensions");
    if (contains(sys.cells[i].region, Vec::Zero(sys.state_dim), kTieTol) &&
        g.g.lpNorm<Eigen::Infinity>() > 1e-12)
      throw ValidationError("controller: cell " + std::to_string(i + 1) +
                            " contains the origin but has g != 0");
  }
}

}  // namespace pwaq
