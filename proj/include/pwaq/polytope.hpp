#ifndef PWAQ_POLYTOPE_HPP
#define PWAQ_POLYTOPE_HPP

#include <utility>
#include <vector>

#include "pwaq/linalg.hpp"

namespace pwaq {

/// Closed polyhedron {x : U x <= v}. Zero rows represent the whole space.
struct HPolytope {
  Mat U;
  Vec v;

  HPolytope() : U(0, 0), v(0) {}
  HPolytope(Mat U_, Vec v_);

  int dim() const { return static_cast<int>(U.cols()); }
  int rows() const { return static_cast<int>(U.rows()); }

  static HPolytope whole_space(int n) {
    HPolytope p;
    p.U = Mat(0, n);
    p.v = Vec(0);
    return p;
  }
  /// Axis-aligned box {x : |x - center|_inf <= radius}.
  static HPolytope box(const Vec& center, double radius);
  /// Axis-aligned box with per-coordinate bounds.
  static HPolytope box(const Vec& lo, const Vec& hi);
};

struct VertexList {
  std::vector<Vec> vertices;
  double dedupe_tol = 1e-7;
};

bool contains(const HPolytope& P, const Vec& x, double tol = 0.0);

/// LP feasibility of {Ux <= v}. Zero-row polytopes are nonempty.
bool is_empty(const HPolytope& P);

/// Row stacking; no redundancy elimination.
HPolytope intersect(const HPolytope& P, const HPolytope& Q);

/// All extreme points by enumeration of n-subsets of rows.
/// Throws UnboundedError / EmptyError.
VertexList vertices(const HPolytope& P);

/// Center minimizing the worst inf-distance to P, and the attained radius,
/// via the vertex LP. Throws UnboundedError / EmptyError.
std::pair<Vec, double> chebyshev_center_inf(const HPolytope& P);

/// max over x in P of |xi - x|_inf (attained at a vertex).
double max_inf_distance(const HPolytope& P, const Vec& xi);

/// Radius of the largest inscribed inf-ball (0 for lower-dimensional sets).
/// Throws EmptyError. Unbounded polytopes with bounded inradius are fine.
double inradius_inf(const HPolytope& P);

/// Per-coordinate [min, max] over P via 2n LPs. Throws Unbounded/Empty.
std::pair<Vec, Vec> bounding_box(const HPolytope& P);

}  // namespace pwaq

#endif
