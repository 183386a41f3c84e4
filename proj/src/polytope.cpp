#include "pwaq/polytope.hpp"

#include <algorithm>
#include <cmath>

#include "pwaq/errors.hpp"
#include "pwaq/lp.hpp"

namespace pwaq {

HPolytope::HPolytope(Mat U_, Vec v_) : U(std::move(U_)), v(std::move(v_)) {
  if (U.rows() != v.size())
    throw DimensionError("HPolytope: row count of U must equal length of v");
}

HPolytope HPolytope::box(const Vec& center, double radius) {
  const int n = static_cast<int>(center.size());
  Mat U(2 * n, n);
  Vec v(2 * n);
  U.setZero();
  for (int i = 0; i < n; ++i) {
    U(2 * i, i) = 1.0;
    v[2 * i] = center[i] + radius;
    U(2 * i + 1, i) = -1.0;
    v[2 * i + 1] = -(center[i] - radius);
  }
  return HPolytope(U, v);
}

HPolytope HPolytope::box(const Vec& lo, const Vec& hi) {
  const int n = static_cast<int>(lo.size());
  Mat U(2 * n, n);
  Vec v(2 * n);
  U.setZero();
  for (int i = 0; i < n; ++i) {
    U(2 * i, i) = 1.0;
    v[2 * i] = hi[i];
    U(2 * i + 1, i) = -1.0;
    v[2 * i + 1] = -lo[i];
  }
  return HPolytope(U, v);
}

bool contains(const HPolytope& P, const Vec& x, double tol) {
  if (x.size() != P.dim())
    throw DimensionError("contains: point dimension mismatch");
  if (P.rows() == 0) return true;
  return ((P.U * x - P.v).array() <= tol).all();
}

bool is_empty(const HPolytope& P) {
  if (P.rows() == 0) return false;
  LinearProgram lp(P.dim());
  lp.add_le(P.U, P.v);
  const LpResult r = solve_lp(lp);
  if (r.status == LpStatus::Unbounded)
    throw SolverFailure("is_empty: feasibility LP reported unbounded");
  return r.status == LpStatus::Infeasible;
}

HPolytope intersect(const HPolytope& P, const HPolytope& Q) {
  if (P.dim() != Q.dim())
    throw DimensionError("intersect: dimension mismatch");
  Mat U(P.rows() + Q.rows(), P.dim());
  U << P.U, Q.U;
  Vec v(P.rows() + Q.rows());
  v << P.v, Q.v;
  return HPolytope(U, v);
}

namespace {

// One LP per direction; Unbounded bubbles out as UnboundedError.
double support_value(const HPolytope& P, const Vec& dir) {
  LinearProgram lp(P.dim());
  lp.c = -dir;  // maximize dir'x
  lp.add_le(P.U, P.v);
  const LpResult r = solve_lp(lp);
  if (r.status == LpStatus::Unbounded)
    throw UnboundedError("polytope is unbounded");
  if (r.status == LpStatus::Infeasible)
    throw EmptyError("polytope is empty");
  return dir.dot(r.x);
}

}  // namespace

std::pair<Vec, Vec> bounding_box(const HPolytope& P) {
  const int n = P.dim();
  Vec lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    Vec d = Vec::Zero(n);
    d[j] = 1.0;
    hi[j] = support_value(P, d);
    d[j] = -1.0;
    lo[j] = -support_value(P, d);
  }
  return {lo, hi};
}

VertexList vertices(const HPolytope& P) {
  const int n = P.dim();
  const int m = P.rows();
  if (is_empty(P)) throw EmptyError("vertices: polytope is empty");
  bounding_box(P);  // boundedness gate

  VertexList out;
  const double feas_tol = 1e-9;
  const double dedupe = 1e-7;
  out.dedupe_tol = dedupe;

  std::vector<int> idx(n);
  // Enumerate all n-subsets of rows.
  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  if (m < n) return out;  // cannot happen for bounded P, kept as a guard
  while (true) {
    Mat S(n, n);
    Vec rhs(n);
    for (int i = 0; i < n; ++i) {
      S.row(i) = P.U.row(comb[i]);
      rhs[i] = P.v[comb[i]];
    }
    Eigen::FullPivLU<Mat> lu(S);
    lu.setThreshold(1e-9);
    if (lu.isInvertible()) {
      const Vec x = lu.solve(rhs);
      if (((P.U * x - P.v).array() <= feas_tol).all()) {
        bool dup = false;
        for (const Vec& w : out.vertices)
          if ((w - x).lpNorm<Eigen::Infinity>() <= dedupe) {
            dup = true;
            break;
          }
        if (!dup) out.vertices.push_back(x);
      }
    }
    // next combination
    int i = n - 1;
    while (i >= 0 && comb[i] == m - n + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int k = i + 1; k < n; ++k) comb[k] = comb[k - 1] + 1;
  }
  return out;
}

std::pair<Vec, double> chebyshev_center_inf(const HPolytope& P) {
  const VertexList vl = vertices(P);
  const int n = P.dim();
  const int nv = static_cast<int>(vl.vertices.size());
  if (nv == 0) throw EmptyError("chebyshev_center_inf: no vertices");

  // Vars [xi(n), delta]: min delta s.t. xi - v_p <= delta*1, v_p - xi <= delta*1.
  LinearProgram lp(n + 1);
  lp.c = Vec::Zero(n + 1);
  lp.c[n] = 1.0;
  Mat A(2 * n * nv, n + 1);
  Vec b(2 * n * nv);
  A.setZero();
  int r = 0;
  for (const Vec& vp : vl.vertices) {
    for (int l = 0; l < n; ++l) {
      A(r, l) = 1.0;
      A(r, n) = -1.0;
      b[r] = vp[l];
      ++r;
      A(r, l) = -1.0;
      A(r, n) = -1.0;
      b[r] = -vp[l];
      ++r;
    }
  }
  lp.add_le(A, b);
  lp.set_bounds(n, 0.0, kInf);
  const LpResult res = solve_lp(lp);
  if (res.status != LpStatus::Optimal)
    throw SolverFailure("chebyshev_center_inf: LP did not solve");
  const double delta = res.x[n];

  // The optimal-center set is an axis-aligned box; report its midpoint.
  Vec lo = vl.vertices.front(), hi = vl.vertices.front();
  for (const Vec& vp : vl.vertices) {
    lo = lo.cwiseMin(vp);
    hi = hi.cwiseMax(vp);
  }
  const Vec center = 0.5 * (lo + hi);
  return {center, delta};
}

double max_inf_distance(const HPolytope& P, const Vec& xi) {
  if (xi.size() != P.dim())
    throw DimensionError("max_inf_distance: point dimension mismatch");
  const VertexList vl = vertices(P);
  double best = 0.0;
  for (const Vec& vp : vl.vertices)
    best = std::max(best, (xi - vp).lpNorm<Eigen::Infinity>());
  return best;
}

double inradius_inf(const HPolytope& P) {
  if (P.rows() == 0)
    throw UnboundedError("inradius_inf: whole space has no finite inradius");
  // Vars [x(n), t]: max t s.t. Ux + t*rowabssum <= v, t >= 0.
  const int n = P.dim();
  LinearProgram lp(n + 1);
  lp.c = Vec::Zero(n + 1);
  lp.c[n] = -1.0;
  Mat A(P.rows(), n + 1);
  A.leftCols(n) = P.U;
  A.col(n) = P.U.cwiseAbs().rowwise().sum();
  lp.add_le(A, P.v);
  lp.set_bounds(n, 0.0, kInf);
  const LpResult res = solve_lp(lp);
  if (res.status == LpStatus::Infeasible)
    throw EmptyError("inradius_inf: polytope is empty");
  if (res.status == LpStatus::Unbounded)
    throw UnboundedError("inradius_inf: inscribed radius is unbounded");
  return res.x[n];
}

}  // namespace pwaq
