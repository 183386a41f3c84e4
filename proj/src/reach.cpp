#include "pwaq/reach.hpp"

#include <algorithm>

#include "pwaq/errors.hpp"
#include "pwaq/lp.hpp"

namespace pwaq {

bool SuccessorSet::contains(int j) const {
  return std::binary_search(successors.begin(), successors.end(), j);
}

bool SuccessorSet::subset_of(const SuccessorSet& other) const {
  for (int j : successors)
    if (!other.contains(j)) return false;
  return true;
}

std::vector<Vec> disturbance_box_vertices(int d, double delta) {
  if (d == 0 || delta == 0.0) return {Vec::Zero(std::max(d, 0))};
  std::vector<Vec> out;
  out.reserve(1u << d);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Vec v(d);
    for (int l = 0; l < d; ++l) v[l] = (mask >> l) & 1u ? delta : -delta;
    out.push_back(v);
  }
  return out;
}

namespace {

// Feasibility of { x in Cl(X_i), |d| <= delta : U_j (Abar x + fbar + D d) <= v_j }.
bool pair_reachable(const HPolytope& Xi, const HPolytope& Xj, const Mat& Abar,
                    const Vec& fbar, const Mat& D, double delta) {
  const int n = Xi.dim();
  const int dd = delta > 0.0 ? static_cast<int>(D.cols()) : 0;
  LinearProgram lp(n + dd);
  {
    Mat A(Xi.rows(), n + dd);
    A.leftCols(n) = Xi.U;
    A.rightCols(dd).setZero();
    lp.add_le(A, Xi.v);
  }
  {
    Mat A(Xj.rows(), n + dd);
    A.leftCols(n) = Xj.U * Abar;
    if (dd > 0) A.rightCols(dd) = Xj.U * D;
    lp.add_le(A, Xj.v - Xj.U * fbar);
  }
  for (int l = 0; l < dd; ++l) lp.set_bounds(n + l, -delta, delta);
  const LpResult r = solve_lp(lp);
  if (r.status == LpStatus::Unbounded)
    throw SolverFailure("reach: feasibility LP reported unbounded");
  return r.status == LpStatus::Optimal;
}

}  // namespace

SuccessorSet successors_exact(const PwaSystem& sys,
                              const AffineController& ctrl, int i,
                              double delta, Channel channel) {
  SuccessorSet out;
  out.source = i;
  out.method = SuccessorMethod::SbarExact;
  out.delta = delta;
  out.channel = channel;
  const Mat Abar = closed_loop_A(sys, ctrl, i);
  const Vec fbar = closed_loop_f(sys, ctrl, i);
  const Mat D = channel_matrix(sys, &ctrl, i, channel);
  for (int j = 0; j < sys.num_cells(); ++j) {
    try {
      if (pair_reachable(sys.cells[i].region, sys.cells[j].region, Abar, fbar,
                         D, delta))
        out.successors.push_back(j);
    } catch (const SolverFailure& e) {
      throw SolverFailure("successors_exact pair (" + std::to_string(i + 1) +
                          "," + std::to_string(j + 1) + "): " + e.what());
    }
  }
  return out;
}

SuccessorSet successors_fast(const PwaSystem& sys,
                             const AffineController& ctrl, int i, double delta,
                             Channel channel) {
  SuccessorSet out;
  out.source = i;
  out.method = SuccessorMethod::StildeFast;
  out.delta = delta;
  out.channel = channel;
  const Mat Abar = closed_loop_A(sys, ctrl, i);
  const Vec fbar = closed_loop_f(sys, ctrl, i);
  const Mat D = channel_matrix(sys, &ctrl, i, channel);
  const HPolytope& Xi = sys.cells[i].region;
  for (int j = 0; j < sys.num_cells(); ++j) {
    const HPolytope& Xj = sys.cells[j].region;
    const Vec slack = (Xj.U * D).cwiseAbs().rowwise().sum();  // vbar_ji
    HPolytope relaxed(Xj.U, Xj.v + delta * slack);
    try {
      if (pair_reachable(Xi, relaxed, Abar, fbar, Mat::Zero(Xi.dim(), 0), 0.0))
        out.successors.push_back(j);
    } catch (const SolverFailure& e) {
      throw SolverFailure("successors_fast pair (" + std::to_string(i + 1) +
                          "," + std::to_string(j + 1) + "): " + e.what());
    }
  }
  return out;
}

SuccessorSet successors_controller_free(const PwaSystem& sys,
                                        const InputPolytope& input, int i,
                                        double delta) {
  SuccessorSet out;
  out.source = i;
  out.method = SuccessorMethod::TControllerFree;
  out.delta = delta;
  out.channel = Channel::Physical;
  const int n = sys.state_dim;
  const int m = sys.input_dim;
  const Cell& ci = sys.cells[i];
  const int dd = delta > 0.0 ? sys.disturbance_dim : 0;
  for (int j = 0; j < sys.num_cells(); ++j) {
    const HPolytope& Xj = sys.cells[j].region;
    LinearProgram lp(n + m + dd);
    {
      Mat A = Mat::Zero(ci.region.rows(), n + m + dd);
      A.leftCols(n) = ci.region.U;
      lp.add_le(A, ci.region.v);
    }
    if (input.R.rows() > 0) {
      Mat A = Mat::Zero(input.R.rows(), n + m + dd);
      A.middleCols(n, m) = input.R;
      lp.add_le(A, input.r);
    }
    {
      Mat A = Mat::Zero(Xj.rows(), n + m + dd);
      A.leftCols(n) = Xj.U * ci.A;
      A.middleCols(n, m) = Xj.U * ci.B;
      if (dd > 0) A.rightCols(dd) = Xj.U * ci.D;
      lp.add_le(A, Xj.v - Xj.U * ci.f);
    }
    for (int l = 0; l < dd; ++l) lp.set_bounds(n + m + l, -delta, delta);
    const LpResult r = solve_lp(lp);
    if (r.status == LpStatus::Unbounded)
      throw SolverFailure("successors_controller_free pair (" +
                          std::to_string(i + 1) + "," + std::to_string(j + 1) +
                          "): LP unbounded");
    if (r.status == LpStatus::Optimal) out.successors.push_back(j);
  }
  return out;
}

bool confinement_check(const PwaSystem& sys, const AffineController& ctrl,
                       int i, const HPolytope& Z, double delta,
                       Channel channel, double tol) {
  const Mat Abar = closed_loop_A(sys, ctrl, i);
  const Vec fbar = closed_loop_f(sys, ctrl, i);
  const Mat D = channel_matrix(sys, &ctrl, i, channel);
  const VertexList vl = vertices(sys.cells[i].region);
  const auto dv = disturbance_box_vertices(static_cast<int>(D.cols()), delta);
  for (const Vec& xi : vl.vertices)
    for (const Vec& d : dv) {
      const Vec img = Abar * xi + fbar + D * d;
      if (!contains(Z, img, tol)) return false;
    }
  return true;
}

ConfinementConstraint confinement_constraints(const PwaSystem& sys, int i,
                                              const HPolytope& Z, double delta,
                                              Channel channel) {
  const int n = sys.state_dim;
  const int m = sys.input_dim;
  const Cell& ci = sys.cells[i];
  const VertexList vl = vertices(ci.region);

  // Per channel, the image at (vertex, box-vertex) is
  //   A xi + f + B (K w + g) + const,  with
  //   StateQ:   w = xi + d, const = 0
  //   InputQ:   w = xi,     const = B d      (d in R^m)
  //   Physical: w = xi,     const = D_i d    (d in R^d)
  int ddim = 0;
  switch (channel) {
    case Channel::StateQ: ddim = n; break;
    case Channel::InputQ: ddim = m; break;
    case Channel::Physical: ddim = static_cast<int>(ci.D.cols()); break;
  }
  const auto dverts = disturbance_box_vertices(ddim, delta);

  const int nz = m * n + m;  // unknowns: vec_rowmajor(K) then g
  const int rows_per = static_cast<int>(Z.rows());
  ConfinementConstraint cc;
  cc.cell = i;
  cc.W = Mat::Zero(static_cast<int>(vl.vertices.size() * dverts.size()) *
                       rows_per,
                   nz);
  cc.w = Vec::Zero(cc.W.rows());

  const Mat PhiB = Z.U * ci.B;  // rows x m
  int row = 0;
  for (const Vec& xi : vl.vertices) {
    for (const Vec& d : dverts) {
      Vec w_vec = xi;
      Vec cst = Vec::Zero(n);
      switch (channel) {
        case Channel::StateQ: w_vec = xi + d; break;
        case Channel::InputQ: cst = ci.B * d; break;
        case Channel::Physical: cst = ci.D * d; break;
      }
      const Vec base = Z.U * (ci.A * xi + ci.f + cst);
      for (int r = 0; r < rows_per; ++r) {
        // Phi_r * B * K * w  ->  coefficients over K entries (row-major)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < n; ++b)
            cc.W(row, a * n + b) = PhiB(r, a) * w_vec[b];
        for (int a = 0; a < m; ++a) cc.W(row, m * n + a) = PhiB(r, a);
        cc.w[row] = Z.v[r] - base[r];
        ++row;
      }
    }
  }
  return cc;
}

bool confinement_constraints_satisfied(const ConfinementConstraint& cc,
                                       const Mat& K, const Vec& g,
                                       double tol) {
  const int m = static_cast<int>(K.rows());
  const int n = static_cast<int>(K.cols());
  Vec z(m * n + m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < n; ++b) z[a * n + b] = K(a, b);
  z.tail(m) = g;
  return ((cc.W * z - cc.w).array() <= tol).all();
}

bool minkowski_swap_empty(const HPolytope& M1, const HPolytope& M2,
                          const Mat& D, double delta) {
  if (M1.dim() != M2.dim())
    throw DimensionError("minkowski_swap_empty: dimension mismatch");
  const int n = M1.dim();
  const int dd = delta > 0.0 ? static_cast<int>(D.cols()) : 0;
  // x in M1, x + D d in M2, |d|_inf <= delta
  LinearProgram lp(n + dd);
  {
    Mat A = Mat::Zero(M1.rows(), n + dd);
    A.leftCols(n) = M1.U;
    lp.add_le(A, M1.v);
  }
  {
    Mat A = Mat::Zero(M2.rows(), n + dd);
    A.leftCols(n) = M2.U;
    if (dd > 0) A.rightCols(dd) = M2.U * D;
    lp.add_le(A, M2.v);
  }
  for (int l = 0; l < dd; ++l) lp.set_bounds(n + l, -delta, delta);
  const LpResult r = solve_lp(lp);
  if (r.status == LpStatus::Unbounded)
    throw SolverFailure("minkowski_swap_empty: LP unbounded");
  return r.status == LpStatus::Infeasible;
}

}  // namespace pwaq
