#include "pwaq/lp.hpp"

#include <cmath>
#include <vector>

#include "pwaq/errors.hpp"

namespace pwaq {

void LinearProgram::add_le(const Mat& M, const Vec& rhs) {
  if (M.cols() != num_vars() || M.rows() != rhs.size())
    throw DimensionError("LinearProgram::add_le: shape mismatch");
  Mat A2(A.rows() + M.rows(), num_vars());
  A2 << A, M;
  Vec b2(b.size() + rhs.size());
  b2 << b, rhs;
  A = std::move(A2);
  b = std::move(b2);
}

void LinearProgram::add_le_row(const Vec& a, double rhs) {
  add_le(a.transpose(), Vec::Constant(1, rhs));
}

void LinearProgram::add_eq(const Mat& M, const Vec& rhs) {
  if (M.cols() != num_vars() || M.rows() != rhs.size())
    throw DimensionError("LinearProgram::add_eq: shape mismatch");
  Mat A2(Aeq.rows() + M.rows(), num_vars());
  A2 << Aeq, M;
  Vec b2(beq.size() + rhs.size());
  b2 << beq, rhs;
  Aeq = std::move(A2);
  beq = std::move(b2);
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
  if (lo.size() == 0) lo = Vec::Constant(num_vars(), -kInf);
  if (hi.size() == 0) hi = Vec::Constant(num_vars(), kInf);
  lo[var] = lower;
  hi[var] = upper;
}

namespace {

// Standard-form tableau simplex on: min c'z, Az = b (b >= 0), z >= 0.
// Free variables of the original program are split z = x+ - x-.
class Tableau {
 public:
  Tableau(const Mat& A, const Vec& b, const Vec& c)
      : m_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())) {
    T_.resize(m_ + 1, n_ + 1);
    T_.topLeftCorner(m_, n_) = A;
    T_.col(n_).head(m_) = b;
    T_.row(m_).head(n_) = c.transpose();
    T_(m_, n_) = 0.0;
    basis_.resize(m_);
  }

  int m() const { return m_; }
  int n() const { return n_; }
  std::vector<int>& basis() { return basis_; }

  void price_out_basis() {
    for (int r = 0; r < m_; ++r) {
      const double cb = T_(m_, basis_[r]);
      if (cb != 0.0) T_.row(m_) -= cb * T_.row(r);
    }
  }

  double objective() const { return -T_(m_, n_); }

  // Returns LpStatus::Optimal when no improving column exists,
  // LpStatus::Unbounded on an unbounded ray. Throws past the pivot cap.
  // Columns >= banned_from never enter the basis.
  LpStatus run(double tol, int banned_from = -1) {
    const int ncols = banned_from >= 0 ? banned_from : n_;
    const long cap = 10000;
    long pivots = 0;
    bool bland = false;
    double best = objective();
    int stall = 0;
    while (true) {
      int col = -1;
      if (!bland) {
        double most = -tol;
        for (int j = 0; j < ncols; ++j)
          if (T_(m_, j) < most) {
            most = T_(m_, j);
            col = j;
          }
      } else {
        for (int j = 0; j < ncols; ++j)
          if (T_(m_, j) < -tol) {
            col = j;
            break;
          }
      }
      if (col < 0) return LpStatus::Optimal;

      int row = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double a = T_(r, col);
        if (a > 1e-11) {
          const double ratio = T_(r, n_) / a;
          if (row < 0 || ratio < best_ratio - 1e-12 ||
              (bland && std::abs(ratio - best_ratio) <= 1e-12 &&
               basis_[r] < basis_[row])) {
            row = r;
            best_ratio = ratio;
          }
        }
      }
      if (row < 0) return LpStatus::Unbounded;

      pivot(row, col);
      basis_[row] = col;
      if (++pivots > cap) throw SolverFailure("simplex: pivot limit exceeded");

      const double obj = objective();
      if (obj < best - 1e-12) {
        best = obj;
        stall = 0;
      } else if (++stall > 2 * (m_ + n_) && !bland) {
        bland = true;  // anti-cycling
      }
    }
  }

  void pivot(int row, int col) {
    T_.row(row) /= T_(row, col);
    for (int r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = T_(r, col);
      if (f != 0.0) T_.row(r) -= f * T_.row(row);
    }
  }

  double value(int r, int c) const { return T_(r, c); }

 private:
  int m_, n_;
  Mat T_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& p) {
  const int nv = p.num_vars();
  const double tol = lp_tol();
  if (p.A.cols() != nv || p.A.rows() != p.b.size() || p.Aeq.cols() != nv ||
      p.Aeq.rows() != p.beq.size())
    throw DimensionError("solve_lp: inconsistent problem dimensions");

  // Collect rows: inequalities, bounds as inequalities, then equalities.
  std::vector<Vec> rows;
  std::vector<double> rhs;
  std::vector<bool> is_eq;
  for (int r = 0; r < p.A.rows(); ++r) {
    rows.push_back(p.A.row(r));
    rhs.push_back(p.b[r]);
    is_eq.push_back(false);
  }
  if (p.lo.size() == nv) {
    for (int j = 0; j < nv; ++j) {
      if (std::isfinite(p.lo[j])) {
        Vec a = Vec::Zero(nv);
        a[j] = -1.0;
        rows.push_back(a);
        rhs.push_back(-p.lo[j]);
        is_eq.push_back(false);
      }
      if (std::isfinite(p.hi[j])) {
        Vec a = Vec::Zero(nv);
        a[j] = 1.0;
        rows.push_back(a);
        rhs.push_back(p.hi[j]);
        is_eq.push_back(false);
      }
    }
  }
  for (int r = 0; r < p.Aeq.rows(); ++r) {
    rows.push_back(p.Aeq.row(r));
    rhs.push_back(p.beq[r]);
    is_eq.push_back(true);
  }

  const int m = static_cast<int>(rows.size());
  const int n_split = 2 * nv;
  int n_slack = 0;
  for (int r = 0; r < m; ++r)
    if (!is_eq[r]) ++n_slack;

  // Count artificials: equality rows always get one; inequality rows whose
  // normalized rhs is negative lose their slack as a starting basis column.
  std::vector<double> row_sign(m, 1.0);
  std::vector<int> art_of_row(m, -1);
  int n_art = 0;
  for (int r = 0; r < m; ++r) {
    if (rhs[r] < 0) row_sign[r] = -1.0;
    if (is_eq[r] || row_sign[r] < 0) art_of_row[r] = n_art++;
  }

  const int n_total = n_split + n_slack + n_art;
  Mat A = Mat::Zero(m, n_total);
  Vec b(m);
  int slack_idx = 0;
  std::vector<int> slack_of_row(m, -1);
  for (int r = 0; r < m; ++r) {
    const double s = row_sign[r];
    for (int j = 0; j < nv; ++j) {
      A(r, j) = s * rows[r][j];
      A(r, nv + j) = -s * rows[r][j];
    }
    if (!is_eq[r]) {
      slack_of_row[r] = n_split + slack_idx;
      A(r, n_split + slack_idx) = s;  // becomes -1 when the row was negated
      ++slack_idx;
    }
    if (art_of_row[r] >= 0) A(r, n_split + n_slack + art_of_row[r]) = 1.0;
    b[r] = s * rhs[r];
  }

  // Phase 1: minimize the sum of artificials.
  if (n_art > 0) {
    Vec c1 = Vec::Zero(n_total);
    c1.tail(n_art).setOnes();
    Tableau t(A, b, c1);
    for (int r = 0; r < m; ++r)
      t.basis()[r] =
          art_of_row[r] >= 0 ? n_split + n_slack + art_of_row[r] : slack_of_row[r];
    t.price_out_basis();
    const LpStatus st = t.run(tol);
    if (st != LpStatus::Optimal || t.objective() > tol)
      return {LpStatus::Infeasible, Vec(), 0.0};

    // Drive remaining artificials out of the basis, then drop them.
    for (int r = 0; r < m; ++r) {
      if (t.basis()[r] >= n_split + n_slack) {
        int col = -1;
        for (int j = 0; j < n_split + n_slack; ++j)
          if (std::abs(t.value(r, j)) > 1e-9) {
            col = j;
            break;
          }
        if (col >= 0) {
          t.pivot(r, col);
          t.basis()[r] = col;
        }
        // A row with no eligible column is redundant; its artificial stays
        // basic at value ~0 and never re-enters (cost below keeps it at 0).
      }
    }

    // Phase 2 on the phase-1 tableau: rebuild with the true objective.
    Mat A2(m, n_total);
    Vec b2(m);
    for (int r = 0; r < m; ++r) {
      for (int j = 0; j < n_total; ++j) A2(r, j) = t.value(r, j);
      b2[r] = t.value(r, n_total);
    }
    Vec c2 = Vec::Zero(n_total);
    c2.head(nv) = p.c;
    c2.segment(nv, nv) = -p.c;
    Tableau t2(A2, b2, c2);
    t2.basis() = t.basis();
    t2.price_out_basis();
    // Artificial columns are banned from entering; basic ones from redundant
    // rows stay parked at zero.
    const LpStatus st2 = t2.run(tol, /*banned_from=*/n_split + n_slack);
    if (st2 == LpStatus::Unbounded) return {LpStatus::Unbounded, Vec(), 0.0};
    Vec x = Vec::Zero(nv);
    for (int r = 0; r < m; ++r) {
      const int bcol = t2.basis()[r];
      if (bcol < nv)
        x[bcol] += t2.value(r, n_total);
      else if (bcol < n_split)
        x[bcol - nv] -= t2.value(r, n_total);
    }
    return {LpStatus::Optimal, x, p.c.dot(x)};
  }

  // No artificials needed: slacks form the starting basis.
  Vec c0 = Vec::Zero(n_total);
  c0.head(nv) = p.c;
  c0.segment(nv, nv) = -p.c;
  Tableau t(A, b, c0);
  for (int r = 0; r < m; ++r) t.basis()[r] = slack_of_row[r];
  t.price_out_basis();
  const LpStatus st = t.run(tol);
  if (st == LpStatus::Unbounded) return {LpStatus::Unbounded, Vec(), 0.0};
  Vec x = Vec::Zero(nv);
  for (int r = 0; r < m; ++r) {
    const int bcol = t.basis()[r];
    if (bcol < nv)
      x[bcol] += t.value(r, n_total);
    else if (bcol < n_split)
      x[bcol - nv] -= t.value(r, n_total);
  }
  return {LpStatus::Optimal, x, p.c.dot(x)};
}

}  // namespace pwaq
