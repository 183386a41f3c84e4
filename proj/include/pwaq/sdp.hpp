#ifndef PWAQ_SDP_HPP
#define PWAQ_SDP_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pwaq/linalg.hpp"

namespace pwaq {

/// Handle to a symmetric matrix variable: entries (a,b), a<=b, are scalar
/// decision variables; the flat index of (a,b) is offset + tri(a,b).
struct SymVar {
  int offset = -1;
  int n = 0;

  int index(int a, int b) const {
    if (a > b) std::swap(a, b);
    // row-major upper triangle
    return offset + a * n - a * (a - 1) / 2 + (b - a);
  }
  int count() const { return n * (n + 1) / 2; }
};

/// Affine symmetric matrix expression F0 + sum_k y_k * Fk of fixed size.
class MatExpr {
 public:
  explicit MatExpr(int size) : k_(size), constant_(Mat::Zero(size, size)) {}

  int size() const { return k_; }
  const Mat& constant() const { return constant_; }
  const std::map<int, Mat>& coeffs() const { return coeffs_; }

  void add_constant(const Mat& M) { constant_ += M; }
  /// Place M with its top-left corner at (r0, c0); the mirror transpose is
  /// added at (c0, r0) unless the placement is on the diagonal, where M must
  /// already be symmetric.
  void add_constant_at(int r0, int c0, const Mat& M);
  void add_coeff(int var, const Mat& M);
  void add_coeff_at(int var, int r0, int c0, const Mat& M);
  /// Term L * P * R for a symmetric matrix variable P, placed at (r0, c0)
  /// (mirrored as above). L is rxP.n, R is P.n x c.
  void add_sym_product_at(const SymVar& P, int r0, int c0, const Mat& L,
                          const Mat& R);

  Mat eval(const Vec& y) const;

 private:
  int k_;
  Mat constant_;
  std::map<int, Mat> coeffs_;
};

enum class SdpStatus { Optimal, Infeasible };

struct SdpResult {
  SdpStatus status = SdpStatus::Infeasible;
  Vec y;
  double objective = 0.0;
  double feas_margin = 0.0;  // best lower bound on min block eigenvalue seen
  int newton_steps = 0;

  Mat sym_value(const SymVar& P) const;
};

struct SdpOptions {
  double var_box = 1e6;      // |y_j| <= var_box, keeps the barrier compact
  double mu_min = 1e-9;
  double mu_factor = 0.15;
  double mu_warm = 1e-2;     // starting mu when a strictly interior warm
                             // start is supplied
  double feas_tol = 1e-7;    // margin below which the problem is infeasible
  double feas_target = 1e-3; // phase-1 early exit margin
  int max_newton = 200;      // per phase
};

/// Small dense semidefinite programs: minimize c'y subject to affine PSD
/// blocks and scalar bounds/inequalities, solved by a log-det barrier with
/// a max-margin phase 1. Strict inequalities must be pre-shifted by the
/// caller (fold eps_psd * I into the block).
class SdpProblem {
 public:
  int num_vars() const { return nvars_; }

  SymVar add_sym_var(int n, const std::string& name = "");
  int add_scalar_var(const std::string& name = "", bool nonneg = false);

  void add_psd_block(const MatExpr& e);
  /// sum_j a_j y_j <= rhs
  void add_linear_ineq(const std::vector<std::pair<int, double>>& terms,
                       double rhs);
  /// minimize sum_j c_j y_j
  void set_objective(const std::vector<std::pair<int, double>>& terms);
  void clear_objective();

  /// Objective coefficients for trace(Theta * P), Theta symmetric.
  static std::vector<std::pair<int, double>> trace_terms(const SymVar& P,
                                                         const Mat& Theta);

  SdpResult solve(const SdpOptions& opt = {}) const;
  /// Re-solve reusing a known strictly feasible y (e.g. a previous iterate).
  SdpResult solve_warm(const Vec& y0, const SdpOptions& opt = {}) const;

 private:
  struct Block {
    int k;
    Mat F0;
    std::vector<std::pair<int, Mat>> terms;
  };

  SdpResult run(const Vec* warm, const SdpOptions& opt) const;

  int nvars_ = 0;
  std::vector<Block> blocks_;
  std::vector<int> nonneg_vars_;
  Vec objective_ = Vec(0);
};

}  // namespace pwaq

#endif
