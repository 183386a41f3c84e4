#ifndef PWAQ_LP_HPP
#define PWAQ_LP_HPP

#include <limits>

#include "pwaq/linalg.hpp"

namespace pwaq {

/// Dense linear program: minimize c'x subject to A x <= b, Aeq x = beq,
/// lo <= x <= hi. Variables are free unless bounds are given.
struct LinearProgram {
  Vec c;
  Mat A;
  Vec b;
  Mat Aeq;   // zero rows when absent
  Vec beq;
  Vec lo;    // empty or per-variable (-inf allowed)
  Vec hi;    // empty or per-variable (+inf allowed)

  explicit LinearProgram(int nvars)
      : c(Vec::Zero(nvars)),
        A(0, nvars),
        b(0),
        Aeq(0, nvars),
        beq(0) {}

  int num_vars() const { return static_cast<int>(c.size()); }

  /// Append inequality rows M x <= rhs.
  void add_le(const Mat& M, const Vec& rhs);
  /// Append a single row a'x <= rhs.
  void add_le_row(const Vec& a, double rhs);
  /// Append equality rows M x = rhs.
  void add_eq(const Mat& M, const Vec& rhs);
  /// Set bounds for one variable (use +-inf for one-sided).
  void set_bounds(int var, double lower, double upper);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status;
  Vec x;             // meaningful when Optimal
  double objective;  // c'x when Optimal
};

/// Two-phase dense simplex (Dantzig pricing, Bland fallback after a stall).
/// Classification tolerance comes from lp_tol(). Throws SolverFailure past
/// the pivot limit.
LpResult solve_lp(const LinearProgram& p);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace pwaq

#endif
