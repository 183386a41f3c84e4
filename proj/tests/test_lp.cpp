#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pwaq/errors.hpp"
#include "pwaq/lp.hpp"

using namespace pwaq;

TEST_CASE("min x subject to x >= 1") {
  LinearProgram p(1);
  p.c = Vec::Constant(1, 1.0);
  p.add_le_row(Vec::Constant(1, -1.0), -1.0);  // -x <= -1
  const LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible: x <= 1 and x >= 2") {
  LinearProgram p(1);
  p.add_le_row(Vec::Constant(1, 1.0), 1.0);
  p.add_le_row(Vec::Constant(1, -1.0), -2.0);
  CHECK(solve_lp(p).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded: min x, no constraints below") {
  LinearProgram p(1);
  p.c = Vec::Constant(1, 1.0);
  p.add_le_row(Vec::Constant(1, 1.0), 5.0);  // x <= 5 only
  CHECK(solve_lp(p).status == LpStatus::Unbounded);
}

TEST_CASE("chebyshev LP of the unit square: delta = 1, center 0") {
  // vars [xi1, xi2, delta], vertices (+-1, +-1)
  LinearProgram p(3);
  p.c = Vec::Zero(3);
  p.c[2] = 1.0;
  const double vs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (const auto& v : vs) {
    for (int l = 0; l < 2; ++l) {
      Vec a = Vec::Zero(3);
      a[l] = 1.0;
      a[2] = -1.0;
      p.add_le_row(a, v[l]);
      a[l] = -1.0;
      p.add_le_row(a, -v[l]);
    }
  }
  p.set_bounds(2, 0.0, kInf);
  const LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(r.x[0]) < 1e-7);
  CHECK(std::abs(r.x[1]) < 1e-7);
}

TEST_CASE("equality rows") {
  // min x + y s.t. x + y = 2, x >= 0, y >= 0 -> objective 2
  LinearProgram p(2);
  p.c = Vec::Constant(2, 1.0);
  p.add_eq(Mat::Constant(1, 2, 1.0), Vec::Constant(1, 2.0));
  p.set_bounds(0, 0.0, kInf);
  p.set_bounds(1, 0.0, kInf);
  const LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("optimal points satisfy constraints") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = n + 1 + static_cast<int>(rng() % 4);
    LinearProgram p(n);
    for (int i = 0; i < n; ++i) p.c[i] = u(rng);
    Mat A(m, n);
    Vec x0(n);
    for (int i = 0; i < n; ++i) x0[i] = u(rng);
    Vec b(m);
    for (int r = 0; r < m; ++r) {
      for (int j = 0; j < n; ++j) A(r, j) = u(rng);
      b[r] = A.row(r).dot(x0) + 0.1 + 0.5 * std::abs(u(rng));
    }
    p.add_le(A, b);
    for (int j = 0; j < n; ++j) p.set_bounds(j, -10.0, 10.0);
    const LpResult r = solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(((A * r.x - b).array() <= 1e-7).all());
    CHECK(r.objective == doctest::Approx(p.c.dot(r.x)).epsilon(1e-12));
  }
}

TEST_CASE("duality gap on random feasible bounded instances") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const int m = n + 2;
    Mat A(m + 2 * n, n);
    Vec b(m + 2 * n);
    Vec x0(n), c(n);
    for (int i = 0; i < n; ++i) {
      x0[i] = u(rng);
      c[i] = u(rng);
    }
    for (int r = 0; r < m; ++r) {
      for (int j = 0; j < n; ++j) A(r, j) = u(rng);
      b[r] = A.row(r).dot(x0) + 0.2 + std::abs(u(rng));
    }
    // box rows keep the primal bounded
    for (int j = 0; j < n; ++j) {
      A.row(m + 2 * j).setZero();
      A(m + 2 * j, j) = 1.0;
      b[m + 2 * j] = 10.0;
      A.row(m + 2 * j + 1).setZero();
      A(m + 2 * j + 1, j) = -1.0;
      b[m + 2 * j + 1] = 10.0;
    }
    LinearProgram prim(n);
    prim.c = c;
    prim.add_le(A, b);
    const LpResult rp = solve_lp(prim);
    REQUIRE(rp.status == LpStatus::Optimal);

    // dual: max -b'y s.t. A'y = -c, y >= 0
    const int M = static_cast<int>(A.rows());
    LinearProgram dual(M);
    dual.c = b;  // minimize b'y == maximize -b'y
    dual.add_eq(A.transpose(), -c);
    for (int j = 0; j < M; ++j) dual.set_bounds(j, 0.0, kInf);
    const LpResult rd = solve_lp(dual);
    REQUIRE(rd.status == LpStatus::Optimal);
    const double primal = rp.objective;
    const double dual_val = -rd.objective;
    CHECK(primal >= dual_val - 1e-6);
    CHECK(std::abs(primal - dual_val) <= 1e-6 * (1.0 + std::abs(primal)));
  }
}

TEST_CASE("Farkas certificate exists for infeasible systems") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int found = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2;
    Mat A(4, n);
    Vec b(4);
    for (int r = 0; r < 4; ++r) {
      for (int j = 0; j < n; ++j) A(r, j) = u(rng);
      b[r] = u(rng);
    }
    // Force contradiction: a'x <= beta and -a'x <= -beta - gap
    A.row(2) = -A.row(0);
    b[2] = -b[0] - (0.5 + std::abs(u(rng)));
    LinearProgram p(n);
    p.add_le(A, b);
    if (solve_lp(p).status != LpStatus::Infeasible) continue;
    ++found;
    // alternative system: y >= 0, A'y = 0, b'y <= -1
    LinearProgram alt(4);
    alt.add_eq(A.transpose(), Vec::Zero(n));
    alt.add_le_row(b, -1.0);
    for (int j = 0; j < 4; ++j) alt.set_bounds(j, 0.0, kInf);
    CHECK(solve_lp(alt).status == LpStatus::Optimal);
  }
  CHECK(found >= 20);
}
