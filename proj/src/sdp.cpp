#include "pwaq/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwaq/errors.hpp"

namespace pwaq {

void MatExpr::add_constant_at(int r0, int c0, const Mat& M) {
  const int r = static_cast<int>(M.rows()), c = static_cast<int>(M.cols());
  constant_.block(r0, c0, r, c) += M;
  if (r0 != c0) {
    constant_.block(c0, r0, c, r) += M.transpose();
  } else if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DimensionError("MatExpr: diagonal placement requires symmetric M");
  }
}

void MatExpr::add_coeff(int var, const Mat& M) {
  auto it = coeffs_.find(var);
  if (it == coeffs_.end())
    coeffs_.emplace(var, M);
  else
    it->second += M;
}

void MatExpr::add_coeff_at(int var, int r0, int c0, const Mat& M) {
  Mat F = Mat::Zero(k_, k_);
  F.block(r0, c0, M.rows(), M.cols()) += M;
  if (r0 != c0) F.block(c0, r0, M.cols(), M.rows()) += M.transpose();
  add_coeff(var, F);
}

void MatExpr::add_sym_product_at(const SymVar& P, int r0, int c0, const Mat& L,
                                 const Mat& R) {
  const int n = P.n;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      // d(L P R)/dP_ab with P symmetric
      Mat dM = L.col(a) * R.row(b);
      if (a != b) dM += L.col(b) * R.row(a);
      add_coeff_at(P.index(a, b), r0, c0, dM);
    }
}

Mat MatExpr::eval(const Vec& y) const {
  Mat S = constant_;
  for (const auto& [var, F] : coeffs_) S += y[var] * F;
  return S;
}

Mat SdpResult::sym_value(const SymVar& P) const {
  Mat M(P.n, P.n);
  for (int a = 0; a < P.n; ++a)
    for (int b = a; b < P.n; ++b) M(a, b) = M(b, a) = y[P.index(a, b)];
  return M;
}

SymVar SdpProblem::add_sym_var(int n, const std::string&) {
  SymVar v;
  v.offset = nvars_;
  v.n = n;
  nvars_ += v.count();
  return v;
}

int SdpProblem::add_scalar_var(const std::string&, bool nonneg) {
  const int idx = nvars_++;
  if (nonneg) nonneg_vars_.push_back(idx);
  return idx;
}

void SdpProblem::add_psd_block(const MatExpr& e) {
  Block b;
  b.k = e.size();
  b.F0 = 0.5 * (e.constant() + e.constant().transpose());
  for (const auto& [var, F] : e.coeffs()) {
    Mat Fs = 0.5 * (F + F.transpose());
    if (Fs.cwiseAbs().maxCoeff() == 0.0) continue;
    b.terms.emplace_back(var, std::move(Fs));
  }
  blocks_.push_back(std::move(b));
}

void SdpProblem::add_linear_ineq(
    const std::vector<std::pair<int, double>>& terms, double rhs) {
  // rhs - a'y >= 0 as a 1x1 block
  Block b;
  b.k = 1;
  b.F0 = Mat::Constant(1, 1, rhs);
  for (const auto& [var, a] : terms)
    if (a != 0.0) b.terms.emplace_back(var, Mat::Constant(1, 1, -a));
  blocks_.push_back(std::move(b));
}

void SdpProblem::set_objective(
    const std::vector<std::pair<int, double>>& terms) {
  objective_ = Vec::Zero(nvars_);
  for (const auto& [var, c] : terms) objective_[var] += c;
}

void SdpProblem::clear_objective() { objective_ = Vec(0); }

std::vector<std::pair<int, double>> SdpProblem::trace_terms(const SymVar& P,
                                                            const Mat& Theta) {
  std::vector<std::pair<int, double>> out;
  for (int a = 0; a < P.n; ++a)
    for (int b = a; b < P.n; ++b)
      out.emplace_back(P.index(a, b),
                       a == b ? Theta(a, a) : Theta(a, b) + Theta(b, a));
  return out;
}

namespace {

constexpr double kHuge = std::numeric_limits<double>::infinity();

struct WorkBlock {
  int k = 1;
  Mat F0;
  std::vector<std::pair<int, Mat>> terms;
  // scratch
  Mat S;
  Mat Sinv;
  std::vector<Mat> G;
};

Mat eval_block(const WorkBlock& b, const Vec& y) {
  Mat S = b.F0;
  for (const auto& [var, F] : b.terms) S += y[var] * F;
  return S;
}

bool all_blocks_pd(const std::vector<WorkBlock>& blocks, const Vec& y) {
  for (const auto& b : blocks) {
    if (b.k == 1) {
      double s = b.F0(0, 0);
      for (const auto& [var, F] : b.terms) s += y[var] * F(0, 0);
      if (!(s > 0.0)) return false;
      continue;
    }
    const Mat S = eval_block(b, y);
    Eigen::LLT<Mat> llt(S);
    if (llt.info() != Eigen::Success) return false;
    if ((llt.matrixL().toDenseMatrix().diagonal().array() <= 0.0).any())
      return false;
  }
  return true;
}

// -sum_b logdet(S_b(y)); sets *ok=false when y is not strictly feasible.
double barrier_value(const std::vector<WorkBlock>& blocks, const Vec& y,
                     bool* ok) {
  double val = 0.0;
  for (const auto& b : blocks) {
    if (b.k == 1) {
      double s = b.F0(0, 0);
      for (const auto& [var, F] : b.terms) s += y[var] * F(0, 0);
      if (!(s > 0.0)) {
        *ok = false;
        return 0.0;
      }
      val -= std::log(s);
      continue;
    }
    const Mat S = eval_block(b, y);
    Eigen::LLT<Mat> llt(S);
    if (llt.info() != Eigen::Success) {
      *ok = false;
      return 0.0;
    }
    const Vec diag = llt.matrixL().toDenseMatrix().diagonal();
    if ((diag.array() <= 0.0).any()) {
      *ok = false;
      return 0.0;
    }
    val -= 2.0 * diag.array().log().sum();
  }
  *ok = true;
  return val;
}

// Damped Newton minimization of c'y/mu - sum logdet(S_b(y)).
// Returns on Newton decrement below stop_dec, budget exhaustion (false),
// or early_exit(y) turning true after a step.
template <typename EarlyExit>
bool center(std::vector<WorkBlock>& blocks, Vec& y, const Vec& c, double mu,
            int& budget, double stop_dec, EarlyExit early_exit) {
  const int N = static_cast<int>(y.size());
  int stagnant = 0;
  for (;;) {
    if (budget <= 0) return false;
    --budget;
    Vec grad = c / mu;
    Mat H = Mat::Zero(N, N);
    for (auto& b : blocks) {
      if (b.k == 1) {
        double s = b.F0(0, 0);
        for (const auto& [var, F] : b.terms) s += y[var] * F(0, 0);
        if (!(s > 0.0))
          throw SolverFailure("sdp: iterate left the cone interior");
        for (size_t i = 0; i < b.terms.size(); ++i) {
          const double ai = b.terms[i].second(0, 0);
          grad[b.terms[i].first] -= ai / s;
          for (size_t j = i; j < b.terms.size(); ++j) {
            const double aj = b.terms[j].second(0, 0);
            const double h = ai * aj / (s * s);
            H(b.terms[i].first, b.terms[j].first) += h;
            if (i != j) H(b.terms[j].first, b.terms[i].first) += h;
          }
        }
        continue;
      }
      b.S = eval_block(b, y);
      Eigen::LLT<Mat> llt(b.S);
      if (llt.info() != Eigen::Success)
        throw SolverFailure("sdp: iterate left the cone interior");
      b.Sinv = llt.solve(Mat::Identity(b.k, b.k));
      b.G.resize(b.terms.size());
      for (size_t i = 0; i < b.terms.size(); ++i) {
        b.G[i] = b.Sinv * b.terms[i].second;
        grad[b.terms[i].first] -= b.G[i].trace();
      }
      for (size_t i = 0; i < b.terms.size(); ++i)
        for (size_t j = i; j < b.terms.size(); ++j) {
          const double h = (b.G[i] * b.G[j]).trace();
          H(b.terms[i].first, b.terms[j].first) += h;
          if (i != j) H(b.terms[j].first, b.terms[i].first) += h;
        }
    }

    Vec d;
    double reg = 0.0;
    for (int attempt = 0;; ++attempt) {
      Mat Hr = H;
      if (reg > 0) Hr.diagonal().array() += reg;
      Eigen::LDLT<Mat> ldlt(Hr);
      d = ldlt.solve(-grad);
      if (ldlt.info() == Eigen::Success && d.allFinite() && grad.dot(d) <= 0)
        break;
      reg = reg == 0 ? 1e-10 : reg * 100;
      if (attempt > 10) throw SolverFailure("sdp: Newton system unsolvable");
    }

    const double decrement = -grad.dot(d);
    if (decrement <= stop_dec) return true;

    bool ok = false;
    const double phi0 = y.dot(c) / mu + barrier_value(blocks, y, &ok);
    if (!ok) throw SolverFailure("sdp: current point infeasible");
    double alpha = 1.0;
    bool moved = false;
    double achieved = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      Vec yt = y + alpha * d;
      if (all_blocks_pd(blocks, yt)) {
        bool pd = false;
        const double phit = yt.dot(c) / mu + barrier_value(blocks, yt, &pd);
        if (pd && phit <= phi0 - 1e-4 * alpha * decrement) {
          y = yt;
          moved = true;
          achieved = phi0 - phit;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!moved) return true;  // fp precision floor; accept the point
    if (achieved <= 1e-12 * (1.0 + std::abs(phi0))) {
      if (++stagnant >= 2) return true;
    } else {
      stagnant = 0;
    }
    if (early_exit(y)) return true;
  }
}

}  // namespace

SdpResult SdpProblem::solve(const SdpOptions& opt) const {
  return run(nullptr, opt);
}

SdpResult SdpProblem::solve_warm(const Vec& y0, const SdpOptions& opt) const {
  return run(&y0, opt);
}

SdpResult SdpProblem::run(const Vec* warm, const SdpOptions& opt) const {
  const int N = nvars_;
  SdpResult out;

  std::vector<WorkBlock> blocks;
  blocks.reserve(blocks_.size() + nonneg_vars_.size() + 2 * N);
  double nu = 0.0;
  for (const auto& b : blocks_) {
    WorkBlock w;
    w.k = b.k;
    w.F0 = b.F0;
    w.terms = b.terms;
    blocks.push_back(std::move(w));
    nu += b.k;
  }
  for (int v : nonneg_vars_) {
    WorkBlock w;
    w.F0 = Mat::Zero(1, 1);
    w.terms.emplace_back(v, Mat::Constant(1, 1, 1.0));
    blocks.push_back(std::move(w));
    nu += 1;
  }
  for (int j = 0; j < N; ++j) {
    WorkBlock wl, wh;
    wl.F0 = Mat::Constant(1, 1, opt.var_box);
    wl.terms.emplace_back(j, Mat::Constant(1, 1, 1.0));
    wh.F0 = Mat::Constant(1, 1, opt.var_box);
    wh.terms.emplace_back(j, Mat::Constant(1, 1, -1.0));
    blocks.push_back(std::move(wl));
    blocks.push_back(std::move(wh));
    nu += 2;
  }

  const Vec cobj = objective_.size() == N ? objective_ : Vec::Zero(N);

  Vec y = warm ? *warm : Vec::Zero(N);
  if (y.size() != N) throw DimensionError("sdp: warm start size mismatch");

  double margin0 = kHuge;
  for (const auto& b : blocks) {
    const Mat S = eval_block(b, y);
    margin0 = std::min(margin0, b.k == 1 ? S(0, 0) : sym_eig_min(S));
  }
  out.feas_margin = margin0;
  const bool interior = margin0 > 0 && all_blocks_pd(blocks, y);

  // ---- Phase 1: maximize the uniform margin t, S_b(y) - t I >= 0. ----
  // Skipped when the start is already strictly interior.
  if (!interior) {
    std::vector<WorkBlock> p1 = blocks;
    for (auto& b : p1) b.terms.emplace_back(N, -Mat::Identity(b.k, b.k));
    WorkBlock cap;  // t <= 1
    cap.F0 = Mat::Constant(1, 1, 1.0);
    cap.terms.emplace_back(N, Mat::Constant(1, 1, -1.0));
    p1.push_back(std::move(cap));
    const double nu1 = nu + 1;

    Vec yt(N + 1);
    yt.head(N) = y;
    yt[N] = margin0 - std::max(1.0, 0.1 * std::abs(margin0));
    Vec c1 = Vec::Zero(N + 1);
    c1[N] = -1.0;

    int budget = opt.max_newton;
    double mu = std::max(1.0, std::abs(margin0));
    bool feasible = false;
    for (;;) {
      const double stop_dec = std::max(1e-10, 1e-3 * mu);
      const bool centered =
          center(p1, yt, c1, mu, budget, stop_dec,
                 [&](const Vec& z) { return z[N] >= opt.feas_target; });
      if (yt[N] >= opt.feas_target) {
        feasible = true;
        break;
      }
      if (!centered) {  // budget exhausted
        feasible = yt[N] > opt.feas_tol;
        break;
      }
      if (yt[N] + nu1 * mu < opt.feas_tol) {
        feasible = false;
        break;
      }
      if (mu <= 1e-12) {
        feasible = yt[N] > opt.feas_tol;
        break;
      }
      mu *= opt.mu_factor;
    }
    out.feas_margin = yt[N];
    out.newton_steps = opt.max_newton - budget;
    if (!feasible) {
      out.status = SdpStatus::Infeasible;
      out.y = Vec::Zero(N);
      return out;
    }
    y = yt.head(N);
  }

  // ---- Phase 2: central path for the true objective. ----
  if (cobj.cwiseAbs().maxCoeff() == 0.0) {
    out.status = SdpStatus::Optimal;
    out.y = y;
    out.objective = 0.0;
    return out;
  }

  int budget = opt.max_newton;
  auto no_exit = [](const Vec&) { return false; };
  double mu = warm && interior
                  ? opt.mu_warm
                  : std::max(1.0, std::abs(cobj.dot(y)) / std::max(1.0, nu));
  while (mu > opt.mu_min) {
    if (!center(blocks, y, cobj, mu, budget, std::max(1e-10, 1e-3 * mu),
                no_exit))
      throw SolverFailure("sdp: Newton step limit exceeded");
    mu *= opt.mu_factor;
  }
  if (!center(blocks, y, cobj, opt.mu_min, budget, 1e-10, no_exit))
    throw SolverFailure("sdp: Newton step limit exceeded");

  out.status = SdpStatus::Optimal;
  out.y = y;
  out.objective = cobj.dot(y);
  out.newton_steps += opt.max_newton - budget;
  return out;
}

}  // namespace pwaq
