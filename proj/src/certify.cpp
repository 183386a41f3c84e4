#include "pwaq/certify.hpp"

#include <algorithm>
#include <cmath>

#include "pwaq/errors.hpp"
#include "pwaq/reach.hpp"
#include "pwaq/sdp.hpp"

namespace pwaq {

double PwqCertificate::value_cell(int i, const Vec& x) const {
  if (P[i].rows() == x.size()) return x.dot(P[i] * x);
  Vec y(x.size() + 1);
  y << x, 1.0;
  return y.dot(P[i] * y);
}

double lyapunov_value(const PwqCertificate& cert, const PwaSystem& sys,
                      const Vec& x) {
  return cert.value_cell(mode_of(sys, x), x);
}

Mat homogeneous_cone_rows(const HPolytope& X) {
  std::vector<int> rows;
  for (int r = 0; r < X.rows(); ++r)
    if (std::abs(X.v[r]) <= 1e-12) rows.push_back(r);
  Mat E(static_cast<int>(rows.size()), X.dim());
  for (size_t k = 0; k < rows.size(); ++k)
    E.row(static_cast<int>(k)) = -X.U.row(rows[k]);
  return E;
}

namespace {

struct PairForms {
  Mat W0;    // constant part of the decrease matrix at gamma = 0
  Mat J;     // coefficient of -gamma (identity or diag(I, 0))
  Mat E;     // S-procedure rows (may have zero rows)
};

PairForms build_pair_forms(const PwaSystem& sys, const AffineController& ctrl,
                           const std::vector<Mat>& P_set, int i, int j) {
  const int n = sys.state_dim;
  const Mat Abar = closed_loop_A(sys, ctrl, i);
  const Vec fbar = closed_loop_f(sys, ctrl, i);
  const bool aug_i = P_set[i].rows() == n + 1;
  const bool aug_j = P_set[j].rows() == n + 1;
  const bool affine = fbar.lpNorm<Eigen::Infinity>() > 1e-12;

  PairForms out;
  if (!aug_i && !aug_j && !affine) {
    out.W0 = P_set[i] - Abar.transpose() * P_set[j] * Abar;
    out.J = Mat::Identity(n, n);
    out.E = homogeneous_cone_rows(sys.cells[i].region);
    return out;
  }

  // Augmented route over y = [x; 1].
  Mat Ni = Mat::Zero(n + 1, n + 1);
  if (aug_i)
    Ni = P_set[i];
  else
    Ni.topLeftCorner(n, n) = P_set[i];

  Mat T(n + 1, n + 1);
  if (aug_j) {
    Mat G = Mat::Zero(n + 1, n + 1);
    G.topLeftCorner(n, n) = Abar;
    G.block(0, n, n, 1) = fbar;
    G(n, n) = 1.0;
    T = G.transpose() * P_set[j] * G;
  } else {
    Mat G(n, n + 1);
    G.leftCols(n) = Abar;
    G.col(n) = fbar;
    T = G.transpose() * P_set[j] * G;
  }

  out.W0 = Ni - T;
  out.J = Mat::Zero(n + 1, n + 1);
  out.J.topLeftCorner(n, n) = Mat::Identity(n, n);

  const HPolytope& X = sys.cells[i].region;
  Mat E(X.rows() + 1, n + 1);
  E.topLeftCorner(X.rows(), n) = -X.U;
  E.block(0, n, X.rows(), 1) = X.v;
  E.row(X.rows()).setZero();
  E(X.rows(), n) = 1.0;
  out.E = E;
  return out;
}

// Is  W0 - gamma J - E' M E >= 0  feasible for some elementwise-nonnegative
// symmetric M?
bool sproc_feasible(const PairForms& f, double gamma) {
  const Mat W = f.W0 - gamma * f.J;
  if (f.E.rows() == 0) return sym_eig_min(W) >= -1e-9;
  SdpProblem sdp;
  const SymVar M = sdp.add_sym_var(static_cast<int>(f.E.rows()));
  for (int a = 0; a < M.n; ++a)
    for (int b = a; b < M.n; ++b)
      sdp.add_linear_ineq({{M.index(a, b), -1.0}}, 0.0);
  MatExpr e(static_cast<int>(W.rows()));
  e.add_constant(W);
  e.add_sym_product_at(M, 0, 0, -f.E.transpose(), f.E);
  sdp.add_psd_block(e);
  return sdp.solve().status == SdpStatus::Optimal;
}

double pair_gamma(const PwaSystem& sys, const AffineController& ctrl,
                  const std::vector<Mat>& P_set, int i, int j,
                  bool* valid_at_zero) {
  const PairForms f = build_pair_forms(sys, ctrl, P_set, i, j);
  if (!sproc_feasible(f, 0.0)) {
    *valid_at_zero = false;
    return 0.0;
  }
  *valid_at_zero = true;
  const int n = sys.state_dim;
  double hi = sym_eig_min(P_set[i].topLeftCorner(n, n));
  if (hi <= 0) return 0.0;
  if (sproc_feasible(f, hi)) return hi;
  double lo = 0.0;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sproc_feasible(f, mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

double certify_pair_gamma(const PwaSystem& sys, const AffineController& ctrl,
                          const std::vector<Mat>& P_set, int i, int j) {
  bool ok = false;
  const double g = pair_gamma(sys, ctrl, P_set, i, j, &ok);
  if (!ok)
    throw CertificateInvalid(i, j, "decrease inequality infeasible for pair (" +
                                       std::to_string(i + 1) + "," +
                                       std::to_string(j + 1) + ")");
  return g;
}

PwqCertificate verify_certificate(const PwaSystem& sys,
                                  const AffineController& ctrl,
                                  const std::vector<Mat>& P_set,
                                  const std::vector<std::vector<int>>& succ_map,
                                  Channel channel, double delta) {
  const int n = sys.state_dim;
  const int s = sys.num_cells();
  if (static_cast<int>(P_set.size()) != s ||
      static_cast<int>(succ_map.size()) != s)
    throw DimensionError("verify_certificate: one P and one successor row per cell");
  for (int i = 0; i < s; ++i) {
    if ((P_set[i].rows() != n && P_set[i].rows() != n + 1) ||
        P_set[i].rows() != P_set[i].cols())
      throw DimensionError("verify_certificate: P size must be n or n+1");
    if ((P_set[i] - P_set[i].transpose()).cwiseAbs().maxCoeff() > 1e-9)
      throw ValidationError("verify_certificate: P must be symmetric");
  }

  PwqCertificate cert;
  cert.P = P_set;
  cert.state_dim = n;
  cert.succ_map = succ_map;

  const double inf = std::numeric_limits<double>::infinity();
  double alpha = inf, beta = -inf;
  for (int i = 0; i < s; ++i) {
    const Mat Q = P_set[i].topLeftCorner(n, n);
    const double lo = sym_eig_min(Q), hi = sym_eig_max(Q);
    if (lo <= 0)
      throw CertificateInvalid(i, -1, "quadratic part of cell " +
                                          std::to_string(i + 1) +
                                          " is not positive definite");
    alpha = std::min(alpha, lo);
    beta = std::max(beta, hi);
  }
  cert.alpha = alpha;
  cert.beta = beta;

  // The declared map must cover the recomputed exact successor sets.
  for (int i = 0; i < s; ++i) {
    const SuccessorSet sb = successors_exact(sys, ctrl, i, delta, channel);
    for (int j : sb.successors)
      if (std::find(succ_map[i].begin(), succ_map[i].end(), j) ==
          succ_map[i].end())
        throw CertificateInvalid(
            i, j, "successor map misses reachable pair (" +
                      std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  }

  cert.gamma = Vec::Zero(s);
  for (int i = 0; i < s; ++i) {
    double gi = inf;
    for (int j : succ_map[i]) {
      bool ok = false;
      const double g = pair_gamma(sys, ctrl, P_set, i, j, &ok);
      if (!ok)
        throw CertificateInvalid(
            i, j, "decrease inequality infeasible for pair (" +
                      std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      gi = std::min(gi, g);
    }
    if (succ_map[i].empty()) gi = 0.0;
    if (gi <= 1e-9)
      throw CertificateInvalid(i, -1, "no positive decrease rate for cell " +
                                          std::to_string(i + 1));
    cert.gamma[i] = gi;
  }
  return cert;
}

namespace {

double norm2(const Vec& v) { return v.norm(); }

struct PairData {
  Mat Q;
  Vec h;
};

PairData pair_data(const PwqCertificate& cert, const PwaSystem& sys,
                   const AffineController& ctrl, int i, int j) {
  const int n = sys.state_dim;
  const Vec fbar = closed_loop_f(sys, ctrl, i);
  PairData out;
  if (cert.P[j].rows() == n) {
    out.Q = cert.P[j];
    out.h = cert.P[j] * fbar;
  } else {
    out.Q = cert.P[j].topLeftCorner(n, n);
    out.h = out.Q * fbar + cert.P[j].block(0, n, n, 1);
  }
  return out;
}

StabilityConstants constants_impl(const PwqCertificate& cert,
                                  const PwaSystem& sys,
                                  const AffineController& ctrl,
                                  const UniformQuantizer& quant, double eps,
                                  double delta_param, QuantizationMode mode) {
  if (!(eps > 0 && eps < 1) || !(delta_param > 0 && delta_param < 1))
    throw ValidationError("constants: eps_ij and delta_ij must lie in (0,1)");
  if (!(quant.delta > 0))
    throw ValidationError("constants: quantization level Delta must be positive");
  const int s = sys.num_cells();
  const double dim_factor = mode == QuantizationMode::Input
                                ? static_cast<double>(sys.input_dim)
                                : static_cast<double>(sys.state_dim);

  StabilityConstants out;
  out.mode = mode;
  out.eps = eps;
  out.delta_param = delta_param;
  out.alpha = cert.alpha;
  out.beta = cert.beta;
  out.gamma = cert.gamma;
  out.Delta = quant.delta;
  out.M = quant.M;
  out.m_i = Vec::Zero(s);

  for (int i = 0; i < s; ++i) {
    const Mat Abar = closed_loop_A(sys, ctrl, i);
    // error channel: B_i (input case) or B_i K_i (state case)
    const Mat Bi = mode == QuantizationMode::Input
                       ? sys.cells[i].B
                       : Mat(sys.cells[i].B * ctrl.gains[i].K);
    double mi = 0.0;
    for (int j : cert.succ_map[i]) {
      const PairData pd = pair_data(cert, sys, ctrl, i, j);
      const double g = cert.gamma[i];
      const double c1 = (1 - eps) * delta_param * g;
      const double c2 =
          ((1 - eps) * g) * ((1 - eps) * g) * delta_param * (1 - delta_param);
      const double phi1 =
          dim_factor * (spectral_norm(Bi.transpose() * pd.Q * Bi) / c1 +
                        std::pow(spectral_norm(Abar.transpose() * pd.Q * Bi),
                                 2.0) /
                            c2);
      const double phi2 = 2.0 * std::sqrt(dim_factor) *
                          spectral_norm(pd.h.transpose() * Bi) / c1;
      out.phi.push_back({i, j, phi1, phi2});
      mi = std::max(mi,
                    std::sqrt(phi1 * quant.delta * quant.delta +
                              phi2 * quant.delta));
    }
    out.m_i[i] = mi;
  }
  out.m = out.m_i.maxCoeff();

  if (mode == QuantizationMode::Input) {
    double mk = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s; ++i) {
      const double gn = norm2(ctrl.gains[i].g);
      if (quant.M <= gn)
        throw RangeTooSmall("constants: M <= |g_i| for cell " +
                            std::to_string(i + 1));
      const double kn = spectral_norm(ctrl.gains[i].K);
      if (kn > 0) mk = std::min(mk, (quant.M - gn) / kn);
    }
    out.M_K = mk;
  } else {
    const double rootn = std::sqrt(static_cast<double>(sys.state_dim));
    out.m_tilde = out.m + rootn * quant.delta;
    out.m_bar = out.m + 2.0 * rootn * quant.delta;
  }

  double denom = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s; ++i)
    denom = std::min(denom, eps * cert.gamma[i] * out.m_i[i] * out.m_i[i]);
  const double numer =
      mode == QuantizationMode::Input
          ? cert.alpha * out.M_K * out.M_K - cert.beta * out.m * out.m
          : cert.alpha * (quant.M * quant.M - out.m * out.m);
  out.k0_bar = denom > 0 ? numer / denom
                         : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

StabilityConstants input_constants(const PwqCertificate& cert,
                                   const PwaSystem& sys,
                                   const AffineController& ctrl,
                                   const UniformQuantizer& quant, double eps,
                                   double delta_param) {
  return constants_impl(cert, sys, ctrl, quant, eps, delta_param,
                        QuantizationMode::Input);
}

StabilityConstants state_constants(const PwqCertificate& cert,
                                   const PwaSystem& sys,
                                   const AffineController& ctrl,
                                   const UniformQuantizer& quant, double eps,
                                   double delta_param) {
  return constants_impl(cert, sys, ctrl, quant, eps, delta_param,
                        QuantizationMode::State);
}

ConditionReport check_conditions(const StabilityConstants& consts,
                                 const PwqCertificate& cert,
                                 const PwaSystem& sys,
                                 const AffineController& ctrl,
                                 const UniformQuantizer& quant) {
  ConditionReport rep;
  const double a = consts.alpha, b = consts.beta;
  if (consts.mode == QuantizationMode::Input) {
    rep.gap_slack = a * consts.M_K * consts.M_K - b * consts.m * consts.m;
    double worst = 0.0;
    for (int i = 0; i < sys.num_cells(); ++i) {
      const double term =
          spectral_norm(sys.cells[i].A) * consts.m +
          spectral_norm(sys.cells[i].B) *
              (spectral_norm(ctrl.gains[i].K) * consts.m +
               std::sqrt(static_cast<double>(sys.input_dim)) * quant.delta) +
          sys.cells[i].f.norm();
      worst = std::max(worst, term);
    }
    rep.invariance_slack = std::sqrt(a / b) * consts.M_K - worst;
  } else {
    rep.gap_slack = a * consts.M * consts.M - b * consts.m_bar * consts.m_bar;
    double worst = 0.0;
    for (int i = 0; i < sys.num_cells(); ++i) {
      const double term =
          spectral_norm(sys.cells[i].A) * consts.m_bar +
          spectral_norm(Mat(sys.cells[i].B * ctrl.gains[i].K)) *
              consts.m_tilde +
          closed_loop_f(sys, ctrl, i).norm();
      worst = std::max(worst, term);
    }
    rep.invariance_slack = std::sqrt(a / b) * consts.M - worst;
  }
  rep.gap_pass = rep.gap_slack > 0;
  rep.invariance_pass = rep.invariance_slack >= 0;
  (void)cert;
  return rep;
}

double zoom_rate(const StabilityConstants& consts) {
  const double root = std::sqrt(consts.beta / consts.alpha);
  if (consts.mode == QuantizationMode::Input) {
    if (!(consts.beta * consts.m * consts.m <
          consts.alpha * consts.M_K * consts.M_K))
      throw GapViolated("zoom_rate: beta m^2 < alpha M_K^2 fails");
    return root * consts.m / consts.M_K;
  }
  if (!(consts.beta * consts.m_bar * consts.m_bar <
        consts.alpha * consts.M * consts.M))
    throw GapViolated("zoom_rate: beta mbar^2 < alpha M^2 fails");
  return root * consts.m_bar / consts.M;
}

double iss_envelope(const PwqCertificate& cert, double rho, double delta,
                    const Vec& x0, int k) {
  const double gamma = cert.gamma.minCoeff();
  const double eps = gamma / cert.beta;
  if (!(eps > 0) || eps > 1)
    throw ValidationError("iss_envelope: eps = gamma/beta outside (0, 1]");
  return (cert.beta / cert.alpha) * std::pow(1.0 - eps, k) * x0.squaredNorm() +
         rho / (cert.alpha * eps) * delta * delta;
}

double iss_rho_bound(const PwqCertificate& cert, const PwaSystem& sys,
                     const AffineController& ctrl, double delta) {
  if (delta <= 0) return 0.0;
  const int dd = sys.disturbance_dim;
  if (dd == 0) return 0.0;
  double rho = 0.0;
  for (int i = 0; i < sys.num_cells(); ++i) {
    const Mat& D = sys.cells[i].D;
    const double Dn = spectral_norm(D) * std::sqrt(static_cast<double>(dd));
    if (Dn == 0) continue;
    const Mat Abar = closed_loop_A(sys, ctrl, i);
    double xmax = 0.0;
    for (const Vec& v : vertices(sys.cells[i].region).vertices)
      xmax = std::max(xmax, v.norm());
    for (int j : cert.succ_map[i]) {
      const PairData pd = pair_data(cert, sys, ctrl, i, j);
      // sup over the cell of |Q_j (Abar x + fbar) + p_j|
      const double C = spectral_norm(pd.Q * Abar) * xmax + pd.h.norm();
      const double term = 2.0 * Dn * C / delta + spectral_norm(pd.Q) * Dn * Dn;
      rho = std::max(rho, term);
    }
  }
  return rho;
}

}  // namespace pwaq
