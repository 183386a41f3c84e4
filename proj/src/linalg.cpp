#include "pwaq/linalg.hpp"

#include <cstdlib>
#include <cmath>

namespace pwaq {

double sym_eig_min(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double sym_eig_max(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double spectral_norm(const Mat& M) {
  if (M.size() == 0) return 0.0;
  const Mat G = M.transpose() * M;
  const double lam = sym_eig_max(G);
  return lam > 0.0 ? std::sqrt(lam) : 0.0;
}

bool is_psd(const Mat& S, double tol) { return sym_eig_min(S) >= -tol; }

double inf_norm(const Mat& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

double lp_tol() {
  static const double tol = [] {
    if (const char* s = std::getenv("PWAQ_LP_TOL")) {
      const double t = std::atof(s);
      if (t > 0) return t;
    }
    return 1e-7;
  }();
  return tol;
}

}  // namespace pwaq
