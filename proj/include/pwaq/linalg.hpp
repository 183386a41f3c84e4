#ifndef PWAQ_LINALG_HPP
#define PWAQ_LINALG_HPP

#include <Eigen/Dense>

namespace pwaq {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Smallest eigenvalue of a symmetric matrix.
double sym_eig_min(const Mat& S);

/// Largest eigenvalue of a symmetric matrix.
double sym_eig_max(const Mat& S);

/// Euclidean induced (spectral) norm of a general rectangular matrix.
double spectral_norm(const Mat& M);

/// True iff S (symmetric) has min eigenvalue >= -tol.
bool is_psd(const Mat& S, double tol = 1e-9);

/// Infinity-induced norm: max absolute row sum.
double inf_norm(const Mat& M);

/// Default LP feasibility tolerance; PWAQ_LP_TOL overrides (read once).
double lp_tol();

}  // namespace pwaq

#endif
