#ifndef PWAQ_CERTIFY_HPP
#define PWAQ_CERTIFY_HPP

#include <vector>

#include "pwaq/model.hpp"

namespace pwaq {

/// Piecewise quadratic Lyapunov certificate. Per cell either an n x n
/// quadratic form P_i or an (n+1) x (n+1) augmented form over [x; 1].
struct PwqCertificate {
  std::vector<Mat> P;
  int state_dim = 0;
  double alpha = 0.0;
  double beta = 0.0;
  Vec gamma;  // per-cell decrease rates
  std::vector<std::vector<int>> succ_map;

  bool augmented(int i) const { return P[i].rows() == state_dim + 1; }
  /// Quadratic part: P_i itself or the top-left n x n block.
  Mat quad_part(int i) const { return P[i].topLeftCorner(state_dim, state_dim); }
  /// V_i(x) regardless of where x lies.
  double value_cell(int i, const Vec& x) const;
};

/// V(x) with the active cell selected by mode_of.
double lyapunov_value(const PwqCertificate& cert, const PwaSystem& sys,
                      const Vec& x);

/// Checks positivity, extracts alpha/beta, certifies the decrease inequality
/// for every pair of the successor map by S-procedure bisection, and verifies
/// the map is a superset of the recomputed exact successors.
/// Throws CertificateInvalid on any failure.
PwqCertificate verify_certificate(const PwaSystem& sys,
                                  const AffineController& ctrl,
                                  const std::vector<Mat>& P_set,
                                  const std::vector<std::vector<int>>& succ_map,
                                  Channel channel, double delta);

enum class QuantizationMode { Input, State };

struct StabilityConstants {
  QuantizationMode mode = QuantizationMode::State;
  double eps = 0.01;          // epsilon_ij, uniform
  double delta_param = 0.49;  // delta_ij, uniform
  double alpha = 0.0;
  double beta = 0.0;
  Vec gamma;
  struct PairPhi {
    int i = -1;
    int j = -1;
    double phi1 = 0.0;
    double phi2 = 0.0;
  };
  std::vector<PairPhi> phi;  // one entry per successor-map pair
  Vec m_i;       // per-cell radii
  double m = 0.0;
  double M = 0.0;    // quantizer range
  double M_K = 0.0;  // input case; +inf when every K_i vanishes
  double m_tilde = 0.0;  // state case
  double m_bar = 0.0;    // state case
  double k0_bar = 0.0;
  double Delta = 0.0;  // quantization level
  bool se_map_note = true;  // epsilon_i read over S_i (S^e_i undefined)
};

StabilityConstants input_constants(const PwqCertificate& cert,
                                   const PwaSystem& sys,
                                   const AffineController& ctrl,
                                   const UniformQuantizer& quant, double eps,
                                   double delta_param);

StabilityConstants state_constants(const PwqCertificate& cert,
                                   const PwaSystem& sys,
                                   const AffineController& ctrl,
                                   const UniformQuantizer& quant, double eps,
                                   double delta_param);

struct ConditionReport {
  bool gap_pass = false;
  double gap_slack = 0.0;  // alpha*M^2 - beta*m^2 (case-appropriate)
  bool invariance_pass = false;
  double invariance_slack = 0.0;  // sqrt(alpha/beta)*M - worst one-step growth
  bool all_pass() const { return gap_pass && invariance_pass; }
};

ConditionReport check_conditions(const StabilityConstants& consts,
                                 const PwqCertificate& cert,
                                 const PwaSystem& sys,
                                 const AffineController& ctrl,
                                 const UniformQuantizer& quant);

/// Zoom contraction rate; throws GapViolated when the gap condition fails.
double zoom_rate(const StabilityConstants& consts);

/// Right-hand side of the practical-ISS bound at step k:
/// (beta/alpha)(1-eps)^k |x0|^2 + rho/(alpha*eps) * Delta^2, eps = gamma/beta.
double iss_envelope(const PwqCertificate& cert, double rho, double delta,
                    const Vec& x0, int k);

/// A valid rho for the disturbed decrease inequality at the given Delta,
/// from norm bounds over the (bounded) cells.
double iss_rho_bound(const PwqCertificate& cert, const PwaSystem& sys,
                     const AffineController& ctrl, double delta);

/// Largest decrease rate certifiable for one (i, j) pair at the given
/// certificate (bisection; exposed for tests).
double certify_pair_gamma(const PwaSystem& sys, const AffineController& ctrl,
                          const std::vector<Mat>& P_set, int i, int j);

/// Rows E with E x >= 0 on the cell: the negated homogeneous rows of its
/// H-representation (zero rows when none are homogeneous).
Mat homogeneous_cone_rows(const HPolytope& X);

}  // namespace pwaq

#endif
