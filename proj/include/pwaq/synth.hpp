#ifndef PWAQ_SYNTH_HPP
#define PWAQ_SYNTH_HPP

#include <optional>
#include <vector>

#include "pwaq/certify.hpp"
#include "pwaq/model.hpp"
#include "pwaq/reach.hpp"
#include "pwaq/sdp.hpp"

namespace pwaq {

struct SynthesisProblem {
  PwaSystem sys;
  InputPolytope input;
  double delta = 0.0;
  Channel channel = Channel::StateQ;
  enum class Variant { Asymptotic, Iss } variant = Variant::Asymptotic;
  double nu1 = 2.0;
  double nu2 = 2.0;
  std::vector<std::pair<int, HPolytope>> confinements;  // (cell, target)
  std::vector<std::vector<int>> succ_map;  // empty: all pairs / from T_i

  // Optional context used to pick the certificate spread by achieved Omega.
  std::optional<UniformQuantizer> quant;
  QuantizationMode qmode = QuantizationMode::State;
  double eps = 0.01;
  double delta_param = 0.49;

  int max_iter = 40;
  double ccl_tol = 1e-4;
};

struct SynthesisResult {
  bool feasible = false;
  AffineController ctrl;
  std::vector<Mat> P;  // n x n per cell
  std::vector<Mat> Q;  // P^{-1}, set exactly after convergence
  std::vector<Mat> M;  // S-procedure multipliers, one per map pair in order
  double trace_value = 0.0;  // sum trace(P_i Q_i) at the final CCL iterate
  double residual = 0.0;     // trace_value - 2 n s
  int iterations = 0;
  int outer_rounds = 1;
  double gamma_margin = 0.0;  // decrease margin of the refit certificate
  double tau = 0.0;           // certificate spread bound used
  std::vector<std::vector<int>> succ_map;
  PwqCertificate cert;  // independently verified
  std::optional<double> omega;  // when a quantizer context was supplied
  std::vector<double> linearized_objective;  // CCL history (tests)
};

/// Handles into the assembled LMI system (one CCL round).
struct LmiSystem {
  SdpProblem sdp;
  std::vector<SymVar> Pv;
  std::vector<SymVar> Qv;
  std::vector<std::vector<int>> Kv;  // per cell, m*n flat var ids (row-major)
  std::vector<SymVar> Mv;            // per map pair, in row-major map order
  std::vector<std::pair<int, int>> pairs;
  int n = 0, m = 0, s = 0;
};

/// Emits the decrease/coupling LMI blocks, elementwise-nonnegative
/// multipliers, confinement rows, and input-polytope rows for the given map.
LmiSystem build_lmis(const SynthesisProblem& prob,
                     const std::vector<std::vector<int>>& succ_map);

/// Cone-complementarity linearization over the given successor map, followed
/// by a margin-maximizing refit of P with K frozen, exact inversion
/// Q := P^{-1}, LMI + confinement re-verification, and certificate
/// verification. Throws CclStalled / VerificationFailed.
SynthesisResult ccl_solve(const SynthesisProblem& prob,
                          const std::vector<std::vector<int>>& succ_map,
                          int max_iter, double ccl_tol);

/// Full pipeline: T_i-seeded successor map pruned by the confinement
/// targets, ccl_solve, and the exact-successor containment fixpoint.
/// Throws FixpointDiverged after 5 rounds.
SynthesisResult synthesize(const SynthesisProblem& prob);

/// Margin-maximizing quadratic certificate for FIXED gains over the given
/// map, with spread bound I <= P_i <= tau I. Returns the P set; gamma_out
/// (when non-null) receives the achieved uniform decrease margin.
/// Throws VerificationFailed when no certificate exists at this spread.
std::vector<Mat> fit_certificate(const PwaSystem& sys,
                                 const AffineController& ctrl,
                                 const std::vector<std::vector<int>>& succ_map,
                                 double tau, double* gamma_out = nullptr);

/// Sweeps the spread bound and returns the certificate with the smallest
/// achieved zoom rate (or largest margin score without a quantizer context).
std::vector<Mat> fit_best_certificate(
    const PwaSystem& sys, const AffineController& ctrl,
    const std::vector<std::vector<int>>& succ_map,
    const std::optional<UniformQuantizer>& quant, QuantizationMode qmode,
    double eps, double delta_param, double* tau_out = nullptr,
    double* gamma_out = nullptr);

}  // namespace pwaq

#endif
