#ifndef PWAQ_ERRORS_HPP
#define PWAQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pwaq {

/// Base class of all toolkit exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent matrix/vector dimensions in an API call.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// System description or configuration violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Polytope operation requires a bounded polytope.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

/// Polytope operation requires a nonempty polytope.
class EmptyError : public Error {
 public:
  using Error::Error;
};

/// A state lies outside the total space X (or no cell matches).
class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

/// LP/SDP numerical failure (iteration limit, broken factorization).
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// A Lyapunov certificate failed verification; carries the violating pair.
class CertificateInvalid : public Error {
 public:
  CertificateInvalid(int i, int j, const std::string& what)
      : Error(what), cell_i(i), cell_j(j) {}
  int cell_i;
  int cell_j;
};

/// Quantizer range M too small versus the affine terms (M <= |g_i|).
class RangeTooSmall : public Error {
 public:
  using Error::Error;
};

/// The gap condition does not hold; no contraction rate exists.
class GapViolated : public Error {
 public:
  using Error::Error;
};

/// CCL iteration stopped making progress before reaching the trace target.
class CclStalled : public Error {
 public:
  using Error::Error;
};

/// A synthesis result failed its independent post-verification.
class VerificationFailed : public Error {
 public:
  using Error::Error;
};

/// Successor-map fixpoint failed to close within the round limit.
class FixpointDiverged : public Error {
 public:
  using Error::Error;
};

}  // namespace pwaq

#endif
