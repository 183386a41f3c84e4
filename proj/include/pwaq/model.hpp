#ifndef PWAQ_MODEL_HPP
#define PWAQ_MODEL_HPP

#include <optional>
#include <vector>

#include "pwaq/polytope.hpp"

namespace pwaq {

/// One mode of the PWA dynamics x+ = A x + B u + f + D d on region Cl(X_i).
struct Cell {
  HPolytope region;
  Mat A;
  Mat B;
  Vec f;
  Mat D;  // n x d; zero columns when the mode has no disturbance channel
};

struct PwaSystem {
  std::vector<Cell> cells;
  int state_dim = 0;
  int input_dim = 0;
  int disturbance_dim = 0;
  HPolytope total_space;

  int num_cells() const { return static_cast<int>(cells.size()); }
};

/// Per-cell affine feedback u = K_i x + g_i.
struct AffineController {
  struct Gain {
    Mat K;
    Vec g;
  };
  std::vector<Gain> gains;
};

/// Uniform grid quantizer: cell width 2*delta, centered at the origin.
/// Inside |xi| <= M the error satisfies |q(xi) - xi|_inf <= delta.
struct UniformQuantizer {
  double delta = 0.0;
  double M = 0.0;
};

/// Input constraint set U = {u : R u <= r}.
struct InputPolytope {
  Mat R;
  Vec r;

  static InputPolytope whole(int m) {
    InputPolytope u;
    u.R = Mat(0, m);
    u.r = Vec(0);
    return u;
  }
  static InputPolytope box(int m, double bound);
  int dim() const { return static_cast<int>(R.cols()); }
};

/// Zoom parameter state: mu = mu0 * Omega^level.
struct ZoomState {
  double mu = 1.0;
  int level = 0;

  void zoom(double omega) {
    mu *= omega;
    ++level;
  }
};

/// Which matrix generates the disturbance set {D d : |d|_inf <= Delta}:
/// the cell's physical D_i, B_i (input quantization), or B_i K_i (state
/// quantization).
enum class Channel { Physical, InputQ, StateQ };

constexpr double kTieTol = 1e-9;

/// Smallest cell index whose closure contains x (tie-break by index).
/// Throws OutOfDomainError when x lies outside the total space.
int mode_of(const PwaSystem& sys, const Vec& x, double tie_tol = kTieTol);

Vec quantize(const UniformQuantizer& q, const Vec& xi);
Vec quantize_zoomed(const UniformQuantizer& q, double mu, const Vec& xi);
inline Vec quantize_zoomed(const UniformQuantizer& q, const ZoomState& z,
                           const Vec& xi) {
  return quantize_zoomed(q, z.mu, xi);
}

/// The disturbance-channel matrix per the selected case.
Mat channel_matrix(const PwaSystem& sys, const AffineController* ctrl, int i,
                   Channel ch);

/// Closed-loop matrices for cell i: Abar = A + B K, fbar = f + B g.
Mat closed_loop_A(const PwaSystem& sys, const AffineController& ctrl, int i);
Vec closed_loop_f(const PwaSystem& sys, const AffineController& ctrl, int i);

/// Structural checks: dimensions, f_i = 0 when 0 in Cl(X_i), sampled
/// coverage of X by the cells, pairwise empty-interior intersections.
/// Throws ValidationError.
void validate_system(const PwaSystem& sys);
void validate_controller(const PwaSystem& sys, const AffineController& ctrl);

}  // namespace pwaq

#endif
