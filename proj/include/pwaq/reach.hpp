#ifndef PWAQ_REACH_HPP
#define PWAQ_REACH_HPP

#include <vector>

#include "pwaq/model.hpp"

namespace pwaq {

enum class SuccessorMethod { SbarExact, StildeFast, TControllerFree };

struct SuccessorSet {
  int source = -1;
  std::vector<int> successors;  // sorted cell indices
  SuccessorMethod method = SuccessorMethod::SbarExact;
  double delta = 0.0;
  Channel channel = Channel::Physical;

  bool contains(int j) const;
  bool subset_of(const SuccessorSet& other) const;
};

/// Exact-per-controller over-approximation: one feasibility LP per target
/// cell over (x, d) with x in Cl(X_i), |d|_inf <= Delta.
SuccessorSet successors_exact(const PwaSystem& sys,
                              const AffineController& ctrl, int i,
                              double delta, Channel channel);

/// Cheap variant: the disturbance is folded into a row-wise slack
/// Delta * abs-row-sums of U_j * D; always a superset of successors_exact.
SuccessorSet successors_fast(const PwaSystem& sys,
                             const AffineController& ctrl, int i, double delta,
                             Channel channel);

/// Controller-free over-approximation over (x, u, d) with u in the input
/// polytope; uses the cell's physical disturbance channel.
SuccessorSet successors_controller_free(const PwaSystem& sys,
                                        const InputPolytope& input, int i,
                                        double delta);

/// Vertex check of one-step confinement Cl(X_i) -> Z for a known controller,
/// under every disturbance-box vertex of the chosen channel.
bool confinement_check(const PwaSystem& sys, const AffineController& ctrl,
                       int i, const HPolytope& Z, double delta,
                       Channel channel, double tol = 1e-7);

/// Linear inequality family over the unknowns z = [vec_rowmajor(K_i); g_i]
/// equivalent to the vertex confinement condition: W z <= w.
struct ConfinementConstraint {
  int cell = -1;
  Mat W;
  Vec w;
  int count() const { return static_cast<int>(W.rows()); }
};

ConfinementConstraint confinement_constraints(const PwaSystem& sys, int i,
                                              const HPolytope& Z, double delta,
                                              Channel channel);

/// Evaluate an emitted constraint family at a concrete (K, g).
bool confinement_constraints_satisfied(const ConfinementConstraint& cc,
                                       const Mat& K, const Vec& g,
                                       double tol = 1e-7);

/// True iff (M1 + {Dd : |d|_inf <= Delta}) and M2 do not intersect;
/// symmetric in (M1, M2).
bool minkowski_swap_empty(const HPolytope& M1, const HPolytope& M2,
                          const Mat& D, double delta);

/// All 2^d corners of the box {|d|_inf <= delta}; the single zero vector
/// when delta == 0 or d == 0.
std::vector<Vec> disturbance_box_vertices(int d, double delta);

}  // namespace pwaq

#endif
