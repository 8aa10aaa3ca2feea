#pragma once

#include "octa/regularize.hpp"
#include "octa/symmetry.hpp"

namespace octa {

/// Boundary-value polish of a minimizer segment. The orbit is pinned down by
/// three scalars: y0 = y(0) = z(0), w = zdot(0) = -ydot(0) and the energy h.
/// At the t = 0 collision the regularized chart fixes gamma = 0, Gamma = 1
/// (the energy relation forces Gamma^2 -> 1 there), so shooting integrates
/// the rescaled flow from the collision to physical time T/6 and Newton
/// drives the reversing-symmetry conditions
///   x(T/6) = y(T/6),  xdot(T/6) = -ydot(T/6),  zdot(T/6) = 0
/// to zero. The result is the same orbit the discrete minimizer
/// approximates, now at integrator accuracy, resampled on the segment mesh
/// with exact node velocities.
struct RefineOptions {
  double tol = 1e-11;         // inf-norm of the boundary residual
  int max_iterations = 30;
  IntegratorOptions ode{1e-13, 1e-13};
};

struct RefineResult {
  FundamentalSegment segment;  // carries node velocities and the energy
  double y0{0};
  double w{0};
  double h{0};
  double residual_norm{0};
  int iterations{0};
};

RefineResult refine_segment(const FundamentalSegment& minimizer_segment,
                            const RefineOptions& opt = {});

/// Regularized state of the orbit at its t = 0 ejection, the natural start
/// for integrating the true trajectory.
RegularizedState collision_start(double y0, double w, double h);

}  // namespace octa
