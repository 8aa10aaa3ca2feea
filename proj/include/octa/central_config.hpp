#pragma once

#include "octa/dynamics.hpp"

namespace octa {

struct CentralConfigSolution {
  Configuration config;
  double lambda{0};
  double residual_norm{0};  // inf-norm of the central-configuration equations
  int iterations{0};
};

/// Componentwise residual of the central-configuration system: for the first
/// component 1/(8x^3) + (x^2+y^2)^{-3/2} + (x^2+z^2)^{-3/2} + lambda, and
/// cyclically for the others. Requires a strictly interior configuration.
Vec3 cc_residual(const Configuration& c, double lambda);

/// Damped Newton on the residual augmented with |X|^2 = 1, in the unknowns
/// (x, y, z, lambda). Converges to the regular octahedron (c, c, c)/|.| from
/// any reasonable interior start.
CentralConfigSolution cc_solve(const Configuration& start);

/// G = |X| U(X) at the normalized central configuration (scale invariant, so
/// evaluated at (1,1,1)/sqrt(3)).
double curly_g();

}  // namespace octa
