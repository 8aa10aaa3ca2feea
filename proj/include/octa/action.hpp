#pragma once

#include <string>
#include <vector>

#include "octa/symmetry.hpp"

namespace octa {

/// Quadrature for the action on a graded mesh t_i = (T/6) (i/N)^p. The first
/// cell uses the open midpoint rule (node 0 carries the imposed collision
/// where U = +inf but the integrand is integrable), every other cell the
/// trapezoid rule. The kinetic part is the exact integral of the
/// piecewise-linear interpolant.
struct QuadratureScheme {
  std::vector<double> node_times;
  double grading_exponent{1.5};

  static QuadratureScheme graded(double sixth, int cells, double p);
  int cells() const { return static_cast<int>(node_times.size()) - 1; }
};

struct MinimizeReport {
  double action{std::numeric_limits<double>::quiet_NaN()};
  double gradient_inf_norm{std::numeric_limits<double>::quiet_NaN()};
  long iterations{0};
  double constraint_residual{0};
  int mesh_cells{0};
  double mesh_exponent{1.5};
  std::string terminated_reason;
  std::vector<double> action_history;  // accepted values on the final mesh
};

struct MinimizeOptions {
  long max_iters = 50000;
  double grad_tol = 1e-8;
  std::vector<int> mesh_schedule;  // e.g. {256, 512, 1024}; empty keeps the seed mesh
  double mesh_exponent = 1.5;
  int memory = 10;
};

/// Discretized action of the fundamental segment,
///   sum_i |X_{i+1} - X_i|^2 / (2 dt_i)  +  quadrature of U.
/// Only node 0 may be a collision; an interior collision node is an error.
double discretized_action(const FundamentalSegment& seg, const QuadratureScheme& q);

/// Analytic gradient of the discretized action per node, projected onto the
/// tangent space of the endpoint constraints (x_0 fixed, y_0 = z_0,
/// x_N = y_N).
std::vector<Vec3> action_gradient(const FundamentalSegment& seg, const QuadratureScheme& q);

/// Half homothetic ejection orbit u(t) X_c+ on the graded mesh: u solves
/// u'' = -G/u^2 with u(0) = 0 and u'(T/6) = 0, found by shooting. Node 0 is
/// the total collision at the origin.
FundamentalSegment homothetic_segment(double period, int cells, double p);

/// Projected limited-memory quasi-Newton descent over the segment's free
/// coordinates, with optional mesh-refinement continuation. The iterate
/// sequence is monotone; bound constraints act only through the objective
/// (U -> +inf keeps iterates interior).
std::pair<FundamentalSegment, MinimizeReport> minimize(const FundamentalSegment& seed,
                                                       const MinimizeOptions& opt = {});

}  // namespace octa
