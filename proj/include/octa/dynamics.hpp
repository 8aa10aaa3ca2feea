#pragma once

#include <limits>

#include "octa/vec3.hpp"

namespace octa {

/// Coordinates at or below this value are treated as exact zero so that 1/x
/// cannot overflow before the collision is recognized.
inline constexpr double kInteriorFloor = 1e-300;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class CollisionKind { none, double_collision, quadruple_collision, total_collision };

/// Reduced configuration of the octahedral six-body problem: one pair of
/// bodies per coordinate axis, mirror symmetric through the origin, masses
/// 1/2 each. The pair on the x-axis sits at (+-x, 0, 0), and similarly for y
/// and z, so a configuration is a single point in the closed cone
/// {x >= 0, y >= 0, z >= 0}.
struct Configuration {
  double x{0}, y{0}, z{0};

  double min_coord() const;
  CollisionKind collision_kind() const;
  bool is_collision() const { return collision_kind() != CollisionKind::none; }

  Vec3 as_vec() const { return {x, y, z}; }
  static Configuration from_vec(const Vec3& v) { return {v.x, v.y, v.z}; }
};

struct State {
  Configuration config;
  Vec3 velocity;
};

/// Velocity pass-through plus acceleration; first-order form of the
/// second-order equations of motion.
struct StateDerivative {
  Vec3 velocity;
  Vec3 acceleration;
};

/// All energy-like quantities of a state, including the cluster split used by
/// the Lagrange-Jacobi diagnostics:
///   potential = u_x + u0 = u_xy + u1,
/// where u_x = 1/(8x) is the x-pair self-interaction and u_xy covers the
/// four bodies on the x- and y-axes.
struct EnergyBreakdown {
  double kinetic{0};
  double potential{0};
  double lagrangian{0};    // K + U
  double hamiltonian{0};   // K - U
  double h_x{0};           // x-cluster energy: vx^2/2 - 1/(8x)
  double h_xy{0};          // (x,y)-cluster energy
  double k0{0}, u0{0};     // complement of the x-cluster
  double k1{0}, u1{0};     // complement of the (x,y)-cluster
};

/// U(x,y,z) = sum of the three pair interactions across axes plus the
/// axis-internal terms (1/8)(1/x + 1/y + 1/z). Returns +infinity at any
/// collision; throws std::domain_error for coordinates outside the cone.
double potential(const Configuration& c);

/// Analytic gradient of the potential. Only defined strictly inside the
/// cone; throws SingularityError on the boundary.
Vec3 potential_gradient(const Configuration& c);

/// K = |v|^2 / 2 in the reduced coordinates.
double kinetic(const Vec3& v);

EnergyBreakdown energy_breakdown(const State& s);

/// Right-hand side of the equations of motion, acceleration = grad U.
StateDerivative eom_rhs(const State& s);

/// Second derivative of the x-cluster moment of inertia I_x = x^2 via the
/// generalized Lagrange-Jacobi relation, with the cluster energy supplied by
/// the caller (it stays finite through x-collisions while the state does
/// not). Requires y and z strictly positive.
double lagrange_jacobi_xdd(const State& s, double h_x);

/// Same for the (x,y) cluster: I_xy = x^2 + y^2. Requires z strictly
/// positive.
double lagrange_jacobi_xydd(const State& s, double h_xy);

}  // namespace octa
