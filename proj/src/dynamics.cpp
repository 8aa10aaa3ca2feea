#include "octa/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "octa/errors.hpp"

namespace octa {

namespace {

void require_cone(const Configuration& c) {
  if (c.x < 0 || c.y < 0 || c.z < 0)
    throw std::domain_error("configuration outside the cone S (negative coordinate)");
}

inline double zeroed(double v) { return v <= kInteriorFloor ? 0.0 : v; }

inline double inv_pair(double a, double b) {  // 1/sqrt(a^2+b^2)
  return 1.0 / std::sqrt(a * a + b * b);
}

}  // namespace

double Configuration::min_coord() const { return std::min(x, std::min(y, z)); }

CollisionKind Configuration::collision_kind() const {
  int zeros = (zeroed(x) == 0.0) + (zeroed(y) == 0.0) + (zeroed(z) == 0.0);
  switch (zeros) {
    case 0: return CollisionKind::none;
    case 1: return CollisionKind::double_collision;
    case 2: return CollisionKind::quadruple_collision;
    default: return CollisionKind::total_collision;
  }
}

double potential(const Configuration& c) {
  require_cone(c);
  const double x = zeroed(c.x), y = zeroed(c.y), z = zeroed(c.z);
  if (x == 0.0 || y == 0.0 || z == 0.0) return kInfinity;
  const double pair = inv_pair(x, y) + inv_pair(x, z) + inv_pair(y, z);
  return pair + 0.125 * (1.0 / x + 1.0 / y + 1.0 / z);
}

Vec3 potential_gradient(const Configuration& c) {
  require_cone(c);
  const double x = c.x, y = c.y, z = c.z;
  if (zeroed(x) == 0.0 || zeroed(y) == 0.0 || zeroed(z) == 0.0)
    throw SingularityError("potential_gradient at a collision configuration");
  const double pxy = std::pow(x * x + y * y, -1.5);
  const double pxz = std::pow(x * x + z * z, -1.5);
  const double pyz = std::pow(y * y + z * z, -1.5);
  return {-x * (pxy + pxz) - 0.125 / (x * x),
          -y * (pxy + pyz) - 0.125 / (y * y),
          -z * (pxz + pyz) - 0.125 / (z * z)};
}

double kinetic(const Vec3& v) { return 0.5 * v.norm2(); }

EnergyBreakdown energy_breakdown(const State& s) {
  require_cone(s.config);
  const double x = zeroed(s.config.x), y = zeroed(s.config.y), z = zeroed(s.config.z);
  const Vec3& v = s.velocity;

  EnergyBreakdown e;
  e.kinetic = kinetic(v);
  e.potential = potential(s.config);
  e.lagrangian = e.kinetic + e.potential;
  e.hamiltonian = e.kinetic - e.potential;

  const double u_x = x > 0 ? 0.125 / x : kInfinity;
  e.h_x = 0.5 * v.x * v.x - u_x;
  e.k0 = 0.5 * (v.y * v.y + v.z * v.z);
  if (y > 0 && z > 0) {
    e.u0 = inv_pair(x, y) + inv_pair(x, z) + inv_pair(y, z) + 0.125 * (1.0 / y + 1.0 / z);
  } else {
    e.u0 = kInfinity;
  }

  const double u_xy = (x > 0 && y > 0) ? 0.125 / x + 0.125 / y + inv_pair(x, y) : kInfinity;
  e.h_xy = 0.5 * (v.x * v.x + v.y * v.y) - u_xy;
  e.k1 = 0.5 * v.z * v.z;
  e.u1 = z > 0 ? inv_pair(x, z) + inv_pair(y, z) + 0.125 / z : kInfinity;
  return e;
}

StateDerivative eom_rhs(const State& s) {
  return {s.velocity, potential_gradient(s.config)};
}

double lagrange_jacobi_xdd(const State& s, double h_x) {
  require_cone(s.config);
  const double x = zeroed(s.config.x), y = zeroed(s.config.y), z = zeroed(s.config.z);
  if (y == 0.0 || z == 0.0)
    throw std::domain_error("lagrange_jacobi_xdd: y and z must be strictly positive");
  const double u_x = x > 0 ? 0.125 / x : kInfinity;
  // dU0/dx is regular even at x = 0.
  const double pxy = std::pow(x * x + y * y, -1.5);
  const double pxz = std::pow(x * x + z * z, -1.5);
  const double du0_dx = -x * (pxy + pxz);
  return 4.0 * h_x + 2.0 * u_x + 2.0 * x * du0_dx;
}

double lagrange_jacobi_xydd(const State& s, double h_xy) {
  require_cone(s.config);
  const double x = zeroed(s.config.x), y = zeroed(s.config.y), z = zeroed(s.config.z);
  if (z == 0.0)
    throw std::domain_error("lagrange_jacobi_xydd: z must be strictly positive");
  const double u_xy =
      (x > 0 && y > 0) ? 0.125 / x + 0.125 / y + inv_pair(x, y) : kInfinity;
  const double du1_dx = -x * std::pow(x * x + z * z, -1.5);
  const double du1_dy = -y * std::pow(y * y + z * z, -1.5);
  return 4.0 * h_xy + 2.0 * u_xy + 2.0 * (x * du1_dx + y * du1_dy);
}

}  // namespace octa
