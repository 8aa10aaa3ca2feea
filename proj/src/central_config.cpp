#include "octa/central_config.hpp"

#include <cmath>
#include <stdexcept>

#include "octa/errors.hpp"
#include "octa/linsolve.hpp"

namespace octa {

namespace {

constexpr double kResidualTol = 1e-12;
constexpr int kMaxIterations = 50;

inline double pm32(double a, double b) {  // (a^2+b^2)^{-3/2}
  const double q = a * a + b * b;
  return 1.0 / (q * std::sqrt(q));
}

inline double pm52(double a, double b) {  // (a^2+b^2)^{-5/2}
  const double q = a * a + b * b;
  return 1.0 / (q * q * std::sqrt(q));
}

}  // namespace

Vec3 cc_residual(const Configuration& c, double lambda) {
  if (c.min_coord() <= kInteriorFloor)
    throw std::domain_error("cc_residual requires a strictly interior configuration");
  const double x = c.x, y = c.y, z = c.z;
  return {0.125 / (x * x * x) + pm32(x, y) + pm32(x, z) + lambda,
          0.125 / (y * y * y) + pm32(x, y) + pm32(y, z) + lambda,
          0.125 / (z * z * z) + pm32(x, z) + pm32(y, z) + lambda};
}

CentralConfigSolution cc_solve(const Configuration& start) {
  if (start.min_coord() <= kInteriorFloor)
    throw std::domain_error("cc_solve requires a strictly interior start");

  double x = start.x, y = start.y, z = start.z;
  // lambda enters linearly; start from the value balancing the mean residual
  double lambda;
  {
    const Vec3 r0 = cc_residual({x, y, z}, 0.0);
    lambda = -(r0.x + r0.y + r0.z) / 3.0;
  }

  auto norm4 = [](const Vec3& r, double rn) {
    return std::max(r.inf_norm(), std::fabs(rn));
  };

  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    const Vec3 r = cc_residual({x, y, z}, lambda);
    const double rn = x * x + y * y + z * z - 1.0;
    if (norm4(r, rn) < kResidualTol) break;

    std::array<std::array<double, 4>, 4> jac{};
    jac[0] = {-0.375 / (x * x * x * x) - 3 * x * (pm52(x, y) + pm52(x, z)),
              -3 * y * pm52(x, y), -3 * z * pm52(x, z), 1.0};
    jac[1] = {-3 * x * pm52(x, y),
              -0.375 / (y * y * y * y) - 3 * y * (pm52(x, y) + pm52(y, z)),
              -3 * z * pm52(y, z), 1.0};
    jac[2] = {-3 * x * pm52(x, z), -3 * y * pm52(y, z),
              -0.375 / (z * z * z * z) - 3 * z * (pm52(x, z) + pm52(y, z)), 1.0};
    jac[3] = {2 * x, 2 * y, 2 * z, 0.0};

    const std::array<double, 4> step =
        linsolve<4>(jac, {-r.x, -r.y, -r.z, -rn});

    // damped update: keep the iterate interior and the residual decreasing
    const double f0 = norm4(r, rn);
    double alpha = 1.0;
    bool moved = false;
    for (int k = 0; k < 30; ++k, alpha *= 0.5) {
      const double nx = x + alpha * step[0], ny = y + alpha * step[1],
                   nz = z + alpha * step[2], nl = lambda + alpha * step[3];
      if (nx <= 0 || ny <= 0 || nz <= 0) continue;
      const Vec3 rt = cc_residual({nx, ny, nz}, nl);
      const double rtn = nx * nx + ny * ny + nz * nz - 1.0;
      if (norm4(rt, rtn) < f0) {
        x = nx;
        y = ny;
        z = nz;
        lambda = nl;
        moved = true;
        break;
      }
    }
    if (!moved) throw SolveError("cc_solve: damped Newton stalled");
  }

  CentralConfigSolution sol;
  sol.config = {x, y, z};
  sol.lambda = lambda;
  sol.residual_norm = cc_residual(sol.config, lambda).inf_norm();
  sol.iterations = iter;
  if (sol.residual_norm >= kResidualTol ||
      std::fabs(x * x + y * y + z * z - 1.0) >= kResidualTol)
    throw SolveError("cc_solve: no convergence within the iteration budget");
  return sol;
}

double curly_g() {
  const double c = 1.0 / std::sqrt(3.0);
  return potential({c, c, c});  // |X| = 1 there
}

}  // namespace octa
