#pragma once

#include <span>
#include <vector>

#include "octa/regularize.hpp"

namespace octa::kepler1d {

/// Near-ejection series of v'' = -g/v^2 with v(0) = 0:
///   v(t) = beta t^{2/3} (1 + a1 t^{2/3} + a2 t^{4/3} + a3 t^2 + ...),
/// beta = (9g/2)^{1/3}, a1 = 9e/(10 beta^2), a2 = -(3/7) a1^2,
/// a3 = (23/63) a1^3, where e is the 1D energy v'^2/2 - g/v.
struct EjectionSeries {
  double g{0}, energy{0};
  double beta{0}, a1{0}, a2{0}, a3{0};

  double pos(double t) const;
  double vel(double t) const;
  /// Integral of (v'^2/2 + g/v) over [0, t0].
  double action_to(double t0) const;
};

EjectionSeries make_series(double g, double energy);

/// Ejection orbit whose apex (v' = 0) lands at t_apex, found by shooting on
/// the energy with the adaptive integrator.
struct Ejection {
  double g{0};
  double energy{0};
  double t_apex{0};
  EjectionSeries series;
};

Ejection solve_apex(double g, double t_apex, const IntegratorOptions& opt = {});

/// v at the given ascending times in [0, t_apex].
std::vector<double> positions(const Ejection& ej, std::span<const double> times);

/// Action of the full ejection-collision orbit of period tau, by direct
/// quadrature along the integrated trajectory (series handles the cusp).
double action_over_period(double g, double tau, const IntegratorOptions& opt = {});

}  // namespace octa::kepler1d
