#pragma once

#include <span>
#include <string>
#include <vector>

#include "octa/regularize.hpp"
#include "octa/symmetry.hpp"

namespace octa {

/// Power-law fit of a vanishing coordinate near a collision,
/// coord ~ x0 |t - t_bar|^exponent.
struct SundmanFit {
  double t_bar{0};
  double x0{0};
  double exponent{0};
  double fit_residual{0};  // rms residual of the log-log fit
};

struct Check {
  std::string name;
  double value{0};
  double threshold{0};
  bool pass{false};
};

struct VerificationReport {
  std::vector<Check> checks;
  double action{std::numeric_limits<double>::quiet_NaN()};
  double homothetic_bound{std::numeric_limits<double>::quiet_NaN()};
  double energy{std::numeric_limits<double>::quiet_NaN()};
  std::vector<SundmanFit> sundman;   // one per collision
  std::string integration_error;     // nonempty when re-integration aborted

  bool all_pass() const;
  const Check* find(const std::string& name) const;
};

/// Action of the homothetic comparison orbit per unit cube-root period:
/// a(tau) = alpha0 tau^{1/3}, alpha0 = (3 / 2^{1/3}) (pi g)^{2/3}.
double alpha0(double g);

/// The same quantity by brute force: integrate the 1D ejection-collision
/// orbit of period tau for v'' = -g/v^2 and take the quadrature of its
/// Lagrangian. Independent check of the alpha0 formula.
double kepler_homothetic_action(double g, double tau);

/// Least-squares power-law fit of samples (t_i, coord_i) near one collision;
/// t_bar is refined by golden-section on the fit residual starting from
/// t_bar_guess. Samples closer to t_bar than min_offset are excluded.
SundmanFit sundman_fit(std::span<const double> times, std::span<const double> coord,
                       double t_bar_guess, double min_offset = 1e-11);

/// Coercivity inequality of the length of the first third: returns
/// (curve length L, a * max |X|) with a = min over [0, pi/3] of
/// sin(alpha) + sin(pi/3 - alpha) = sqrt(3)/2.
std::pair<double, double> coercivity_diagnostic(const PeriodicOrbit& orbit);

/// The numeric minimum defining the constant a above.
double coercivity_constant();

/// Full verification battery: grid symmetry, collision structure,
/// monotonicity, re-integration over one period with regularized passages,
/// backward continuation through t = 0, Sundman exponents at the three
/// collisions, action vs the homothetic bound, coercivity. All checks run;
/// failures are carried in the report, never thrown.
VerificationReport verify_orbit(const PeriodicOrbit& orbit,
                                const IntegratorOptions& opt = {});

}  // namespace octa
