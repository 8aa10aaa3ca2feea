#include "octa/kepler1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "octa/errors.hpp"
#include "octa/ode.hpp"

namespace octa::kepler1d {

namespace {

constexpr double kPi = 3.14159265358979323846;

OdeOptions ode_options(const IntegratorOptions& o) {
  OdeOptions oo;
  oo.abs_tol = o.abs_tol;
  oo.rel_tol = o.rel_tol;
  oo.max_steps = o.max_steps;
  return oo;
}

using Y2 = std::array<double, 2>;  // v, v'
using Y3 = std::array<double, 3>;  // v, v', accumulated action

double series_start_time(double t_apex) { return 1e-6 * std::min(1.0, t_apex); }

// Apex time for a trial energy, by integrating out of the series start until
// v' crosses zero.
double apex_time(double g, double energy, double t_apex_hint, const IntegratorOptions& opt) {
  const EjectionSeries ser = make_series(g, energy);
  const double t0 = series_start_time(t_apex_hint);
  auto rhs = [g](double, const Y2& y, Y2& d) {
    d[0] = y[1];
    d[1] = y[0] > 0 ? -g / (y[0] * y[0]) : std::numeric_limits<double>::quiet_NaN();
  };
  Dopri5<2, decltype(rhs)> solver(rhs, ode_options(opt));
  solver.init(t0, {ser.pos(t0), ser.vel(t0)});
  const bool hit = solver.integrate_to_event(
      [](double, const Y2& y) { return y[1]; }, 50.0 * t_apex_hint + 1.0);
  if (!hit) throw SolveError("kepler1d: no apex before the time limit");
  return solver.t();
}

}  // namespace

double EjectionSeries::pos(double t) const {
  const double w = std::cbrt(t * t);  // t^{2/3}
  return beta * w * (1.0 + w * (a1 + w * (a2 + w * a3)));
}

double EjectionSeries::vel(double t) const {
  const double c = std::cbrt(t);  // t^{1/3}
  return beta * ((2.0 / 3.0) / c + (4.0 / 3.0) * a1 * c + 2.0 * a2 * t +
                 (8.0 / 3.0) * a3 * t * c * c);
}

double EjectionSeries::action_to(double t0) const {
  // integral of (e + 2g/v); 1/v expanded to two correction orders
  const double w = std::cbrt(t0 * t0);
  const double inv_v_int =
      (3.0 * std::cbrt(t0) - a1 * t0 + (a1 * a1 - a2) * 0.6 * t0 * w) / beta;
  return energy * t0 + 2.0 * g * inv_v_int;
}

EjectionSeries make_series(double g, double energy) {
  EjectionSeries s;
  s.g = g;
  s.energy = energy;
  s.beta = std::cbrt(4.5 * g);
  s.a1 = 0.9 * energy / (s.beta * s.beta);
  s.a2 = -(3.0 / 7.0) * s.a1 * s.a1;
  s.a3 = (23.0 / 63.0) * s.a1 * s.a1 * s.a1;
  return s;
}

Ejection solve_apex(double g, double t_apex, const IntegratorOptions& opt) {
  if (!(g > 0) || !(t_apex > 0))
    throw std::invalid_argument("kepler1d::solve_apex: g and t_apex must be positive");
  // Kepler's law gives the exact energy for the pure problem; the secant
  // correction below validates it against the integrator.
  const double a = std::cbrt(g * t_apex * t_apex / (kPi * kPi));
  double e0 = -g / (2.0 * a);
  double r0 = apex_time(g, e0, t_apex, opt) - t_apex;
  double e1 = e0 * (1.0 + 1e-6);
  double r1 = apex_time(g, e1, t_apex, opt) - t_apex;
  for (int it = 0; it < 60 && std::fabs(r1) > 1e-13 * t_apex; ++it) {
    if (r1 == r0) break;
    const double e2 = e1 - r1 * (e1 - e0) / (r1 - r0);
    e0 = e1;
    r0 = r1;
    e1 = e2;
    r1 = apex_time(g, e1, t_apex, opt) - t_apex;
  }
  if (std::fabs(r1) > 1e-10 * t_apex)
    throw SolveError("kepler1d::solve_apex: shooting did not converge");
  Ejection ej;
  ej.g = g;
  ej.energy = e1;
  ej.t_apex = t_apex;
  ej.series = make_series(g, e1);
  return ej;
}

std::vector<double> positions(const Ejection& ej, std::span<const double> times) {
  const double g = ej.g;
  const double t0 = series_start_time(ej.t_apex);
  auto rhs = [g](double, const Y2& y, Y2& d) {
    d[0] = y[1];
    d[1] = y[0] > 0 ? -g / (y[0] * y[0]) : std::numeric_limits<double>::quiet_NaN();
  };
  Dopri5<2, decltype(rhs)> solver(rhs, ode_options({}));
  solver.init(t0, {ej.series.pos(t0), ej.series.vel(t0)});

  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t <= t0) {
      out.push_back(t <= 0 ? 0.0 : ej.series.pos(t));
      continue;
    }
    solver.integrate_to(t);
    out.push_back(solver.y()[0]);
  }
  return out;
}

double action_over_period(double g, double tau, const IntegratorOptions& opt) {
  const Ejection ej = solve_apex(g, 0.5 * tau, opt);
  const double t0 = series_start_time(ej.t_apex);
  auto rhs = [g](double, const Y3& y, Y3& d) {
    if (y[0] <= 0) {
      d = {std::numeric_limits<double>::quiet_NaN(), 0, 0};
      return;
    }
    d[0] = y[1];
    d[1] = -g / (y[0] * y[0]);
    d[2] = 0.5 * y[1] * y[1] + g / y[0];
  };
  Dopri5<3, decltype(rhs)> solver(rhs, ode_options(opt));
  solver.init(t0, {ej.series.pos(t0), ej.series.vel(t0), 0.0});
  solver.integrate_to(0.5 * tau);
  // collision-to-apex equals apex-to-collision by time symmetry
  return 2.0 * (ej.series.action_to(t0) + solver.y()[2]);
}

}  // namespace octa::kepler1d
