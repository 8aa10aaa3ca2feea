#include "octa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "octa/action.hpp"
#include "octa/central_config.hpp"
#include "octa/errors.hpp"
#include "octa/kepler1d.hpp"

namespace octa {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoThirds = 2.0 / 3.0;

double golden_minimize(double lo, double hi, int iters, const std::function<double(double)>& f) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && (b - a) > 1e-16 * (1.0 + std::fabs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct LogFit {
  double slope{0}, intercept{0}, rms{kInfinity};
  int used{0};
};

LogFit fit_loglog(std::span<const double> times, std::span<const double> coord,
                  double t_bar, double min_offset) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dt = std::fabs(times[i] - t_bar);
    if (dt <= min_offset || !(coord[i] > 0)) continue;
    const double X = std::log(dt), Y = std::log(coord[i]);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++n;
  }
  LogFit out;
  out.used = n;
  if (n < 4) return out;
  const double det = n * sxx - sx * sx;
  out.slope = (n * sxy - sx * sy) / det;
  out.intercept = (sy * sxx - sx * sxy) / det;
  double ss = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dt = std::fabs(times[i] - t_bar);
    if (dt <= min_offset || !(coord[i] > 0)) continue;
    const double r = std::log(coord[i]) - (out.intercept + out.slope * std::log(dt));
    ss += r * r;
  }
  out.rms = std::sqrt(ss / n);
  return out;
}

int second_smallest_axis_value(const Configuration& c, double* second) {
  double v[3] = {c.x, c.y, c.z};
  int axis = 0;
  for (int i = 1; i < 3; ++i)
    if (v[i] < v[axis]) axis = i;
  *second = std::min(v[(axis + 1) % 3], v[(axis + 2) % 3]);
  return axis;
}

Vec3 swap_yz(const Vec3& v) { return {v.x, v.z, v.y}; }

}  // namespace

bool VerificationReport::all_pass() const {
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

const Check* VerificationReport::find(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double alpha0(double g) {
  if (!(g > 0)) throw std::invalid_argument("alpha0: g must be positive");
  return 3.0 / std::cbrt(2.0) * std::pow(kPi * g, kTwoThirds);
}

double kepler_homothetic_action(double g, double tau) {
  if (!(g > 0) || !(tau > 0))
    throw std::invalid_argument("kepler_homothetic_action: g, tau must be positive");
  return kepler1d::action_over_period(g, tau);
}

SundmanFit sundman_fit(std::span<const double> times, std::span<const double> coord,
                       double t_bar_guess, double min_offset) {
  if (times.size() != coord.size() || times.size() < 8)
    throw std::invalid_argument("sundman_fit: window too small");

  double nearest = kInfinity;
  for (double t : times) {
    const double d = std::fabs(t - t_bar_guess);
    if (d > min_offset) nearest = std::min(nearest, d);
  }
  if (!std::isfinite(nearest)) throw std::invalid_argument("sundman_fit: window too small");

  const double half = 0.5 * nearest;
  auto residual_at = [&](double tb) { return fit_loglog(times, coord, tb, min_offset).rms; };
  const double t_bar =
      golden_minimize(t_bar_guess - half, t_bar_guess + half, 200, residual_at);

  const LogFit fit = fit_loglog(times, coord, t_bar, min_offset);
  if (fit.used < 8) throw std::invalid_argument("sundman_fit: window too small");
  SundmanFit out;
  out.t_bar = t_bar;
  out.exponent = fit.slope;
  out.x0 = std::exp(fit.intercept);
  out.fit_residual = fit.rms;
  return out;
}

double coercivity_constant() {
  auto f = [](double a) { return std::sin(a) + std::sin(kPi / 3.0 - a); };
  const double arg = golden_minimize(0.0, kPi / 3.0, 200, f);
  return std::min(f(arg), std::min(f(0.0), f(kPi / 3.0)));
}

std::pair<double, double> coercivity_diagnostic(const PeriodicOrbit& orbit) {
  const double third = orbit.period / 3.0;
  double length = 0.0, dmax = 0.0;
  Vec3 prev = orbit.samples[0].config.as_vec();
  dmax = prev.norm();
  for (int k = 1; k < orbit.size() && orbit.times[k] <= third * (1.0 + 1e-12); ++k) {
    const Vec3 cur = orbit.samples[k].config.as_vec();
    length += (cur - prev).norm();
    dmax = std::max(dmax, cur.norm());
    prev = cur;
  }
  return {length, coercivity_constant() * dmax};
}

VerificationReport verify_orbit(const PeriodicOrbit& orbit, const IntegratorOptions& opt) {
  VerificationReport rep;
  rep.energy = orbit.energy;
  const int m = orbit.size();
  const double T = orbit.period;
  auto add = [&](const std::string& name, double value, double threshold, bool pass) {
    rep.checks.push_back({name, value, threshold, pass});
  };

  // --- grid symmetry ------------------------------------------------------
  bool grid_ok = true;
  LoopGridMaps maps;
  double sym = kInfinity;
  try {
    maps = loop_grid_maps(orbit);
    sym = symmetry_residual(orbit);
  } catch (const std::exception& e) {
    grid_ok = false;
    rep.integration_error = e.what();
  }
  add("symmetry_grid", sym, 1e-14, grid_ok && sym < 1e-14);

  // --- collision structure ------------------------------------------------
  std::vector<int> collisions;
  for (int k = 0; k < m; ++k)
    if (orbit.samples[k].config.min_coord() < 1e-9) collisions.push_back(k);
  const bool sixfold = m % 6 == 0;
  const int third_idx = m / 3;
  bool expected_collisions = sixfold && collisions.size() == 3;
  if (expected_collisions) {
    expected_collisions = collisions[0] == 0 && collisions[1] == third_idx &&
                          collisions[2] == 2 * third_idx &&
                          std::fabs(orbit.times[0]) < 1e-9 &&
                          std::fabs(orbit.times[third_idx] - T / 3.0) < 1e-9 &&
                          std::fabs(orbit.times[2 * third_idx] - 2.0 * T / 3.0) < 1e-9;
  }
  add("collision_count", static_cast<double>(collisions.size()), 3.0, expected_collisions);

  double separation = kInfinity;
  for (int k : collisions) {
    double second;
    second_smallest_axis_value(orbit.samples[k].config, &second);
    separation = std::min(separation, second);
  }
  add("collision_separation", separation, 1e-6, !collisions.empty() && separation > 1e-6);

  double clearance = kInfinity;
  for (int k = 0; k < m; ++k) {
    if (std::find(collisions.begin(), collisions.end(), k) != collisions.end()) continue;
    clearance = std::min(clearance, orbit.samples[k].config.min_coord());
  }
  add("interior_clearance", clearance, 1e-6, clearance > 1e-6);

  add("y0_equals_z0",
      std::fabs(orbit.samples[0].config.y - orbit.samples[0].config.z), 1e-12,
      std::fabs(orbit.samples[0].config.y - orbit.samples[0].config.z) <= 1e-12);

  // --- monotonicity of x (rising to T/2, falling back to the collision) ---
  {
    int violations = 0;
    const int half = m / 2;
    for (int k = 0; k < m; ++k) {
      const double x0 = orbit.samples[k].config.x;
      const double x1 = orbit.samples[(k + 1) % m].config.x;
      const double d = x1 - x0;
      if (k < half ? d < -1e-10 : d > 1e-10) ++violations;
    }
    add("x_monotone", violations, 0.0, violations == 0);

    double max_dudx = -kInfinity;
    for (int k = 0; k < m; ++k) {
      if (orbit.samples[k].config.is_collision()) continue;
      max_dudx = std::max(max_dudx, potential_gradient(orbit.samples[k].config).x);
    }
    add("xdd_negative", max_dudx, 0.0, max_dudx < 0.0);
  }

  // --- action against the homothetic comparison bound ----------------------
  const int n_seg = m / 6;
  rep.homothetic_bound =
      alpha0(curly_g()) / std::cbrt(4.0) * std::cbrt(T / 6.0);
  if (sixfold) {
    try {
      FundamentalSegment seg;
      seg.period = T;
      seg.node_times.assign(orbit.times.begin(), orbit.times.begin() + n_seg + 1);
      seg.nodes.resize(n_seg + 1);
      for (int i = 0; i <= n_seg; ++i) seg.nodes[i] = orbit.samples[i].config;
      QuadratureScheme q;
      q.node_times = seg.node_times;
      rep.action = discretized_action(seg, q);
    } catch (const std::exception&) {
      rep.action = kInfinity;
    }
  }
  add("action_below_bound", rep.action, rep.homothetic_bound,
      rep.action < rep.homothetic_bound);

  // --- coercivity ----------------------------------------------------------
  {
    const auto [len, ad] = coercivity_diagnostic(orbit);
    add("coercivity", len - ad, 0.0, len >= ad);
  }

  // --- discrete equations of motion along interior arcs --------------------
  // Second differences of the samples against grad U on arcs clear of the
  // collisions (the derivatives of the Sundman cusp dominate closer in).
  // The residual is discretization error, so the pinned threshold scales
  // with the squared mesh width; the measured ratio sits near 9.
  {
    double residual = 0.0, dt_max = 0.0;
    for (int k = 1; k + 1 < m; ++k) {
      const Configuration& prev = orbit.samples[k - 1].config;
      const Configuration& here = orbit.samples[k].config;
      const Configuration& next = orbit.samples[k + 1].config;
      if (std::min({prev.min_coord(), here.min_coord(), next.min_coord()}) < 0.2)
        continue;
      const double dtm = orbit.times[k] - orbit.times[k - 1];
      const double dtp = orbit.times[k + 1] - orbit.times[k];
      dt_max = std::max(dt_max, std::max(dtm, dtp));
      const Vec3 second = ((next.as_vec() - here.as_vec()) * (1.0 / dtp) -
                           (here.as_vec() - prev.as_vec()) * (1.0 / dtm)) *
                          (2.0 / (dtm + dtp));
      residual = std::max(residual, (second - potential_gradient(here)).inf_norm());
    }
    const double threshold = 100.0 * dt_max * dt_max;
    add("eom_residual", residual, threshold, dt_max > 0 && residual < threshold);
  }

  // --- re-integration over one period, with regularized passages ----------
  bool reint_ok = false;
  double reint_sym = kInfinity, passage_drift = kInfinity, total_drift = kInfinity;
  double sundman_dev = kInfinity, tbar_dev = kInfinity, reversal = kInfinity;
  int passage_count = 0;
  rep.sundman.clear();

  if (grid_ok && sixfold && expected_collisions) {
    try {
      const double h =
          std::isfinite(orbit.energy)
              ? orbit.energy
              : energy_breakdown(orbit.samples[n_seg]).hamiltonian;

      // Sundman sampling windows on the outgoing side of each collision.
      const double delta_min = std::max(10.0 * opt.abs_tol, 1e-9);
      const double delta_max = 0.01 * T;
      const int n_fit = 60;
      std::vector<double> offsets(n_fit);
      for (int j = 0; j < n_fit; ++j)
        offsets[j] = delta_min * std::pow(delta_max / delta_min,
                                          static_cast<double>(j) / (n_fit - 1));
      const double bases[3] = {T / 3.0, 2.0 * T / 3.0, T};
      int axes[3];
      {
        double unused;
        axes[0] = second_smallest_axis_value(orbit.samples[third_idx].config, &unused);
        axes[1] = second_smallest_axis_value(orbit.samples[2 * third_idx].config, &unused);
        axes[2] = second_smallest_axis_value(orbit.samples[0].config, &unused);
      }

      struct Target {
        double t;
        int kind;  // 0 grid, 1 sundman
        int a, b;  // grid index | (collision, sample)
      };
      std::vector<Target> targets;
      for (int k = n_seg + 1; k < m; ++k) targets.push_back({orbit.times[k], 0, k, 0});
      targets.push_back({T, 0, 0, 0});
      for (int k = 1; k < n_seg; ++k) targets.push_back({orbit.times[k] + T, 0, k, 0});
      for (int c = 0; c < 3; ++c)
        for (int j = 0; j < n_fit; ++j)
          targets.push_back({bases[c] + offsets[j], 1, c, j});
      std::sort(targets.begin(), targets.end(),
                [](const Target& a, const Target& b) { return a.t < b.t; });

      std::vector<Vec3> reint(m);
      std::vector<bool> have(m, false);
      reint[n_seg] = orbit.samples[n_seg].config.as_vec();
      have[n_seg] = true;
      std::vector<std::vector<double>> fit_t(3), fit_v(3);

      TrajectoryTracer tracer(orbit.samples[n_seg], orbit.times[n_seg], h, +1, opt);
      total_drift = 0.0;
      double t_last = -kInfinity;
      State st_last;
      for (const Target& tg : targets) {
        State st;
        if (tg.t <= t_last + 1e-13) {
          st = st_last;
        } else {
          st = tracer.advance_to(tg.t);
          t_last = tg.t;
          st_last = st;
        }
        if (tg.kind == 0) {
          reint[tg.a] = st.config.as_vec();
          have[tg.a] = true;
          if (st.config.min_coord() > 1e-2) {
            total_drift =
                std::max(total_drift, std::fabs(energy_breakdown(st).hamiltonian - h));
          }
        } else {
          fit_t[tg.a].push_back(tg.t);
          fit_v[tg.a].push_back(st.config.as_vec()[axes[tg.a]]);
        }
      }

      // symmetry of the re-integrated loop, positions at grid times
      reint_sym = 0.0;
      for (int k = 0; k < m; ++k) {
        if (!have[k] || !have[maps.shift_minus_third[k]] || !have[maps.reflect[k]])
          continue;
        const Vec3& at = reint[k];
        const Vec3& sh = reint[maps.shift_minus_third[k]];
        const Vec3& rf = reint[maps.reflect[k]];
        reint_sym = std::max({reint_sym, std::fabs(sh.x - at.y), std::fabs(sh.y - at.z),
                              std::fabs(sh.z - at.x), std::fabs(rf.x - at.x),
                              std::fabs(rf.y - at.z), std::fabs(rf.z - at.y)});
      }

      passage_count = static_cast<int>(tracer.passages().size());
      passage_drift = 0.0;
      for (const CollisionPassage& p : tracer.passages())
        passage_drift = std::max(passage_drift, p.energy_drift);

      sundman_dev = 0.0;
      tbar_dev = 0.0;
      for (int c = 0; c < 3; ++c) {
        const SundmanFit fit = sundman_fit(fit_t[c], fit_v[c], bases[c], delta_min * 0.5);
        rep.sundman.push_back(fit);
        sundman_dev = std::max(sundman_dev, std::fabs(fit.exponent - kTwoThirds));
        if (c < passage_count)
          tbar_dev = std::max(
              tbar_dev, std::fabs(fit.t_bar - tracer.passages()[c].collision_time));
      }
      if (passage_count != 3) tbar_dev = kInfinity;

      // backward continuation through the t = 0 collision
      int jstar = 1;
      for (int i = 1; i < n_seg; ++i)
        if (std::fabs(orbit.times[i] - T / 12.0) < std::fabs(orbit.times[jstar] - T / 12.0))
          jstar = i;
      TrajectoryTracer back(orbit.samples[jstar], orbit.times[jstar], h, -1, opt);
      reversal = 0.0;
      for (int i = 1; i <= jstar; ++i) {
        const State st = back.advance_to(-orbit.times[i]);
        const Vec3 expect = swap_yz(orbit.samples[i].config.as_vec());
        reversal = std::max(reversal, (st.config.as_vec() - expect).inf_norm());
      }
      if (back.passages().size() == 1)
        tbar_dev = std::max(tbar_dev, std::fabs(back.passages()[0].collision_time));
      else
        tbar_dev = kInfinity;

      reint_ok = true;
    } catch (const std::exception& e) {
      rep.integration_error = e.what();
    }
  }

  add("reintegration_symmetry", reint_sym, 1e-6, reint_ok && reint_sym < 1e-6);
  add("passage_energy_drift", passage_drift, 1e-9,
      reint_ok && passage_count == 3 && passage_drift < 1e-9);
  add("energy_drift_total", total_drift, 1e-8, reint_ok && total_drift < 1e-8);
  add("sundman_exponent", sundman_dev, 0.01, reint_ok && sundman_dev <= 0.01);
  add("collision_time_consistency", tbar_dev, 1e-8, reint_ok && tbar_dev < 1e-8);
  add("time_reversal_symmetry", reversal, 1e-7, reint_ok && reversal < 1e-7);

  return rep;
}

}  // namespace octa
