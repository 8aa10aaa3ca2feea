#include "octa/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "octa/errors.hpp"
#include "octa/ode.hpp"

namespace octa {

namespace {

constexpr double kBigTime = 1e9;
// Second-smallest |sqrt coordinate| under this flags a quadruple approach
// (physical coordinate 1e-6; a regular double passage keeps the other two
// coordinates at order one).
constexpr double kQuadrupleGuard = 1e-3;

using RegY = std::array<double, 7>;  // gamma, Gamma, upsilon, Upsilon, zeta, Zcap, t

RegY pack(const RegularizedState& r) {
  return {r.gamma, r.Gamma, r.upsilon, r.Upsilon, r.zeta, r.Zcap, r.t};
}

RegularizedState unpack(const RegY& y, double s, double h) {
  return {y[0], y[2], y[4], y[1], y[3], y[5], s, y[6], h};
}

inline double pair_inv32(double a, double b) {  // (a^4 + b^4)^(-3/2)
  const double q = a * a * a * a + b * b * b * b;
  return 1.0 / (q * std::sqrt(q));
}

inline double pair_inv12(double a, double b) {  // (a^4 + b^4)^(-1/2)
  return 1.0 / std::sqrt(a * a * a * a + b * b * b * b);
}

// Rescaled vector field. The momentum equations multiply (h - f) by the
// squared coordinates of the two complementary axes, which cancels their
// singular pairs algebraically:
//   a^2 b^2 (h - f) = a^2 b^2 (h + P) + b^2 (1 - A^2)/8 + a^2 (1 - B^2)/8,
// with P the full pair sum. This rearrangement is exact and stays finite
// when a complementary coordinate sits on a collision, where the naive
// (A^2 - 1)/(8 a^2) cancellation degenerates to inf - inf. Not throwing:
// trial evaluations at infeasible points return non-finite entries and the
// step is rejected.
void reg_field(double h, const RegY& y, RegY& d) {
  const double g = y[0], G = y[1], u = y[2], U = y[3], z = y[4], Z = y[5];
  const double g2 = g * g, u2 = u * u, z2 = z * z;
  const double pgu = pair_inv32(g, u), pgz = pair_inv32(g, z), puz = pair_inv32(u, z);
  const double pair_sum = pair_inv12(g, u) + pair_inv12(g, z) + pair_inv12(u, z);

  auto bracket = [&](double a2, double b2, double A, double B) {
    return a2 * b2 * (h + pair_sum) + 0.125 * (b2 * (1.0 - A * A) + a2 * (1.0 - B * B));
  };

  d[0] = 0.25 * u2 * z2 * G;
  d[2] = 0.25 * g2 * z2 * U;
  d[4] = 0.25 * g2 * u2 * Z;
  d[1] = 2.0 * g * bracket(u2, z2, U, Z) - 2.0 * g2 * g2 * g * u2 * z2 * (pgu + pgz);
  d[3] = 2.0 * u * bracket(g2, z2, G, Z) - 2.0 * u2 * u2 * u * g2 * z2 * (pgu + puz);
  d[5] = 2.0 * z * bracket(g2, u2, G, U) - 2.0 * z2 * z2 * z * g2 * u2 * (pgz + puz);
  d[6] = g2 * u2 * z2;
}

void phys_field(const std::array<double, 6>& y, std::array<double, 6>& d) {
  d[0] = y[3];
  d[1] = y[4];
  d[2] = y[5];
  const double x = y[0], yy = y[1], z = y[2];
  if (x <= 0.0 || yy <= 0.0 || z <= 0.0) {
    d[3] = d[4] = d[5] = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const double pxy = std::pow(x * x + yy * yy, -1.5);
  const double pxz = std::pow(x * x + z * z, -1.5);
  const double pyz = std::pow(yy * yy + z * z, -1.5);
  d[3] = -x * (pxy + pxz) - 0.125 / (x * x);
  d[4] = -yy * (pxy + pyz) - 0.125 / (yy * yy);
  d[5] = -z * (pxz + pyz) - 0.125 / (z * z);
}

OdeOptions ode_options(const IntegratorOptions& o) {
  OdeOptions oo;
  oo.abs_tol = o.abs_tol;
  oo.rel_tol = o.rel_tol;
  oo.max_steps = o.max_steps;
  return oo;
}

void check_quadruple(const RegY& y) {
  double a = std::fabs(y[0]), b = std::fabs(y[2]), c = std::fabs(y[4]);
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  if (b < kQuadrupleGuard)
    throw IntegrationError("quadruple/total collision approach: flow not regularized");
}

int argmin_axis(const Configuration& c) {
  if (c.x <= c.y && c.x <= c.z) return 0;
  return c.y <= c.z ? 1 : 2;
}

std::array<double, 6> pack_state(const State& s) {
  return {s.config.x, s.config.y, s.config.z, s.velocity.x, s.velocity.y, s.velocity.z};
}

State unpack_state(const std::array<double, 6>& y) {
  return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
}

/// Physical preimage that tolerates a vanishing coordinate: the position is
/// always defined, the velocity component on a collision axis is +-inf.
State lenient_state(const RegularizedState& r) {
  State s;
  s.config = {r.gamma * r.gamma, r.upsilon * r.upsilon, r.zeta * r.zeta};
  auto vel = [](double q, double p) {
    if (q != 0.0) return p / (2.0 * q);
    return p >= 0 ? kInfinity : -kInfinity;
  };
  s.velocity = {vel(r.gamma, r.Gamma), vel(r.upsilon, r.Upsilon), vel(r.zeta, r.Zcap)};
  return s;
}

}  // namespace

RegularizedState to_regularized(const State& st, double h, std::array<int, 3> signs) {
  const Configuration& c = st.config;
  if (c.x < 0 || c.y < 0 || c.z < 0)
    throw std::domain_error("to_regularized: configuration outside the cone");
  RegularizedState r;
  r.gamma = signs[0] * std::sqrt(c.x);
  r.upsilon = signs[1] * std::sqrt(c.y);
  r.zeta = signs[2] * std::sqrt(c.z);
  r.Gamma = r.gamma != 0.0 ? 2.0 * st.velocity.x * r.gamma : 0.0;
  r.Upsilon = r.upsilon != 0.0 ? 2.0 * st.velocity.y * r.upsilon : 0.0;
  r.Zcap = r.zeta != 0.0 ? 2.0 * st.velocity.z * r.zeta : 0.0;
  r.s = 0.0;
  r.t = 0.0;
  r.h = h;
  return r;
}

State from_regularized(const RegularizedState& r) {
  if (r.gamma == 0.0 || r.upsilon == 0.0 || r.zeta == 0.0)
    throw SingularityError("from_regularized at a collision (velocity unbounded)");
  State s;
  s.config = {r.gamma * r.gamma, r.upsilon * r.upsilon, r.zeta * r.zeta};
  s.velocity = {r.Gamma / (2.0 * r.gamma), r.Upsilon / (2.0 * r.upsilon),
                r.Zcap / (2.0 * r.zeta)};
  return s;
}

double reg_hamiltonian(const RegularizedState& r) {
  const double g = r.gamma, u = r.upsilon, z = r.zeta;
  if (g == 0.0 || u == 0.0 || z == 0.0)
    throw SingularityError("reg_hamiltonian at a collision");
  const double g2 = g * g, u2 = u * u, z2 = z * z;
  return 0.125 * (r.Gamma * r.Gamma / g2 + r.Upsilon * r.Upsilon / u2 +
                  r.Zcap * r.Zcap / z2) -
         (pair_inv12(g, u) + pair_inv12(g, z) + pair_inv12(u, z)) -
         0.125 * (1.0 / g2 + 1.0 / u2 + 1.0 / z2);
}

double reg_complement(double q, double a, double b, double pa, double pb) {
  const double a2 = a * a, b2 = b * b;
  return 0.125 * (pa * pa / a2 + pb * pb / b2) -
         (pair_inv12(q, a) + pair_inv12(q, b) + pair_inv12(a, b)) -
         0.125 * (1.0 / a2 + 1.0 / b2);
}

RegDerivative reg_rhs(const RegularizedState& r) {
  const int zeros = (r.gamma == 0.0) + (r.upsilon == 0.0) + (r.zeta == 0.0);
  if (zeros >= 2)
    throw std::domain_error("reg_rhs: quadruple/total collision is not regularized");
  RegY y = pack(r), d;
  reg_field(r.h, y, d);
  return d;
}

std::vector<RegularizedState> integrate_reg(const RegularizedState& r0, double s_end,
                                            const IntegratorOptions& opt) {
  const double h = r0.h;
  auto rhs = [h](double, const RegY& y, RegY& d) { reg_field(h, y, d); };
  Dopri5<7, decltype(rhs)> solver(rhs, ode_options(opt));
  solver.init(r0.s, pack(r0));

  std::vector<RegularizedState> out;
  out.push_back(r0);
  solver.integrate_to(s_end, [&](double s, const RegY& y) {
    check_quadruple(y);
    out.push_back(unpack(y, s, h));
  });
  out.back().s = s_end;
  return out;
}

std::vector<RegularizedState> integrate_reg_sampled(const RegularizedState& r0,
                                                    std::span<const double> s_points,
                                                    const IntegratorOptions& opt) {
  const double h = r0.h;
  auto rhs = [h](double, const RegY& y, RegY& d) { reg_field(h, y, d); };
  Dopri5<7, decltype(rhs)> solver(rhs, ode_options(opt));
  solver.init(r0.s, pack(r0));
  std::vector<RegularizedState> out;
  out.reserve(s_points.size());
  for (double s : s_points) {
    solver.integrate_to(s);
    out.push_back(unpack(solver.y(), solver.t(), h));
  }
  return out;
}

RegularizedState integrate_reg_to_time(const RegularizedState& r0, double t_target,
                                       const IntegratorOptions& opt) {
  if (t_target == r0.t) return r0;
  const double h = r0.h;
  auto rhs = [h](double, const RegY& y, RegY& d) { reg_field(h, y, d); };
  Dopri5<7, decltype(rhs)> solver(rhs, ode_options(opt));
  solver.init(r0.s, pack(r0));
  const double dir = t_target > r0.t ? 1.0 : -1.0;
  const bool hit = solver.integrate_to_event(
      [t_target](double, const RegY& y) { return y[6] - t_target; },
      r0.s + dir * kBigTime);
  if (!hit) throw IntegrationError("regularized flow never reached the target time");
  return unpack(solver.y(), solver.t(), h);
}

PhysicalRun integrate_physical(const State& s0, double t0, double t1,
                               std::span<const double> sample_times,
                               const IntegratorOptions& opt, double switch_ratio) {
  auto rhs = [](double, const std::array<double, 6>& y, std::array<double, 6>& d) {
    phys_field(y, d);
  };
  auto near_collision = [switch_ratio](double, const std::array<double, 6>& y) {
    const double gx = switch_ratio * std::sqrt(y[1] * y[2]);
    const double gy = switch_ratio * std::sqrt(y[0] * y[2]);
    const double gz = switch_ratio * std::sqrt(y[0] * y[1]);
    return std::min(y[0] - gx, std::min(y[1] - gy, y[2] - gz));
  };

  Dopri5<6, decltype(rhs)> solver(rhs, ode_options(opt));
  solver.init(t0, pack_state(s0));
  if (near_collision(t0, solver.y()) <= 0.0)
    throw std::invalid_argument("integrate_physical: start inside the switch radius");

  PhysicalRun run;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  std::size_t next = 0;
  for (;;) {
    double target = t1;
    bool is_sample = false;
    while (next < sample_times.size() &&
           (sample_times[next] - solver.t()) * dir <= 0.0)
      ++next;  // skip samples behind the current time
    if (next < sample_times.size() && (sample_times[next] - t1) * dir <= 0.0) {
      target = sample_times[next];
      is_sample = true;
    }
    const bool stopped = solver.integrate_to_event(near_collision, target);
    if (stopped) {
      run.stop = StopReason::collision_approach;
      break;
    }
    if (is_sample) {
      run.sample_times.push_back(target);
      run.samples.push_back(unpack_state(solver.y()));
      ++next;
      continue;
    }
    run.stop = StopReason::span_end;
    break;
  }
  run.final_state = unpack_state(solver.y());
  run.final_time = solver.t();
  return run;
}

namespace {

/// Regularized crossing used by both the public passage routine and the
/// tracer: from a handoff state, find the coordinate zero, then grow back to
/// exit_value. Each stage may be capped at physical time t_cap (NaN = no
/// cap); when the cap fires, the capped regularized state is returned and
/// `finished` is false.
struct CrossingResult {
  RegularizedState at;
  double collision_time{std::numeric_limits<double>::quiet_NaN()};
  bool crossed{false};
  bool finished{false};
};

CrossingResult reg_cross(const RegularizedState& r_in, int axis, double exit_value,
                         bool already_crossed, int dir, double t_cap,
                         const IntegratorOptions& opt) {
  const double h = r_in.h;
  auto rhs = [h](double, const RegY& y, RegY& d) { reg_field(h, y, d); };
  const int ci = axis * 2;  // index of the sqrt coordinate in RegY

  CrossingResult res;
  res.crossed = already_crossed;

  RegularizedState r = r_in;
  if (!already_crossed) {
    Dopri5<7, decltype(rhs)> solver(rhs, ode_options(opt));
    solver.init(r.s, pack(r));
    const bool hit = solver.integrate_to_event(
        [ci](double, const RegY& y) { return y[ci]; }, r.s + dir * kBigTime);
    if (!hit) throw IntegrationError("no collision crossing found in the regularized chart");
    const double t_cross = solver.y()[6];
    if (!std::isnan(t_cap) && (t_cross - t_cap) * dir > 0.0) {
      res.at = integrate_reg_to_time(r, t_cap, opt);
      res.finished = false;
      return res;
    }
    r = unpack(solver.y(), solver.t(), h);
    res.collision_time = t_cross;
    res.crossed = true;
  }

  Dopri5<7, decltype(rhs)> solver(rhs, ode_options(opt));
  solver.init(r.s, pack(r));
  const bool out = solver.integrate_to_event(
      [ci, exit_value](double, const RegY& y) { return y[ci] * y[ci] - exit_value; },
      r.s + dir * kBigTime);
  if (!out) throw IntegrationError("regularized chart never reached the exit radius");
  const double t_exit = solver.y()[6];
  if (!std::isnan(t_cap) && (t_exit - t_cap) * dir > 0.0) {
    res.at = integrate_reg_to_time(r, t_cap, opt);
    res.finished = false;
    return res;
  }
  res.at = unpack(solver.y(), solver.t(), h);
  res.finished = true;
  return res;
}

void require_double_collision_handoff(const Configuration& c, int axis) {
  const double v[3] = {c.x, c.y, c.z};
  const double other = std::min(v[(axis + 1) % 3], v[(axis + 2) % 3]);
  if (!(v[axis] < 0.1 * other))
    throw std::domain_error(
        "collision handoff: two coordinates are small, not a double collision");
}

}  // namespace

CollisionPassage continue_through_collision(const State& approach, double t_approach,
                                            double h, int direction,
                                            const IntegratorOptions& opt) {
  const int axis = argmin_axis(approach.config);
  require_double_collision_handoff(approach.config, axis);
  RegularizedState r = to_regularized(approach, h);
  r.t = t_approach;
  const double entry = approach.config.as_vec()[axis];

  CrossingResult res = reg_cross(r, axis, 2.0 * entry, false, direction,
                                 std::numeric_limits<double>::quiet_NaN(), opt);
  CollisionPassage p;
  p.axis = axis;
  p.collision_time = res.collision_time;
  p.exit_state = from_regularized(res.at);
  p.exit_time = res.at.t;
  p.energy_drift = std::fabs(reg_hamiltonian(res.at) - h);
  return p;
}

TrajectoryTracer::TrajectoryTracer(const State& start, double t_start, double h,
                                   int direction, const IntegratorOptions& opt,
                                   double switch_ratio)
    : state_(start),
      t_(t_start),
      h_(h),
      dir_(direction),
      opt_(opt),
      switch_ratio_(switch_ratio) {}

void TrajectoryTracer::enter_regularized() {
  reg_axis_ = argmin_axis(state_.config);
  require_double_collision_handoff(state_.config, reg_axis_);
  reg_ = to_regularized(state_, h_);
  reg_.t = t_;
  reg_exit_value_ = 2.0 * state_.config.as_vec()[reg_axis_];
  reg_crossed_ = false;
  chart_ = Chart::regularized;
}

void TrajectoryTracer::exit_regularized() {
  state_ = from_regularized(reg_);
  t_ = reg_.t;
  chart_ = Chart::physical;
}

State TrajectoryTracer::advance_to(double t_target) {
  if ((t_target - t_) * dir_ < 0.0)
    throw std::invalid_argument("TrajectoryTracer::advance_to: target behind the walk");
  while ((t_target - t_) * dir_ > 0.0) {
    if (chart_ == Chart::physical) {
      PhysicalRun run =
          integrate_physical(state_, t_, t_target, {}, opt_, switch_ratio_);
      state_ = run.final_state;
      t_ = run.final_time;
      if (run.stop == StopReason::span_end) {
        t_ = t_target;
        return state_;
      }
      enter_regularized();
    } else {
      CollisionPassage partial;
      partial.axis = reg_axis_;
      const bool was_crossed = reg_crossed_;
      CrossingResult res = reg_cross(reg_, reg_axis_, reg_exit_value_, was_crossed,
                                     dir_, t_target, opt_);
      reg_ = res.at;
      t_ = res.at.t;
      reg_crossed_ = res.crossed;
      if (!was_crossed && res.crossed && !std::isnan(res.collision_time)) {
        partial.collision_time = res.collision_time;
        partial.exit_time = res.at.t;
        partial.energy_drift = 0.0;
        passages_.push_back(partial);
      }
      if (res.finished) {
        if (!passages_.empty() && passages_.back().axis == reg_axis_) {
          passages_.back().exit_time = reg_.t;
          passages_.back().exit_state = from_regularized(reg_);
          passages_.back().energy_drift = std::fabs(reg_hamiltonian(reg_) - h_);
        }
        exit_regularized();
      } else {
        t_ = t_target;
        return lenient_state(reg_);
      }
    }
  }
  return chart_ == Chart::physical ? state_ : lenient_state(reg_);
}

}  // namespace octa
