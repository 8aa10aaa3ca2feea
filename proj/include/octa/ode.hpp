#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "octa/errors.hpp"

namespace octa {

struct OdeOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double init_step = 1e-6;
  double min_step = 1e-18;
  long max_steps = 8'000'000;
};

/// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4), FSAL). Targets are hit
/// exactly by clamping the final step; events are located by re-taking the
/// bracketing step with a secant-refined step size, so event states carry the
/// full order of the method rather than interpolation accuracy.
template <int Dim, typename Rhs>
class Dopri5 {
 public:
  using Y = std::array<double, Dim>;

  Dopri5(Rhs rhs, OdeOptions opt = {}) : rhs_(rhs), opt_(opt) {}

  void init(double t0, const Y& y0) {
    t_ = t0;
    y_ = y0;
    have_k1_ = false;
    h_ = 0.0;
    steps_ = 0;
  }

  double t() const { return t_; }
  const Y& y() const { return y_; }
  long steps() const { return steps_; }

  /// Advance to exactly t_target. Calls obs(t, y) after every accepted step.
  template <typename Obs>
  void integrate_to(double t_target, Obs&& obs) {
    const double dir = t_target >= t_ ? 1.0 : -1.0;
    if (h_ == 0.0 || h_ * dir <= 0.0) h_ = dir * opt_.init_step;
    while ((t_target - t_) * dir > 0.0) {
      if (at_resolution_limit(t_target)) break;
      if (std::fabs(h_) > std::fabs(t_target - t_)) {
        h_ = t_target - t_;
        have_k1_ = false;
      }
      accept_one_step();
      obs(t_, y_);
    }
    t_ = t_target;  // remove roundoff residue; the state already matches
  }

  void integrate_to(double t_target) {
    integrate_to(t_target, [](double, const Y&) {});
  }

  /// Advance until ev(t, y) crosses zero (sign change relative to its value
  /// at the current state), at most until t_limit. Returns true when the
  /// event was found; the state is then at the event to step-retake accuracy.
  template <typename Ev>
  bool integrate_to_event(Ev&& ev, double t_limit) {
    const double dir = t_limit >= t_ ? 1.0 : -1.0;
    if (h_ == 0.0 || h_ * dir <= 0.0) h_ = dir * opt_.init_step;
    double e_prev = ev(t_, y_);
    while ((t_limit - t_) * dir > 0.0) {
      if (at_resolution_limit(t_limit)) {
        t_ = t_limit;
        break;
      }
      if (std::fabs(h_) > std::fabs(t_limit - t_)) {
        h_ = t_limit - t_;
        have_k1_ = false;
      }
      const double t_before = t_;
      const Y y_before = y_;
      accept_one_step();
      const double h_acc = t_ - t_before;
      const double e_now = ev(t_, y_);
      if (e_prev == 0.0 && e_now == 0.0) return true;
      if (e_prev * e_now <= 0.0 && (e_prev != 0.0 || e_now == 0.0)) {
        locate_event(ev, t_before, y_before, h_acc, e_prev, e_now);
        return true;
      }
      e_prev = e_now;
    }
    return false;
  }

 private:
  // A gap below the floating-point resolution of t cannot be integrated
  // across; treat the target as reached.
  bool at_resolution_limit(double t_target) const {
    return std::fabs(t_target - t_) <=
           4.0 * std::numeric_limits<double>::epsilon() *
               std::max(std::fabs(t_), std::fabs(t_target));
  }

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  // 5th-order weights are row 7 of A (FSAL); e[] is b5 - b4 for the error.

  void eval_stages(double t0, const Y& y0, double h, std::array<Y, 7>& k, Y& y5) const {
    Y tmp;
    if (!have_k1_cached_) rhs_(t0, y0, k[0]);
    for (int i = 0; i < Dim; ++i) tmp[i] = y0[i] + h * (0.2 * k[0][i]);
    rhs_(t0 + c2 * h, tmp, k[1]);
    for (int i = 0; i < Dim; ++i)
      tmp[i] = y0[i] + h * (3.0 / 40 * k[0][i] + 9.0 / 40 * k[1][i]);
    rhs_(t0 + c3 * h, tmp, k[2]);
    for (int i = 0; i < Dim; ++i)
      tmp[i] = y0[i] + h * (44.0 / 45 * k[0][i] - 56.0 / 15 * k[1][i] + 32.0 / 9 * k[2][i]);
    rhs_(t0 + c4 * h, tmp, k[3]);
    for (int i = 0; i < Dim; ++i)
      tmp[i] = y0[i] + h * (19372.0 / 6561 * k[0][i] - 25360.0 / 2187 * k[1][i] +
                            64448.0 / 6561 * k[2][i] - 212.0 / 729 * k[3][i]);
    rhs_(t0 + c5 * h, tmp, k[4]);
    for (int i = 0; i < Dim; ++i)
      tmp[i] = y0[i] + h * (9017.0 / 3168 * k[0][i] - 355.0 / 33 * k[1][i] +
                            46732.0 / 5247 * k[2][i] + 49.0 / 176 * k[3][i] -
                            5103.0 / 18656 * k[4][i]);
    rhs_(t0 + h, tmp, k[5]);
    for (int i = 0; i < Dim; ++i)
      y5[i] = y0[i] + h * (35.0 / 384 * k[0][i] + 500.0 / 1113 * k[2][i] +
                           125.0 / 192 * k[3][i] - 2187.0 / 6784 * k[4][i] +
                           11.0 / 84 * k[5][i]);
    rhs_(t0 + h, y5, k[6]);
  }

  double error_norm(const Y& y0, const Y& y5, const std::array<Y, 7>& k, double h) const {
    double sum = 0.0;
    for (int i = 0; i < Dim; ++i) {
      const double e = h * (71.0 / 57600 * k[0][i] - 71.0 / 16695 * k[2][i] +
                            71.0 / 1920 * k[3][i] - 17253.0 / 339200 * k[4][i] +
                            22.0 / 525 * k[5][i] - 1.0 / 40 * k[6][i]);
      const double sc =
          opt_.abs_tol + opt_.rel_tol * std::max(std::fabs(y0[i]), std::fabs(y5[i]));
      sum += (e / sc) * (e / sc);
    }
    return std::sqrt(sum / Dim);
  }

  void accept_one_step() {
    std::array<Y, 7> k;
    Y y5;
    for (;;) {
      if (++steps_ > opt_.max_steps) throw IntegrationError("step budget exhausted");
      if (std::fabs(h_) < opt_.min_step) throw IntegrationError("step size underflow");
      have_k1_cached_ = have_k1_;
      if (have_k1_) k[0] = k1_;
      eval_stages(t_, y_, h_, k, y5);
      const double err = error_norm(y_, y5, k, h_);
      if (err <= 1.0 || !std::isfinite(err)) {
        if (!std::isfinite(err)) {  // singular territory: retreat hard
          h_ *= 0.1;
          have_k1_ = false;
          if (std::fabs(h_) < opt_.min_step)
            throw IntegrationError("step size underflow near a singularity");
          continue;
        }
        t_ += h_;
        y_ = y5;
        k1_ = k[6];
        have_k1_ = true;
        const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
        h_ *= std::max(0.2, grow);
        return;
      }
      h_ *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      have_k1_ = false;
    }
  }

  /// One forced step of exactly h from (t0, y0); no error control. Used only
  /// for event localization inside an already accepted step.
  void forced_step(double t0, const Y& y0, double h, Y& out) {
    std::array<Y, 7> k;
    have_k1_cached_ = false;
    eval_stages(t0, y0, h, k, out);
  }

  template <typename Ev>
  void locate_event(Ev&& ev, double t0, const Y& y0, double h_acc, double ea, double eb) {
    double a = 0.0, b = h_acc;
    Y yb = y_;
    for (int it = 0; it < 80 && std::fabs(b - a) > 1e-14 * std::fabs(h_acc); ++it) {
      double m = (ea == eb) ? 0.5 * (a + b) : (a * eb - b * ea) / (eb - ea);
      // keep strictly inside the bracket; fall back to bisection
      const double lo = std::min(a, b), hi = std::max(a, b);
      if (!(m > lo) || !(m < hi)) m = 0.5 * (a + b);
      Y ym;
      forced_step(t0, y0, m, ym);
      const double em = ev(t0 + m, ym);
      if (ea * em <= 0.0) {
        b = m;
        eb = em;
        yb = ym;
      } else {
        a = m;
        ea = em;
      }
    }
    t_ = t0 + b;
    y_ = yb;
    have_k1_ = false;
    h_ = h_acc;  // resume with the pre-event step size
  }

  Rhs rhs_;
  OdeOptions opt_;
  double t_{0};
  Y y_{};
  double h_{0};
  Y k1_{};
  bool have_k1_{false};
  mutable bool have_k1_cached_{false};
  long steps_{0};
};

}  // namespace octa
