#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace octa {

struct LbfgsOptions {
  long max_iters = 50000;
  int memory = 10;
  double armijo_c1 = 1e-4;
  double step_shrink = 0.5;
  int max_backtracks = 60;
};

struct LbfgsResult {
  double value{std::numeric_limits<double>::quiet_NaN()};
  long iterations{0};
  std::string reason;
};

/// Limited-memory BFGS with backtracking Armijo line search (descent is
/// monotone by construction). Infeasible trial points may signal themselves
/// with a non-finite objective; the line search backs off.
///
/// fn(u, grad)        -> objective value, fills grad
/// stop(u, grad)      -> true once the caller's convergence test holds;
///                       checked before the first step and after each accept.
/// on_accept(f)       -> called with each accepted objective value.
template <typename Fn, typename Stop, typename OnAccept>
LbfgsResult lbfgs_minimize(Fn&& fn, Stop&& stop, OnAccept&& on_accept,
                           std::vector<double>& u, const LbfgsOptions& opt = {}) {
  const std::size_t n = u.size();
  std::vector<double> g(n), u_new(n), g_new(n), dir(n);
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) r += a[i] * b[i];
    return r;
  };

  LbfgsResult res;
  double f = fn(u, g);
  if (!std::isfinite(f)) {
    res.value = f;
    res.reason = "infeasible_start";
    return res;
  }
  on_accept(f);
  if (stop(u, g)) {
    res.value = f;
    res.reason = "converged";
    return res;
  }

  double gamma = 1.0;  // H0 scaling
  for (long iter = 0; iter < opt.max_iters; ++iter) {
    // two-loop recursion
    dir = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * dot(s_hist[i], dir);
      for (std::size_t k = 0; k < n; ++k) dir[k] -= alpha[i] * y_hist[i][k];
    }
    for (std::size_t k = 0; k < n; ++k) dir[k] *= gamma;
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * dot(y_hist[i], dir);
      for (std::size_t k = 0; k < n; ++k) dir[k] += (alpha[i] - beta) * s_hist[i][k];
    }
    for (std::size_t k = 0; k < n; ++k) dir[k] = -dir[k];

    double slope = dot(g, dir);
    if (!(slope < 0)) {  // fall back to steepest descent
      for (std::size_t k = 0; k < n; ++k) dir[k] = -g[k];
      slope = -dot(g, g);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      gamma = 1.0;
    }

    double step = 1.0;
    if (iter == 0) {
      double gmax = 0;
      for (double v : g) gmax = std::max(gmax, std::fabs(v));
      step = std::min(1.0, 1.0 / std::max(gmax, 1e-12));
    }
    // near the optimum the true decrease drops below the resolution of f in
    // double precision; the epsilon-sized slack keeps the quasi-Newton
    // polish going once f differences are pure rounding noise
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(f);
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      for (std::size_t k = 0; k < n; ++k) u_new[k] = u[k] + step * dir[k];
      f_new = fn(u_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + opt.armijo_c1 * step * slope + slack) {
        accepted = true;
        break;
      }
      step *= opt.step_shrink;
    }
    res.iterations = iter + 1;
    if (!accepted) {
      res.value = f;
      res.reason = "line_search_failure";
      return res;
    }

    std::vector<double> s(n), yv(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = u_new[k] - u[k];
      yv[k] = g_new[k] - g[k];
    }
    const double ys = dot(yv, s);
    const double yy = dot(yv, yv);
    if (ys > 1e-12 * std::sqrt(yy) * std::sqrt(dot(s, s)) && yy > 0) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / ys);
      gamma = ys / yy;
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    u.swap(u_new);
    g.swap(g_new);
    f = f_new;
    on_accept(f);
    if (stop(u, g)) {
      res.value = f;
      res.reason = "converged";
      return res;
    }
  }
  res.value = f;
  res.reason = "max_iterations";
  return res;
}

}  // namespace octa
