#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "octa/action.hpp"
#include "octa/central_config.hpp"
#include "octa/kepler1d.hpp"
#include "octa/pipeline.hpp"
#include "octa/regularize.hpp"
#include "octa/rng.hpp"
#include "octa/verify.hpp"

using namespace octa;

namespace {

FundamentalSegment random_feasible_segment(double period, int cells, std::uint64_t seed) {
  FundamentalSegment seg;
  seg.period = period;
  seg.node_times = QuadratureScheme::graded(period / 6.0, cells, 1.5).node_times;
  seg.nodes.resize(cells + 1);
  SplitMix64 rng(seed);
  const double y0 = rng.range(0.6, 1.2);
  const double amp = rng.range(0.05, 0.25);
  for (int i = 0; i <= cells; ++i) {
    const double s = seg.node_times[i] / (period / 6.0);
    seg.nodes[i] = {0.9 * std::pow(s, 2.0 / 3.0) + amp * s * (1 - s),
                    y0 * (1.0 - 0.25 * s) + amp * 0.3 * std::sin(2.0 * s),
                    y0 * (1.0 + 0.35 * s) + amp * 0.2 * std::sin(3.0 * s)};
  }
  return project_constraints(seg);
}

// finite differences of the action in the reduced (tangent) coordinates
std::vector<Vec3> fd_projected_gradient(const FundamentalSegment& seg,
                                        const QuadratureScheme& q, double step) {
  const int n = seg.cells();
  std::vector<Vec3> g(n + 1);
  auto eval = [&](FundamentalSegment s) { return discretized_action(s, q); };

  {  // node 0 moves along (0, 1, 1)/2 per unit of the reduced variable
    FundamentalSegment p = seg, m = seg;
    p.nodes[0].y += step;
    p.nodes[0].z += step;
    m.nodes[0].y -= step;
    m.nodes[0].z -= step;
    const double d = (eval(p) - eval(m)) / (2 * step);  // d action / d u0
    g[0] = {0.0, 0.5 * d, 0.5 * d};
  }
  for (int i = 1; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      FundamentalSegment p = seg, m = seg;
      Vec3 vp = p.nodes[i].as_vec(), vm = m.nodes[i].as_vec();
      vp[c] += step;
      vm[c] -= step;
      p.nodes[i] = Configuration::from_vec(vp);
      m.nodes[i] = Configuration::from_vec(vm);
      g[i][c] = (eval(p) - eval(m)) / (2 * step);
    }
  }
  {  // node N: (1, 1, 0) direction and the free z
    FundamentalSegment p = seg, m = seg;
    p.nodes[n].x += step;
    p.nodes[n].y += step;
    m.nodes[n].x -= step;
    m.nodes[n].y -= step;
    const double d = (eval(p) - eval(m)) / (2 * step);
    FundamentalSegment pz = seg, mz = seg;
    pz.nodes[n].z += step;
    mz.nodes[n].z -= step;
    const double dz = (eval(pz) - eval(mz)) / (2 * step);
    g[n] = {0.5 * d, 0.5 * d, dz};
  }
  return g;
}

double grad_norm(const std::vector<Vec3>& g) {
  double s = 0;
  for (const Vec3& v : g) s += v.norm2();
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("constant segment integrates exactly to U * (T/6)") {
  // constraints disabled: a constant interior segment is valid input for the
  // quadrature even though it violates the loop class
  FundamentalSegment seg;
  seg.period = 6.0;
  const int n = 20;
  seg.node_times = QuadratureScheme::graded(1.0, n, 1.5).node_times;
  seg.nodes.assign(n + 1, Configuration{1, 1, 1});
  QuadratureScheme q;
  q.node_times = seg.node_times;
  const double expected = potential({1, 1, 1});
  CHECK(discretized_action(seg, q) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(discretized_action(seg, q) == doctest::Approx(2.4963203).epsilon(1e-7));
}

TEST_CASE("interior collision nodes are rejected") {
  FundamentalSegment seg = random_feasible_segment(6.0, 16, 1);
  QuadratureScheme q;
  q.node_times = seg.node_times;
  seg.nodes[7] = {1.0, 0.0, 1.0};
  CHECK_THROWS_AS(discretized_action(seg, q), std::domain_error);
  CHECK_THROWS_AS(action_gradient(seg, q), std::domain_error);
}

TEST_CASE("quadrature converges at second order on a smooth segment") {
  auto action_at = [](int cells) {
    FundamentalSegment seg;
    seg.period = 6.0;
    seg.node_times = QuadratureScheme::graded(1.0, cells, 1.5).node_times;
    seg.nodes.resize(cells + 1);
    for (int i = 0; i <= cells; ++i) {
      const double t = seg.node_times[i];
      seg.nodes[i] = {1.0 + 0.3 * std::sin(t), 1.2 - 0.2 * t, 0.9 + 0.1 * t * t};
    }
    QuadratureScheme q;
    q.node_times = seg.node_times;
    return discretized_action(seg, q);
  };
  const double ref = action_at(8192);
  const double e1 = std::fabs(action_at(128) - ref);
  const double e2 = std::fabs(action_at(256) - ref);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.9);
}

TEST_CASE("scaling law: X -> 2X, T -> 2^{3/2} T multiplies the action by sqrt(2)") {
  const FundamentalSegment seg = random_feasible_segment(6.0, 32, 4);
  QuadratureScheme q;
  q.node_times = seg.node_times;
  const double base = discretized_action(seg, q);

  FundamentalSegment scaled = seg;
  scaled.period = seg.period * std::pow(2.0, 1.5);
  for (auto& t : scaled.node_times) t *= std::pow(2.0, 1.5);
  for (auto& c : scaled.nodes) c = {2 * c.x, 2 * c.y, 2 * c.z};
  QuadratureScheme qs;
  qs.node_times = scaled.node_times;
  CHECK(discretized_action(scaled, qs) ==
        doctest::Approx(std::sqrt(2.0) * base).epsilon(1e-13));
}

TEST_CASE("analytic action gradient matches central finite differences") {
  for (std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
    const FundamentalSegment seg = random_feasible_segment(6.0, 24, seed);
    QuadratureScheme q;
    q.node_times = seg.node_times;
    const std::vector<Vec3> g = action_gradient(seg, q);
    const std::vector<Vec3> fd = fd_projected_gradient(seg, q, 1e-6);
    double diff = 0;
    for (std::size_t i = 0; i < g.size(); ++i) diff += (g[i] - fd[i]).norm2();
    CHECK(std::sqrt(diff) <= 1e-6 * grad_norm(g));
  }
}

TEST_CASE("gradient symmetry at a y=z symmetric segment") {
  FundamentalSegment seg = random_feasible_segment(6.0, 16, 8);
  for (auto& c : seg.nodes) c.z = c.y;       // fully y-z symmetric
  seg.nodes.back().y = seg.nodes.back().x;   // keep the endpoint constraint
  seg.nodes.back().z = seg.nodes.back().y;
  seg = project_constraints(seg);
  QuadratureScheme q;
  q.node_times = seg.node_times;
  const std::vector<Vec3> g = action_gradient(seg, q);
  CHECK(g[0].y == doctest::Approx(g[0].z).epsilon(1e-15));
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    CHECK(g[i].y == doctest::Approx(g[i].z).epsilon(1e-12));
}

TEST_CASE("discrete Euler-Lagrange recurrence annihilates interior gradient entries") {
  // build the segment that satisfies the interior stationarity equations by
  // construction, seeded from a sampled smooth arc (short span keeps the
  // forward recurrence well inside the cone)
  const int n = 40;
  FundamentalSegment seg = random_feasible_segment(1.2, n, 17);
  const std::vector<double>& t = seg.node_times;
  for (int i = 2; i < n; ++i) {
    const double dtm = t[i] - t[i - 1];
    const double dtp = t[i + 1] - t[i];
    const double w = 0.5 * (dtm + dtp);
    const Vec3 xi = seg.nodes[i].as_vec();
    const Vec3 xm = seg.nodes[i - 1].as_vec();
    const Vec3 next = xi + (xi - xm) * (dtp / dtm) +
                      potential_gradient(seg.nodes[i]) * (w * dtp);
    seg.nodes[i + 1] = Configuration::from_vec(next);
  }
  QuadratureScheme q;
  q.node_times = seg.node_times;
  const std::vector<Vec3> g = action_gradient(seg, q);
  for (int i = 2; i < n; ++i) CHECK(g[i].inf_norm() < 1e-8);
}

TEST_CASE("homothetic segment: cusp coefficient, symmetry, action value") {
  const double g_const = curly_g();
  const FundamentalSegment seg = homothetic_segment(6.0, 2048, 1.5);
  CHECK(seg.nodes[0].x == 0.0);
  for (const Configuration& c : seg.nodes) {
    CHECK(c.x == c.y);
    CHECK(c.y == c.z);
  }
  // near t = 0 the radius behaves like (9G/2)^{1/3} t^{2/3}
  const double beta = std::cbrt(4.5 * g_const);
  const double t1 = seg.node_times[1];
  const double v1 = seg.nodes[1].x * std::sqrt(3.0);
  CHECK(v1 / std::pow(t1, 2.0 / 3.0) == doctest::Approx(beta).epsilon(0.01));

  // discretized action approximates alpha0 / 2^{2/3} for T = 6 within 1%
  QuadratureScheme q;
  q.node_times = seg.node_times;
  const double bound = alpha0(g_const) / std::cbrt(4.0);
  CHECK(discretized_action(seg, q) == doctest::Approx(bound).epsilon(0.01));
}

TEST_CASE("degenerate budget returns the seed untouched") {
  const FundamentalSegment seed = random_feasible_segment(6.0, 16, 21);
  MinimizeOptions opt;
  opt.grad_tol = kInfinity;
  const auto [seg, report] = minimize(seed, opt);
  CHECK(report.iterations == 0);
  CHECK(report.terminated_reason == "converged");
  for (int i = 0; i <= 16; ++i)
    CHECK(seg.nodes[i].x == doctest::Approx(seed.nodes[i].x).epsilon(1e-15));
}

TEST_CASE("minimize descends monotonically and hits stationarity on a coarse mesh") {
  const FundamentalSegment seed = random_feasible_segment(6.0, 96, 31);
  MinimizeOptions opt;
  opt.grad_tol = 1e-8;
  opt.max_iters = 20000;
  const auto [seg, report] = minimize(seed, opt);
  CHECK(report.terminated_reason == "converged");
  CHECK(report.gradient_inf_norm < 1e-8);
  CHECK(report.action > 0);
  for (std::size_t i = 1; i < report.action_history.size(); ++i)
    CHECK(report.action_history[i] <= report.action_history[i - 1] + 1e-14);
  CHECK(report.constraint_residual == 0.0);

  // stationarity makes the graded-mesh second difference match grad U up to
  // the gradient tolerance rescaled by the node weight
  auto el_residual = [](const FundamentalSegment& s, double from) {
    double worst = 0;
    for (int i = 1; i < s.cells(); ++i) {
      if (s.node_times[i] < from) continue;
      const double dtm = s.node_times[i] - s.node_times[i - 1];
      const double dtp = s.node_times[i + 1] - s.node_times[i];
      const Vec3 xdd = (s.nodes[i + 1].as_vec() - s.nodes[i].as_vec()) * (1.0 / dtp) -
                       (s.nodes[i].as_vec() - s.nodes[i - 1].as_vec()) * (1.0 / dtm);
      const Vec3 r = xdd * (2.0 / (dtm + dtp)) - potential_gradient(s.nodes[i]);
      worst = std::max(worst, r.inf_norm());
    }
    return worst;
  };
  CHECK(el_residual(seg, 0.1) < 1e-5);

  // under mesh refinement the stationary arc converges to a true solution:
  // integrate the equations of motion from the node state at t ~ 0.1 and
  // measure the drift from the remaining nodes
  auto arc_deviation = [](const FundamentalSegment& s) {
    int i0 = 0;
    while (s.node_times[i0] < 0.1) ++i0;
    const double a = s.node_times[i0] - s.node_times[i0 - 1];
    const double b = s.node_times[i0 + 1] - s.node_times[i0];
    const Vec3 v = s.nodes[i0 - 1].as_vec() * (-b / (a * (a + b))) +
                   s.nodes[i0].as_vec() * ((b - a) / (a * b)) +
                   s.nodes[i0 + 1].as_vec() * (a / (b * (a + b)));
    std::vector<double> targets(s.node_times.begin() + i0 + 1, s.node_times.end());
    const PhysicalRun run = integrate_physical({s.nodes[i0], v}, s.node_times[i0],
                                               s.sixth(), targets);
    double worst = 0;
    for (std::size_t k = 0; k < run.samples.size(); ++k)
      worst = std::max(worst, (run.samples[k].config.as_vec() -
                               s.nodes[i0 + 1 + k].as_vec())
                                  .inf_norm());
    return worst;
  };
  const double coarse = arc_deviation(seg);

  MinimizeOptions opt2 = opt;
  opt2.mesh_schedule = {96, 192};
  const auto [seg2, report2] = minimize(seed, opt2);
  CHECK(report2.terminated_reason == "converged");
  const double fine = arc_deviation(seg2);
  CHECK(fine < coarse);
  CHECK(fine < 1e-3);
}

TEST_CASE("multistart consistency from differently perturbed homothetic seeds") {
  // the paper does not prove uniqueness: agreement is reported as a warning,
  // the hard requirement is that both runs beat the homothetic bound
  const double bound = alpha0(curly_g()) / std::cbrt(4.0);
  MinimizeOptions opt;
  opt.grad_tol = 1e-8;
  opt.max_iters = 40000;
  double first = 0;
  for (std::uint64_t seed : {5ULL, 6ULL}) {
    const FundamentalSegment s = noisy_homothetic_seed(6.0, 128, 1.5, seed);
    const auto [seg, rep] = minimize(s, opt);
    CHECK(rep.terminated_reason == "converged");
    CHECK(rep.action < bound);
    if (first == 0) {
      first = rep.action;
    } else {
      WARN_MESSAGE(std::fabs(rep.action - first) < 1e-6 * first,
                   "multistart disagreement: ", first, " vs ", rep.action);
    }
  }
}

TEST_CASE("minimize rejects infeasible seeds") {
  FundamentalSegment seed = random_feasible_segment(6.0, 12, 41);
  seed.nodes[4].y = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(minimize(seed, {}), std::domain_error);
}
