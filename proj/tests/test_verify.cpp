#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "octa/action.hpp"
#include "octa/central_config.hpp"
#include "octa/rng.hpp"
#include "octa/verify.hpp"

using namespace octa;

TEST_CASE("alpha0: value, scaling, special point") {
  const double g = curly_g();
  CHECK(alpha0(g) == doctest::Approx(13.554).epsilon(1e-3));
  CHECK(alpha0(8 * g) == doctest::Approx(4.0 * alpha0(g)).epsilon(1e-14));
  CHECK(alpha0(1.0 / 3.14159265358979324) ==
        doctest::Approx(3.0 / std::cbrt(2.0)).epsilon(1e-14));
  CHECK(alpha0(1.0 / 3.14159265358979324) == doctest::Approx(2.3811).epsilon(1e-4));
  CHECK_THROWS_AS(alpha0(-1.0), std::invalid_argument);
}

TEST_CASE("kepler quadrature oracle validates the alpha0 formula") {
  const double g = curly_g();
  // nine (g, tau) combinations within 0.1%
  for (double gg : {1.0, g, 10.0}) {
    for (double tau : {0.5, 1.0, 2.0}) {
      const double numeric = kepler_homothetic_action(gg, tau);
      const double formula = alpha0(gg) * std::cbrt(tau);
      CHECK(std::fabs(numeric - formula) / formula < 1e-3);
    }
  }
  // tau^{1/3} law: eightfold period doubles the action
  CHECK(kepler_homothetic_action(g, 8.0) ==
        doctest::Approx(2.0 * kepler_homothetic_action(g, 1.0)).epsilon(1e-8));
  // Gordon: concavity of tau^{1/3} makes splitting a period more expensive
  const double whole = kepler_homothetic_action(g, 1.0);
  for (double tbar : {0.25, 0.5}) {
    CHECK(kepler_homothetic_action(g, tbar) +
              kepler_homothetic_action(g, 1.0 - tbar) >=
          whole);
  }
}

TEST_CASE("sundman fit on synthetic power laws") {
  {  // exact power law
    std::vector<double> t, x;
    for (int i = 0; i < 40; ++i) {
      const double dt = std::pow(10.0, -6.0 + 4.0 * i / 39.0);
      t.push_back(dt);
      x.push_back(2.0 * std::pow(dt, 2.0 / 3.0));
    }
    const SundmanFit fit = sundman_fit(t, x, 0.0);
    CHECK(fit.exponent == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(fit.x0 == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(fit.fit_residual < 1e-10);
    CHECK(std::fabs(fit.t_bar) < 1e-9);
  }
  {  // perturbed by a linear term, window restricted to [1e-6, 1e-3]
    std::vector<double> t, x;
    for (int i = 0; i < 60; ++i) {
      const double dt = std::pow(10.0, -6.0 + 3.0 * i / 59.0);
      t.push_back(dt);
      x.push_back(2.0 * std::pow(dt, 2.0 / 3.0) + 0.3 * dt);
    }
    const SundmanFit fit = sundman_fit(t, x, 0.0);
    CHECK(std::fabs(fit.exponent - 2.0 / 3.0) < 0.01);
  }
  {  // shifted collision time is recovered by the residual refinement
    const double tbar = 1e-4;
    std::vector<double> t, x;
    for (int i = 0; i < 50; ++i) {
      const double dt = std::pow(10.0, -5.0 + 3.0 * i / 49.0);
      t.push_back(tbar + dt);
      x.push_back(0.8 * std::pow(dt, 2.0 / 3.0));
    }
    const SundmanFit fit = sundman_fit(t, x, tbar + 2e-6);
    CHECK(std::fabs(fit.t_bar - tbar) < 1e-8);
    CHECK(std::fabs(fit.exponent - 2.0 / 3.0) < 1e-3);
  }
  std::vector<double> tiny_t{1e-3, 2e-3}, tiny_x{1.0, 2.0};
  CHECK_THROWS_AS(sundman_fit(tiny_t, tiny_x, 0.0), std::invalid_argument);
}

TEST_CASE("coercivity constant is sqrt(3)/2") {
  CHECK(coercivity_constant() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("coercivity diagnostic on synthetic loops") {
  // circle of radius R about the diagonal axis through the origin: the
  // max norm is R everywhere, so the first third must be at least 0.866 R
  // long (2 pi R / 3 in fact)
  const double R = 0.7;
  PeriodicOrbit orbit;
  orbit.period = 6.0;
  const int m = 600;
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * 3.14159265358979324 * k / m;
    // orthonormal frame spanning the plane orthogonal to (1,1,1)
    const Vec3 e1{1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0};
    const Vec3 e2{1 / std::sqrt(6.0), 1 / std::sqrt(6.0), -2 / std::sqrt(6.0)};
    const Vec3 p = e1 * (R * std::cos(th)) + e2 * (R * std::sin(th));
    orbit.times.push_back(6.0 * k / m);
    orbit.samples.push_back({Configuration::from_vec(p), {}});
  }
  const auto [len, ad] = coercivity_diagnostic(orbit);
  CHECK(len >= ad);
  CHECK(ad == doctest::Approx(std::sqrt(3.0) / 2.0 * R).epsilon(1e-3));
  CHECK(len == doctest::Approx(2.0 * 3.14159265358979324 * R / 3.0).epsilon(1e-3));
}

TEST_CASE("verification flags constructed violations") {
  // a loop with y and z swapped on the first third fails the symmetry check
  FundamentalSegment seg;
  seg.period = 6.0;
  const int n = 24;
  seg.node_times = QuadratureScheme::graded(1.0, n, 1.5).node_times;
  seg.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double s = seg.node_times[i];
    seg.nodes[i] = {0.8 * std::pow(s, 2.0 / 3.0), 1.0 - 0.2 * s, 1.0 + 0.3 * s};
  }
  seg.nodes[n].y = seg.nodes[n].x;
  seg = project_constraints(seg);
  PeriodicOrbit orbit = reconstruct_orbit(seg);
  orbit.energy = -2.0;

  PeriodicOrbit tampered = orbit;
  for (int k = 0; k < tampered.size() / 3; ++k)
    std::swap(tampered.samples[k].config.y, tampered.samples[k].config.z);
  const VerificationReport rep = verify_orbit(tampered);
  CHECK_FALSE(rep.all_pass());
  CHECK_FALSE(rep.find("symmetry_grid")->pass);

  // the degenerate homothetic loop is rejected through its total collisions
  FundamentalSegment homo = homothetic_segment(6.0, 24, 1.5);
  const PeriodicOrbit degenerate = reconstruct_orbit(homo);
  const VerificationReport rep2 = verify_orbit(degenerate);
  CHECK_FALSE(rep2.all_pass());
  CHECK_FALSE(rep2.find("collision_separation")->pass);
  CHECK_FALSE(rep2.find("reintegration_symmetry")->pass);
}
