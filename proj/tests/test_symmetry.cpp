#include <doctest.h>

#include <cmath>

#include "octa/action.hpp"
#include "octa/errors.hpp"
#include "octa/rng.hpp"
#include "octa/symmetry.hpp"

using namespace octa;

namespace {

// A synthetic feasible segment: smooth, strictly interior away from node 0.
FundamentalSegment synthetic_segment(double period, int cells, std::uint64_t seed) {
  FundamentalSegment seg;
  seg.period = period;
  seg.node_times = QuadratureScheme::graded(period / 6.0, cells, 1.5).node_times;
  seg.nodes.resize(cells + 1);
  SplitMix64 rng(seed);
  const double a = rng.range(0.3, 0.6), b = rng.range(0.8, 1.2);
  for (int i = 0; i <= cells; ++i) {
    const double s = seg.node_times[i] / (period / 6.0);
    seg.nodes[i] = {a * std::pow(s, 2.0 / 3.0) + 0.3 * s * (1 - s),
                    b - 0.3 * s + 0.05 * std::sin(3 * s),
                    b + 0.2 * s + 0.05 * std::sin(2 * s)};
  }
  // impose the boundary structure: x(0) = 0, y(0) = z(0), x(T/6) = y(T/6)
  seg.nodes[0].x = 0.0;
  seg.nodes[0].y = seg.nodes[0].z = b;
  seg.nodes[cells].y = seg.nodes[cells].x;
  return seg;
}

}  // namespace

TEST_CASE("D3 relations and the full multiplication table") {
  const GroupElement e = GroupElement::identity();
  const GroupElement g = GroupElement::g();
  const GroupElement h = GroupElement::h();

  CHECK(g.compose(g).compose(g) == e);        // g^3 = 1
  CHECK(h.compose(h) == e);                   // h^2 = 1
  const GroupElement hg = h.compose(g);
  CHECK(hg.compose(hg) == e);                 // (hg)^2 = 1

  // closure and uniqueness: all 36 products land back in the group
  const auto all = GroupElement::all();
  for (const GroupElement& a : all) {
    for (const GroupElement& b : all) {
      const GroupElement c = a.compose(b);
      int matches = 0;
      for (const GroupElement& d : all) matches += (c == d);
      CHECK(matches == 1);
    }
  }
  // associativity on a spot check matrix
  for (const GroupElement& a : all)
    for (const GroupElement& b : all)
      CHECK(a.compose(b.compose(g)) == a.compose(b).compose(g));
}

TEST_CASE("reconstruction satisfies the loop symmetries grid-exactly") {
  const FundamentalSegment seg = synthetic_segment(6.0, 32, 5);
  const PeriodicOrbit orbit = reconstruct_orbit(seg);

  CHECK(orbit.size() == 6 * 32);
  CHECK(symmetry_residual(orbit) < 1e-14);

  // loop value at T/3 is (z(0), 0, y(0))
  const int third = orbit.size() / 3;
  CHECK(orbit.times[third] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(orbit.samples[third].config.x == seg.nodes[0].z);
  CHECK(orbit.samples[third].config.y == 0.0);
  CHECK(orbit.samples[third].config.z == seg.nodes[0].y);

  // identity and order of the generators on the sampled loop
  const PeriodicOrbit same = apply_group_element(GroupElement::identity(), orbit);
  for (int k = 0; k < orbit.size(); ++k) {
    CHECK(same.samples[k].config.x == orbit.samples[k].config.x);
    CHECK(same.samples[k].config.z == orbit.samples[k].config.z);
  }
  PeriodicOrbit g3 = apply_group_element(GroupElement::g(), orbit);
  g3 = apply_group_element(GroupElement::g(), g3);
  g3 = apply_group_element(GroupElement::g(), g3);
  PeriodicOrbit h2 = apply_group_element(GroupElement::h(), orbit);
  h2 = apply_group_element(GroupElement::h(), h2);
  for (int k = 0; k < orbit.size(); ++k) {
    CHECK(g3.samples[k].config.y == orbit.samples[k].config.y);
    CHECK(h2.samples[k].config.y == orbit.samples[k].config.y);
  }

  // a reconstructed loop is a fixed point of both generators
  const PeriodicOrbit gfix = apply_group_element(GroupElement::g(), orbit);
  const PeriodicOrbit hfix = apply_group_element(GroupElement::h(), orbit);
  double dev = 0;
  for (int k = 0; k < orbit.size(); ++k) {
    dev = std::max(dev, (gfix.samples[k].config.as_vec() -
                         orbit.samples[k].config.as_vec()).inf_norm());
    dev = std::max(dev, (hfix.samples[k].config.as_vec() -
                         orbit.samples[k].config.as_vec()).inf_norm());
  }
  CHECK(dev < 1e-14);
}

TEST_CASE("restrict-then-reconstruct is the identity on reconstructed loops") {
  const FundamentalSegment seg = synthetic_segment(6.0, 24, 11);
  const PeriodicOrbit orbit = reconstruct_orbit(seg);
  FundamentalSegment back;
  back.period = orbit.period;
  const int n = orbit.size() / 6;
  back.node_times.assign(orbit.times.begin(), orbit.times.begin() + n + 1);
  back.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i) back.nodes[i] = orbit.samples[i].config;
  const PeriodicOrbit again = reconstruct_orbit(back);
  for (int k = 0; k < orbit.size(); ++k) {
    CHECK(again.times[k] == orbit.times[k]);
    CHECK(again.samples[k].config.x == orbit.samples[k].config.x);
    CHECK(again.samples[k].config.y == orbit.samples[k].config.y);
    CHECK(again.samples[k].config.z == orbit.samples[k].config.z);
  }
}

TEST_CASE("broken symmetry is detected") {
  const FundamentalSegment seg = synthetic_segment(6.0, 32, 7);
  PeriodicOrbit orbit = reconstruct_orbit(seg);
  // swap y and z on the first third only
  for (int k = 0; k < orbit.size() / 3; ++k)
    std::swap(orbit.samples[k].config.y, orbit.samples[k].config.z);
  CHECK(symmetry_residual(orbit) > 1e-3);
}

TEST_CASE("fully symmetric homothetic-style input reconstructs exactly") {
  // x = y = z along the segment satisfies every endpoint constraint at once
  FundamentalSegment seg;
  seg.period = 6.0;
  const int n = 30;
  seg.node_times = QuadratureScheme::graded(1.0, n, 1.5).node_times;
  seg.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double v = std::pow(seg.node_times[i], 2.0 / 3.0);
    seg.nodes[i] = {v, v, v};
  }
  const PeriodicOrbit orbit = reconstruct_orbit(seg);
  const LoopGridMaps maps = loop_grid_maps(orbit);
  for (int k = 0; k < orbit.size(); ++k) {
    const int j = maps.shift_minus_third[k];
    CHECK(orbit.samples[j].config.x == orbit.samples[k].config.y);
  }

  // the same values arranged as a plain periodic bump without the T/3
  // relabeling do not satisfy the shift relations
  PeriodicOrbit naive = orbit;
  for (int k = 0; k < orbit.size(); ++k) {
    const double t = orbit.times[k];
    const double tm = std::fmod(t, orbit.period / 3.0);
    const double u = std::min(tm, orbit.period / 3.0 - tm);
    const double v = std::pow(u, 2.0 / 3.0);
    naive.samples[k].config = {v, 0.9 * v + 0.1, 1.1 * v + 0.1};
  }
  CHECK(symmetry_residual(naive) > 1e-3);
}

TEST_CASE("constraint projection") {
  FundamentalSegment seg = synthetic_segment(6.0, 16, 3);
  seg.nodes[0] = {0.3, 1.0, 0.8};
  seg.nodes[5].y = -1e-5;
  seg.nodes[16] = {0.7, 0.9, 1.1};
  const FundamentalSegment p = project_constraints(seg);
  CHECK(p.nodes[0].x == 0.0);
  CHECK(p.nodes[0].y == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(p.nodes[0].z == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(p.nodes[5].y == kPositivityFloor);
  CHECK(p.nodes[16].x == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(p.nodes[16].y == doctest::Approx(0.8).epsilon(1e-15));
  // idempotent
  const FundamentalSegment pp = project_constraints(p);
  for (int i = 0; i <= 16; ++i) {
    CHECK(pp.nodes[i].x == p.nodes[i].x);
    CHECK(pp.nodes[i].y == p.nodes[i].y);
    CHECK(pp.nodes[i].z == p.nodes[i].z);
  }
}

TEST_CASE("incompatible grids raise errors") {
  const FundamentalSegment seg = synthetic_segment(6.0, 16, 9);
  PeriodicOrbit orbit = reconstruct_orbit(seg);
  orbit.times[3] += 1e-4;  // break grid closure
  CHECK_THROWS_AS(apply_group_element(GroupElement::g(), orbit), GridError);
  CHECK_THROWS_AS(symmetry_residual(orbit), GridError);
}

TEST_CASE("segment constraint violations are rejected") {
  FundamentalSegment seg = synthetic_segment(6.0, 16, 13);
  seg.nodes[0].x = 0.2;
  CHECK_THROWS_AS(reconstruct_orbit(seg), std::invalid_argument);
  FundamentalSegment seg2 = synthetic_segment(6.0, 16, 13);
  seg2.nodes[8] = {0.0, 1.0, 1.0};  // interior collision
  CHECK_THROWS_AS(reconstruct_orbit(seg2), std::invalid_argument);
}
