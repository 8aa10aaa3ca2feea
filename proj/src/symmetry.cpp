#include "octa/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "octa/errors.hpp"

namespace octa {

namespace {

constexpr double kGridMatchTol = 1e-9;  // relative to the period

Vec3 swap_xy(const Vec3& v) { return {v.y, v.x, v.z}; }
Vec3 cycle(const Vec3& v) { return {v.z, v.x, v.y}; }  // X(t + T/3) = (z, x, y)(t)

void validate_segment(const FundamentalSegment& seg, double tol) {
  const int n = seg.cells();
  if (n < 2) throw std::invalid_argument("segment needs at least two cells");
  if (!(seg.period > 0)) throw std::invalid_argument("segment period must be positive");
  if (seg.nodes.size() != seg.node_times.size())
    throw std::invalid_argument("segment nodes/times size mismatch");
  if (seg.has_velocities() && seg.node_velocities.size() != seg.nodes.size())
    throw std::invalid_argument("segment velocity count mismatch");
  if (std::fabs(seg.node_times.front()) > tol ||
      std::fabs(seg.node_times.back() - seg.sixth()) > tol)
    throw std::invalid_argument("segment must span [0, T/6]");
  for (int i = 1; i <= n; ++i)
    if (!(seg.node_times[i] > seg.node_times[i - 1]))
      throw std::invalid_argument("segment node times must be strictly increasing");

  const Configuration& first = seg.nodes.front();
  if (std::fabs(first.x) > tol || std::fabs(first.y - first.z) > tol)
    throw std::invalid_argument("segment node 0 must satisfy x = 0 and y = z");
  const Configuration& last = seg.nodes.back();
  if (std::fabs(last.x - last.y) > tol)
    throw std::invalid_argument("segment node N must satisfy x = y");
  for (int i = 0; i <= n; ++i) {
    const Configuration& c = seg.nodes[i];
    if (c.x < 0 || c.y < 0 || c.z < 0)
      throw std::invalid_argument("segment node outside the cone S");
    if (i > 0 && c.is_collision())
      throw std::invalid_argument("segment has a collision at an interior node");
  }
}

// Derivative at the middle of three samples with spacings a (left) and b
// (right).
Vec3 central_derivative(const Vec3& fm, const Vec3& f0, const Vec3& fp, double a, double b) {
  return fm * (-b / (a * (a + b))) + f0 * ((b - a) / (a * b)) + fp * (a / (b * (a + b)));
}

std::vector<Vec3> derive_velocities(const FundamentalSegment& seg) {
  const int n = seg.cells();
  std::vector<Vec3> vel(n + 1);
  for (int i = 1; i < n; ++i) {
    const double a = seg.node_times[i] - seg.node_times[i - 1];
    const double b = seg.node_times[i + 1] - seg.node_times[i];
    vel[i] = central_derivative(seg.nodes[i - 1].as_vec(), seg.nodes[i].as_vec(),
                                seg.nodes[i + 1].as_vec(), a, b);
  }
  {  // one-sided (second order) at node N
    const double b = seg.node_times[n] - seg.node_times[n - 1];
    const double a = seg.node_times[n - 1] - seg.node_times[n - 2];
    vel[n] = seg.nodes[n].as_vec() * ((2 * b + a) / (b * (b + a))) -
             seg.nodes[n - 1].as_vec() * ((b + a) / (b * a)) +
             seg.nodes[n - 2].as_vec() * (b / (a * (b + a)));
  }
  {  // node 0: x leaves the collision with unbounded speed, y and z are smooth
    const double b = seg.node_times[1] - seg.node_times[0];
    const double a = seg.node_times[2] - seg.node_times[1];
    Vec3 v = seg.nodes[0].as_vec() * (-(2 * b + a) / (b * (b + a))) +
             seg.nodes[1].as_vec() * ((b + a) / (b * a)) -
             seg.nodes[2].as_vec() * (b / (a * (b + a)));
    const double m = 0.5 * (v.y - v.z);  // enforce dy/dt(0) = -dz/dt(0)
    vel[0] = {kInfinity, m, -m};
  }
  return vel;
}

int find_time_index(const std::vector<double>& times, double period, double t) {
  // Map into [0, period) first; guard values that round onto the period.
  double tm = std::fmod(t, period);
  if (tm < 0) tm += period;
  const double tol = kGridMatchTol * period;
  if (tm > period - tol) tm -= period;
  auto it = std::lower_bound(times.begin(), times.end(), tm - tol);
  if (it == times.end() || std::fabs(*it - tm) > tol)
    throw GridError("sample grid is not closed under the group action");
  return static_cast<int>(it - times.begin());
}

}  // namespace

GroupElement GroupElement::compose(const GroupElement& other) const {
  GroupElement r;
  for (int i = 0; i < 3; ++i) r.perm[i] = other.perm[perm[i]];
  r.reverse = reverse != other.reverse;
  const int eps2 = other.reverse ? -1 : 1;
  r.shift_thirds = ((eps2 * shift_thirds + other.shift_thirds) % 3 + 3) % 3;
  return r;
}

std::array<GroupElement, 6> GroupElement::all() {
  const GroupElement e = identity(), G = g(), H = h();
  return {e, G, G.compose(G), H, H.compose(G), H.compose(G).compose(G)};
}

PeriodicOrbit apply_group_element(const GroupElement& e, const PeriodicOrbit& loop) {
  PeriodicOrbit out = loop;
  const double eps = e.reverse ? -1.0 : 1.0;
  const double shift = e.shift_thirds * loop.period / 3.0;
  for (int k = 0; k < loop.size(); ++k) {
    const double tau = eps * loop.times[k] + shift;
    const int j = find_time_index(loop.times, loop.period, tau);
    out.samples[k].config =
        Configuration::from_vec(e.apply_perm(loop.samples[j].config.as_vec()));
    out.samples[k].velocity = eps * e.apply_perm(loop.samples[j].velocity);
  }
  return out;
}

PeriodicOrbit reconstruct_orbit(const FundamentalSegment& seg) {
  validate_segment(seg, 1e-8);
  const int n = seg.cells();
  const double third = seg.period / 3.0;

  // Snap the endpoint constraints so the six copies agree bit for bit.
  FundamentalSegment s = seg;
  s.nodes.front().x = 0.0;
  s.nodes.front().y = s.nodes.front().z = 0.5 * (seg.nodes.front().y + seg.nodes.front().z);
  s.nodes.back().x = s.nodes.back().y = 0.5 * (seg.nodes.back().x + seg.nodes.back().y);

  const std::vector<Vec3> vel = s.has_velocities() ? s.node_velocities : derive_velocities(s);

  std::vector<double> times;
  std::vector<State> samples;
  times.reserve(6 * n);
  samples.reserve(6 * n);

  // First third: the segment itself, then its reflection through t = T/6.
  for (int i = 0; i < n; ++i) {
    times.push_back(s.node_times[i]);
    samples.push_back({s.nodes[i], vel[i]});
  }
  for (int k = 0; k < n; ++k) {
    const int j = n - k;
    times.push_back(third - s.node_times[j]);
    samples.push_back({Configuration::from_vec(swap_xy(s.nodes[j].as_vec())),
                       -swap_xy(vel[j])});
  }
  // Remaining two thirds by the cyclic relation X(t + T/3) = (z, x, y)(t).
  for (int rep = 1; rep <= 2; ++rep) {
    for (int k = 0; k < 2 * n; ++k) {
      times.push_back(times[k] + rep * third);
      State st = samples[k];
      for (int c = 0; c < rep; ++c) {
        st.config = Configuration::from_vec(cycle(st.config.as_vec()));
        st.velocity = cycle(st.velocity);
      }
      samples.push_back(st);
    }
  }

  PeriodicOrbit orbit;
  orbit.period = seg.period;
  orbit.times = std::move(times);
  orbit.samples = std::move(samples);

  if (std::isnan(seg.energy)) {
    // Energy from an interior sample near t = T/12.
    const double target = seg.period / 12.0;
    int best = 1;
    for (int i = 1; i <= n; ++i)
      if (std::fabs(s.node_times[i] - target) < std::fabs(s.node_times[best] - target))
        best = i;
    orbit.energy = energy_breakdown({s.nodes[best], vel[best]}).hamiltonian;
  } else {
    orbit.energy = seg.energy;
  }
  return orbit;
}

LoopGridMaps loop_grid_maps(const PeriodicOrbit& orbit) {
  LoopGridMaps maps;
  const int m = orbit.size();
  maps.shift_minus_third.resize(m);
  maps.reflect.resize(m);
  for (int k = 0; k < m; ++k) {
    maps.shift_minus_third[k] =
        find_time_index(orbit.times, orbit.period, orbit.times[k] - orbit.period / 3.0);
    maps.reflect[k] = find_time_index(orbit.times, orbit.period, -orbit.times[k]);
  }
  return maps;
}

double symmetry_residual(const PeriodicOrbit& orbit) {
  const LoopGridMaps maps = loop_grid_maps(orbit);
  double res = 0.0;
  for (int k = 0; k < orbit.size(); ++k) {
    const Vec3 at = orbit.samples[k].config.as_vec();
    const Vec3 shifted = orbit.samples[maps.shift_minus_third[k]].config.as_vec();
    const Vec3 reflected = orbit.samples[maps.reflect[k]].config.as_vec();
    res = std::max(res, std::fabs(shifted.x - at.y));
    res = std::max(res, std::fabs(shifted.y - at.z));
    res = std::max(res, std::fabs(shifted.z - at.x));
    res = std::max(res, std::fabs(reflected.x - at.x));
    res = std::max(res, std::fabs(reflected.y - at.z));
    res = std::max(res, std::fabs(reflected.z - at.y));
  }
  return res;
}

FundamentalSegment project_constraints(const FundamentalSegment& seg) {
  FundamentalSegment out = seg;
  const int n = out.cells();
  for (auto& node : out.nodes) {
    node.x = std::max(node.x, kPositivityFloor);
    node.y = std::max(node.y, kPositivityFloor);
    node.z = std::max(node.z, kPositivityFloor);
  }
  Configuration& first = out.nodes.front();
  first.x = 0.0;
  first.y = first.z = std::max(0.5 * (first.y + first.z), kPositivityFloor);
  Configuration& last = out.nodes[n];
  last.x = last.y = std::max(0.5 * (last.x + last.y), kPositivityFloor);
  return out;
}

}  // namespace octa
