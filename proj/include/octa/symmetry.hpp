#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "octa/dynamics.hpp"

namespace octa {

/// Positivity floor applied to free coordinates while optimizing. The true
/// minimizer is interior away from t = 0, so this only guards transient
/// iterates.
inline constexpr double kPositivityFloor = 1e-12;

/// One element of the dihedral group D3 acting on T-periodic loops as
///   (e * X)(t) = P[ X(eps * t + shift) ],
/// with P a coordinate permutation, eps = +-1 time reversal and shift a
/// multiple of T/3. The generators are
///   g: (x,y,z)(t) -> (z,x,y)(t - T/3),   h: (x,y,z)(t) -> (x,z,y)(-t).
struct GroupElement {
  std::array<int, 3> perm{0, 1, 2};  // output component i reads input perm[i]
  int shift_thirds{0};               // shift = shift_thirds * T/3, in {0,1,2}
  bool reverse{false};               // eps = -1

  static GroupElement identity() { return {}; }
  static GroupElement g() { return {{2, 0, 1}, 2, false}; }  // t - T/3 == t + 2T/3 mod T
  static GroupElement h() { return {{0, 2, 1}, 0, true}; }

  /// Composition as maps on loops: (a.compose(b)) * X == a * (b * X).
  GroupElement compose(const GroupElement& other) const;

  bool operator==(const GroupElement& o) const {
    return perm == o.perm && shift_thirds == o.shift_thirds && reverse == o.reverse;
  }

  Vec3 apply_perm(const Vec3& v) const { return {v[perm[0]], v[perm[1]], v[perm[2]]}; }

  /// All six elements: e, g, g^2, h, hg, hg^2.
  static std::array<GroupElement, 6> all();
};

/// Discretized path on [0, T/6], the optimization variable. Node times are a
/// graded mesh with t_0 = 0 and t_N = T/6. Endpoint constraints:
///   node 0:  x = 0 and y = z   (the imposed double collision),
///   node N:  x = y.
/// Velocities are optional; they are filled by the shooting refinement and
/// otherwise derived by finite differences when a full loop is built.
struct FundamentalSegment {
  double period{0};                       // full period T
  std::vector<double> node_times;         // ascending, [0, T/6]
  std::vector<Configuration> nodes;
  std::vector<Vec3> node_velocities;      // empty or one per node
  double energy{std::numeric_limits<double>::quiet_NaN()};

  int cells() const { return static_cast<int>(node_times.size()) - 1; }
  double sixth() const { return period / 6.0; }
  bool has_velocities() const { return !node_velocities.empty(); }
};

/// Full-period sampled loop on [0, T): six permuted/reflected copies of the
/// fundamental segment, 6N samples, collisions at samples 0, 2N and 4N.
struct PeriodicOrbit {
  double period{0};
  std::vector<double> times;    // ascending in [0, T)
  std::vector<State> samples;
  double energy{std::numeric_limits<double>::quiet_NaN()};

  int size() const { return static_cast<int>(times.size()); }
};

/// Apply a group element to a sampled loop. The sample grid must be closed
/// under t -> t + T/3 and t -> -t (mod T); throws GridError otherwise.
PeriodicOrbit apply_group_element(const GroupElement& e, const PeriodicOrbit& loop);

/// Rebuild the full period from the fundamental segment:
///   [T/6, T/3]:  X(t) = (y, x, z)(T/3 - t)
///   [T/3, 2T/3]: X(t) = (z, x, y)(t - T/3), and once more for the last third.
/// Continuity at T/6 is forced by x = y there, at T/3 by y(0) = z(0).
/// Throws on violated segment constraints.
PeriodicOrbit reconstruct_orbit(const FundamentalSegment& seg);

/// Max deviation from the invariance relations over the sample grid:
///   |x(t - T/3) - y(t)|, |y(t - T/3) - z(t)|, |z(t - T/3) - x(t)|,
///   |x(-t) - x(t)|, |y(-t) - z(t)|, |z(-t) - y(t)|.
double symmetry_residual(const PeriodicOrbit& orbit);

/// Enforce the segment constraint set: x_0 = 0, y_0 = z_0 (mean), x_N = y_N
/// (mean), every free coordinate clamped to >= kPositivityFloor. Idempotent.
FundamentalSegment project_constraints(const FundamentalSegment& seg);

/// Grid index maps for a loop grid closed under the group action; throws
/// GridError when the grid is not closed. indices_shift[k] is the sample at
/// t_k - T/3, indices_reflect[k] the sample at -t_k (mod T).
struct LoopGridMaps {
  std::vector<int> shift_minus_third;
  std::vector<int> reflect;
};
LoopGridMaps loop_grid_maps(const PeriodicOrbit& orbit);

}  // namespace octa
