#pragma once

#include <array>
#include <span>
#include <vector>

#include "octa/dynamics.hpp"

namespace octa {

/// Square-root (Levi-Civita type) chart: x = gamma^2, Gamma = 2 xdot gamma,
/// and likewise for (y, upsilon, Upsilon) and (z, zeta, Zcap). Sign flips of
/// any square-root coordinate leave the physical state unchanged (8-fold
/// covering outside collisions). The flow below additionally carries the
/// rescaled time s with dt/ds = gamma^2 upsilon^2 zeta^2, which regularizes
/// every double collision at once. h is the energy level the flow is
/// restricted to; it enters the vector field explicitly.
struct RegularizedState {
  double gamma{0}, upsilon{0}, zeta{0};
  double Gamma{0}, Upsilon{0}, Zcap{0};
  double s{0};
  double t{0};
  double h{0};
};

/// Derivative of (gamma, Gamma, upsilon, Upsilon, zeta, Zcap, t) w.r.t. s.
using RegDerivative = std::array<double, 7>;

/// Lift a physical state. Collision coordinates map to square-root 0 with a
/// zero conjugate placeholder; the caller supplies the one-sided limit value
/// (Gamma^2 -> 1 at an x-collision) when starting a flow there.
RegularizedState to_regularized(const State& st, double h,
                                std::array<int, 3> signs = {1, 1, 1});

/// Physical preimage. Throws SingularityError when a square-root coordinate
/// vanishes (the velocity is unbounded there).
State from_regularized(const RegularizedState& r);

/// The Hamiltonian in the square-root chart. Still singular at collisions,
/// unlike the rescaled flow; throws SingularityError there.
double reg_hamiltonian(const RegularizedState& r);

/// Everything in the Hamiltonian except the singular pair of the coordinate
/// being regularized: for the x-axis, f = H - (Gamma^2 - 1)/(8 gamma^2).
/// Arguments: the two complementary coordinates and their momenta follow the
/// regularizing coordinate.
double reg_complement(double q, double a, double b, double pa, double pb);

/// Right-hand side of the rescaled system; regular at single double
/// collisions. Throws std::domain_error if two or more square-root
/// coordinates are exactly zero (quadruple/total collisions stay singular).
RegDerivative reg_rhs(const RegularizedState& r);

struct IntegratorOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  long max_steps = 8'000'000;
};

/// Accepted-step trajectory of the rescaled flow from r0 to rescaled time
/// s_end (either direction). Throws IntegrationError when two coordinates
/// shrink together (quadruple-collision approach).
std::vector<RegularizedState> integrate_reg(const RegularizedState& r0, double s_end,
                                            const IntegratorOptions& opt = {});

/// States at the requested rescaled times (monotone from r0.s).
std::vector<RegularizedState> integrate_reg_sampled(const RegularizedState& r0,
                                                    std::span<const double> s_points,
                                                    const IntegratorOptions& opt = {});

/// Advance the rescaled flow until physical time t_target.
RegularizedState integrate_reg_to_time(const RegularizedState& r0, double t_target,
                                       const IntegratorOptions& opt = {});

enum class StopReason { span_end, collision_approach };

struct PhysicalRun {
  std::vector<double> sample_times;  // requested times actually reached
  std::vector<State> samples;
  State final_state;
  double final_time{0};
  StopReason stop{StopReason::span_end};
};

/// Adaptive integration of the physical equations of motion from s0 at t0
/// toward t1 (either direction), sampling at the requested times. Stops
/// early when the smallest coordinate drops below
/// switch_ratio * sqrt(product of the other two).
PhysicalRun integrate_physical(const State& s0, double t0, double t1,
                               std::span<const double> sample_times = {},
                               const IntegratorOptions& opt = {},
                               double switch_ratio = 1e-3);

struct CollisionPassage {
  State exit_state;
  double exit_time{0};
  double collision_time{0};
  int axis{-1};            // 0 = x, 1 = y, 2 = z
  double energy_drift{0};  // |H(exit) - h|
};

/// Carry a state approaching a double collision through it: switch to the
/// rescaled chart, cross the coordinate zero, switch back once the
/// coordinate has grown past twice its handoff value. direction +1 moves
/// forward in physical time, -1 backward. Throws std::domain_error when two
/// coordinates are small at the handoff (not a double collision).
CollisionPassage continue_through_collision(const State& approach, double t_approach,
                                            double h, int direction,
                                            const IntegratorOptions& opt = {});

/// Walks one trajectory monotonically in physical time, switching charts as
/// collisions come and go. Samples requested inside a collision window are
/// produced from the regularized chart.
class TrajectoryTracer {
 public:
  TrajectoryTracer(const State& start, double t_start, double h, int direction,
                   const IntegratorOptions& opt = {}, double switch_ratio = 1e-3);

  /// State at physical time t_target (must lie in the walking direction).
  /// A sample exactly at a collision carries an infinite velocity component.
  State advance_to(double t_target);

  double time() const { return t_; }
  double energy_level() const { return h_; }
  const std::vector<CollisionPassage>& passages() const { return passages_; }

 private:
  enum class Chart { physical, regularized };

  State state_;
  RegularizedState reg_;      // valid while chart_ == regularized
  double reg_exit_value_{0};  // squared-coordinate value to hand back at
  int reg_axis_{-1};
  bool reg_crossed_{false};
  Chart chart_{Chart::physical};
  double t_;
  double h_;
  int dir_;
  IntegratorOptions opt_;
  double switch_ratio_;
  std::vector<CollisionPassage> passages_;

  void enter_regularized();
  void exit_regularized();
};

}  // namespace octa
