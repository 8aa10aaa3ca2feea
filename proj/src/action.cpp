#include "octa/action.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "octa/central_config.hpp"
#include "octa/kepler1d.hpp"
#include "octa/lbfgs.hpp"

namespace octa {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

void check_mesh_match(const FundamentalSegment& seg, const QuadratureScheme& q) {
  if (q.node_times.size() != seg.node_times.size())
    throw std::invalid_argument("quadrature mesh does not match the segment mesh");
  const double tol = 1e-12 * (1.0 + seg.sixth());
  for (std::size_t i = 0; i < q.node_times.size(); ++i)
    if (std::fabs(q.node_times[i] - seg.node_times[i]) > tol)
      throw std::invalid_argument("quadrature mesh does not match the segment mesh");
}

void check_segment_nodes(const FundamentalSegment& seg) {
  for (std::size_t i = 0; i < seg.nodes.size(); ++i) {
    const Configuration& c = seg.nodes[i];
    if (c.x < 0 || c.y < 0 || c.z < 0)
      throw std::domain_error("segment node outside the cone S");
    if (i > 0 && c.is_collision())
      throw std::domain_error("collision at an interior segment node");
  }
}

// --------------------------------------------------------------------------
// Raw evaluation over plain node arrays (hot path of the optimizer).
// --------------------------------------------------------------------------

struct Eval {
  double action;
  bool feasible;
};

// U and grad U without exceptions; callers guarantee strictly positive input.
inline double u_value(const Vec3& v) {
  const double pxy = 1.0 / std::sqrt(v.x * v.x + v.y * v.y);
  const double pxz = 1.0 / std::sqrt(v.x * v.x + v.z * v.z);
  const double pyz = 1.0 / std::sqrt(v.y * v.y + v.z * v.z);
  return pxy + pxz + pyz + 0.125 * (1.0 / v.x + 1.0 / v.y + 1.0 / v.z);
}

inline Vec3 u_gradient(const Vec3& v) {
  const double qxy = v.x * v.x + v.y * v.y;
  const double qxz = v.x * v.x + v.z * v.z;
  const double qyz = v.y * v.y + v.z * v.z;
  const double pxy = 1.0 / (qxy * std::sqrt(qxy));
  const double pxz = 1.0 / (qxz * std::sqrt(qxz));
  const double pyz = 1.0 / (qyz * std::sqrt(qyz));
  return {-v.x * (pxy + pxz) - 0.125 / (v.x * v.x),
          -v.y * (pxy + pyz) - 0.125 / (v.y * v.y),
          -v.z * (pxz + pyz) - 0.125 / (v.z * v.z)};
}

inline bool strictly_interior(const Vec3& v) { return v.x > 0 && v.y > 0 && v.z > 0; }

/// Value, and optionally the full per-node gradient, of the discrete action.
Eval eval_action(const std::vector<double>& times, const std::vector<Vec3>& nodes,
                 std::vector<Vec3>* grad) {
  const int n = static_cast<int>(nodes.size()) - 1;
  if (grad) grad->assign(n + 1, Vec3{});

  // feasibility: cone membership everywhere, interior nodes strictly so
  if (nodes[0].x < 0 || nodes[0].y < 0 || nodes[0].z < 0) return {0, false};
  for (int i = 1; i <= n; ++i)
    if (!strictly_interior(nodes[i])) return {0, false};

  double action = 0;
  for (int i = 0; i < n; ++i) {
    const double dt = times[i + 1] - times[i];
    const Vec3 d = nodes[i + 1] - nodes[i];
    action += d.norm2() / (2.0 * dt);
    if (grad) {
      (*grad)[i] += d / (-dt);
      (*grad)[i + 1] += d / dt;
    }
  }
  {  // first cell: open midpoint
    const double dt = times[1] - times[0];
    const Vec3 mid = (nodes[0] + nodes[1]) * 0.5;
    if (!strictly_interior(mid)) return {0, false};
    action += dt * u_value(mid);
    if (grad) {
      const Vec3 gm = u_gradient(mid) * (0.5 * dt);
      (*grad)[0] += gm;
      (*grad)[1] += gm;
    }
  }
  for (int i = 1; i < n; ++i) {  // trapezoid cells
    const double dt = times[i + 1] - times[i];
    action += 0.5 * dt * (u_value(nodes[i]) + u_value(nodes[i + 1]));
    if (grad) {
      (*grad)[i] += u_gradient(nodes[i]) * (0.5 * dt);
      (*grad)[i + 1] += u_gradient(nodes[i + 1]) * (0.5 * dt);
    }
  }
  return {action, std::isfinite(action)};
}

void project_node_gradient(std::vector<Vec3>& g) {
  const std::size_t n = g.size() - 1;
  const double m0 = 0.5 * (g[0].y + g[0].z);
  g[0] = {0.0, m0, m0};
  const double mn = 0.5 * (g[n].x + g[n].y);
  g[n] = {mn, mn, g[n].z};
}

// --------------------------------------------------------------------------
// Reduced coordinates: u = [y0(=z0), x_i y_i z_i (0<i<N), x_N(=y_N), z_N].
// --------------------------------------------------------------------------

std::vector<double> encode(const std::vector<Vec3>& nodes) {
  const int n = static_cast<int>(nodes.size()) - 1;
  std::vector<double> u(3 * n);
  u[0] = nodes[0].y;
  for (int i = 1; i < n; ++i) {
    u[1 + 3 * (i - 1) + 0] = nodes[i].x;
    u[1 + 3 * (i - 1) + 1] = nodes[i].y;
    u[1 + 3 * (i - 1) + 2] = nodes[i].z;
  }
  u[3 * n - 2] = nodes[n].x;
  u[3 * n - 1] = nodes[n].z;
  return u;
}

void decode(const std::vector<double>& u, std::vector<Vec3>& nodes) {
  const int n = static_cast<int>(u.size()) / 3;
  nodes.resize(n + 1);
  nodes[0] = {0.0, u[0], u[0]};
  for (int i = 1; i < n; ++i)
    nodes[i] = {u[1 + 3 * (i - 1)], u[2 + 3 * (i - 1)], u[3 + 3 * (i - 1)]};
  nodes[n] = {u[3 * n - 2], u[3 * n - 2], u[3 * n - 1]};
}

std::vector<double> reduce_gradient(const std::vector<Vec3>& g) {
  const int n = static_cast<int>(g.size()) - 1;
  std::vector<double> r(3 * n);
  r[0] = g[0].y + g[0].z;
  for (int i = 1; i < n; ++i) {
    r[1 + 3 * (i - 1) + 0] = g[i].x;
    r[1 + 3 * (i - 1) + 1] = g[i].y;
    r[1 + 3 * (i - 1) + 2] = g[i].z;
  }
  r[3 * n - 2] = g[n].x + g[n].y;
  r[3 * n - 1] = g[n].z;
  return r;
}

/// Square roots of the kinetic Hessian diagonal; rescaling by these makes
/// the mesh grading invisible to the quasi-Newton model.
std::vector<double> scaling(const std::vector<double>& times) {
  const int n = static_cast<int>(times.size()) - 1;
  std::vector<double> c(3 * n);
  c[0] = std::sqrt(2.0 / (times[1] - times[0]));
  for (int i = 1; i < n; ++i) {
    const double k = 1.0 / (times[i] - times[i - 1]) + 1.0 / (times[i + 1] - times[i]);
    c[1 + 3 * (i - 1)] = c[2 + 3 * (i - 1)] = c[3 + 3 * (i - 1)] = std::sqrt(k);
  }
  const double dtn = times[n] - times[n - 1];
  c[3 * n - 2] = std::sqrt(2.0 / dtn);
  c[3 * n - 1] = std::sqrt(1.0 / dtn);
  return c;
}

double projected_inf_norm(const std::vector<Vec3>& g) {
  std::vector<Vec3> p = g;
  project_node_gradient(p);
  double m = 0;
  for (const Vec3& v : p) m = std::max(m, v.inf_norm());
  return m;
}

std::vector<Vec3> interp_nodes(const std::vector<double>& t_old,
                               const std::vector<Vec3>& nodes_old,
                               const std::vector<double>& t_new) {
  std::vector<Vec3> out(t_new.size());
  for (std::size_t k = 0; k < t_new.size(); ++k) {
    const double t = t_new[k];
    auto it = std::upper_bound(t_old.begin(), t_old.end(), t);
    std::size_t j = std::min<std::size_t>(
        t_old.size() - 1, std::max<std::size_t>(1, it - t_old.begin()));
    const double w = (t - t_old[j - 1]) / (t_old[j] - t_old[j - 1]);
    out[k] = nodes_old[j - 1] * (1.0 - w) + nodes_old[j] * w;
  }
  return out;
}

std::vector<Vec3> node_vecs(const FundamentalSegment& seg) {
  std::vector<Vec3> v(seg.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = seg.nodes[i].as_vec();
  return v;
}

}  // namespace

QuadratureScheme QuadratureScheme::graded(double sixth, int cells, double p) {
  if (cells < 2 || !(sixth > 0) || !(p >= 1))
    throw std::invalid_argument("graded mesh needs cells >= 2, sixth > 0, p >= 1");
  QuadratureScheme q;
  q.grading_exponent = p;
  q.node_times.resize(cells + 1);
  for (int i = 0; i <= cells; ++i)
    q.node_times[i] = sixth * std::pow(static_cast<double>(i) / cells, p);
  return q;
}

double discretized_action(const FundamentalSegment& seg, const QuadratureScheme& q) {
  check_mesh_match(seg, q);
  check_segment_nodes(seg);
  return eval_action(seg.node_times, node_vecs(seg), nullptr).action;
}

std::vector<Vec3> action_gradient(const FundamentalSegment& seg, const QuadratureScheme& q) {
  check_mesh_match(seg, q);
  check_segment_nodes(seg);
  std::vector<Vec3> grad;
  eval_action(seg.node_times, node_vecs(seg), &grad);
  project_node_gradient(grad);
  return grad;
}

FundamentalSegment homothetic_segment(double period, int cells, double p) {
  const QuadratureScheme q = QuadratureScheme::graded(period / 6.0, cells, p);
  const kepler1d::Ejection ej = kepler1d::solve_apex(curly_g(), period / 6.0);
  const std::vector<double> u = kepler1d::positions(ej, q.node_times);

  FundamentalSegment seg;
  seg.period = period;
  seg.node_times = q.node_times;
  seg.nodes.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double c = u[i] / kSqrt3;
    seg.nodes[i] = {c, c, c};
  }
  seg.nodes[0] = {0.0, 0.0, 0.0};
  return seg;
}

std::pair<FundamentalSegment, MinimizeReport> minimize(const FundamentalSegment& seed,
                                                       const MinimizeOptions& opt) {
  for (const Configuration& c : seed.nodes)
    if (!std::isfinite(c.x) || !std::isfinite(c.y) || !std::isfinite(c.z))
      throw std::domain_error("minimize: seed has non-finite coordinates");
  FundamentalSegment current = project_constraints(seed);
  current.node_velocities.clear();
  const double sixth = current.sixth();

  std::vector<int> schedule = opt.mesh_schedule;
  if (schedule.empty()) schedule.push_back(current.cells());

  MinimizeReport report;
  report.mesh_exponent = opt.mesh_exponent;
  long total_iters = 0;

  for (std::size_t level = 0; level < schedule.size(); ++level) {
    const int n = schedule[level];
    std::vector<double> times;
    if (n == current.cells() && level == 0) {
      times = current.node_times;
    } else {
      times = QuadratureScheme::graded(sixth, n, opt.mesh_exponent).node_times;
    }
    std::vector<Vec3> nodes = interp_nodes(current.node_times, node_vecs(current), times);

    current.node_times = times;
    current.nodes.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      current.nodes[i] = Configuration::from_vec(nodes[i]);
    current = project_constraints(current);

    std::vector<double> u = encode(node_vecs(current));
    const std::vector<double> scale = scaling(times);
    const bool final_level = level + 1 == schedule.size();
    const double tol = final_level ? opt.grad_tol : std::max(opt.grad_tol, 1e-6);

    // work in scaled variables; report/stop on the unscaled projected norm
    std::vector<double> u_hat(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) u_hat[i] = u[i] * scale[i];

    std::vector<Vec3> nodes_work, grad_work;
    std::vector<double> u_work(u.size());
    double last_inf_norm = kInfinity;

    auto objective = [&](const std::vector<double>& uh, std::vector<double>& gh) {
      for (std::size_t i = 0; i < uh.size(); ++i) u_work[i] = uh[i] / scale[i];
      decode(u_work, nodes_work);
      const Eval ev = eval_action(times, nodes_work, &grad_work);
      if (!ev.feasible) {
        gh.assign(uh.size(), 0.0);
        return kInfinity;
      }
      const std::vector<double> r = reduce_gradient(grad_work);
      gh.resize(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) gh[i] = r[i] / scale[i];
      last_inf_norm = projected_inf_norm(grad_work);
      return ev.action;
    };
    auto stopper = [&](const std::vector<double>&, const std::vector<double>&) {
      return last_inf_norm < tol;
    };

    std::vector<double> history;
    LbfgsOptions lopt;
    lopt.max_iters = opt.max_iters;
    lopt.memory = opt.memory;
    LbfgsResult lres = lbfgs_minimize(
        objective, stopper, [&](double f) { history.push_back(f); }, u_hat, lopt);
    if (lres.reason == "infeasible_start")
      throw std::domain_error("minimize: infeasible seed segment");

    total_iters += lres.iterations;
    for (std::size_t i = 0; i < u_hat.size(); ++i) u[i] = u_hat[i] / scale[i];
    decode(u, nodes_work);
    for (std::size_t i = 0; i < nodes_work.size(); ++i)
      current.nodes[i] = Configuration::from_vec(nodes_work[i]);

    if (final_level) {
      report.action = lres.value;
      report.gradient_inf_norm = last_inf_norm;
      report.terminated_reason = lres.reason;
      report.action_history = std::move(history);
      report.mesh_cells = n;
    }
  }

  current = project_constraints(current);
  {  // recompute the reported numbers on the returned (projected) segment
    std::vector<Vec3> grad;
    const Eval ev = eval_action(current.node_times, node_vecs(current), &grad);
    report.action = ev.action;
    report.gradient_inf_norm = projected_inf_norm(grad);
  }
  report.iterations = total_iters;
  const Configuration& c0 = current.nodes.front();
  const Configuration& cn = current.nodes.back();
  report.constraint_residual =
      std::max({std::fabs(c0.x), std::fabs(c0.y - c0.z), std::fabs(cn.x - cn.y)});
  if (!(report.action > 0) || !std::isfinite(report.action))
    throw std::runtime_error("minimize: action must end finite and positive");
  return {current, report};
}

}  // namespace octa
