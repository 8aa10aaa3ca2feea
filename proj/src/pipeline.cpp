#include "octa/pipeline.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "octa/errors.hpp"
#include "octa/orbit_io.hpp"
#include "octa/rng.hpp"

namespace octa {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

ordered_json checks_to_json(const VerificationReport& rep) {
  ordered_json checks = ordered_json::object();
  for (const Check& c : rep.checks) {
    checks[c.name] = {{"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}};
  }
  return checks;
}

}  // namespace

void RunConfig::validate() const {
  if (!(period > 0)) throw std::invalid_argument("period must be positive");
  if (nodes < 8) throw std::invalid_argument("nodes must be at least 8");
  if (!(mesh_exponent >= 1)) throw std::invalid_argument("mesh-p must be >= 1");
  if (!(grad_tol > 0)) throw std::invalid_argument("grad-tol must be positive");
  if (!(ode_tol > 0)) throw std::invalid_argument("integrator tolerance must be positive");
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    try {
      if (key == "period") base.period = std::stod(value);
      else if (key == "nodes") base.nodes = std::stoi(value);
      else if (key == "mesh_p") base.mesh_exponent = std::stod(value);
      else if (key == "grad_tol") base.grad_tol = std::stod(value);
      else if (key == "max_iters") base.max_iters = std::stol(value);
      else if (key == "ode_tol") base.ode_tol = std::stod(value);
      else if (key == "seed") base.seed = std::stoull(value);
      else if (key == "out") base.out_csv = value;
      else if (key == "report") base.report_json = value;
      else throw ParseError(lineno, "unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ParseError(lineno, "bad value for '" + key + "'");
    }
  }
  return base;
}

FundamentalSegment noisy_homothetic_seed(double period, int cells, double p,
                                         std::uint64_t seed) {
  FundamentalSegment seg = homothetic_segment(period, cells, p);
  SplitMix64 rng(seed);
  for (std::size_t i = 1; i < seg.nodes.size(); ++i) {
    seg.nodes[i].x *= 1.0 + 0.01 * rng.symmetric();
    seg.nodes[i].y *= 1.0 + 0.01 * rng.symmetric();
    seg.nodes[i].z *= 1.0 + 0.01 * rng.symmetric();
  }
  // lift the collision endpoint off the origin so the seed starts feasible
  const double lift = 0.05 * seg.nodes.back().y;
  seg.nodes[0].y = seg.nodes[0].z = lift * (1.0 + 0.01 * rng.symmetric());
  return project_constraints(seg);
}

PipelineResult run_minimize_pipeline(const RunConfig& cfg) {
  cfg.validate();
  PipelineResult result;

  MinimizeOptions mopt;
  mopt.grad_tol = cfg.grad_tol;
  mopt.max_iters = cfg.max_iters;
  mopt.mesh_exponent = cfg.mesh_exponent;
  for (int n = std::max(cfg.nodes / 4, 64); n < cfg.nodes; n *= 2)
    mopt.mesh_schedule.push_back(n);
  mopt.mesh_schedule.push_back(cfg.nodes);

  const FundamentalSegment seed = noisy_homothetic_seed(
      cfg.period, mopt.mesh_schedule.front(), cfg.mesh_exponent, cfg.seed);

  auto [segment, report] = minimize(seed, mopt);
  result.minimizer = segment;
  result.minimize_report = report;

  RefineOptions ropt;
  ropt.ode.abs_tol = ropt.ode.rel_tol = std::min(cfg.ode_tol, 1e-13);
  result.refined = refine_segment(segment, ropt);
  result.orbit = reconstruct_orbit(result.refined.segment);

  IntegratorOptions vopt;
  vopt.abs_tol = vopt.rel_tol = cfg.ode_tol;
  result.verification = verify_orbit(result.orbit, vopt);
  return result;
}

std::string verification_to_json(const VerificationReport& rep) {
  ordered_json j;
  j["action"] = rep.action;
  j["homothetic_bound"] = rep.homothetic_bound;
  j["energy"] = rep.energy;
  j["checks"] = checks_to_json(rep);
  if (!rep.integration_error.empty()) j["integration_error"] = rep.integration_error;
  j["all_pass"] = rep.all_pass();
  return j.dump(2) + "\n";
}

std::string pipeline_report_to_json(const PipelineResult& result, const RunConfig& cfg) {
  const MinimizeReport& m = result.minimize_report;
  ordered_json j;
  j["action"] = m.action;
  j["gradient_inf_norm"] = m.gradient_inf_norm;
  j["iterations"] = m.iterations;
  j["terminated_reason"] = m.terminated_reason;
  j["constraint_residual"] = m.constraint_residual;
  j["energy"] = result.refined.h;
  j["period"] = cfg.period;
  j["nodes"] = m.mesh_cells;
  j["mesh_p"] = m.mesh_exponent;
  j["seed"] = cfg.seed;
  j["refine"] = {{"residual", result.refined.residual_norm},
                 {"iterations", result.refined.iterations},
                 {"y0", result.refined.y0},
                 {"w", result.refined.w},
                 {"h", result.refined.h}};
  j["homothetic_bound"] = result.verification.homothetic_bound;
  j["checks"] = checks_to_json(result.verification);
  if (!result.verification.integration_error.empty())
    j["integration_error"] = result.verification.integration_error;
  j["all_pass"] = result.verification.all_pass();
  return j.dump(2) + "\n";
}

}  // namespace octa
