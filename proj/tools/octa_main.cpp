// Command-line front end: search for the symmetric periodic orbit of the
// octahedral six-body problem, verify orbit files, and query the analytic
// oracles (central configuration, homothetic action bound).

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "octa/central_config.hpp"
#include "octa/errors.hpp"
#include "octa/orbit_io.hpp"
#include "octa/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitUsage = 2;

void print_checks(const octa::VerificationReport& rep) {
  for (const octa::Check& c : rep.checks) {
    std::printf("%-28s %-4s value=%s threshold=%s\n", c.name.c_str(),
                c.pass ? "ok" : "FAIL", octa::format_double(c.value).c_str(),
                octa::format_double(c.threshold).c_str());
  }
  if (!rep.integration_error.empty())
    std::printf("re-integration aborted: %s\n", rep.integration_error.c_str());
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
}

int cmd_minimize(const octa::RunConfig& cfg) {
  octa::PipelineResult result;
  try {
    result = octa::run_minimize_pipeline(cfg);
  } catch (const std::exception& e) {
    // still leave a report behind so failed runs are diagnosable
    write_text_file(cfg.report_json, std::string("{\n  \"error\": \"") + e.what() +
                                         "\",\n  \"all_pass\": false\n}\n");
    std::fprintf(stderr, "pipeline failed: %s\n", e.what());
    return kExitVerificationFailed;
  }
  octa::write_orbit_csv(cfg.out_csv, result.orbit);
  write_text_file(cfg.report_json, octa::pipeline_report_to_json(result, cfg));

  std::printf("action          %.15g\n", result.minimize_report.action);
  std::printf("gradient        %.15g\n", result.minimize_report.gradient_inf_norm);
  std::printf("iterations      %ld (%s)\n", result.minimize_report.iterations,
              result.minimize_report.terminated_reason.c_str());
  std::printf("energy          %.15g\n", result.refined.h);
  std::printf("y0 / zdot0      %.15g  %.15g\n", result.refined.y0, result.refined.w);
  std::printf("orbit  -> %s\n", cfg.out_csv.c_str());
  std::printf("report -> %s\n", cfg.report_json.c_str());
  print_checks(result.verification);
  return result.verification.all_pass() ? kExitOk : kExitVerificationFailed;
}

int cmd_verify(const std::string& orbit_path, const std::string& report_path,
               double ode_tol) {
  octa::PeriodicOrbit orbit;
  try {
    orbit = octa::read_orbit_csv(orbit_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot read orbit: %s\n", e.what());
    return kExitUsage;
  }
  octa::IntegratorOptions opt;
  opt.abs_tol = opt.rel_tol = ode_tol;
  octa::VerificationReport rep = octa::verify_orbit(orbit, opt);
  if (!report_path.empty())
    write_text_file(report_path, octa::verification_to_json(rep));
  print_checks(rep);
  return rep.all_pass() ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric periodic orbit of the octahedral six-body problem"};
  app.require_subcommand(1);

  octa::RunConfig cfg;
  std::string config_path;

  CLI::App* minimize = app.add_subcommand(
      "minimize", "Minimize the action, refine and verify; write CSV + JSON");
  minimize->add_option("--config", config_path, "key = value config file");
  minimize->add_option("--period", cfg.period, "orbit period T");
  minimize->add_option("--nodes", cfg.nodes, "segment cells N (loop gets 6N samples)");
  minimize->add_option("--mesh-p", cfg.mesh_exponent, "mesh grading exponent");
  minimize->add_option("--grad-tol", cfg.grad_tol, "gradient infinity-norm target");
  minimize->add_option("--max-iters", cfg.max_iters, "iteration budget per mesh level");
  minimize->add_option("--ode-tol", cfg.ode_tol, "integrator tolerance");
  minimize->add_option("--seed", cfg.seed, "seed for the perturbed start segment");
  minimize->add_option("--out", cfg.out_csv, "orbit CSV path");
  minimize->add_option("--report", cfg.report_json, "report JSON path");

  std::string orbit_path, verify_report;
  double verify_tol = 1e-12;
  CLI::App* verify = app.add_subcommand("verify", "Verify an orbit CSV");
  verify->add_option("orbit", orbit_path, "orbit CSV path")->required();
  verify->add_option("--report", verify_report, "report JSON path");
  verify->add_option("--ode-tol", verify_tol, "integrator tolerance");

  CLI::App* cc = app.add_subcommand("cc", "Solve the central-configuration system");

  CLI::App* oracle = app.add_subcommand("oracle", "Analytic vs quadrature oracles");
  oracle->require_subcommand(1);
  double og = 0.0, otau = 1.0, operiod = 6.0;
  CLI::App* okepler =
      oracle->add_subcommand("kepler", "alpha0 formula vs integrated 1D action");
  okepler->add_option("--g", og, "strength of the 1D problem (default: curly G)");
  okepler->add_option("--tau", otau, "period of the ejection-collision orbit");
  CLI::App* obound =
      oracle->add_subcommand("bound", "homothetic comparison bound for a period");
  obound->add_option("--T", operiod, "orbit period");
  CLI::App* oalpha = oracle->add_subcommand("alpha0", "alpha0(g)");
  oalpha->add_option("--g", og, "strength (default: curly G)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*minimize) {
      if (!config_path.empty()) {
        // flag > config file > default
        octa::RunConfig merged = octa::load_config_file(config_path, octa::RunConfig{});
        if (minimize->count("--period")) merged.period = cfg.period;
        if (minimize->count("--nodes")) merged.nodes = cfg.nodes;
        if (minimize->count("--mesh-p")) merged.mesh_exponent = cfg.mesh_exponent;
        if (minimize->count("--grad-tol")) merged.grad_tol = cfg.grad_tol;
        if (minimize->count("--max-iters")) merged.max_iters = cfg.max_iters;
        if (minimize->count("--ode-tol")) merged.ode_tol = cfg.ode_tol;
        if (minimize->count("--seed")) merged.seed = cfg.seed;
        if (minimize->count("--out")) merged.out_csv = cfg.out_csv;
        if (minimize->count("--report")) merged.report_json = cfg.report_json;
        return cmd_minimize(merged);
      }
      return cmd_minimize(cfg);
    }
    if (*verify) return cmd_verify(orbit_path, verify_report, verify_tol);
    if (*cc) {
      const octa::CentralConfigSolution sol = octa::cc_solve({0.5, 0.6, 0.7});
      std::printf("X       (%.15g, %.15g, %.15g)\n", sol.config.x, sol.config.y,
                  sol.config.z);
      std::printf("lambda  %.15g\n", sol.lambda);
      std::printf("residual %.3g, iterations %d\n", sol.residual_norm, sol.iterations);
      return kExitOk;
    }
    if (*oracle) {
      const double g = og > 0 ? og : octa::curly_g();
      if (*okepler) {
        const double formula = octa::alpha0(g) * std::cbrt(otau);
        const double quadrature = octa::kepler_homothetic_action(g, otau);
        std::printf("alpha0 formula   %.15g\n", formula);
        std::printf("quadrature       %.15g\n", quadrature);
        std::printf("relative diff    %.3g\n",
                    std::fabs(formula - quadrature) / formula);
        return kExitOk;
      }
      if (*obound) {
        const double bound =
            octa::alpha0(octa::curly_g()) / std::cbrt(4.0) * std::cbrt(operiod / 6.0);
        std::printf("homothetic bound %.15g\n", bound);
        return kExitOk;
      }
      if (*oalpha) {
        std::printf("alpha0 %.15g\n", octa::alpha0(g));
        return kExitOk;
      }
    }
  } catch (const octa::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerificationFailed;
  }
  return kExitUsage;
}
