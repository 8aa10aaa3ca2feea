#pragma once

#include <cstdint>
#include <string>

#include "octa/action.hpp"
#include "octa/refine.hpp"
#include "octa/verify.hpp"

namespace octa {

struct RunConfig {
  double period = 6.0;
  int nodes = 1024;  // fundamental-segment cells; the loop then has 6*nodes samples
  double mesh_exponent = 1.5;
  double grad_tol = 1e-8;
  long max_iters = 50000;
  double ode_tol = 1e-12;
  std::uint64_t seed = 1;
  std::string out_csv = "orbit.csv";
  std::string report_json = "report.json";

  void validate() const;  // throws std::invalid_argument
};

/// Plain `key = value` overrides ('#' comments, blank lines ignored);
/// command-line flags are applied on top by the CLI.
RunConfig load_config_file(const std::string& path, RunConfig base);

struct PipelineResult {
  FundamentalSegment minimizer;
  MinimizeReport minimize_report;
  RefineResult refined;
  PeriodicOrbit orbit;
  VerificationReport verification;
};

/// Seed from the homothetic segment with 1% multiplicative noise, minimize
/// with mesh continuation, polish by shooting, reconstruct the loop, verify.
PipelineResult run_minimize_pipeline(const RunConfig& cfg);

/// Seed used by the pipeline (exposed for the multistart tests).
FundamentalSegment noisy_homothetic_seed(double period, int cells, double p,
                                         std::uint64_t seed);

std::string verification_to_json(const VerificationReport& rep);
std::string pipeline_report_to_json(const PipelineResult& result, const RunConfig& cfg);

}  // namespace octa
