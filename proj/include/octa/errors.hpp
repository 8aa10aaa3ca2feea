#pragma once

#include <stdexcept>
#include <string>

namespace octa {

/// Evaluation at a collision configuration where the requested quantity is
/// genuinely singular (gradients, equations of motion, 1/gamma factors).
struct SingularityError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Adaptive integration could not proceed (step underflow, budget exhausted,
/// approach to a non-regularizable collision).
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shooting / Newton solves that ran out of budget or left their domain.
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sampled-loop grids that are not closed under the requested group action.
struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CSV / config parsing, with the 1-based line that failed.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_),
        line(line_) {}
};

}  // namespace octa
