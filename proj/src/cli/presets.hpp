#pragma once

#include <stdexcept>
#include <string>

#include "config.hpp"
#include "report.hpp"

namespace shufflemix::cli {

// A library call failed for a reason other than bad input; exit status 1.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ConfigError for invalid parameters and RunError for failed computations.
Report run_preset(const ExperimentConfig& cfg);

}  // namespace shufflemix::cli
