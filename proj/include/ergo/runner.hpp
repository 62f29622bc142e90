#pragma once

#include <string>

#include "ergo/config.hpp"

namespace ergo {

/// Output of one experiment run. The CLI prints `text` and writes the JSON
/// and CSV bodies to the configured paths; tests compare the bodies byte for
/// byte across runs and thread counts.
struct RunResult {
  std::string text;
  std::string json_text;
  std::string csv_text;
  bool comparisons_failed = false;
};

RunResult run_check_weight(const ExperimentConfig& cfg);
RunResult run_apply(const ExperimentConfig& cfg);
RunResult run_verify(const ExperimentConfig& cfg);
RunResult run_sweep(const ExperimentConfig& cfg);

/// a_values used when the config says auto: pad + {0,1,2,4,8} * reach
/// (a single default window for reach-0 operators).
std::vector<double> default_a_values(const LineOperator& op, double pad);

}  // namespace ergo
