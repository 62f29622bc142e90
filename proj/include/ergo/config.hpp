#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergo/flow.hpp"
#include "ergo/line_operator.hpp"
#include "ergo/verify.hpp"
#include "ergo/weight.hpp"

namespace ergo {

/// One diagnostic, rendered as "path: line: message".
struct ConfigError {
  std::string path;
  int line = 0;
  std::string message;

  std::string to_string() const;
};

struct ConfigParseError : std::runtime_error {
  std::vector<ConfigError> errors;
  explicit ConfigParseError(std::vector<ConfigError> errs);
};

/// A parsed experiment description. String-valued fields keep the literal
/// text so that serialize_config round-trips the parsed form identically.
struct ExperimentConfig {
  std::string flow_literal;  // "circle A" | "torus A1 A2" | "" (line only)
  std::string operator_literal = "identity";
  std::string weight_w_literal = "const 1";
  std::string weight_v_literal;  // empty: same as weight_w
  std::vector<std::string> function_literals;
  std::vector<double> p_values{1.0, 1.5, 2.0, 3.0};
  std::string mode = "strong";  // strong|weak_two_sided|weak_left_only|compare
  std::vector<double> lambda_list;  // empty: auto grid
  int lambda_count = 24;
  std::vector<double> a_values;  // empty: auto
  double pad = -1.0;             // < 0: auto (= operator semilocal radius)
  double line_step = 1.0 / 1024.0;
  double support_radius = 64.0;
  int n_points = 4096;
  int base_points = 64;
  std::uint64_t seed = 12345;
  int threads = 1;
  std::string out_json;
  std::string out_csv;
  std::vector<double> points;  // evaluation points for `apply`
  double ainfty_delta = 0.1;
  Interval ainfty_interval{-1.0, 1.0};
  int ainfty_subsets = 64;
  int fam_k_lo = -8;
  int fam_k_hi = 6;
  double fam_center_step = 0.25;
  bool fam_symmetric = false;  // symmetric dyadic intervals centered at 0

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

/// Parse `key = value` text. Unknown keys, malformed numbers and malformed
/// literals are reported with their line number; the returned config is
/// meaningful only when errors is empty.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& path,
                                   std::vector<ConfigError>& errors);

/// Load and fully validate a config file; throws ConfigParseError.
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse(serialize(parse(x))) == parse(x).
std::string serialize_config(const ExperimentConfig& cfg);

// -- Literal parsers shared by the config and the CLI. Each throws
//    std::invalid_argument naming the offending token.

Weight parse_weight_literal(const std::string& literal);
LineOperator parse_operator_literal(const std::string& literal);
Flow parse_flow_literal(const std::string& literal);
SpaceFunction parse_space_function_literal(const std::string& literal,
                                           std::uint64_t seed);
SampledFunction parse_line_function_literal(const std::string& literal,
                                            const GridSpec& grid,
                                            std::uint64_t seed);

/// Space weight for the ergodic side of an experiment ("const C",
/// "cosaffine BASE AMP K", "steps ..." with positive values, "arc A B").
SpaceFunction parse_space_weight_literal(const std::string& literal,
                                         std::uint64_t seed);

/// Line weight matched to a space weight: the orbit realization of the same
/// generator through the flow (a cosaffine space weight becomes a cosine
/// line weight at frequency k * realized_alpha).
Weight line_weight_for_space_weight(const std::string& literal,
                                    const Flow& flow, std::uint64_t seed);

/// Accepts plain doubles plus the shorthand "2^K" for integer K.
double parse_number(const std::string& token);

}  // namespace ergo
