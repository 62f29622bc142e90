#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ergo/transfer.hpp"

namespace ergo {

struct MismatchedConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { kStrong, kWeakTwoSided, kWeakLeftOnly };
const char* mode_name(Mode mode);

/// One generator materialized on both sides of the transfer: a line function
/// and the space function with the same shape.
struct FamilyMember {
  std::string id;
  SampledFunction line;
  SpaceFunction space;
};

struct FunctionFamily {
  std::vector<FamilyMember> members;

  /// Generator literals: "indicator A B", "tent C R", "steps v.. A B",
  /// "rsteps N A B" (seeded values), "cos K A B" (windowed on the line,
  /// global on the space side), "const C A B".
  static FunctionFamily from_generators(std::span<const std::string> literals,
                                        const GridSpec& grid,
                                        std::uint64_t seed);
  static std::vector<std::string> default_generators();
};

struct SamplingMeta {
  double line_step = 1.0 / 1024.0;
  double support_radius = 64.0;
  int n_points = 4096;
  int base_points = 64;
  std::uint64_t seed = 12345;
};

struct RatioEntry {
  std::string id;
  double ratio = 0.0;
  double lambda = -1.0;  // the maximizing lambda in weak modes, else -1
};

/// Result of one verification sweep. estimated_constant is the max of the
/// per-function ratios, a lower bound on the true operator norm.
struct InequalityReport {
  double p = 2.0;
  Mode mode = Mode::kStrong;
  std::string side;  // "line" | "ergodic"
  std::string operator_desc;
  std::string flow_desc;
  std::string weight_w_desc;  // output-side weight
  std::string weight_v_desc;  // input-side weight
  std::vector<RatioEntry> per_function_ratios;
  double estimated_constant = 0.0;
  std::vector<double> lambda_grid;
  std::vector<std::pair<double, double>> truncation_sweep;  // (a, constant)
  double truncation_a = -1.0;  // < 0 for line-side reports
  double pad = -1.0;
  SamplingMeta sampling;
  std::vector<std::string> skipped;  // zero-denominator members
};

nlohmann::ordered_json report_to_json(const InequalityReport& report);
std::string report_to_csv(const InequalityReport& report);

/// Geometric grid of `count` levels reaching from max_value/2^8 up to just
/// below max_value (the top point sits at (1 - 2^-12) * max_value so a
/// constant function witnesses ratios near 1 with strict level sets).
std::vector<double> auto_lambda_grid(double max_value, int count = 24);

/// ‖T# f‖_{L^p(w)} / ‖f‖_{L^p(v)} per member, maximized. Weights follow the
/// output-w / input-v orientation. Members with zero denominator are skipped
/// and recorded.
InequalityReport estimate_strong_constant(const TransferredOperator& tsharp,
                                          double p, const SpaceFunction& w,
                                          const SpaceFunction& v,
                                          const FunctionFamily& family,
                                          std::span<const FlowPoint> base_points,
                                          int threads = 1);

/// max over the family and the lambda grid of
/// lambda * w{|T# f| > lambda}^{1/p} / ‖f‖, where the denominator norm
/// carries w (two-sided) or no weight (left-only). Empty lambda_grid selects
/// auto_lambda_grid of the family's max value.
InequalityReport estimate_weak_constant(const TransferredOperator& tsharp,
                                        double p, const SpaceFunction& w,
                                        std::span<const double> lambda_grid,
                                        const FunctionFamily& family,
                                        std::span<const FlowPoint> base_points,
                                        Mode mode, int threads = 1);

/// Re-estimate the strong constant at each truncation a; the report carries
/// the sweep and the final truncation's ratios.
InequalityReport truncation_sweep(const TransferredOperator& tsharp, double p,
                                  const SpaceFunction& w,
                                  const SpaceFunction& v,
                                  const FunctionFamily& family,
                                  std::span<const double> a_values,
                                  std::span<const FlowPoint> base_points,
                                  int threads = 1);

/// The same estimation performed on the line: norms over the real line,
/// level sets measured through distribution_weighted.
InequalityReport line_baseline(const LineOperator& op, double p,
                               const Weight& w, const Weight& v,
                               const FunctionFamily& family, Mode mode,
                               std::span<const double> lambda_grid,
                               const GridSpec& grid, int threads = 1);

struct ComparisonResult {
  bool pass = false;
  double line_constant = 0.0;
  double ergodic_constant = 0.0;
  double slack = 1.0;  // ((a+pad)/a)^{1/p} * (1 + tolerance)
  double margin = 0.0;  // line_constant * slack - ergodic_constant
  std::string detail;
};

/// The transfer direction: ergodic_constant <= line_constant * slack.
/// Throws MismatchedConfig unless p, mode, operator and weight generators
/// match between the two reports.
ComparisonResult transfer_comparison(const InequalityReport& line,
                                     const InequalityReport& ergodic,
                                     double tolerance = 0.05);

}  // namespace ergo
