#include "ergo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "ergo/config.hpp"
#include "ergo/parallel.hpp"
#include "ergo/rng.hpp"

namespace ergo {

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::kStrong:
      return "strong";
    case Mode::kWeakTwoSided:
      return "weak_two_sided";
    case Mode::kWeakLeftOnly:
      return "weak_left_only";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Families

FunctionFamily FunctionFamily::from_generators(
    std::span<const std::string> literals, const GridSpec& grid,
    std::uint64_t seed) {
  FunctionFamily family;
  for (const std::string& lit : literals) {
    const std::uint64_t member_seed = seed ^ stable_hash(lit.c_str());
    family.members.push_back(
        FamilyMember{lit, parse_line_function_literal(lit, grid, member_seed),
                     parse_space_function_literal(lit, member_seed)});
  }
  return family;
}

std::vector<std::string> FunctionFamily::default_generators() {
  return {"indicator 0 0.125", "indicator 0 0.25", "tent 0.5 0.125",
          "rsteps 8 0 1",      "cos 1 0 1",        "cos 3 0 1"};
}

// ---------------------------------------------------------------------------
// Report serialization

nlohmann::ordered_json report_to_json(const InequalityReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = "1";
  j["side"] = report.side;
  j["mode"] = mode_name(report.mode);
  j["p"] = report.p;
  j["operator"] = report.operator_desc;
  if (!report.flow_desc.empty()) j["flow"] = report.flow_desc;
  j["weight_w"] = report.weight_w_desc;
  j["weight_v"] = report.weight_v_desc;
  j["estimated_constant"] = report.estimated_constant;
  auto ratios = nlohmann::ordered_json::array();
  for (const RatioEntry& e : report.per_function_ratios) {
    nlohmann::ordered_json r;
    r["function"] = e.id;
    r["ratio"] = e.ratio;
    if (e.lambda >= 0.0) r["lambda"] = e.lambda;
    ratios.push_back(std::move(r));
  }
  j["per_function_ratios"] = std::move(ratios);
  if (!report.lambda_grid.empty()) j["lambda_grid"] = report.lambda_grid;
  if (!report.truncation_sweep.empty()) {
    auto sweep = nlohmann::ordered_json::array();
    for (const auto& [a, c] : report.truncation_sweep) {
      nlohmann::ordered_json s;
      s["a"] = a;
      s["constant"] = c;
      sweep.push_back(std::move(s));
    }
    j["truncation_sweep"] = std::move(sweep);
  }
  if (report.truncation_a >= 0.0) j["truncation_a"] = report.truncation_a;
  if (report.pad >= 0.0) j["pad"] = report.pad;
  j["sampling"] = {{"line_step", report.sampling.line_step},
                   {"support_radius", report.sampling.support_radius},
                   {"n_points", report.sampling.n_points},
                   {"base_points", report.sampling.base_points},
                   {"seed", report.sampling.seed}};
  j["skipped"] = report.skipped;
  return j;
}

std::string report_to_csv(const InequalityReport& report) {
  std::ostringstream os;
  os.precision(17);
  const bool weak = report.mode != Mode::kStrong;
  os << (weak ? "function,lambda,ratio\n" : "function,ratio\n");
  for (const RatioEntry& e : report.per_function_ratios) {
    if (weak)
      os << e.id << "," << e.lambda << "," << e.ratio << "\n";
    else
      os << e.id << "," << e.ratio << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Helpers

std::vector<double> auto_lambda_grid(double max_value, int count) {
  std::vector<double> grid;
  if (!(max_value > 0.0) || count < 1) return grid;
  const double top = max_value * (1.0 - 0x1p-12);
  const double bottom = max_value * 0x1p-8;
  if (count == 1) return {top};
  const double ratio = std::pow(top / bottom, 1.0 / double(count - 1));
  grid.reserve(std::size_t(count));
  double lam = bottom;
  for (int i = 0; i < count; ++i) {
    grid.push_back(lam);
    lam *= ratio;
  }
  grid.back() = top;
  return grid;
}

namespace {

double power_mean(double sum, double n, double p) {
  const double avg = sum / n;
  if (!(avg > 0.0)) return 0.0;
  return p == 1.0 ? avg : std::pow(avg, 1.0 / p);
}

double abs_pow(double v, double p) {
  const double a = std::abs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

// T#f over every (member, base point); values[m][i].
std::vector<Eigen::ArrayXd> transferred_values(
    const TransferredOperator& tsharp, const FunctionFamily& family,
    std::span<const FlowPoint> base_points, int threads) {
  const std::int64_t members = std::int64_t(family.members.size());
  const std::int64_t points = std::int64_t(base_points.size());
  std::vector<Eigen::ArrayXd> values(family.members.size());
  for (auto& v : values) v = Eigen::ArrayXd::Zero(points);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(members * points, threads, [&](std::int64_t idx) {
    const auto m = std::size_t(idx / points);
    const auto i = std::size_t(idx % points);
    try {
      values[m][Eigen::Index(i)] = transfer_apply(
          tsharp, family.members[m].space, base_points[i]);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return values;
}

SamplingMeta meta_for(const TransferredOperator& tsharp,
                      std::span<const FlowPoint> base_points) {
  SamplingMeta meta;
  meta.line_step = tsharp.step();
  meta.base_points = int(base_points.size());
  meta.n_points = int(base_points.size());
  return meta;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ergodic-side estimators

InequalityReport estimate_strong_constant(const TransferredOperator& tsharp,
                                          double p, const SpaceFunction& w,
                                          const SpaceFunction& v,
                                          const FunctionFamily& family,
                                          std::span<const FlowPoint> base_points,
                                          int threads) {
  if (!(p >= 1.0)) throw std::invalid_argument("estimate_strong: p < 1");
  if (family.members.empty())
    throw std::invalid_argument("estimate_strong: empty family");
  InequalityReport report;
  report.p = p;
  report.mode = Mode::kStrong;
  report.side = "ergodic";
  report.operator_desc = tsharp.line_op().descriptor();
  report.flow_desc = tsharp.flow().descriptor();
  report.weight_w_desc = w.descriptor();
  report.weight_v_desc = v.descriptor();
  report.truncation_a = tsharp.truncation_a();
  report.pad = tsharp.pad();
  report.sampling = meta_for(tsharp, base_points);

  const auto values = transferred_values(tsharp, family, base_points, threads);
  const double n = double(base_points.size());
  for (std::size_t m = 0; m < family.members.size(); ++m) {
    const FamilyMember& member = family.members[m];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < base_points.size(); ++i) {
      const FlowPoint& x = base_points[i];
      num += abs_pow(values[m][Eigen::Index(i)], p) * w.eval(x);
      den += abs_pow(member.space.eval(x), p) * v.eval(x);
    }
    const double den_norm = power_mean(den, n, p);
    if (!(den_norm > 0.0)) {
      report.skipped.push_back(member.id);
      continue;
    }
    const double ratio = power_mean(num, n, p) / den_norm;
    report.per_function_ratios.push_back(RatioEntry{member.id, ratio, -1.0});
    report.estimated_constant = std::max(report.estimated_constant, ratio);
  }
  return report;
}

InequalityReport estimate_weak_constant(const TransferredOperator& tsharp,
                                        double p, const SpaceFunction& w,
                                        std::span<const double> lambda_grid,
                                        const FunctionFamily& family,
                                        std::span<const FlowPoint> base_points,
                                        Mode mode, int threads) {
  if (!(p >= 1.0)) throw std::invalid_argument("estimate_weak: p < 1");
  if (mode == Mode::kStrong)
    throw std::invalid_argument("estimate_weak: weak mode required");
  InequalityReport report;
  report.p = p;
  report.mode = mode;
  report.side = "ergodic";
  report.operator_desc = tsharp.line_op().descriptor();
  report.flow_desc = tsharp.flow().descriptor();
  report.weight_w_desc = w.descriptor();
  report.weight_v_desc =
      mode == Mode::kWeakTwoSided ? w.descriptor() : "const 1";
  report.truncation_a = tsharp.truncation_a();
  report.pad = tsharp.pad();
  report.sampling = meta_for(tsharp, base_points);

  const auto values = transferred_values(tsharp, family, base_points, threads);
  double max_val = 0.0;
  for (const auto& column : values)
    max_val = std::max(max_val, column.abs().maxCoeff());
  std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
  if (grid.empty()) grid = auto_lambda_grid(max_val);
  report.lambda_grid = grid;

  const double n = double(base_points.size());
  for (std::size_t m = 0; m < family.members.size(); ++m) {
    const FamilyMember& member = family.members[m];
    double den = 0.0;
    for (std::size_t i = 0; i < base_points.size(); ++i) {
      const FlowPoint& x = base_points[i];
      den += abs_pow(member.space.eval(x), p) *
             (mode == Mode::kWeakTwoSided ? w.eval(x) : 1.0);
    }
    const double den_norm = power_mean(den, n, p);
    if (!(den_norm > 0.0)) {
      report.skipped.push_back(member.id);
      continue;
    }
    double best = 0.0, best_lambda = grid.empty() ? -1.0 : grid.front();
    for (double lam : grid) {
      double mass = 0.0;
      for (std::size_t i = 0; i < base_points.size(); ++i)
        if (std::abs(values[m][Eigen::Index(i)]) > lam)
          mass += w.eval(base_points[i]);
      const double lhs = lam * power_mean(mass, n, p);
      const double ratio = lhs / den_norm;
      if (ratio > best) {
        best = ratio;
        best_lambda = lam;
      }
    }
    report.per_function_ratios.push_back(
        RatioEntry{member.id, best, best_lambda});
    report.estimated_constant = std::max(report.estimated_constant, best);
  }
  return report;
}

InequalityReport truncation_sweep(const TransferredOperator& tsharp, double p,
                                  const SpaceFunction& w,
                                  const SpaceFunction& v,
                                  const FunctionFamily& family,
                                  std::span<const double> a_values,
                                  std::span<const FlowPoint> base_points,
                                  int threads) {
  if (a_values.empty())
    throw std::invalid_argument("truncation_sweep: no a values");
  InequalityReport report;
  std::vector<std::pair<double, double>> sweep;
  sweep.reserve(a_values.size());
  for (double a : a_values) {
    const TransferredOperator op = tsharp.with_truncation(a);
    report =
        estimate_strong_constant(op, p, w, v, family, base_points, threads);
    sweep.emplace_back(a, report.estimated_constant);
  }
  report.truncation_sweep = std::move(sweep);
  return report;
}

// ---------------------------------------------------------------------------
// Line-side baseline

InequalityReport line_baseline(const LineOperator& op, double p,
                               const Weight& w, const Weight& v,
                               const FunctionFamily& family, Mode mode,
                               std::span<const double> lambda_grid,
                               const GridSpec& grid, int threads) {
  if (!(p >= 1.0)) throw std::invalid_argument("line_baseline: p < 1");
  InequalityReport report;
  report.p = p;
  report.mode = mode;
  report.side = "line";
  report.operator_desc = op.descriptor();
  report.weight_w_desc = w.descriptor();
  report.weight_v_desc =
      mode == Mode::kWeakLeftOnly ? "const 1" : v.descriptor();
  report.sampling.line_step = grid.step;
  report.sampling.support_radius = grid.support_radius;

  const std::int64_t members = std::int64_t(family.members.size());
  std::vector<SampledFunction> outputs;
  outputs.reserve(std::size_t(members));
  for (const FamilyMember& member : family.members)
    outputs.push_back(member.line);  // placeholder, replaced below
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(members, threads, [&](std::int64_t m) {
    try {
      outputs[std::size_t(m)] = apply(op, family.members[std::size_t(m)].line);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  if (mode == Mode::kStrong) {
    for (std::size_t m = 0; m < family.members.size(); ++m) {
      const FamilyMember& member = family.members[m];
      const double den = lp_norm_weighted(member.line, v, p);
      if (!(den > 0.0)) {
        report.skipped.push_back(member.id);
        continue;
      }
      const double ratio = lp_norm_weighted(outputs[m], w, p) / den;
      report.per_function_ratios.push_back(RatioEntry{member.id, ratio, -1.0});
      report.estimated_constant = std::max(report.estimated_constant, ratio);
    }
    return report;
  }

  double max_val = 0.0;
  for (const auto& out : outputs) max_val = std::max(max_val, out.max_abs());
  std::vector<double> lam_grid(lambda_grid.begin(), lambda_grid.end());
  if (lam_grid.empty()) lam_grid = auto_lambda_grid(max_val);
  report.lambda_grid = lam_grid;
  const Weight unit = Weight::constant(1.0);
  for (std::size_t m = 0; m < family.members.size(); ++m) {
    const FamilyMember& member = family.members[m];
    const double den = lp_norm_weighted(
        member.line, mode == Mode::kWeakTwoSided ? w : unit, p);
    if (!(den > 0.0)) {
      report.skipped.push_back(member.id);
      continue;
    }
    double best = 0.0, best_lambda = lam_grid.empty() ? -1.0 : lam_grid.front();
    for (double lam : lam_grid) {
      const double mass = distribution_weighted(outputs[m], w, lam);
      const double lhs =
          lam * (p == 1.0 ? mass : std::pow(mass, 1.0 / p));
      const double ratio = lhs / den;
      if (ratio > best) {
        best = ratio;
        best_lambda = lam;
      }
    }
    report.per_function_ratios.push_back(
        RatioEntry{member.id, best, best_lambda});
    report.estimated_constant = std::max(report.estimated_constant, best);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Comparison

ComparisonResult transfer_comparison(const InequalityReport& line,
                                     const InequalityReport& ergodic,
                                     double tolerance) {
  if (line.p != ergodic.p)
    throw MismatchedConfig("transfer_comparison: p differs between reports");
  if (line.mode != ergodic.mode)
    throw MismatchedConfig("transfer_comparison: mode differs");
  if (line.operator_desc != ergodic.operator_desc)
    throw MismatchedConfig("transfer_comparison: operator differs");
  if (line.weight_w_desc != ergodic.weight_w_desc ||
      line.weight_v_desc != ergodic.weight_v_desc)
    throw MismatchedConfig("transfer_comparison: weight generators differ");
  if (!(ergodic.truncation_a > 0.0))
    throw MismatchedConfig("transfer_comparison: ergodic report lacks a");

  ComparisonResult result;
  result.line_constant = line.estimated_constant;
  result.ergodic_constant = ergodic.estimated_constant;
  const double a = ergodic.truncation_a;
  const double eps = std::max(ergodic.pad, 0.0);
  result.slack =
      std::pow((a + eps) / a, 1.0 / ergodic.p) * (1.0 + tolerance);
  result.pass =
      result.ergodic_constant <= result.line_constant * result.slack;
  result.margin = result.line_constant * result.slack - result.ergodic_constant;
  std::ostringstream os;
  os.precision(10);
  os << "ergodic " << result.ergodic_constant << " vs line "
     << result.line_constant << " * slack " << result.slack << " => "
     << (result.pass ? "pass" : "FAIL");
  result.detail = os.str();
  return result;
}

}  // namespace ergo
