#include "ergo/runner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "ergo/verify.hpp"

namespace ergo {

namespace {

using nlohmann::ordered_json;

struct Experiment {
  ExperimentConfig cfg;
  GridSpec grid;
  LineOperator op = LineOperator::identity();
  bool has_flow = false;
  Flow flow = Flow::circle_rotation(0.0);
  IntervalFamily family;

  explicit Experiment(const ExperimentConfig& c)
      : cfg(c),
        grid{c.line_step, c.support_radius},
        op(parse_operator_literal(c.operator_literal)),
        has_flow(!c.flow_literal.empty()),
        flow(c.flow_literal.empty() ? Flow::circle_rotation(0.0)
                                    : parse_flow_literal(c.flow_literal)),
        family(c.fam_symmetric
                   ? IntervalFamily::symmetric_dyadic(c.fam_k_lo, c.fam_k_hi)
                   : IntervalFamily::dyadic(c.fam_k_lo, c.fam_k_hi,
                                            -c.support_radius,
                                            c.support_radius,
                                            c.fam_center_step)) {}

  std::string weight_v_literal() const {
    return cfg.weight_v_literal.empty() ? cfg.weight_w_literal
                                        : cfg.weight_v_literal;
  }

  TransferredOperator tsharp(double a = -1.0) const {
    return TransferredOperator(op, flow, a, cfg.pad, cfg.line_step);
  }

  FunctionFamily functions() const {
    const auto literals = cfg.function_literals.empty()
                              ? FunctionFamily::default_generators()
                              : cfg.function_literals;
    return FunctionFamily::from_generators(literals, grid, cfg.seed);
  }
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void fill_sampling(InequalityReport& report, const ExperimentConfig& cfg) {
  report.sampling.line_step = cfg.line_step;
  report.sampling.support_radius = cfg.support_radius;
  report.sampling.n_points = cfg.n_points;
  report.sampling.base_points = cfg.base_points;
  report.sampling.seed = cfg.seed;
}

ordered_json reports_envelope() {
  ordered_json j;
  j["schema_version"] = "1";
  return j;
}

std::string report_rows_csv(const std::vector<InequalityReport>& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "p,side,mode,function,lambda,ratio\n";
  for (const InequalityReport& r : reports) {
    for (const RatioEntry& e : r.per_function_ratios) {
      os << r.p << "," << r.side << "," << mode_name(r.mode) << ","
         << csv_escape(e.id) << ",";
      if (e.lambda >= 0.0) os << e.lambda;
      os << "," << e.ratio << "\n";
    }
  }
  return os.str();
}

}  // namespace

std::vector<double> default_a_values(const LineOperator& op, double pad) {
  const double eff_pad = pad < 0.0 ? op.semilocal_radius() : pad;
  const double reach = op.reach();
  if (reach <= 0.0) return {std::max(1.0, eff_pad)};
  std::vector<double> out;
  for (double mult : {0.0, 1.0, 2.0, 4.0, 8.0})
    out.push_back(eff_pad + mult * reach);
  if (out.front() <= 0.0) out.front() = reach;
  return out;
}

// ---------------------------------------------------------------------------
// check-weight

RunResult run_check_weight(const ExperimentConfig& cfg) {
  const Experiment ex(cfg);
  RunResult result;
  std::ostringstream text, csv;
  text.precision(10);
  csv.precision(17);
  ordered_json j = reports_envelope();
  j["command"] = "check-weight";
  j["weight"] = cfg.weight_w_literal;

  if (!ex.has_flow) {
    const Weight w = parse_weight_literal(cfg.weight_w_literal);
    csv << "p,center,length,product\n";
    auto ap_entries = ordered_json::array();
    for (double p : cfg.p_values) {
      if (!(p > 1.0)) continue;
      ordered_json entry;
      entry["p"] = p;
      try {
        const auto products = ap_products(w, p, ex.family);
        const double constant =
            *std::max_element(products.begin(), products.end());
        entry["constant"] = constant;
        text << "A_p[p=" << p << "] = " << constant << "\n";
        std::size_t idx = 0;
        for (double len : ex.family.lengths)
          for (double c : ex.family.centers)
            csv << p << "," << c << "," << len << "," << products[idx++]
                << "\n";
      } catch (const NonIntegrableDual& e) {
        entry["error"] = e.what();
        text << "A_p[p=" << p << "] = divergent (" << e.what() << ")\n";
      }
      ap_entries.push_back(std::move(entry));
    }
    j["ap"] = std::move(ap_entries);
    try {
      const double a1 = a1_constant(w, ex.family, cfg.line_step);
      j["a1"] = a1;
      text << "A_1 = " << a1 << "\n";
    } catch (const ZeroInfimum& e) {
      j["a1_error"] = e.what();
      text << "A_1 = undefined (" << e.what() << ")\n";
    }
    try {
      const auto subsets =
          make_ainfty_subsets(w, cfg.ainfty_interval, cfg.ainfty_delta,
                              cfg.ainfty_subsets, cfg.seed);
      const AInftyResult ainf =
          a_infty_check(w, cfg.ainfty_interval, cfg.ainfty_delta, subsets);
      j["a_infinity"] = {{"delta", cfg.ainfty_delta},
                         {"epsilon_estimate", ainf.epsilon_estimate},
                         {"holds", ainf.holds}};
      text << "A_infinity: epsilon = " << ainf.epsilon_estimate
           << ", holds = " << (ainf.holds ? "yes" : "no") << "\n";
    } catch (const std::exception& e) {
      j["a_infinity_error"] = e.what();
      text << "A_infinity: error (" << e.what() << ")\n";
    }
  } else {
    const SpaceFunction w =
        parse_space_weight_literal(cfg.weight_w_literal, cfg.seed);
    const auto points = stratified_points(ex.flow, cfg.base_points);
    j["flow"] = ex.flow.descriptor();
    csv << "quantity,p,base_point,constant\n";
    auto ap_entries = ordered_json::array();
    for (double p : cfg.p_values) {
      if (!(p > 1.0)) continue;
      ordered_json entry;
      entry["p"] = p;
      try {
        const auto per = ap_prime_per_base_point(w, ex.flow, p, points,
                                                 ex.family, cfg.line_step,
                                                 cfg.threads);
        const double constant = *std::max_element(per.begin(), per.end());
        entry["constant"] = constant;
        text << "A_p'[p=" << p << "] = " << constant << "\n";
        for (std::size_t i = 0; i < per.size(); ++i)
          csv << "ap_prime," << p << "," << points[i].coord(0) << "," << per[i]
              << "\n";
      } catch (const NonIntegrableDual& e) {
        entry["error"] = e.what();
        text << "A_p'[p=" << p << "] = divergent (" << e.what() << ")\n";
      }
      ap_entries.push_back(std::move(entry));
    }
    j["ap_prime"] = std::move(ap_entries);
    try {
      const auto per = a1_prime_per_base_point(w, ex.flow, points, ex.family,
                                               cfg.line_step, cfg.threads);
      const double constant = *std::max_element(per.begin(), per.end());
      j["a1_prime"] = constant;
      text << "A_1' = " << constant << "\n";
      for (std::size_t i = 0; i < per.size(); ++i)
        csv << "a1_prime,1," << points[i].coord(0) << "," << per[i] << "\n";
    } catch (const ZeroInfimum& e) {
      j["a1_prime_error"] = e.what();
      text << "A_1' = undefined (" << e.what() << ")\n";
    }
  }

  result.text = text.str();
  result.json_text = j.dump(2) + "\n";
  result.csv_text = csv.str();
  return result;
}

// ---------------------------------------------------------------------------
// apply

RunResult run_apply(const ExperimentConfig& cfg) {
  const Experiment ex(cfg);
  if (cfg.points.empty())
    throw std::invalid_argument("apply: config needs a 'points' entry");
  if (cfg.function_literals.empty())
    throw std::invalid_argument("apply: config needs a 'function' entry");
  const std::string& literal = cfg.function_literals.front();

  RunResult result;
  std::ostringstream text, csv;
  text.precision(10);
  csv.precision(17);
  csv << "point,value\n";

  std::vector<double> values;
  values.reserve(cfg.points.size());
  if (!ex.has_flow) {
    const SampledFunction f =
        parse_line_function_literal(literal, ex.grid, cfg.seed);
    for (double t : cfg.points) values.push_back(apply_at(ex.op, f, t));
  } else {
    if (ex.flow.dim() != 1)
      throw std::invalid_argument("apply: flows over points need the circle");
    const SpaceFunction f = parse_space_function_literal(literal, cfg.seed);
    const TransferredOperator tsharp = ex.tsharp(
        cfg.a_values.empty() ? -1.0 : cfg.a_values.back());
    for (double x : cfg.points)
      values.push_back(transfer_apply(tsharp, f, FlowPoint::circle(x)));
  }
  for (std::size_t i = 0; i < cfg.points.size(); ++i)
    csv << cfg.points[i] << "," << values[i] << "\n";

  ordered_json j = reports_envelope();
  j["command"] = "apply";
  j["operator"] = cfg.operator_literal;
  j["function"] = literal;
  if (ex.has_flow) j["flow"] = ex.flow.descriptor();
  j["points"] = cfg.points;
  j["values"] = values;
  text << "apply: " << cfg.operator_literal << " on " << literal << " at "
       << cfg.points.size() << " points\n";

  result.text = text.str();
  result.json_text = j.dump(2) + "\n";
  result.csv_text = csv.str();
  return result;
}

// ---------------------------------------------------------------------------
// verify

RunResult run_verify(const ExperimentConfig& cfg) {
  const Experiment ex(cfg);
  const FunctionFamily family = ex.functions();
  RunResult result;
  std::ostringstream text;
  text.precision(10);
  ordered_json j = reports_envelope();
  j["command"] = "verify";
  auto report_array = ordered_json::array();
  auto comparison_array = ordered_json::array();
  std::vector<InequalityReport> all_reports;

  const Mode mode = cfg.mode == "weak_two_sided"  ? Mode::kWeakTwoSided
                    : cfg.mode == "weak_left_only" ? Mode::kWeakLeftOnly
                                                   : Mode::kStrong;

  if (cfg.mode == "compare") {
    if (!ex.has_flow) {
      throw ConfigParseError(
          {{"<config>", 0, "compare mode requires a flow"}});
    }
    const SpaceFunction w_space =
        parse_space_weight_literal(cfg.weight_w_literal, cfg.seed);
    const SpaceFunction v_space =
        parse_space_weight_literal(ex.weight_v_literal(), cfg.seed);
    const Weight w_line =
        line_weight_for_space_weight(cfg.weight_w_literal, ex.flow, cfg.seed);
    const Weight v_line = line_weight_for_space_weight(ex.weight_v_literal(),
                                                       ex.flow, cfg.seed);
    const auto base = stratified_points(ex.flow, cfg.base_points);
    bool first = true;
    for (double p : cfg.p_values) {
      InequalityReport line = line_baseline(ex.op, p, w_line, v_line, family,
                                            Mode::kStrong, {}, ex.grid,
                                            cfg.threads);
      fill_sampling(line, cfg);
      // The comparison always runs at the default truncation; the sweep is
      // attached to the first report as a diagnostic.
      InequalityReport erg = estimate_strong_constant(
          ex.tsharp(), p, w_space, v_space, family, base, cfg.threads);
      if (first) {
        const auto sweep_a = cfg.a_values.empty()
                                 ? default_a_values(ex.op, cfg.pad)
                                 : cfg.a_values;
        const InequalityReport swept = truncation_sweep(
            ex.tsharp(), p, w_space, v_space, family, sweep_a, base,
            cfg.threads);
        erg.truncation_sweep = swept.truncation_sweep;
      }
      first = false;
      fill_sampling(erg, cfg);
      // The line report's weight descriptors are the space generators, so
      // the comparison can match them.
      const ComparisonResult cmp = transfer_comparison(line, erg);
      text << "p=" << p << ": " << cmp.detail << "\n";
      ordered_json c;
      c["p"] = p;
      c["pass"] = cmp.pass;
      c["line_constant"] = cmp.line_constant;
      c["ergodic_constant"] = cmp.ergodic_constant;
      c["slack"] = cmp.slack;
      c["margin"] = cmp.margin;
      comparison_array.push_back(std::move(c));
      if (!cmp.pass) result.comparisons_failed = true;
      report_array.push_back(report_to_json(line));
      report_array.push_back(report_to_json(erg));
      all_reports.push_back(std::move(line));
      all_reports.push_back(std::move(erg));
    }
  } else if (!ex.has_flow) {
    const Weight w = parse_weight_literal(cfg.weight_w_literal);
    const Weight v = parse_weight_literal(ex.weight_v_literal());
    for (double p : cfg.p_values) {
      InequalityReport r = line_baseline(ex.op, p, w, v, family, mode,
                                         cfg.lambda_list, ex.grid,
                                         cfg.threads);
      fill_sampling(r, cfg);
      text << "p=" << p << " [" << mode_name(mode)
           << "] line constant = " << r.estimated_constant << "\n";
      report_array.push_back(report_to_json(r));
      all_reports.push_back(std::move(r));
    }
  } else {
    const SpaceFunction w =
        parse_space_weight_literal(cfg.weight_w_literal, cfg.seed);
    const SpaceFunction v =
        parse_space_weight_literal(ex.weight_v_literal(), cfg.seed);
    const auto base = stratified_points(ex.flow, cfg.base_points);
    for (double p : cfg.p_values) {
      InequalityReport r;
      if (mode == Mode::kStrong)
        r = estimate_strong_constant(ex.tsharp(), p, w, v, family, base,
                                     cfg.threads);
      else
        r = estimate_weak_constant(ex.tsharp(), p, w, cfg.lambda_list, family,
                                   base, mode, cfg.threads);
      fill_sampling(r, cfg);
      text << "p=" << p << " [" << mode_name(mode)
           << "] ergodic constant = " << r.estimated_constant << "\n";
      report_array.push_back(report_to_json(r));
      all_reports.push_back(std::move(r));
    }
  }

  j["reports"] = std::move(report_array);
  j["comparisons"] = std::move(comparison_array);
  result.text = text.str();
  result.json_text = j.dump(2) + "\n";
  result.csv_text = report_rows_csv(all_reports);
  return result;
}

// ---------------------------------------------------------------------------
// sweep

RunResult run_sweep(const ExperimentConfig& cfg) {
  const Experiment ex(cfg);
  if (!ex.has_flow)
    throw std::invalid_argument("sweep: config needs a flow");
  const FunctionFamily family = ex.functions();
  const SpaceFunction w =
      parse_space_weight_literal(cfg.weight_w_literal, cfg.seed);
  const SpaceFunction v =
      parse_space_weight_literal(ex.weight_v_literal(), cfg.seed);
  const auto base = stratified_points(ex.flow, cfg.base_points);
  const auto a_values = cfg.a_values.empty()
                            ? default_a_values(ex.op, cfg.pad)
                            : cfg.a_values;
  const double p = cfg.p_values.front();
  InequalityReport r = truncation_sweep(ex.tsharp(), p, w, v, family,
                                        a_values, base, cfg.threads);
  fill_sampling(r, cfg);

  RunResult result;
  std::ostringstream text, csv;
  text.precision(12);
  csv.precision(17);
  csv << "a,constant\n";
  for (const auto& [a, c] : r.truncation_sweep) {
    text << "a = " << a << " -> constant " << c << "\n";
    csv << a << "," << c << "\n";
  }
  ordered_json j = reports_envelope();
  j["command"] = "sweep";
  j["report"] = report_to_json(r);
  result.text = text.str();
  result.json_text = j.dump(2) + "\n";
  result.csv_text = csv.str();
  return result;
}

}  // namespace ergo
