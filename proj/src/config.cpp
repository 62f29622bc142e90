#include "ergo/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ergo/rng.hpp"

namespace ergo {

namespace {

std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

long long parse_integer(const std::string& token) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(token, &used);
  } catch (...) {
    throw std::invalid_argument("bad integer '" + token + "'");
  }
  if (used != token.size())
    throw std::invalid_argument("bad integer '" + token + "'");
  return v;
}

}  // namespace

double parse_number(const std::string& token) {
  if (token.rfind("2^", 0) == 0)
    return std::ldexp(1.0, int(parse_integer(token.substr(2))));
  if (token.rfind("-2^", 0) == 0)
    return -std::ldexp(1.0, int(parse_integer(token.substr(3))));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (...) {
    throw std::invalid_argument("bad number '" + token + "'");
  }
  if (used != token.size())
    throw std::invalid_argument("bad number '" + token + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Literals

Weight parse_weight_literal(const std::string& literal) {
  const auto toks = tokenize(literal);
  if (toks.empty()) throw std::invalid_argument("empty weight literal");
  const std::string& head = toks[0];
  if (head == "const") {
    if (toks.size() != 2)
      throw std::invalid_argument("weight 'const' needs one value");
    return Weight::constant(parse_number(toks[1]));
  }
  if (head == "power") {
    if (toks.size() != 3)
      throw std::invalid_argument("weight 'power' needs alpha and floor");
    return Weight::power(parse_number(toks[1]), parse_number(toks[2]));
  }
  if (head == "cosine") {
    if (toks.size() != 4 && toks.size() != 5)
      throw std::invalid_argument(
          "weight 'cosine' needs base, amp, freq [, phase]");
    return Weight::cosine(parse_number(toks[1]), parse_number(toks[2]),
                          parse_number(toks[3]),
                          toks.size() == 5 ? parse_number(toks[4]) : 0.0);
  }
  if (head == "piecewise") {
    // piecewise (a,b,v);(a,b,v);...  with an optional trailing outside value
    std::string body = strip(literal.substr(head.size()));
    double outside = 1.0;
    const auto outside_pos = body.find("outside");
    if (outside_pos != std::string::npos) {
      outside = parse_number(strip(body.substr(outside_pos + 7)));
      body = strip(body.substr(0, outside_pos));
    }
    std::vector<std::pair<Interval, double>> pieces;
    std::istringstream is(body);
    std::string chunk;
    while (std::getline(is, chunk, ';')) {
      chunk = strip(chunk);
      if (chunk.empty()) continue;
      if (chunk.front() != '(' || chunk.back() != ')')
        throw std::invalid_argument("bad piecewise chunk '" + chunk + "'");
      std::string inner = chunk.substr(1, chunk.size() - 2);
      std::replace(inner.begin(), inner.end(), ',', ' ');
      const auto nums = tokenize(inner);
      if (nums.size() != 3)
        throw std::invalid_argument("bad piecewise chunk '" + chunk + "'");
      pieces.push_back({Interval{parse_number(nums[0]), parse_number(nums[1])},
                        parse_number(nums[2])});
    }
    if (pieces.empty())
      throw std::invalid_argument("weight 'piecewise' needs pieces");
    return Weight::piecewise(std::move(pieces), outside);
  }
  throw std::invalid_argument("unknown weight kind '" + head + "'");
}

LineOperator parse_operator_literal(const std::string& literal) {
  const auto toks = tokenize(literal);
  if (toks.empty()) throw std::invalid_argument("empty operator literal");
  const std::string& head = toks[0];
  if (head == "identity") {
    if (toks.size() != 1)
      throw std::invalid_argument("operator 'identity' takes no arguments");
    return LineOperator::identity();
  }
  if (head == "maximal") {
    if (toks.size() != 3)
      throw std::invalid_argument("operator 'maximal' needs k_lo and k_hi");
    return LineOperator::maximal_dyadic(int(parse_integer(toks[1])),
                                        int(parse_integer(toks[2])));
  }
  if (head == "hilbert") {
    if (toks.size() != 2)
      throw std::invalid_argument("operator 'hilbert' needs eps");
    return LineOperator::hilbert(parse_number(toks[1]));
  }
  if (head == "square") {
    if (toks.size() != 3)
      throw std::invalid_argument("operator 'square' needs n_min and n_max");
    return LineOperator::square(int(parse_integer(toks[1])),
                                int(parse_integer(toks[2])));
  }
  if (head == "sup") {
    std::vector<LineOperator> members;
    std::istringstream is(strip(literal.substr(head.size())));
    std::string chunk;
    while (std::getline(is, chunk, ';')) {
      chunk = strip(chunk);
      if (!chunk.empty()) members.push_back(parse_operator_literal(chunk));
    }
    return LineOperator::sup_family(std::move(members));
  }
  throw std::invalid_argument("unknown operator kind '" + head + "'");
}

Flow parse_flow_literal(const std::string& literal) {
  const auto toks = tokenize(literal);
  if (toks.empty()) throw std::invalid_argument("empty flow literal");
  if (toks[0] == "circle") {
    if (toks.size() != 2)
      throw std::invalid_argument("flow 'circle' needs alpha");
    return Flow::circle_rotation(parse_number(toks[1]));
  }
  if (toks[0] == "torus") {
    if (toks.size() != 3)
      throw std::invalid_argument("flow 'torus' needs two alphas");
    return Flow::torus_linear(parse_number(toks[1]), parse_number(toks[2]));
  }
  throw std::invalid_argument("unknown flow kind '" + toks[0] + "'");
}

namespace {

std::vector<double> seeded_step_values(long long count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("rsteps: count < 1");
  SplitMix64 rng(seed);
  std::vector<double> values;
  values.resize(std::size_t(count));
  for (auto& v : values) v = rng.uniform();
  return values;
}

}  // namespace

SpaceFunction parse_space_function_literal(const std::string& literal,
                                           std::uint64_t seed) {
  const auto toks = tokenize(literal);
  if (toks.empty()) throw std::invalid_argument("empty function literal");
  const std::string& head = toks[0];
  if (head == "const") {
    if (toks.size() != 2 && toks.size() != 4)
      throw std::invalid_argument("'const' needs a value");
    return SpaceFunction::constant(parse_number(toks[1]));
  }
  if (head == "indicator" || head == "arc") {
    if (toks.size() != 3)
      throw std::invalid_argument("'" + head + "' needs two endpoints");
    return SpaceFunction::arc(parse_number(toks[1]), parse_number(toks[2]));
  }
  if (head == "tent") {
    if (toks.size() != 3)
      throw std::invalid_argument("'tent' needs center and radius");
    return SpaceFunction::tent(parse_number(toks[1]), parse_number(toks[2]));
  }
  if (head == "cos" || head == "cosine") {
    if (toks.size() != 2 && toks.size() != 4)
      throw std::invalid_argument("'" + head + "' needs a frequency");
    return SpaceFunction::cosine(parse_number(toks[1]));
  }
  if (head == "cosine2") {
    if (toks.size() != 3)
      throw std::invalid_argument("'cosine2' needs two frequencies");
    return SpaceFunction::cosine2(parse_number(toks[1]),
                                  parse_number(toks[2]));
  }
  if (head == "cosaffine") {
    if (toks.size() != 4)
      throw std::invalid_argument("'cosaffine' needs base, amp, freq");
    return SpaceFunction::cos_affine(parse_number(toks[1]),
                                     parse_number(toks[2]),
                                     parse_number(toks[3]));
  }
  if (head == "steps") {
    if (toks.size() < 4)
      throw std::invalid_argument("'steps' needs values then two endpoints");
    std::vector<double> values;
    for (std::size_t i = 1; i + 2 < toks.size(); ++i)
      values.push_back(parse_number(toks[i]));
    return SpaceFunction::steps(parse_number(toks[toks.size() - 2]),
                                parse_number(toks[toks.size() - 1]),
                                std::move(values));
  }
  if (head == "rsteps") {
    if (toks.size() != 4)
      throw std::invalid_argument("'rsteps' needs count and two endpoints");
    auto values = seeded_step_values(parse_integer(toks[1]), seed);
    return SpaceFunction::steps(parse_number(toks[2]), parse_number(toks[3]),
                                std::move(values))
        .with_descriptor(literal);
  }
  throw std::invalid_argument("unknown function kind '" + head + "'");
}

SampledFunction parse_line_function_literal(const std::string& literal,
                                            const GridSpec& grid,
                                            std::uint64_t seed) {
  const auto toks = tokenize(literal);
  if (toks.empty()) throw std::invalid_argument("empty function literal");
  const std::string& head = toks[0];
  if (head == "const") {
    // "const C" lives on the unit window; "const C A B" is explicit.
    if (toks.size() == 2)
      return make_constant(parse_number(toks[1]), 0.0, 1.0, grid);
    if (toks.size() == 4)
      return make_constant(parse_number(toks[1]), parse_number(toks[2]),
                           parse_number(toks[3]), grid);
    throw std::invalid_argument("'const' needs a value");
  }
  if (head == "indicator" || head == "arc") {
    if (toks.size() != 3)
      throw std::invalid_argument("'" + head + "' needs two endpoints");
    return make_indicator(parse_number(toks[1]), parse_number(toks[2]), grid);
  }
  if (head == "tent") {
    if (toks.size() != 3)
      throw std::invalid_argument("'tent' needs center and radius");
    return make_tent(parse_number(toks[1]), parse_number(toks[2]), grid);
  }
  if (head == "cos" || head == "cosine") {
    if (toks.size() == 2)  // global cosine windowed to the unit interval
      return make_windowed_cosine(parse_number(toks[1]), 0.0, 1.0, grid);
    if (toks.size() == 4)
      return make_windowed_cosine(parse_number(toks[1]), parse_number(toks[2]),
                                  parse_number(toks[3]), grid);
    throw std::invalid_argument("'" + head + "' needs a frequency");
  }
  if (head == "steps") {
    if (toks.size() < 4)
      throw std::invalid_argument("'steps' needs values then two endpoints");
    std::vector<double> values;
    for (std::size_t i = 1; i + 2 < toks.size(); ++i)
      values.push_back(parse_number(toks[i]));
    return make_steps(values, parse_number(toks[toks.size() - 2]),
                      parse_number(toks[toks.size() - 1]), grid);
  }
  if (head == "rsteps") {
    if (toks.size() != 4)
      throw std::invalid_argument("'rsteps' needs count and two endpoints");
    const auto values = seeded_step_values(parse_integer(toks[1]), seed);
    return make_steps(values, parse_number(toks[2]), parse_number(toks[3]),
                      grid);
  }
  throw std::invalid_argument("unknown function kind '" + head + "'");
}

SpaceFunction parse_space_weight_literal(const std::string& literal,
                                         std::uint64_t seed) {
  SpaceFunction w = parse_space_function_literal(literal, seed);
  if (!w.nonnegative())
    throw std::invalid_argument("weight '" + literal +
                                "' is not a nonnegative space function");
  return w;
}

Weight line_weight_for_space_weight(const std::string& literal,
                                    const Flow& flow, std::uint64_t seed) {
  const SpaceFunction space = parse_space_weight_literal(literal, seed);
  const std::string canonical = space.descriptor();
  const auto toks = tokenize(literal);
  if (toks[0] == "const")
    return parse_weight_literal(literal).with_descriptor(canonical);
  if (toks[0] == "cosaffine") {
    const double base = parse_number(toks[1]);
    const double amp = parse_number(toks[2]);
    const double k = parse_number(toks[3]);
    // Orbit realization of the generator: w(U_t x) = base + amp cos(2pi k
    // (x + t alpha)); the phase does not affect constants.
    return Weight::cosine(base, amp, k * flow.realized_alpha(0), 0.0)
        .with_descriptor(canonical);
  }
  throw std::invalid_argument(
      "compare mode needs a 'const' or 'cosaffine' weight, got '" + literal +
      "'");
}

// ---------------------------------------------------------------------------
// Config files

std::string ConfigError::to_string() const {
  std::ostringstream os;
  os << path << ": " << line << ": " << message;
  return os.str();
}

ConfigParseError::ConfigParseError(std::vector<ConfigError> errs)
    : std::runtime_error(errs.empty() ? "config error"
                                      : errs.front().to_string()),
      errors(std::move(errs)) {}

namespace {

struct KeyValue {
  int line;
  std::string key;
  std::string value;
};

std::vector<double> parse_number_list(const std::string& value) {
  std::vector<double> out;
  for (const std::string& tok : tokenize(value)) out.push_back(parse_number(tok));
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& path,
                                   std::vector<ConfigError>& errors) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  std::vector<KeyValue> entries;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    raw = strip(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) {
      errors.push_back({path, line_no, "expected 'key = value'"});
      continue;
    }
    entries.push_back(
        {line_no, strip(raw.substr(0, eq)), strip(raw.substr(eq + 1))});
  }

  auto fail = [&](int line, const std::string& msg) {
    errors.push_back({path, line, msg});
  };

  for (const KeyValue& kv : entries) {
    try {
      const std::string& k = kv.key;
      const std::string& v = kv.value;
      if (k == "flow") {
        if (v != "none") parse_flow_literal(v);
        cfg.flow_literal = v == "none" ? "" : v;
      } else if (k == "operator") {
        parse_operator_literal(v);
        cfg.operator_literal = v;
      } else if (k == "weight_w") {
        cfg.weight_w_literal = v;
      } else if (k == "weight_v") {
        cfg.weight_v_literal = v;
      } else if (k == "function") {
        cfg.function_literals.push_back(v);
      } else if (k == "p") {
        cfg.p_values = parse_number_list(v);
        if (cfg.p_values.empty()) throw std::invalid_argument("empty p list");
        for (double p : cfg.p_values)
          if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
      } else if (k == "mode") {
        if (v != "strong" && v != "weak_two_sided" && v != "weak_left_only" &&
            v != "compare")
          throw std::invalid_argument("unknown mode '" + v + "'");
        cfg.mode = v;
      } else if (k == "lambda") {
        const auto toks = tokenize(v);
        if (!toks.empty() && toks[0] == "auto") {
          cfg.lambda_list.clear();
          cfg.lambda_count =
              toks.size() > 1 ? int(parse_integer(toks[1])) : 24;
        } else if (!toks.empty() && toks[0] == "list") {
          cfg.lambda_list = parse_number_list(strip(v.substr(4)));
        } else {
          throw std::invalid_argument("lambda: expected 'auto [N]' or 'list'");
        }
      } else if (k == "a_values") {
        const auto toks = tokenize(v);
        if (!toks.empty() && toks[0] == "auto")
          cfg.a_values.clear();
        else if (!toks.empty() && toks[0] == "list")
          cfg.a_values = parse_number_list(strip(v.substr(4)));
        else
          throw std::invalid_argument("a_values: expected 'auto' or 'list'");
      } else if (k == "pad") {
        cfg.pad = v == "auto" ? -1.0 : parse_number(v);
      } else if (k == "line_step") {
        cfg.line_step = parse_number(v);
        if (!(cfg.line_step > 0.0))
          throw std::invalid_argument("line_step must be positive");
      } else if (k == "support_radius") {
        cfg.support_radius = parse_number(v);
        if (!(cfg.support_radius > 0.0))
          throw std::invalid_argument("support_radius must be positive");
      } else if (k == "n_points") {
        cfg.n_points = int(parse_integer(v));
        if (cfg.n_points < 1) throw std::invalid_argument("n_points < 1");
      } else if (k == "base_points") {
        cfg.base_points = int(parse_integer(v));
        if (cfg.base_points < 1) throw std::invalid_argument("base_points < 1");
      } else if (k == "seed") {
        cfg.seed = std::uint64_t(parse_integer(v));
      } else if (k == "threads") {
        cfg.threads = int(parse_integer(v));
        if (cfg.threads < 1) throw std::invalid_argument("threads < 1");
      } else if (k == "out_json") {
        cfg.out_json = v;
      } else if (k == "out_csv") {
        cfg.out_csv = v;
      } else if (k == "points") {
        const auto toks = tokenize(v);
        if (!toks.empty() && toks[0] == "list") {
          cfg.points = parse_number_list(strip(v.substr(4)));
        } else if (!toks.empty() && toks[0] == "linspace") {
          if (toks.size() != 4)
            throw std::invalid_argument("points: linspace A B N");
          const double a = parse_number(toks[1]);
          const double b = parse_number(toks[2]);
          const auto n = parse_integer(toks[3]);
          if (n < 2 || !(b > a))
            throw std::invalid_argument("points: bad linspace range");
          cfg.points.clear();
          for (long long i = 0; i < n; ++i)
            cfg.points.push_back(a + (b - a) * double(i) / double(n - 1));
        } else {
          throw std::invalid_argument("points: expected 'list' or 'linspace'");
        }
      } else if (k == "ainfty_delta") {
        cfg.ainfty_delta = parse_number(v);
      } else if (k == "ainfty_interval") {
        const auto nums = parse_number_list(v);
        if (nums.size() != 2 || !(nums[0] < nums[1]))
          throw std::invalid_argument("ainfty_interval: two endpoints");
        cfg.ainfty_interval = {nums[0], nums[1]};
      } else if (k == "ainfty_subsets") {
        cfg.ainfty_subsets = int(parse_integer(v));
      } else if (k == "fam_k_lo") {
        cfg.fam_k_lo = int(parse_integer(v));
      } else if (k == "fam_k_hi") {
        cfg.fam_k_hi = int(parse_integer(v));
      } else if (k == "fam_symmetric") {
        if (v == "true")
          cfg.fam_symmetric = true;
        else if (v == "false")
          cfg.fam_symmetric = false;
        else
          throw std::invalid_argument("fam_symmetric: expected true or false");
      } else if (k == "fam_center_step") {
        cfg.fam_center_step = parse_number(v);
        if (!(cfg.fam_center_step > 0.0))
          throw std::invalid_argument("fam_center_step must be positive");
      } else {
        throw std::invalid_argument("unknown key '" + k + "'");
      }
    } catch (const std::exception& e) {
      fail(kv.line, e.what());
    }
  }

  // Cross-field validation with literal parsing for the weights (they need
  // no flow context here beyond nonnegativity).
  if (errors.empty()) {
    int wline = 0, vline = 0, fline = 0;
    for (const KeyValue& kv : entries) {
      if (kv.key == "weight_w") wline = kv.line;
      if (kv.key == "weight_v") vline = kv.line;
      if (kv.key == "function") fline = kv.line;
    }
    auto check_weight = [&](const std::string& lit, int line) {
      if (lit.empty()) return;
      try {
        if (cfg.flow_literal.empty())
          parse_weight_literal(lit);
        else
          parse_space_weight_literal(lit, cfg.seed);
      } catch (const std::exception& e) {
        fail(line, e.what());
      }
    };
    check_weight(cfg.weight_w_literal, wline);
    check_weight(cfg.weight_v_literal, vline);
    for (const std::string& lit : cfg.function_literals) {
      try {
        GridSpec grid{cfg.line_step, cfg.support_radius};
        parse_line_function_literal(lit, grid, cfg.seed);
        if (!cfg.flow_literal.empty())
          parse_space_function_literal(lit, cfg.seed);
      } catch (const std::exception& e) {
        fail(fline, e.what());
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError({{path, 0, "cannot open file"}});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::vector<ConfigError> errors;
  ExperimentConfig cfg = parse_config_text(buffer.str(), path, errors);
  if (!errors.empty()) throw ConfigParseError(std::move(errors));
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "flow = " << (cfg.flow_literal.empty() ? "none" : cfg.flow_literal)
     << "\n";
  os << "operator = " << cfg.operator_literal << "\n";
  os << "weight_w = " << cfg.weight_w_literal << "\n";
  if (!cfg.weight_v_literal.empty())
    os << "weight_v = " << cfg.weight_v_literal << "\n";
  for (const std::string& f : cfg.function_literals)
    os << "function = " << f << "\n";
  os << "p =";
  for (double p : cfg.p_values) os << " " << p;
  os << "\n";
  os << "mode = " << cfg.mode << "\n";
  if (cfg.lambda_list.empty()) {
    os << "lambda = auto " << cfg.lambda_count << "\n";
  } else {
    os << "lambda = list";
    for (double l : cfg.lambda_list) os << " " << l;
    os << "\n";
  }
  if (cfg.a_values.empty()) {
    os << "a_values = auto\n";
  } else {
    os << "a_values = list";
    for (double a : cfg.a_values) os << " " << a;
    os << "\n";
  }
  if (cfg.pad < 0.0)
    os << "pad = auto\n";
  else
    os << "pad = " << cfg.pad << "\n";
  os << "line_step = " << cfg.line_step << "\n";
  os << "support_radius = " << cfg.support_radius << "\n";
  os << "n_points = " << cfg.n_points << "\n";
  os << "base_points = " << cfg.base_points << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "threads = " << cfg.threads << "\n";
  if (!cfg.out_json.empty()) os << "out_json = " << cfg.out_json << "\n";
  if (!cfg.out_csv.empty()) os << "out_csv = " << cfg.out_csv << "\n";
  if (!cfg.points.empty()) {
    os << "points = list";
    for (double p : cfg.points) os << " " << p;
    os << "\n";
  }
  os << "ainfty_delta = " << cfg.ainfty_delta << "\n";
  os << "ainfty_interval = " << cfg.ainfty_interval.left << " "
     << cfg.ainfty_interval.right << "\n";
  os << "ainfty_subsets = " << cfg.ainfty_subsets << "\n";
  os << "fam_symmetric = " << (cfg.fam_symmetric ? "true" : "false")
     << "\n";
  os << "fam_k_lo = " << cfg.fam_k_lo << "\n";
  os << "fam_k_hi = " << cfg.fam_k_hi << "\n";
  os << "fam_center_step = " << cfg.fam_center_step << "\n";
  return os.str();
}

}  // namespace ergo
