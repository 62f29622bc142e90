#include <cmath>

#include "doctest.h"
#include "ergo/config.hpp"

using namespace ergo;

TEST_CASE("parse_number accepts plain doubles and 2^k shorthand") {
  CHECK(parse_number("0.25") == 0.25);
  CHECK(parse_number("2^-10") == std::ldexp(1.0, -10));
  CHECK(parse_number("-2^3") == -8.0);
  CHECK_THROWS_AS(parse_number("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_number("1.5x"), std::invalid_argument);
}

TEST_CASE("weight literals parse and reject bad tokens") {
  CHECK(parse_weight_literal("const 2").eval(5.0) == 2.0);
  CHECK(parse_weight_literal("power 0.5 0").eval(4.0) == doctest::Approx(2.0));
  CHECK(parse_weight_literal("cosine 1 0.5 1").eval(0.0) ==
        doctest::Approx(1.5));
  const Weight pw = parse_weight_literal("piecewise (0,1,3);(1,2,4)");
  CHECK(pw.eval(0.5) == 3.0);
  CHECK(pw.eval(1.5) == 4.0);
  CHECK(pw.eval(9.0) == 1.0);

  CHECK_THROWS_WITH_AS(parse_weight_literal("nope 1"),
                       "unknown weight kind 'nope'", std::invalid_argument);
  CHECK_THROWS_AS(parse_weight_literal("power xyz 0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_weight_literal("const"), std::invalid_argument);
}

TEST_CASE("operator and flow literals") {
  CHECK(parse_operator_literal("identity").semilocal_radius() == 0.0);
  CHECK(parse_operator_literal("maximal -6 4").semilocal_radius() == 16.0);
  CHECK(parse_operator_literal("hilbert 2^-6").semilocal_radius() == 64.0);
  CHECK(parse_operator_literal("square -6 4").semilocal_radius() == 16.0);
  CHECK(parse_operator_literal("sup maximal -2 1; hilbert 0.125")
            .semilocal_radius() == 8.0);
  CHECK_THROWS_AS(parse_operator_literal("maximal 4"), std::invalid_argument);

  CHECK(parse_flow_literal("circle 0.618").dim() == 1);
  CHECK(parse_flow_literal("torus 0.618 0.414").dim() == 2);
  CHECK_THROWS_AS(parse_flow_literal("sphere 1"), std::invalid_argument);
}

TEST_CASE("function literals materialize matched pairs") {
  const GridSpec grid{1.0 / 1024.0, 64.0};
  const SampledFunction line =
      parse_line_function_literal("indicator 0 0.25", grid, 1);
  const SpaceFunction space =
      parse_space_function_literal("indicator 0 0.25", 1);
  CHECK(line.eval(0.1) == 1.0);
  CHECK(space.eval_circle(0.1) == 1.0);
  CHECK(space.eval_circle(0.3) == 0.0);

  // seeded steps agree across the two materializations
  const SampledFunction lsteps =
      parse_line_function_literal("rsteps 8 0 1", grid, 42);
  const SpaceFunction ssteps = parse_space_function_literal("rsteps 8 0 1", 42);
  for (double t : {0.05, 0.3, 0.55, 0.9})
    CHECK(lsteps.eval(t) == doctest::Approx(ssteps.eval_circle(t)));

  CHECK_THROWS_AS(parse_line_function_literal("blob 1", grid, 0),
                  std::invalid_argument);
}

TEST_CASE("space weights require nonnegativity") {
  CHECK(parse_space_weight_literal("cosaffine 1 0.5 1", 0).nonnegative());
  CHECK_THROWS_AS(parse_space_weight_literal("cosine 1", 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_space_weight_literal("cosaffine 1 2 1", 0),
                  std::invalid_argument);
}

TEST_CASE("line weight matched to a space weight through the flow") {
  const Flow flow = Flow::circle_rotation(0.6180339887498949);
  const Weight w = line_weight_for_space_weight("cosaffine 1 0.5 1", flow, 0);
  // orbit realization: same range, frequency alpha
  CHECK(w.eval(0.0) == doctest::Approx(1.5));
  const double period = 1.0 / flow.realized_alpha(0);
  CHECK(w.eval(period) == doctest::Approx(1.5).epsilon(1e-9));
  // descriptors match the space generator for report comparison
  const SpaceFunction s = parse_space_weight_literal("cosaffine 1 0.5 1", 0);
  CHECK(w.descriptor() == s.descriptor());
  CHECK_THROWS_AS(line_weight_for_space_weight("arc 0 0.5", flow, 0),
                  std::invalid_argument);
}

TEST_CASE("config text parses, validates, and reports line numbers") {
  const std::string text =
      "# experiment\n"
      "flow = circle 0.6180339887498949\n"
      "operator = maximal -6 4\n"
      "weight_w = const 1\n"
      "function = indicator 0 0.25\n"
      "function = cos 1 0 1\n"
      "p = 1.5 2 3\n"
      "mode = compare\n"
      "lambda = auto 24\n"
      "line_step = 2^-10\n"
      "seed = 7\n";
  std::vector<ConfigError> errors;
  const ExperimentConfig cfg = parse_config_text(text, "test.cfg", errors);
  CHECK(errors.empty());
  CHECK(cfg.flow_literal == "circle 0.6180339887498949");
  CHECK(cfg.p_values.size() == 3);
  CHECK(cfg.function_literals.size() == 2);
  CHECK(cfg.line_step == std::ldexp(1.0, -10));
  CHECK(cfg.seed == 7);

  std::vector<ConfigError> bad_errors;
  parse_config_text("flow = circle 0.6\nweight_w = wobble 3\n", "bad.cfg",
                    bad_errors);
  REQUIRE(!bad_errors.empty());
  CHECK(bad_errors.front().line == 2);
  CHECK(bad_errors.front().to_string().find("bad.cfg: 2:") == 0);
  CHECK(bad_errors.front().message.find("wobble") != std::string::npos);

  std::vector<ConfigError> unknown;
  parse_config_text("nonsense == 3\nwhat = 4\n", "u.cfg", unknown);
  CHECK(unknown.size() == 2);
}

TEST_CASE("config round-trips through serialization") {
  const std::string text =
      "flow = torus 0.618 0.414\n"
      "operator = square -6 4\n"
      "weight_w = cosaffine 1 0.5 1\n"
      "function = tent 0.5 0.125\n"
      "p = 2\n"
      "mode = strong\n"
      "lambda = list 0.25 0.5 1\n"
      "a_values = list 32 48 64\n"
      "pad = 16\n"
      "points = linspace 0 1 5\n"
      "out_json = out/report.json\n";
  std::vector<ConfigError> e1, e2, e3;
  const ExperimentConfig once = parse_config_text(text, "a.cfg", e1);
  REQUIRE(e1.empty());
  const std::string canon = serialize_config(once);
  const ExperimentConfig twice = parse_config_text(canon, "b.cfg", e2);
  REQUIRE(e2.empty());
  CHECK(once == twice);
  // serialization is a fixed point
  CHECK(serialize_config(twice) == canon);
}
