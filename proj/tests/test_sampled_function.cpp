#include <cmath>

#include "doctest.h"
#include "ergo/rng.hpp"
#include "ergo/sampled_function.hpp"
#include "ergo/weight.hpp"

using namespace ergo;

namespace {

const GridSpec kGrid{1.0 / 1024.0, 64.0};

SampledFunction random_steps(std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> values(8);
  for (auto& v : values) v = rng.uniform();
  return make_steps(values, 0.0, 1.0, kGrid);
}

}  // namespace

TEST_CASE("eval: constants, support, interpolation") {
  const SampledFunction c2 = make_constant(2.0, -1.0, 1.0, kGrid);
  CHECK(c2.eval(0.0) == doctest::Approx(2.0));
  // far outside the grid: exactly zero
  CHECK(c2.eval(c2.origin() - 10.0 * c2.support_radius()) == 0.0);
  CHECK(c2.eval(1e9) == 0.0);

  const SampledFunction tent = make_tent(0.0, 1.0, kGrid);
  CHECK(tent.eval(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tent.eval(0.0) == doctest::Approx(1.0));
  CHECK(tent.eval(-1.0) == doctest::Approx(0.0));
}

TEST_CASE("integrate: grid-aligned indicator is exact") {
  const SampledFunction ind = make_indicator(0.0, 1.0, kGrid);
  CHECK(integrate(ind, {0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-9));
  // whole-line integral also 1 by the half-value endpoint convention
  CHECK(integrate(ind, {-4.0, 4.0}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("integrate: zero function and linear ramp") {
  const SampledFunction z = make_zero({-2.0, 2.0}, kGrid);
  CHECK(integrate(z, {-1.0, 1.5}) == 0.0);

  const SampledFunction ramp =
      sample_function([](double t) { return t; }, {0.0, 1.0}, kGrid);
  CHECK(integrate(ramp, {0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("integrate: additivity over adjacent intervals") {
  const SampledFunction f = sample_function(
      [](double t) { return std::cos(1.7 * t) + 0.3 * t; }, {-3.0, 3.0},
      kGrid);
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    double a = rng.uniform(-3.5, 3.5);
    double b = rng.uniform(-3.5, 3.5);
    double c = rng.uniform(-3.5, 3.5);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    if (!(a < b && b < c)) continue;
    const double whole = integrate(f, {a, c});
    const double split = integrate(f, {a, b}) + integrate(f, {b, c});
    CHECK(split == doctest::Approx(whole).epsilon(1e-12));
  }
}

TEST_CASE("integrate: refinement halves the error quadratically") {
  auto smooth = [](double t) { return std::cos(t); };
  const double exact = std::sin(2.0) - std::sin(0.0);
  const GridSpec coarse{1.0 / 256.0, 64.0};
  const GridSpec fine{1.0 / 512.0, 64.0};
  const double e1 =
      std::abs(integrate(sample_function(smooth, {0.0, 2.0}, coarse),
                         {0.0, 2.0}) -
               exact);
  const double e2 =
      std::abs(integrate(sample_function(smooth, {0.0, 2.0}, fine),
                         {0.0, 2.0}) -
               exact);
  CHECK(e2 < e1 / 3.0);  // trapezoid converges at O(h^2)
}

TEST_CASE("lp_norm_weighted: closed forms") {
  const SampledFunction ind = make_indicator(0.0, 1.0, kGrid);
  const Weight one = Weight::constant(1.0);
  CHECK(lp_norm_weighted(ind, one, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-9));

  const SampledFunction z = make_zero({-1.0, 1.0}, kGrid);
  CHECK(lp_norm_weighted(z, one, 1.5) == 0.0);

  // ∫_0^1 t^{1/2} dt = 2/3
  const Weight root = Weight::power(0.5, 0.0);
  CHECK(lp_norm_weighted(ind, root, 1.0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("lp_norm_weighted: monotone in |f|") {
  const SampledFunction f = random_steps(11);
  const SampledFunction bump = make_tent(0.5, 0.25, kGrid);
  const SampledFunction g = add(abs(f), bump);  // |g| >= |f| nodewise
  const Weight w = Weight::power(0.5, 0.0);
  for (double p : {1.0, 1.5, 2.0, 3.0})
    CHECK(lp_norm_weighted(f, w, p) <= lp_norm_weighted(g, w, p) + 1e-12);
}

TEST_CASE("distribution_weighted: level sets of indicator and tent") {
  const Weight one = Weight::constant(1.0);
  const SampledFunction ind = make_indicator(0.0, 1.0, kGrid);
  CHECK(distribution_weighted(ind, one, 0.5) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // lambda above the sup: empty level set
  CHECK(distribution_weighted(ind, one, 2.0) == 0.0);

  const SampledFunction tent = make_tent(0.0, 1.0, kGrid);
  CHECK(distribution_weighted(tent, one, 0.5) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Chebyshev: lambda^p mass below the p-norm^p") {
  std::vector<SampledFunction> corpus;
  corpus.push_back(make_indicator(0.0, 1.0, kGrid));
  corpus.push_back(make_tent(0.5, 0.5, kGrid));
  corpus.push_back(random_steps(23));
  corpus.push_back(make_windowed_cosine(2.0, -1.0, 1.0, kGrid));
  std::vector<Weight> weights;
  weights.push_back(Weight::constant(1.0));
  weights.push_back(Weight::power(0.5, 0.0));
  weights.push_back(Weight::power(-0.5, 0x1p-20));
  weights.push_back(Weight::piecewise({{{0.0, 1.0}, 3.0}}, 1.0));
  weights.push_back(Weight::cosine(1.0, 0.5, 1.0));

  for (const auto& f : corpus) {
    const double top = f.max_abs();
    for (const auto& w : weights) {
      for (double p : {1.0, 2.0}) {
        const double norm_p = std::pow(lp_norm_weighted(f, w, p), p);
        for (int k = 1; k <= 8; ++k) {
          const double lambda = top * double(k) / 9.0;
          const double lhs =
              std::pow(lambda, p) * distribution_weighted(f, w, lambda);
          CHECK(lhs <= norm_p * (1.0 + 1e-9) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("translated/scaled keep samples exact") {
  const SampledFunction f = random_steps(5);
  const SampledFunction g = translated(f, 0.25);
  CHECK(g.origin() == doctest::Approx(f.origin() + 0.25));
  CHECK(g.eval(0.5 + 0.25) == doctest::Approx(f.eval(0.5)));

  const SampledFunction h = scaled(f, 4.0);
  for (Eigen::Index i = 0; i < f.size(); i += 97)
    CHECK(h.samples()[i] == 4.0 * f.samples()[i]);
}

TEST_CASE("constructor rejects invalid data") {
  Eigen::ArrayXd v(3);
  v << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(SampledFunction(0.0, -1.0, v, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SampledFunction(0.0, 0.5, Eigen::ArrayXd(), 1.0),
                  std::invalid_argument);
  // nonzero sample outside the declared support
  CHECK_THROWS_AS(SampledFunction(10.0, 0.5, v, 1.0), std::invalid_argument);
}
