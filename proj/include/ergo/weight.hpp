#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ergo/sampled_function.hpp"

namespace ergo {

struct NonIntegrableDual : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroInfimum : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySubsetFamily : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A nonnegative locally integrable weight on the line.
///
/// Kinds:
///   constant   w(t) = c
///   power      w(t) = max(|t|, floor)^alpha; floor > 0 clips the singular
///              behaviour at the origin so grid samples stay finite
///   piecewise  constant value per interval, a default value elsewhere
///   cosine     base + amp * cos(2*pi*(freq*t + phase)), base >= |amp|
///   sampled    linear interpolation of a SampledFunction (zero outside)
/// Every kind carries a multiplicative scale.
class Weight {
 public:
  struct Constant {
    double value = 1.0;
  };
  struct Power {
    double alpha = 0.0;
    double floor = 0.0;
  };
  struct Piecewise {
    std::vector<std::pair<Interval, double>> pieces;  // sorted, disjoint
    double outside = 1.0;
  };
  struct Cosine {
    double base = 1.0;
    double amp = 0.0;
    double freq = 1.0;
    double phase = 0.0;
  };
  struct Sampled {
    std::shared_ptr<const SampledFunction> table;
  };
  using Data = std::variant<Constant, Power, Piecewise, Cosine, Sampled>;

  static Weight constant(double c);
  static Weight power(double alpha, double floor_clip);
  static Weight piecewise(std::vector<std::pair<Interval, double>> pieces,
                          double outside = 1.0);
  static Weight cosine(double base, double amp, double freq,
                       double phase = 0.0);
  static Weight sampled(SampledFunction table);

  Weight scaled_by(double c) const;

  double eval(double t) const;
  double scale() const { return scale_; }
  const Data& data() const { return data_; }
  const std::string& descriptor() const { return descriptor_; }
  Weight with_descriptor(std::string d) const;

 private:
  Weight(Data data, double scale, std::string descriptor)
      : data_(std::move(data)),
        scale_(scale),
        descriptor_(std::move(descriptor)) {}

  Data data_;
  double scale_ = 1.0;
  std::string descriptor_;
};

/// ∫_I w(t)^beta dt. Closed form for constant/power/piecewise and for cosine
/// with beta == 1; composite Simpson for other cosine powers; trapezoid on
/// the table grid for sampled weights. Throws NonIntegrableDual when the
/// integral diverges (or the quadrature detects blowup under refinement).
double weight_integral_pow(const Weight& w, Interval I, double beta);
inline double weight_integral(const Weight& w, Interval I) {
  return weight_integral_pow(w, I, 1.0);
}

/// Grid minimum of w over I (the essential-infimum surrogate).
double weight_min_on(const Weight& w, Interval I, double scan_step);

/// Finite stand-in for "all intervals": the cross product of centers and
/// lengths, every interval [c - L/2, c + L/2].
struct IntervalFamily {
  std::vector<double> centers;
  std::vector<double> lengths;

  std::vector<Interval> intervals() const;
  std::size_t count() const { return centers.size() * lengths.size(); }

  static IntervalFamily dyadic(int k_lo, int k_hi, double center_lo,
                               double center_hi, double center_step);
  /// Symmetric dyadic intervals [-2^k/2, 2^k/2] centered at the origin.
  static IntervalFamily symmetric_dyadic(int k_lo, int k_hi);
};

/// Dyadic lengths 2^k for k in [-8, 6], centers on a step-1/4 grid covering
/// [-support_radius, support_radius].
IntervalFamily default_interval_family(double support_radius);

/// Per-interval A_p products [avg_I w] * [avg_I w^{-1/(p-1)}]^{p-1}.
std::vector<double> ap_products(const Weight& w, double p,
                                const IntervalFamily& fam);
/// max of ap_products; >= 1 for every weight.
double ap_constant(const Weight& w, double p, const IntervalFamily& fam);

/// sup_I [avg_I w] / [grid min_I w]; >= 1. Throws ZeroInfimum when the grid
/// minimum vanishes on some interval.
double a1_constant(const Weight& w, const IntervalFamily& fam,
                   double scan_step = 1.0 / 1024.0);

using CellUnion = std::vector<Interval>;

struct AInftyResult {
  double epsilon_estimate = 0.0;
  bool holds = false;
};

/// Empirical A_infinity probe: over the supplied subsets E of I (each with
/// |E| < delta*|I|), epsilon_estimate = 1 - max_E w(E)/w(I).
AInftyResult a_infty_check(const Weight& w, Interval I, double delta,
                           const std::vector<CellUnion>& subsets);

/// Default adversarial subsets: seeded random unions of grid cells plus
/// deterministic slivers around the weight's maximum.
std::vector<CellUnion> make_ainfty_subsets(const Weight& w, Interval I,
                                           double delta, int count,
                                           std::uint64_t seed,
                                           double cell_step = 1.0 / 256.0);

}  // namespace ergo
