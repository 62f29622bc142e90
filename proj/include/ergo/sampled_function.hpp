#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ergo {

class Weight;

/// A bounded interval [left, right] on the real line.
struct Interval {
  double left = 0.0;
  double right = 0.0;

  double length() const { return right - left; }
  bool valid() const { return left < right; }
  bool contains(double t) const { return left <= t && t <= right; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Grid resolution shared by builders: uniform step and the radius of the
/// largest grid any stored function may occupy.
struct GridSpec {
  double step = 1.0 / 1024.0;
  double support_radius = 64.0;
};

/// A compactly supported function on the real line, stored as samples on a
/// uniform grid. Evaluation is linear interpolation between nodes and
/// identically zero outside the grid, so every stored function is continuous
/// and integrable.
class SampledFunction {
 public:
  SampledFunction(double origin, double step, Eigen::ArrayXd samples,
                  double support_radius);

  double origin() const { return origin_; }
  double step() const { return step_; }
  Eigen::Index size() const { return samples_.size(); }
  const Eigen::ArrayXd& samples() const { return samples_; }
  double support_radius() const { return support_radius_; }

  double node(Eigen::Index i) const { return origin_ + step_ * double(i); }
  double right_end() const { return node(samples_.size() - 1); }

  double sample_or_zero(Eigen::Index i) const {
    return (i >= 0 && i < samples_.size()) ? samples_[i] : 0.0;
  }

  /// Linear interpolation of the samples; exactly 0 outside the grid.
  double eval(double t) const;

  /// Smallest interval of grid nodes carrying values with |v| > tol
  /// (the whole-grid fallback is returned for identically small functions).
  Interval nonzero_extent(double tol = 0.0) const;

  double max_abs() const { return samples_.abs().maxCoeff(); }

 private:
  double origin_;
  double step_;
  Eigen::ArrayXd samples_;
  double support_radius_;
};

// ---------------------------------------------------------------------------
// Builders. Jump-type shapes (indicator, const window, steps, windowed
// cosine) put the grid boundary exactly on the outer jumps; together with
// the hard zero outside the grid this keeps grid-aligned window integrals of
// indicators exact.

SampledFunction make_zero(Interval extent, const GridSpec& grid = {});
SampledFunction sample_function(const std::function<double(double)>& fn,
                                Interval extent, const GridSpec& grid = {});
SampledFunction make_indicator(double a, double b, const GridSpec& grid = {});
SampledFunction make_tent(double center, double radius,
                          const GridSpec& grid = {});
SampledFunction make_steps(std::span<const double> values, double a, double b,
                           const GridSpec& grid = {});
SampledFunction make_windowed_cosine(double freq, double a, double b,
                                     const GridSpec& grid = {});
SampledFunction make_constant(double c, double a, double b,
                              const GridSpec& grid = {});

// ---------------------------------------------------------------------------
// Arithmetic. add() requires both operands to share the grid step and
// grid-aligned origins; the result lives on the union extent.

SampledFunction add(const SampledFunction& f, const SampledFunction& g);
SampledFunction scaled(const SampledFunction& f, double c);
SampledFunction translated(const SampledFunction& f, double tau);
SampledFunction abs(const SampledFunction& f);

// ---------------------------------------------------------------------------
// Quadrature.

/// Integral over I of the piecewise-linear interpolant of f. Exact (up to
/// roundoff) for piecewise-linear data with breakpoints on the grid.
double integrate(const SampledFunction& f, Interval I);

/// (∫ |f|^p w)^{1/p}, trapezoid rule on f's grid. p >= 1.
double lp_norm_weighted(const SampledFunction& f, const Weight& w, double p);

/// Weighted measure of {t : |f(t)| > lambda}. A grid cell counts when the
/// interpolated value at its midpoint exceeds lambda; the cell's weighted
/// mass is the trapezoid of w over the cell.
double distribution_weighted(const SampledFunction& f, const Weight& w,
                             double lambda);

/// prefix[i] = integral of the interpolant over the first i cells.
Eigen::ArrayXd trapezoid_prefix(const Eigen::ArrayXd& values, double step);

}  // namespace ergo
