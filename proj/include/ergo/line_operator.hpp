#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ergo/sampled_function.hpp"

namespace ergo {

/// Descriptor of a sublinear, translation-commuting, semilocal operator on
/// compactly supported line functions. semilocal_radius() bounds how far the
/// support of the output may extend beyond the support of the input; it also
/// equals the farthest offset any kernel reads.
class LineOperator {
 public:
  struct Identity {};
  struct Maximal {
    std::vector<double> radii;  // forward window widths, positive
  };
  struct Hilbert {
    double eps = 1.0 / 64.0;  // truncation eps <= |u| <= 1/eps
  };
  struct Square {
    int n_min = -6;
    int n_max = 4;  // dyadic scales 2^n
  };
  struct SupFamily {
    std::vector<LineOperator> members;
  };
  using Data = std::variant<Identity, Maximal, Hilbert, Square, SupFamily>;

  static LineOperator identity();
  static LineOperator maximal(std::vector<double> radii);
  /// radii {2^k : k_lo <= k <= k_hi}
  static LineOperator maximal_dyadic(int k_lo, int k_hi);
  static LineOperator hilbert(double eps);
  static LineOperator square(int n_min, int n_max);
  static LineOperator sup_family(std::vector<LineOperator> members);

  double semilocal_radius() const { return semilocal_radius_; }
  /// Farthest |offset| the kernels read; equal to semilocal_radius().
  double reach() const { return semilocal_radius_; }
  const Data& data() const { return data_; }
  std::string descriptor() const;

 private:
  LineOperator(Data data, double semilocal)
      : data_(std::move(data)), semilocal_radius_(semilocal) {}

  Data data_;
  double semilocal_radius_ = 0.0;
};

/// One-sided maximal average: max over s in radii of (1/s) ∫_t^{t+s} |f|.
double maximal_kernel(const SampledFunction& f, std::span<const double> radii,
                      double t);

/// Truncated Hilbert transform ∫_{eps<=|u|<=1/eps} f(t+u)/u du with the
/// truncation snapped to whole grid cells, so the ± contributions of locally
/// even data cancel exactly.
double hilbert_kernel(const SampledFunction& f, double eps, double t);

/// Dyadic square function: sqrt of the sum over n in [n_min, n_max] of the
/// squared difference between the backward averages over [t-2^n, t] and
/// [t-2^{n-1}, t].
double square_kernel(const SampledFunction& f, int n_min, int n_max, double t);

/// Pointwise evaluation of the operator at t.
double apply_at(const LineOperator& T, const SampledFunction& f, double t);

/// Evaluate the operator on the whole grid of f enlarged by the semilocal
/// radius. Node values agree with apply_at up to summation roundoff.
SampledFunction apply(const LineOperator& T, const SampledFunction& f);

/// Measured excess of supp(apply(T,f)) beyond supp(f); callers assert that
/// this does not exceed semilocal_radius() + one grid step.
double check_semilocality(const LineOperator& T, const SampledFunction& f);

}  // namespace ergo
