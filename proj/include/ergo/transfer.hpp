#pragma once

#include <span>
#include <vector>

#include "ergo/flow.hpp"
#include "ergo/line_operator.hpp"
#include "ergo/weight.hpp"

namespace ergo {

/// The transferred operator T#: sample the orbit trace F(t,x) = f(U^t x)
/// over the window [-(a+pad), a+pad], apply the line operator, read off the
/// value at t = 0. pad must dominate the line operator's semilocal radius so
/// that the truncation is invisible at t = 0 once a is large enough.
class TransferredOperator {
 public:
  TransferredOperator(LineOperator op, Flow flow, double truncation_a = -1.0,
                      double pad = -1.0, double step = 1.0 / 1024.0);

  const LineOperator& line_op() const { return op_; }
  const Flow& flow() const { return flow_; }
  double truncation_a() const { return truncation_a_; }
  double pad() const { return pad_; }
  double step() const { return step_; }

  TransferredOperator with_truncation(double a) const;

 private:
  LineOperator op_;
  Flow flow_;
  double truncation_a_;
  double pad_;
  double step_;
};

double transfer_apply(const TransferredOperator& tsharp,
                      const SpaceFunction& f, const FlowPoint& x);

// Direct reference implementations of the ergodic operators. They share the
// orbit sampling and the line kernels with transfer_apply, so at matched
// parameters the two routes agree to roundoff.

/// sup over radii s of (1/s) ∫_0^s |f(U_t x)| dt.
double ergodic_maximal(const Flow& flow, const SpaceFunction& f,
                       const FlowPoint& x, std::span<const double> radii,
                       double step = 1.0 / 1024.0);

/// ∫_{eps<=|t|<=1/eps} f(U_t x)/t dt.
double ergodic_hilbert(const Flow& flow, const SpaceFunction& f,
                       const FlowPoint& x, double eps,
                       double step = 1.0 / 1024.0);

/// sqrt( Σ_n | avg_{[0,2^n]} f(U_t x) - avg_{[0,2^{n-1}]} f(U_t x) |^2 ).
double ergodic_square(const Flow& flow, const SpaceFunction& f,
                      const FlowPoint& x, int n_min, int n_max,
                      double step = 1.0 / 1024.0);

/// Orbit-wise A_p condition: per base point x, the A_p constant of the
/// sampled trace t -> w(U_t x) over the interval family.
std::vector<double> ap_prime_per_base_point(
    const SpaceFunction& w, const Flow& flow, double p,
    std::span<const FlowPoint> base_points, const IntervalFamily& fam,
    double step = 1.0 / 1024.0, int threads = 1);

/// max of ap_prime_per_base_point.
double ap_prime_constant(const SpaceFunction& w, const Flow& flow, double p,
                         std::span<const FlowPoint> base_points,
                         const IntervalFamily& fam, double step = 1.0 / 1024.0,
                         int threads = 1);

/// Orbit-wise A_1 condition per base point.
std::vector<double> a1_prime_per_base_point(
    const SpaceFunction& w, const Flow& flow,
    std::span<const FlowPoint> base_points, const IntervalFamily& fam,
    double step = 1.0 / 1024.0, int threads = 1);

/// max of a1_prime_per_base_point.
double a1_prime_constant(const SpaceFunction& w, const Flow& flow,
                         std::span<const FlowPoint> base_points,
                         const IntervalFamily& fam, double step = 1.0 / 1024.0,
                         int threads = 1);

}  // namespace ergo
