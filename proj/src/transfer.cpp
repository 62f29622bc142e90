#include "ergo/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "ergo/parallel.hpp"

namespace ergo {

TransferredOperator::TransferredOperator(LineOperator op, Flow flow,
                                         double truncation_a, double pad,
                                         double step)
    : op_(std::move(op)), flow_(std::move(flow)), step_(step) {
  if (!(step_ > 0.0))
    throw std::invalid_argument("TransferredOperator: step <= 0");
  pad_ = pad < 0.0 ? op_.semilocal_radius() : pad;
  if (pad_ < op_.semilocal_radius() - 1e-12)
    throw std::invalid_argument(
        "TransferredOperator: pad below the operator's semilocal radius");
  truncation_a_ =
      truncation_a < 0.0 ? pad_ + 2.0 * op_.reach() : truncation_a;
  if (truncation_a_ <= 0.0)
    truncation_a_ = std::max(pad_, step_);  // identity has zero reach
  if (truncation_a_ < pad_ - 1e-12)
    throw std::invalid_argument("TransferredOperator: truncation_a < pad");
}

TransferredOperator TransferredOperator::with_truncation(double a) const {
  return TransferredOperator(op_, flow_, a, pad_, step_);
}

double transfer_apply(const TransferredOperator& tsharp,
                      const SpaceFunction& f, const FlowPoint& x) {
  const OrbitTrace trace =
      orbit_sample(tsharp.flow(), f, x, tsharp.truncation_a(), tsharp.pad(),
                   tsharp.step());
  return apply_at(tsharp.line_op(), trace.values, 0.0);
}

// ---------------------------------------------------------------------------
// Direct ergodic operators; same orbit sampling, same line kernels.

double ergodic_maximal(const Flow& flow, const SpaceFunction& f,
                       const FlowPoint& x, std::span<const double> radii,
                       double step) {
  if (radii.empty()) throw std::invalid_argument("ergodic_maximal: no radii");
  const double s_max = *std::max_element(radii.begin(), radii.end());
  const SampledFunction seg = orbit_segment(flow, f, x, 0.0, s_max, step);
  return maximal_kernel(seg, radii, 0.0);
}

double ergodic_hilbert(const Flow& flow, const SpaceFunction& f,
                       const FlowPoint& x, double eps, double step) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("ergodic_hilbert: eps outside (0,1)");
  const double reach = 1.0 / eps;
  const SampledFunction seg = orbit_segment(flow, f, x, -reach, reach, step);
  return hilbert_kernel(seg, eps, 0.0);
}

double ergodic_square(const Flow& flow, const SpaceFunction& f,
                      const FlowPoint& x, int n_min, int n_max, double step) {
  if (n_min > n_max) throw std::invalid_argument("ergodic_square: bad range");
  const double reach = std::ldexp(1.0, n_max);
  const SampledFunction seg = orbit_segment(flow, f, x, -reach, 0.0, step);
  return square_kernel(seg, n_min, n_max, 0.0);
}

// ---------------------------------------------------------------------------
// Orbit-wise weight conditions

namespace {

double family_reach(const IntervalFamily& fam) {
  double reach = 0.0;
  for (const Interval& I : fam.intervals())
    reach = std::max({reach, std::abs(I.left), std::abs(I.right)});
  return reach;
}

template <typename PerTrace>
std::vector<double> per_orbit(const SpaceFunction& w, const Flow& flow,
                              std::span<const FlowPoint> base_points,
                              const IntervalFamily& fam, double step,
                              int threads, PerTrace per_trace) {
  if (base_points.empty())
    throw std::invalid_argument("orbit condition: no base points");
  const double reach = family_reach(fam) + step;
  std::vector<double> results(base_points.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(std::int64_t(base_points.size()), threads,
               [&](std::int64_t i) {
                 try {
                   const OrbitTrace trace = weighted_orbit_trace(
                       flow, w, base_points[std::size_t(i)], reach, step);
                   results[std::size_t(i)] =
                       per_trace(Weight::sampled(trace.values));
                 } catch (...) {
                   std::lock_guard<std::mutex> lock(failure_mutex);
                   if (!failure) failure = std::current_exception();
                 }
               });
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace

std::vector<double> ap_prime_per_base_point(
    const SpaceFunction& w, const Flow& flow, double p,
    std::span<const FlowPoint> base_points, const IntervalFamily& fam,
    double step, int threads) {
  if (!(p > 1.0)) throw std::invalid_argument("ap_prime_constant: p <= 1");
  return per_orbit(w, flow, base_points, fam, step, threads,
                   [&](const Weight& trace_weight) {
                     return ap_constant(trace_weight, p, fam);
                   });
}

double ap_prime_constant(const SpaceFunction& w, const Flow& flow, double p,
                         std::span<const FlowPoint> base_points,
                         const IntervalFamily& fam, double step, int threads) {
  const auto per = ap_prime_per_base_point(w, flow, p, base_points, fam, step,
                                           threads);
  return *std::max_element(per.begin(), per.end());
}

std::vector<double> a1_prime_per_base_point(
    const SpaceFunction& w, const Flow& flow,
    std::span<const FlowPoint> base_points, const IntervalFamily& fam,
    double step, int threads) {
  return per_orbit(w, flow, base_points, fam, step, threads,
                   [&](const Weight& trace_weight) {
                     return a1_constant(trace_weight, fam, step);
                   });
}

double a1_prime_constant(const SpaceFunction& w, const Flow& flow,
                         std::span<const FlowPoint> base_points,
                         const IntervalFamily& fam, double step, int threads) {
  const auto per =
      a1_prime_per_base_point(w, flow, base_points, fam, step, threads);
  return *std::max_element(per.begin(), per.end());
}

}  // namespace ergo
