#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ergo/sampled_function.hpp"

namespace ergo {

/// Times fed to a flow are snapped to this lattice; see Flow.
inline constexpr double kFlowTick = 0x1p-20;

/// A point of the circle [0,1) or the 2-torus [0,1)^2, stored as 64-bit
/// fixed-point phases (value = phase / 2^64). Fixed-point storage makes the
/// flow's group law exact: translations add phases modulo 2^64.
class FlowPoint {
 public:
  static FlowPoint circle(double x);
  static FlowPoint torus(double x, double y);

  int dim() const { return dim_; }
  std::uint64_t phase(int i) const { return phase_[std::size_t(i)]; }
  /// Coordinate in [0,1).
  double coord(int i) const;

  friend bool operator==(const FlowPoint&, const FlowPoint&) = default;

 private:
  FlowPoint(int dim, std::array<std::uint64_t, 2> phase)
      : dim_(dim), phase_(phase) {}
  friend class Flow;

  int dim_ = 1;
  std::array<std::uint64_t, 2> phase_{0, 0};
};

/// A measure-preserving flow on the circle or torus: U^t x = x + t*alpha
/// (mod 1 per coordinate), with Lebesgue measure.
///
/// Internally t is snapped to the 2^-20 lattice and the rotation advances a
/// fixed-point phase by an integer multiple of a per-tick increment. The
/// realized rotation number is round(alpha * 2^44) / 2^44 (within 2^-45 of
/// the request), and in exchange the group law U^{t+s} = U^t ∘ U^s and the
/// translation identity on orbit traces hold bit-exactly for lattice times.
class Flow {
 public:
  static Flow circle_rotation(double alpha);
  static Flow torus_linear(double alpha1, double alpha2);

  int dim() const { return dim_; }
  FlowPoint map(double t, const FlowPoint& x) const;
  double requested_alpha(int i) const { return requested_[std::size_t(i)]; }
  /// The rotation number actually realized by the fixed-point stepping.
  double realized_alpha(int i) const;
  std::string descriptor() const;

  static std::int64_t ticks(double t);
  static double snap_time(double t) { return double(ticks(t)) * kFlowTick; }

 private:
  Flow(int dim, std::array<double, 2> requested,
       std::array<std::uint64_t, 2> inc)
      : dim_(dim), requested_(requested), inc_(inc) {}

  int dim_ = 1;
  std::array<double, 2> requested_{0, 0};
  std::array<std::uint64_t, 2> inc_{0, 0};  // phase increment per tick
};

/// A function on the circle or torus. Symbolic kinds keep closed forms
/// available to the tests; the sampled kind stores values on a uniform
/// circle grid with periodic linear interpolation.
class SpaceFunction {
 public:
  struct Constant {
    double value = 0.0;
  };
  struct Arc {  // indicator of [a, b) in coordinate 0
    double a = 0.0, b = 1.0;
  };
  struct Tent {  // peak 1 at center, zero at circle distance >= radius
    double center = 0.0, radius = 0.25;
  };
  struct Steps {  // piecewise constant on [a,b) split into equal cells
    double a = 0.0, b = 1.0;
    std::vector<double> values;
  };
  struct Cosine {  // amplitude scaling of cos(2*pi*k*x_axis)
    double k = 1.0;
    int axis = 0;
  };
  struct CosAffine {  // base + amp*cos(2*pi*k*x_axis)
    double base = 1.0, amp = 0.0, k = 1.0;
    int axis = 0;
  };
  struct Cosine2 {  // cos(2*pi*(k1 x + k2 y)) on the torus
    double k1 = 1.0, k2 = 0.0;
  };
  struct SampledCircle {
    std::shared_ptr<const Eigen::ArrayXd> values;  // nodes j/n, periodic
  };
  using Data = std::variant<Constant, Arc, Tent, Steps, Cosine, CosAffine,
                            Cosine2, SampledCircle>;

  static SpaceFunction constant(double c);
  static SpaceFunction arc(double a, double b);
  static SpaceFunction tent(double center, double radius);
  static SpaceFunction steps(double a, double b, std::vector<double> values);
  static SpaceFunction cosine(double k, int axis = 0);
  static SpaceFunction cos_affine(double base, double amp, double k,
                                  int axis = 0);
  static SpaceFunction cosine2(double k1, double k2);
  static SpaceFunction sampled_circle(Eigen::ArrayXd values);

  double eval(const FlowPoint& x) const;
  double eval_circle(double x) const;  // convenience for 1-D checks
  /// Conservative positivity check used when the function acts as a weight.
  bool nonnegative() const;
  /// The scalar multiple c * f.
  SpaceFunction scaled_by(double c) const;
  double scale() const { return scale_; }
  const Data& data() const { return data_; }
  const std::string& descriptor() const { return descriptor_; }
  SpaceFunction with_descriptor(std::string d) const;

 private:
  SpaceFunction(Data data, std::string descriptor)
      : data_(std::move(data)), descriptor_(std::move(descriptor)) {}

  Data data_;
  double scale_ = 1.0;
  std::string descriptor_;
};

/// The trace t -> f(U^t x) of an orbit, sampled on a symmetric grid
/// [-(a+pad), a+pad]. The sampling window is the truncation F_{a+pad}; the
/// truncated() view additionally zeroes |t| >= truncation_a.
struct OrbitTrace {
  SampledFunction values;
  double truncation_a = 0.0;
  FlowPoint base;

  SampledFunction truncated() const;
};

/// Sample f along the orbit of x over [-(a+pad), a+pad] at the given step.
/// The step must sit on the flow's time lattice.
OrbitTrace orbit_sample(const Flow& flow, const SpaceFunction& f,
                        const FlowPoint& x, double a, double pad, double step);

/// Orbit trace of a weight: as orbit_sample with truncation half_width.
OrbitTrace weighted_orbit_trace(const Flow& flow, const SpaceFunction& w,
                                const FlowPoint& x, double half_width,
                                double step);

/// One-sided trace on [lo, hi] (used by the direct ergodic operators).
SampledFunction orbit_segment(const Flow& flow, const SpaceFunction& f,
                              const FlowPoint& x, double lo, double hi,
                              double step);

/// max over lambda_grid of the discrepancy between the empirical
/// distributions of F(t1, .) and F(t2, .) over n stratified sample points.
double equimeasurability_check(const Flow& flow, const SpaceFunction& f,
                               double t1, double t2, int n_points,
                               std::span<const double> lambda_grid);

/// Deterministic stratified grid of n points (n is rounded down to a square
/// on the torus).
std::vector<FlowPoint> stratified_points(const Flow& flow, int n);

}  // namespace ergo
