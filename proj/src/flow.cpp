#include "ergo/flow.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ergo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t quantize_unit(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;  // x just below an integer can round up
  const double scaled = std::ldexp(y, 64);
  return scaled >= 0x1p64 ? 0 : static_cast<std::uint64_t>(scaled);
}

// Per-tick phase increment: round(alpha * 2^44) in units of 2^-64. The
// per-unit-time rotation is then round(alpha * 2^44) / 2^44.
std::uint64_t tick_increment(double alpha) {
  const double frac = alpha - std::floor(alpha);
  return static_cast<std::uint64_t>(std::llround(std::ldexp(frac, 44)));
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// FlowPoint

FlowPoint FlowPoint::circle(double x) {
  return FlowPoint(1, {quantize_unit(x), 0});
}

FlowPoint FlowPoint::torus(double x, double y) {
  return FlowPoint(2, {quantize_unit(x), quantize_unit(y)});
}

double FlowPoint::coord(int i) const {
  const double x = std::ldexp(double(phase_[std::size_t(i)]), -64);
  return x >= 1.0 ? 0.0 : x;
}

// ---------------------------------------------------------------------------
// Flow

Flow Flow::circle_rotation(double alpha) {
  return Flow(1, {alpha, 0.0}, {tick_increment(alpha), 0});
}

Flow Flow::torus_linear(double alpha1, double alpha2) {
  return Flow(2, {alpha1, alpha2},
              {tick_increment(alpha1), tick_increment(alpha2)});
}

std::int64_t Flow::ticks(double t) {
  if (!(std::abs(t) < 0x1p40))
    throw std::invalid_argument("flow: |t| too large");
  return std::llround(std::ldexp(t, 20));
}

FlowPoint Flow::map(double t, const FlowPoint& x) const {
  if (x.dim() != dim_) throw std::invalid_argument("flow: dimension mismatch");
  const auto n = static_cast<std::uint64_t>(ticks(t));
  FlowPoint y = x;
  for (int i = 0; i < dim_; ++i)
    y.phase_[std::size_t(i)] =
        x.phase_[std::size_t(i)] + n * inc_[std::size_t(i)];
  return y;
}

double Flow::realized_alpha(int i) const {
  return std::ldexp(double(inc_[std::size_t(i)]), -44);
}

std::string Flow::descriptor() const {
  if (dim_ == 1) return "circle " + format_number(requested_[0]);
  return "torus " + format_number(requested_[0]) + " " +
         format_number(requested_[1]);
}

// ---------------------------------------------------------------------------
// SpaceFunction

SpaceFunction SpaceFunction::constant(double c) {
  return SpaceFunction(Constant{c}, "const " + format_number(c));
}

SpaceFunction SpaceFunction::arc(double a, double b) {
  if (!(0.0 <= a && a < b && b <= 1.0))
    throw std::invalid_argument("arc: need 0 <= a < b <= 1");
  return SpaceFunction(Arc{a, b},
                       "arc " + format_number(a) + " " + format_number(b));
}

SpaceFunction SpaceFunction::tent(double center, double radius) {
  if (!(radius > 0.0 && radius <= 0.5))
    throw std::invalid_argument("tent: radius outside (0, 1/2]");
  if (!(center >= 0.0 && center < 1.0))
    throw std::invalid_argument("tent: center outside [0,1)");
  return SpaceFunction(
      Tent{center, radius},
      "tent " + format_number(center) + " " + format_number(radius));
}

SpaceFunction SpaceFunction::steps(double a, double b,
                                   std::vector<double> values) {
  if (!(0.0 <= a && a < b && b <= 1.0))
    throw std::invalid_argument("steps: need 0 <= a < b <= 1");
  if (values.empty()) throw std::invalid_argument("steps: no values");
  std::ostringstream os;
  os << "steps";
  for (double v : values) os << " " << format_number(v);
  os << " on " << format_number(a) << " " << format_number(b);
  return SpaceFunction(Steps{a, b, std::move(values)}, os.str());
}

SpaceFunction SpaceFunction::cosine(double k, int axis) {
  return SpaceFunction(Cosine{k, axis}, "cosine " + format_number(k));
}

SpaceFunction SpaceFunction::cos_affine(double base, double amp, double k,
                                        int axis) {
  return SpaceFunction(CosAffine{base, amp, k, axis},
                       "cosaffine " + format_number(base) + " " +
                           format_number(amp) + " " + format_number(k));
}

SpaceFunction SpaceFunction::cosine2(double k1, double k2) {
  return SpaceFunction(Cosine2{k1, k2}, "cosine2 " + format_number(k1) + " " +
                                            format_number(k2));
}

SpaceFunction SpaceFunction::sampled_circle(Eigen::ArrayXd values) {
  if (values.size() < 2)
    throw std::invalid_argument("sampled_circle: need at least 2 values");
  auto ptr = std::make_shared<const Eigen::ArrayXd>(std::move(values));
  return SpaceFunction(SampledCircle{std::move(ptr)}, "sampled_circle");
}

SpaceFunction SpaceFunction::with_descriptor(std::string d) const {
  SpaceFunction f = *this;
  f.descriptor_ = std::move(d);
  return f;
}

SpaceFunction SpaceFunction::scaled_by(double c) const {
  SpaceFunction f = *this;
  f.scale_ *= c;
  f.descriptor_ = "scale " + format_number(f.scale_) + " " + descriptor_;
  return f;
}

double SpaceFunction::eval_circle(double x) const {
  return eval(FlowPoint::circle(x));
}

double SpaceFunction::eval(const FlowPoint& x) const {
  struct Visitor {
    const FlowPoint& x;
    double operator()(const Constant& c) const { return c.value; }
    double operator()(const Arc& a) const {
      const double u = x.coord(0);
      return (u >= a.a && u < a.b) ? 1.0 : 0.0;
    }
    double operator()(const Tent& t) const {
      double d = std::abs(x.coord(0) - t.center);
      d = std::min(d, 1.0 - d);
      return std::max(0.0, 1.0 - d / t.radius);
    }
    double operator()(const Steps& s) const {
      const double u = x.coord(0);
      if (u < s.a || u >= s.b) return 0.0;
      const double cell = (s.b - s.a) / double(s.values.size());
      auto idx = std::size_t((u - s.a) / cell);
      if (idx >= s.values.size()) idx = s.values.size() - 1;
      return s.values[idx];
    }
    double operator()(const Cosine& c) const {
      return std::cos(kTwoPi * c.k * x.coord(c.axis));
    }
    double operator()(const CosAffine& c) const {
      return c.base + c.amp * std::cos(kTwoPi * c.k * x.coord(c.axis));
    }
    double operator()(const Cosine2& c) const {
      if (x.dim() < 2)
        throw std::invalid_argument("cosine2: needs a torus point");
      return std::cos(kTwoPi * (c.k1 * x.coord(0) + c.k2 * x.coord(1)));
    }
    double operator()(const SampledCircle& s) const {
      const auto& v = *s.values;
      const auto n = v.size();
      const double u = x.coord(0) * double(n);
      auto j = Eigen::Index(u);
      if (j >= n) j = n - 1;
      const double frac = u - double(j);
      const double next = v[(j + 1) % n];  // periodic seam
      return v[j] + (next - v[j]) * frac;
    }
  };
  return scale_ * std::visit(Visitor{x}, data_);
}

bool SpaceFunction::nonnegative() const {
  if (scale_ < 0.0) return false;
  struct Visitor {
    bool operator()(const Constant& c) const { return c.value >= 0.0; }
    bool operator()(const Arc&) const { return true; }
    bool operator()(const Tent&) const { return true; }
    bool operator()(const Steps& s) const {
      for (double v : s.values)
        if (v < 0.0) return false;
      return true;
    }
    bool operator()(const Cosine&) const { return false; }
    bool operator()(const CosAffine& c) const {
      return c.base >= std::abs(c.amp);
    }
    bool operator()(const Cosine2&) const { return false; }
    bool operator()(const SampledCircle& s) const {
      return (*s.values >= 0.0).all();
    }
  };
  return std::visit(Visitor{}, data_);
}

// ---------------------------------------------------------------------------
// Orbit sampling

namespace {

// Common core: sample f along the orbit on [lo, hi] with a lattice step.
Eigen::ArrayXd sample_orbit(const Flow& flow, const SpaceFunction& f,
                            const FlowPoint& x, double lo, Eigen::Index n,
                            double step) {
  const std::int64_t ts = Flow::ticks(step);
  if (ts <= 0)
    throw std::invalid_argument("orbit: step below the time lattice");
  Eigen::ArrayXd values(n);
  FlowPoint p = flow.map(lo, x);
  for (Eigen::Index k = 0; k < n; ++k) {
    values[k] = f.eval(p);
    p = flow.map(step, p);
  }
  return values;
}

}  // namespace

OrbitTrace orbit_sample(const Flow& flow, const SpaceFunction& f,
                        const FlowPoint& x, double a, double pad,
                        double step) {
  if (!(a > 0.0) || pad < 0.0 || !(step > 0.0))
    throw std::invalid_argument("orbit_sample: bad window");
  const double half = a + pad;
  const auto n_half =
      Eigen::Index(std::ceil(half / step - 1e-12));
  const double origin = -double(n_half) * step;
  const Eigen::Index n = 2 * n_half + 1;
  Eigen::ArrayXd values = sample_orbit(flow, f, x, origin, n, step);
  SampledFunction trace(origin, step, std::move(values), double(n_half) * step);
  return OrbitTrace{std::move(trace), a, x};
}

OrbitTrace weighted_orbit_trace(const Flow& flow, const SpaceFunction& w,
                                const FlowPoint& x, double half_width,
                                double step) {
  OrbitTrace trace = orbit_sample(flow, w, x, half_width, 0.0, step);
  trace.truncation_a = half_width;
  return trace;
}

SampledFunction orbit_segment(const Flow& flow, const SpaceFunction& f,
                              const FlowPoint& x, double lo, double hi,
                              double step) {
  if (!(hi > lo)) throw std::invalid_argument("orbit_segment: empty range");
  const auto n = Eigen::Index(std::ceil((hi - lo) / step - 1e-12)) + 1;
  Eigen::ArrayXd values = sample_orbit(flow, f, x, lo, n, step);
  const double right = lo + step * double(n - 1);
  const double radius = std::max(std::abs(lo), std::abs(right));
  return SampledFunction(lo, step, std::move(values), radius);
}

SampledFunction OrbitTrace::truncated() const {
  Eigen::ArrayXd v = values.samples();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(values.node(i)) >= truncation_a) v[i] = 0.0;
  return SampledFunction(values.origin(), values.step(), std::move(v),
                         values.support_radius());
}

// ---------------------------------------------------------------------------
// Sampling over the space

std::vector<FlowPoint> stratified_points(const Flow& flow, int n) {
  if (n < 1) throw std::invalid_argument("stratified_points: n < 1");
  std::vector<FlowPoint> pts;
  if (flow.dim() == 1) {
    pts.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i)
      pts.push_back(FlowPoint::circle((double(i) + 0.5) / double(n)));
  } else {
    const int m = std::max(1, int(std::sqrt(double(n))));
    pts.reserve(std::size_t(m) * std::size_t(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        pts.push_back(FlowPoint::torus((double(i) + 0.5) / double(m),
                                       (double(j) + 0.5) / double(m)));
  }
  return pts;
}

double equimeasurability_check(const Flow& flow, const SpaceFunction& f,
                               double t1, double t2, int n_points,
                               std::span<const double> lambda_grid) {
  if (n_points < 1)
    throw std::invalid_argument("equimeasurability_check: n_points < 1");
  const auto pts = stratified_points(flow, n_points);
  std::vector<double> v1, v2;
  v1.reserve(pts.size());
  v2.reserve(pts.size());
  for (const FlowPoint& x : pts) {
    v1.push_back(f.eval(flow.map(t1, x)));
    v2.push_back(f.eval(flow.map(t2, x)));
  }
  double worst = 0.0;
  for (double lam : lambda_grid) {
    std::int64_t c1 = 0, c2 = 0;
    for (std::size_t i = 0; i < v1.size(); ++i) {
      if (v1[i] > lam) ++c1;
      if (v2[i] > lam) ++c2;
    }
    worst = std::max(worst,
                     std::abs(double(c1) - double(c2)) / double(pts.size()));
  }
  return worst;
}

}  // namespace ergo
