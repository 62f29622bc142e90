#include "ergo/sampled_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ergo/weight.hpp"

namespace ergo {

namespace {

constexpr double kNodeSnapTol = 1e-9;

// Snap a coordinate down/up to the grid lattice {k*step}.
double lattice_floor(double x, double step) {
  return std::floor(x / step) * step;
}
double lattice_ceil(double x, double step) {
  return std::ceil(x / step) * step;
}

}  // namespace

SampledFunction::SampledFunction(double origin, double step,
                                 Eigen::ArrayXd samples, double support_radius)
    : origin_(origin),
      step_(step),
      samples_(std::move(samples)),
      support_radius_(support_radius) {
  if (!(step_ > 0.0)) throw std::invalid_argument("SampledFunction: step <= 0");
  if (samples_.size() == 0)
    throw std::invalid_argument("SampledFunction: empty samples");
  if (support_radius_ < 0.0)
    throw std::invalid_argument("SampledFunction: negative support radius");
  for (Eigen::Index i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i]))
      throw std::invalid_argument("SampledFunction: non-finite sample");
    if (samples_[i] != 0.0 &&
        std::abs(node(i)) > support_radius_ + 0.5 * step_) {
      throw std::invalid_argument(
          "SampledFunction: nonzero sample outside the declared support");
    }
  }
}

double SampledFunction::eval(double t) const {
  const double pos = (t - origin_) / step_;
  if (pos < 0.0 || pos > double(samples_.size() - 1)) return 0.0;
  const auto i = Eigen::Index(pos);
  if (i >= samples_.size() - 1) return samples_[samples_.size() - 1];
  const double frac = pos - double(i);
  return samples_[i] + (samples_[i + 1] - samples_[i]) * frac;
}

Interval SampledFunction::nonzero_extent(double tol) const {
  Eigen::Index lo = 0, hi = samples_.size() - 1;
  while (lo < samples_.size() && std::abs(samples_[lo]) <= tol) ++lo;
  while (hi >= 0 && std::abs(samples_[hi]) <= tol) --hi;
  if (lo > hi) return Interval{0.0, 0.0};
  return Interval{node(lo), node(hi)};
}

// ---------------------------------------------------------------------------
// Builders

namespace {

struct GridLayout {
  double origin;
  Eigen::Index n;
};

GridLayout layout_for(Interval extent, const GridSpec& grid) {
  if (!extent.valid()) throw std::invalid_argument("builder: empty extent");
  const double lo =
      std::max(lattice_floor(extent.left, grid.step), -grid.support_radius);
  const double hi =
      std::min(lattice_ceil(extent.right, grid.step), grid.support_radius);
  if (!(hi > lo))
    throw std::invalid_argument("builder: extent outside the support radius");
  const auto n = Eigen::Index(std::llround((hi - lo) / grid.step)) + 1;
  return {lo, n};
}

SampledFunction build(Interval extent, const GridSpec& grid,
                      const std::function<double(double, double)>& node_value) {
  const GridLayout lay = layout_for(extent, grid);
  Eigen::ArrayXd v(lay.n);
  for (Eigen::Index i = 0; i < lay.n; ++i) {
    const double t = lay.origin + grid.step * double(i);
    v[i] = node_value(t, grid.step);
  }
  const double right = lay.origin + grid.step * double(lay.n - 1);
  const double radius = std::max(std::abs(lay.origin), std::abs(right));
  return SampledFunction(lay.origin, grid.step, std::move(v), radius);
}

}  // namespace

SampledFunction make_zero(Interval extent, const GridSpec& grid) {
  return build(extent, grid, [](double, double) { return 0.0; });
}

SampledFunction sample_function(const std::function<double(double)>& fn,
                                Interval extent, const GridSpec& grid) {
  return build(extent, grid, [&fn](double t, double) { return fn(t); });
}

SampledFunction make_indicator(double a, double b, const GridSpec& grid) {
  if (!(a < b)) throw std::invalid_argument("indicator: need a < b");
  // The grid stops at the jumps and evaluation is zero beyond it, so the
  // stored interpolant is the indicator of the closed interval and
  // grid-aligned window integrals are exact.
  return build({a, b}, grid, [a, b](double t, double h) {
    if (std::abs(t - a) < kNodeSnapTol * h || std::abs(t - b) < kNodeSnapTol * h)
      return 1.0;
    return (t > a && t < b) ? 1.0 : 0.0;
  });
}

SampledFunction make_constant(double c, double a, double b,
                              const GridSpec& grid) {
  if (!(a < b)) throw std::invalid_argument("const: need a < b");
  return build({a, b}, grid, [a, b, c](double t, double h) {
    if (std::abs(t - a) < kNodeSnapTol * h || std::abs(t - b) < kNodeSnapTol * h)
      return c;
    return (t > a && t < b) ? c : 0.0;
  });
}

SampledFunction make_tent(double center, double radius, const GridSpec& grid) {
  if (!(radius > 0.0)) throw std::invalid_argument("tent: radius <= 0");
  return build({center - radius, center + radius}, grid,
               [center, radius](double t, double) {
                 return std::max(0.0, 1.0 - std::abs(t - center) / radius);
               });
}

SampledFunction make_steps(std::span<const double> values, double a, double b,
                           const GridSpec& grid) {
  if (values.empty()) throw std::invalid_argument("steps: no values");
  if (!(a < b)) throw std::invalid_argument("steps: need a < b");
  const auto k = std::size_t(values.size());
  const double cell = (b - a) / double(k);
  // Right-continuous at interior breaks; the last value holds at t = b.
  return build({a, b}, grid, [&](double t, double) {
    if (t < a || t > b) return 0.0;
    auto idx = std::size_t((t - a) / cell);
    if (idx >= k) idx = k - 1;
    return values[idx];
  });
}

SampledFunction make_windowed_cosine(double freq, double a, double b,
                                     const GridSpec& grid) {
  if (!(a < b)) throw std::invalid_argument("cos: need a < b");
  const double two_pi = 2.0 * std::numbers::pi;
  return build({a, b}, grid, [=](double t, double) {
    return (t >= a && t <= b) ? std::cos(two_pi * freq * t) : 0.0;
  });
}

// ---------------------------------------------------------------------------
// Arithmetic

namespace {

void require_compatible(const SampledFunction& f, const SampledFunction& g) {
  if (f.step() != g.step())
    throw std::invalid_argument("add: mismatched grid steps");
  const double offset = (g.origin() - f.origin()) / f.step();
  if (std::abs(offset - std::round(offset)) > 1e-9)
    throw std::invalid_argument("add: origins not grid-aligned");
}

}  // namespace

SampledFunction add(const SampledFunction& f, const SampledFunction& g) {
  require_compatible(f, g);
  const double h = f.step();
  const double origin = std::min(f.origin(), g.origin());
  const double right = std::max(f.right_end(), g.right_end());
  const auto n = Eigen::Index(std::llround((right - origin) / h)) + 1;
  const auto off_f = Eigen::Index(std::llround((f.origin() - origin) / h));
  const auto off_g = Eigen::Index(std::llround((g.origin() - origin) / h));
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(n);
  v.segment(off_f, f.size()) += f.samples();
  v.segment(off_g, g.size()) += g.samples();
  const double radius = std::max(f.support_radius(), g.support_radius());
  return SampledFunction(origin, h, std::move(v), radius);
}

SampledFunction scaled(const SampledFunction& f, double c) {
  return SampledFunction(f.origin(), f.step(), f.samples() * c,
                         f.support_radius());
}

SampledFunction translated(const SampledFunction& f, double tau) {
  return SampledFunction(f.origin() + tau, f.step(), f.samples(),
                         f.support_radius() + std::abs(tau));
}

SampledFunction abs(const SampledFunction& f) {
  return SampledFunction(f.origin(), f.step(), f.samples().abs(),
                         f.support_radius());
}

// ---------------------------------------------------------------------------
// Quadrature

double integrate(const SampledFunction& f, Interval I) {
  if (!I.valid()) throw std::invalid_argument("integrate: empty interval");
  const double lo = std::max(I.left, f.origin());
  const double hi = std::min(I.right, f.right_end());
  if (!(hi > lo)) return 0.0;

  const double h = f.step();
  const auto& v = f.samples();
  const Eigen::Index n = v.size();

  double a_pos = (lo - f.origin()) / h;
  double b_pos = (hi - f.origin()) / h;
  a_pos = std::clamp(a_pos, 0.0, double(n - 1));
  b_pos = std::clamp(b_pos, 0.0, double(n - 1));

  auto cell_of = [n](double pos) {
    auto i = Eigen::Index(std::floor(pos));
    return std::clamp<Eigen::Index>(i, 0, n - 2);
  };
  auto value_at = [&](Eigen::Index i, double frac) {
    return v[i] + (v[i + 1] - v[i]) * frac;
  };

  const Eigen::Index ia = cell_of(a_pos);
  const Eigen::Index ib = cell_of(b_pos);
  const double fa = a_pos - double(ia);
  const double fb = b_pos - double(ib);

  if (ia == ib) {
    const double width = (b_pos - a_pos) * h;
    return 0.5 * width * (value_at(ia, fa) + value_at(ib, fb));
  }

  double total = 0.5 * (1.0 - fa) * h * (value_at(ia, fa) + v[ia + 1]);
  for (Eigen::Index i = ia + 1; i < ib; ++i)
    total += 0.5 * h * (v[i] + v[i + 1]);
  if (fb > 0.0) total += 0.5 * fb * h * (v[ib] + value_at(ib, fb));
  return total;
}

double lp_norm_weighted(const SampledFunction& f, const Weight& w, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm_weighted: p < 1");
  const auto& v = f.samples();
  const Eigen::Index n = v.size();
  Eigen::ArrayXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double av = std::abs(v[i]);
    double pw;
    if (p == 1.0)
      pw = av;
    else if (p == 2.0)
      pw = av * av;
    else
      pw = std::pow(av, p);
    g[i] = pw * w.eval(f.node(i));
  }
  double total = g.sum() - 0.5 * (g[0] + g[n - 1]);
  total *= f.step();
  if (!(total > 0.0)) return 0.0;
  return p == 1.0 ? total : std::pow(total, 1.0 / p);
}

double distribution_weighted(const SampledFunction& f, const Weight& w,
                             double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("distribution_weighted: lambda <= 0");
  const auto& v = f.samples();
  const Eigen::Index n = v.size();
  const double h = f.step();
  double mass = 0.0;
  double w_prev = w.eval(f.node(0));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double w_next = w.eval(f.node(i + 1));
    const double mid = 0.5 * (v[i] + v[i + 1]);
    if (std::abs(mid) > lambda) mass += 0.5 * h * (w_prev + w_next);
    w_prev = w_next;
  }
  return mass;
}

Eigen::ArrayXd trapezoid_prefix(const Eigen::ArrayXd& values, double step) {
  const Eigen::Index n = values.size();
  Eigen::ArrayXd prefix(n);
  prefix[0] = 0.0;
  for (Eigen::Index i = 1; i < n; ++i)
    prefix[i] = prefix[i - 1] + 0.5 * step * (values[i - 1] + values[i]);
  return prefix;
}

}  // namespace ergo
