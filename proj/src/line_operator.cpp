#include "ergo/line_operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace ergo {

// ---------------------------------------------------------------------------
// Construction

LineOperator LineOperator::identity() { return LineOperator(Identity{}, 0.0); }

LineOperator LineOperator::maximal(std::vector<double> radii) {
  if (radii.empty()) throw std::invalid_argument("maximal: no radii");
  for (double s : radii)
    if (!(s > 0.0)) throw std::invalid_argument("maximal: radius <= 0");
  std::sort(radii.begin(), radii.end());
  const double reach = radii.back();
  return LineOperator(Maximal{std::move(radii)}, reach);
}

LineOperator LineOperator::maximal_dyadic(int k_lo, int k_hi) {
  if (k_lo > k_hi) throw std::invalid_argument("maximal: k_lo > k_hi");
  std::vector<double> radii;
  for (int k = k_lo; k <= k_hi; ++k) radii.push_back(std::ldexp(1.0, k));
  return maximal(std::move(radii));
}

LineOperator LineOperator::hilbert(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("hilbert: eps outside (0,1)");
  return LineOperator(Hilbert{eps}, 1.0 / eps);
}

LineOperator LineOperator::square(int n_min, int n_max) {
  if (n_min > n_max) throw std::invalid_argument("square: n_min > n_max");
  return LineOperator(Square{n_min, n_max}, std::ldexp(1.0, n_max));
}

LineOperator LineOperator::sup_family(std::vector<LineOperator> members) {
  if (members.empty()) throw std::invalid_argument("sup_family: empty");
  double reach = 0.0;
  for (const auto& m : members) reach = std::max(reach, m.semilocal_radius());
  return LineOperator(SupFamily{std::move(members)}, reach);
}

std::string LineOperator::descriptor() const {
  struct Visitor {
    std::string operator()(const Identity&) const { return "identity"; }
    std::string operator()(const Maximal& m) const {
      std::ostringstream os;
      os << "maximal";
      for (double s : m.radii) os << " " << s;
      return os.str();
    }
    std::string operator()(const Hilbert& h) const {
      std::ostringstream os;
      os << "hilbert " << h.eps;
      return os.str();
    }
    std::string operator()(const Square& s) const {
      std::ostringstream os;
      os << "square " << s.n_min << " " << s.n_max;
      return os.str();
    }
    std::string operator()(const SupFamily& f) const {
      std::string out = "sup(";
      for (std::size_t i = 0; i < f.members.size(); ++i) {
        if (i) out += "; ";
        out += f.members[i].descriptor();
      }
      return out + ")";
    }
  };
  return std::visit(Visitor{}, data_);
}

// ---------------------------------------------------------------------------
// Kernels (pointwise)

double maximal_kernel(const SampledFunction& f, std::span<const double> radii,
                      double t) {
  if (radii.empty()) throw std::invalid_argument("maximal_kernel: no radii");
  const SampledFunction g = abs(f);
  double best = 0.0;
  for (double s : radii) {
    if (!(s > 0.0)) throw std::invalid_argument("maximal_kernel: radius <= 0");
    best = std::max(best, integrate(g, {t, t + s}) / s);
  }
  return best;
}

namespace {

struct HilbertWindow {
  Eigen::Index inner;  // first cell index >= eps/h
  Eigen::Index outer;  // last cell index <= 1/(eps h)
};

HilbertWindow hilbert_window(double eps, double h) {
  auto inner = Eigen::Index(std::llround(eps / h));
  auto outer = Eigen::Index(std::llround(1.0 / eps / h));
  inner = std::max<Eigen::Index>(inner, 1);
  return {inner, outer};
}

}  // namespace

double hilbert_kernel(const SampledFunction& f, double eps, double t) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("hilbert_kernel: eps outside (0,1)");
  const double h = f.step();
  const auto [m, M] = hilbert_window(eps, h);
  if (M <= m) return 0.0;

  // Grid-aligned t reads samples directly; otherwise interpolate.
  const double pos = (t - f.origin()) / h;
  const auto ip = Eigen::Index(std::llround(pos));
  const bool aligned = std::abs(pos - double(ip)) < 1e-9;

  double total = 0.0;
  for (Eigen::Index k = m; k <= M; ++k) {
    const double fp = aligned ? f.sample_or_zero(ip + k)
                              : f.eval(t + double(k) * h);
    const double fm = aligned ? f.sample_or_zero(ip - k)
                              : f.eval(t - double(k) * h);
    const double weight = (k == m || k == M) ? 0.5 : 1.0;
    total += weight / double(k) * (fp - fm);
  }
  return total;
}

double square_kernel(const SampledFunction& f, int n_min, int n_max,
                     double t) {
  if (n_min > n_max) throw std::invalid_argument("square_kernel: bad range");
  auto backward_average = [&](int n) {
    const double len = std::ldexp(1.0, n);
    return integrate(f, {t - len, t}) / len;
  };
  double prev = backward_average(n_min - 1);
  double sum = 0.0;
  for (int n = n_min; n <= n_max; ++n) {
    const double cur = backward_average(n);
    const double d = cur - prev;
    sum += d * d;
    prev = cur;
  }
  return std::sqrt(sum);
}

double apply_at(const LineOperator& T, const SampledFunction& f, double t) {
  struct Visitor {
    const SampledFunction& f;
    double t;
    double operator()(const LineOperator::Identity&) const {
      return f.eval(t);
    }
    double operator()(const LineOperator::Maximal& m) const {
      return maximal_kernel(f, m.radii, t);
    }
    double operator()(const LineOperator::Hilbert& h) const {
      return hilbert_kernel(f, h.eps, t);
    }
    double operator()(const LineOperator::Square& s) const {
      return square_kernel(f, s.n_min, s.n_max, t);
    }
    double operator()(const LineOperator::SupFamily& fam) const {
      double best = 0.0;
      for (const auto& member : fam.members)
        best = std::max(best, std::abs(apply_at(member, f, t)));
      return best;
    }
  };
  return std::visit(Visitor{f, t}, T.data());
}

// ---------------------------------------------------------------------------
// Grid application

namespace {

struct OutputGrid {
  double origin;
  Eigen::Index n;
  Eigen::Index offset;  // index of f's origin within the output grid
};

OutputGrid output_grid(const SampledFunction& f, double radius) {
  const double h = f.step();
  const auto pad = Eigen::Index(std::ceil(radius / h - 1e-12));
  return {f.origin() - double(pad) * h, f.size() + 2 * pad, pad};
}

Eigen::ArrayXd embed(const SampledFunction& f, const OutputGrid& grid,
                     bool absolute) {
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(grid.n);
  v.segment(grid.offset, f.size()) =
      absolute ? f.samples().abs() : f.samples();
  return v;
}

bool node_aligned(double x, double h) {
  const double pos = x / h;
  return std::abs(pos - std::round(pos)) < 1e-9;
}

Eigen::ArrayXd apply_maximal_grid(const LineOperator::Maximal& m,
                                  const SampledFunction& f,
                                  const OutputGrid& grid) {
  const double h = f.step();
  bool aligned = true;
  for (double s : m.radii) aligned = aligned && node_aligned(s, h);
  Eigen::ArrayXd out(grid.n);
  if (!aligned) {
    for (Eigen::Index i = 0; i < grid.n; ++i)
      out[i] = maximal_kernel(f, m.radii, grid.origin + h * double(i));
    return out;
  }
  // Prefix over f's own grid keeps the hard-zero-outside semantics of
  // integrate(): windows clip to the grid rather than seeing edge ramps.
  const Eigen::ArrayXd prefix = trapezoid_prefix(f.samples().abs(), h);
  const Eigen::Index nf = f.size();
  auto clamp_idx = [nf](Eigen::Index j) {
    return std::clamp<Eigen::Index>(j, 0, nf - 1);
  };
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const Eigen::Index j = i - grid.offset;  // f-grid index of this node
    double best = 0.0;
    for (double s : m.radii) {
      const auto w = Eigen::Index(std::llround(s / h));
      const Eigen::Index lo = clamp_idx(j);
      const Eigen::Index hi = clamp_idx(j + w);
      if (hi > lo) best = std::max(best, (prefix[hi] - prefix[lo]) / s);
    }
    out[i] = best;
  }
  return out;
}

Eigen::ArrayXd apply_square_grid(const LineOperator::Square& sq,
                                 const SampledFunction& f,
                                 const OutputGrid& grid) {
  const double h = f.step();
  bool aligned = node_aligned(std::ldexp(1.0, sq.n_min - 1), h);
  Eigen::ArrayXd out(grid.n);
  if (!aligned) {
    for (Eigen::Index i = 0; i < grid.n; ++i)
      out[i] =
          square_kernel(f, sq.n_min, sq.n_max, grid.origin + h * double(i));
    return out;
  }
  const Eigen::ArrayXd prefix = trapezoid_prefix(f.samples(), h);
  const Eigen::Index nf = f.size();
  auto clamp_idx = [nf](Eigen::Index j) {
    return std::clamp<Eigen::Index>(j, 0, nf - 1);
  };
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const Eigen::Index j = i - grid.offset;
    auto average = [&](int n) {
      const double len = std::ldexp(1.0, n);
      const auto w = Eigen::Index(std::llround(len / h));
      const Eigen::Index lo = clamp_idx(j - w);
      const Eigen::Index hi = clamp_idx(j);
      if (hi <= lo) return 0.0;
      return (prefix[hi] - prefix[lo]) / len;
    };
    double prev = average(sq.n_min - 1);
    double sum = 0.0;
    for (int n = sq.n_min; n <= sq.n_max; ++n) {
      const double cur = average(n);
      const double d = cur - prev;
      sum += d * d;
      prev = cur;
    }
    out[i] = std::sqrt(sum);
  }
  return out;
}

Eigen::ArrayXd apply_hilbert_grid(const LineOperator::Hilbert& hb,
                                  const SampledFunction& f,
                                  const OutputGrid& grid) {
  const double h = f.step();
  const auto [m, M] = hilbert_window(hb.eps, h);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(grid.n);
  if (M <= m) return out;

  const double direct_cost = double(grid.n) * double(M - m + 1);
  if (direct_cost <= double(1 << 26)) {
    for (Eigen::Index i = 0; i < grid.n; ++i)
      out[i] = hilbert_kernel(f, hb.eps, grid.origin + h * double(i));
    return out;
  }

  // FFT convolution with the antisymmetric trapezoid kernel
  //   K'[k] = w_k / k, K'[-k] = -w_k / k   (w = 1/2 at the window ends).
  const Eigen::Index klen = 2 * M + 1;
  Eigen::VectorXd kernel = Eigen::VectorXd::Zero(klen);
  for (Eigen::Index k = m; k <= M; ++k) {
    const double w = (k == m || k == M) ? 0.5 : 1.0;
    kernel[M - k] = w / double(k);    // multiplies f[i + k]
    kernel[M + k] = -w / double(k);   // multiplies f[i - k]
  }
  const Eigen::ArrayXd g = embed(f, grid, /*absolute=*/false);
  Eigen::Index fft_n = 1;
  while (fft_n < grid.n + klen) fft_n <<= 1;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(fft_n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(fft_n);
  a.head(grid.n) = g.matrix();
  b.head(klen) = kernel;
  Eigen::FFT<double> fft;
  Eigen::VectorXcd fa, fb;
  fft.fwd(fa, a);
  fft.fwd(fb, b);
  fa = fa.cwiseProduct(fb);
  Eigen::VectorXd conv;
  fft.inv(conv, fa);
  for (Eigen::Index i = 0; i < grid.n; ++i) out[i] = conv[i + M];
  return out;
}

}  // namespace

SampledFunction apply(const LineOperator& T, const SampledFunction& f) {
  struct Visitor {
    const LineOperator& T;
    const SampledFunction& f;
    SampledFunction operator()(const LineOperator::Identity&) const {
      return f;
    }
    SampledFunction operator()(const LineOperator::Maximal& m) const {
      const OutputGrid grid = output_grid(f, T.semilocal_radius());
      return SampledFunction(grid.origin, f.step(),
                             apply_maximal_grid(m, f, grid),
                             f.support_radius() + T.semilocal_radius());
    }
    SampledFunction operator()(const LineOperator::Hilbert& hb) const {
      const OutputGrid grid = output_grid(f, T.semilocal_radius());
      return SampledFunction(grid.origin, f.step(),
                             apply_hilbert_grid(hb, f, grid),
                             f.support_radius() + T.semilocal_radius());
    }
    SampledFunction operator()(const LineOperator::Square& sq) const {
      const OutputGrid grid = output_grid(f, T.semilocal_radius());
      return SampledFunction(grid.origin, f.step(),
                             apply_square_grid(sq, f, grid),
                             f.support_radius() + T.semilocal_radius());
    }
    SampledFunction operator()(const LineOperator::SupFamily& fam) const {
      const OutputGrid grid = output_grid(f, T.semilocal_radius());
      Eigen::ArrayXd best = Eigen::ArrayXd::Zero(grid.n);
      for (const auto& member : fam.members) {
        const SampledFunction part = apply(member, f);
        const auto off = Eigen::Index(
            std::llround((part.origin() - grid.origin) / f.step()));
        for (Eigen::Index i = 0; i < part.size(); ++i) {
          const Eigen::Index j = off + i;
          if (j >= 0 && j < grid.n)
            best[j] = std::max(best[j], std::abs(part.samples()[i]));
        }
      }
      return SampledFunction(grid.origin, f.step(), std::move(best),
                             f.support_radius() + T.semilocal_radius());
    }
  };
  return std::visit(Visitor{T, f}, T.data());
}

double check_semilocality(const LineOperator& T, const SampledFunction& f) {
  const SampledFunction out = apply(T, f);
  const double floor_tol = 1e-13 * std::max(1.0, out.max_abs());
  const Interval sf = f.nonzero_extent(0.0);
  const Interval so = out.nonzero_extent(floor_tol);
  if (!(so.right > so.left) && so.left == 0.0 && so.right == 0.0) return 0.0;
  if (!(sf.right > sf.left) && sf.left == 0.0 && sf.right == 0.0)
    return std::max(0.0, so.right - so.left);
  return std::max({0.0, sf.left - so.left, so.right - sf.right});
}

}  // namespace ergo
