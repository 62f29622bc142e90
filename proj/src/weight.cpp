#include "ergo/weight.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ergo/rng.hpp"

namespace ergo {

namespace {

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Weight Weight::constant(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("weight const: negative");
  return Weight(Constant{c}, 1.0, "const " + format_number(c));
}

Weight Weight::power(double alpha, double floor_clip) {
  if (floor_clip < 0.0)
    throw std::invalid_argument("weight power: negative floor");
  if (floor_clip == 0.0 && alpha <= -1.0)
    throw std::invalid_argument(
        "weight power: alpha <= -1 requires a positive floor");
  return Weight(Power{alpha, floor_clip}, 1.0,
                "power " + format_number(alpha) + " " +
                    format_number(floor_clip));
}

Weight Weight::piecewise(std::vector<std::pair<Interval, double>> pieces,
                         double outside) {
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a.first.left < b.first.left; });
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!pieces[i].first.valid())
      throw std::invalid_argument("weight piecewise: empty piece");
    if (pieces[i].second < 0.0)
      throw std::invalid_argument("weight piecewise: negative value");
    if (i > 0 && pieces[i].first.left < pieces[i - 1].first.right - 1e-12)
      throw std::invalid_argument("weight piecewise: overlapping pieces");
  }
  if (outside < 0.0)
    throw std::invalid_argument("weight piecewise: negative outside value");
  std::ostringstream os;
  os << "piecewise";
  for (const auto& [iv, val] : pieces)
    os << " (" << format_number(iv.left) << "," << format_number(iv.right)
       << "," << format_number(val) << ")";
  os << " outside " << format_number(outside);
  return Weight(Piecewise{std::move(pieces), outside}, 1.0, os.str());
}

Weight Weight::cosine(double base, double amp, double freq, double phase) {
  if (!(base >= std::abs(amp)))
    throw std::invalid_argument("weight cosine: base < |amp|");
  return Weight(Cosine{base, amp, freq, phase}, 1.0,
                "cosine " + format_number(base) + " " + format_number(amp) +
                    " " + format_number(freq) + " " + format_number(phase));
}

Weight Weight::sampled(SampledFunction table) {
  if ((table.samples() < 0.0).any())
    throw std::invalid_argument("weight sampled: negative sample");
  auto ptr = std::make_shared<const SampledFunction>(std::move(table));
  return Weight(Sampled{std::move(ptr)}, 1.0, "sampled");
}

Weight Weight::scaled_by(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("weight scale: c <= 0");
  Weight w = *this;
  w.scale_ *= c;
  w.descriptor_ = "scale " + format_number(w.scale_) + " " + descriptor_;
  return w;
}

Weight Weight::with_descriptor(std::string d) const {
  Weight w = *this;
  w.descriptor_ = std::move(d);
  return w;
}

double Weight::eval(double t) const {
  struct Visitor {
    double t;
    double operator()(const Constant& c) const { return c.value; }
    double operator()(const Power& p) const {
      return std::pow(std::max(std::abs(t), p.floor), p.alpha);
    }
    double operator()(const Piecewise& pw) const {
      for (const auto& [iv, val] : pw.pieces)
        if (iv.left <= t && t < iv.right) return val;
      return pw.outside;
    }
    double operator()(const Cosine& c) const {
      return c.base +
             c.amp * std::cos(2.0 * std::numbers::pi * (c.freq * t + c.phase));
    }
    double operator()(const Sampled& s) const { return s.table->eval(t); }
  };
  return scale_ * std::visit(Visitor{t}, data_);
}

// ---------------------------------------------------------------------------
// Integrals of w^beta

namespace {

// ∫_a^b t^gamma dt for 0 <= a < b; throws on divergence at 0.
double power_primitive_piece(double a, double b, double gamma) {
  if (gamma == -1.0) {
    if (a <= 0.0)
      throw NonIntegrableDual("power weight: log divergence at the origin");
    return std::log(b / a);
  }
  const double g1 = gamma + 1.0;
  if (a <= 0.0 && g1 <= 0.0)
    throw NonIntegrableDual("power weight: divergent integral at the origin");
  const double pb = std::pow(b, g1);
  const double pa = a > 0.0 ? std::pow(a, g1) : 0.0;
  return (pb - pa) / g1;
}

// ∫_a^b max(t, floor)^gamma dt for 0 <= a < b.
double floored_power_integral_positive(double a, double b, double gamma,
                                       double floor_clip) {
  if (b <= a) return 0.0;
  if (floor_clip <= 0.0) return power_primitive_piece(a, b, gamma);
  double total = 0.0;
  const double knee = std::min(b, floor_clip);
  if (a < knee) total += (knee - a) * std::pow(floor_clip, gamma);
  if (b > floor_clip)
    total += power_primitive_piece(std::max(a, floor_clip), b, gamma);
  return total;
}

// ∫_I max(|t|, floor)^gamma dt.
double floored_power_integral(Interval I, double gamma, double floor_clip) {
  double total = 0.0;
  if (I.left < 0.0)
    total += floored_power_integral_positive(std::max(0.0, -I.right),
                                             -I.left, gamma, floor_clip);
  if (I.right > 0.0)
    total += floored_power_integral_positive(std::max(0.0, I.left), I.right,
                                             gamma, floor_clip);
  return total;
}

double simpson(const std::function<double(double)>& g, Interval I, int panels) {
  const double h = I.length() / double(panels);
  double sum = g(I.left) + g(I.right);
  for (int j = 1; j < panels; ++j)
    sum += (j % 2 == 1 ? 4.0 : 2.0) * g(I.left + h * double(j));
  return sum * h / 3.0;
}

double cosine_integral(const Weight::Cosine& c, Interval I) {
  const double two_pi = 2.0 * std::numbers::pi;
  double total = c.base * I.length();
  if (c.amp != 0.0 && c.freq != 0.0) {
    total += c.amp / (two_pi * c.freq) *
             (std::sin(two_pi * (c.freq * I.right + c.phase)) -
              std::sin(two_pi * (c.freq * I.left + c.phase)));
  } else if (c.amp != 0.0) {
    total += c.amp * std::cos(two_pi * c.phase) * I.length();
  }
  return total;
}

double sampled_integral_pow(const SampledFunction& table, Interval I,
                            double beta) {
  if (beta == 1.0) return integrate(table, I);
  const Interval extent{table.origin(), table.right_end()};
  const double lo = std::max(I.left, extent.left);
  const double hi = std::min(I.right, extent.right);
  if (I.left < extent.left - 1e-12 || I.right > extent.right + 1e-12) {
    if (beta < 0.0)
      throw NonIntegrableDual(
          "sampled weight: interval leaves the sampled range");
  }
  if (!(hi > lo)) return 0.0;
  Eigen::ArrayXd powed(table.size());
  for (Eigen::Index i = 0; i < table.size(); ++i)
    powed[i] = std::pow(table.samples()[i], beta);
  if (!powed.isFinite().all())
    throw NonIntegrableDual("sampled weight: non-finite dual samples");
  SampledFunction g(table.origin(), table.step(), std::move(powed),
                    table.support_radius());
  return integrate(g, {lo, hi});
}

}  // namespace

double weight_integral_pow(const Weight& w, Interval I, double beta) {
  if (!I.valid()) throw std::invalid_argument("weight integral: bad interval");
  const double scale_pow =
      w.scale() == 1.0 ? 1.0 : std::pow(w.scale(), beta);

  struct Visitor {
    Interval I;
    double beta;
    double operator()(const Weight::Constant& c) const {
      if (c.value == 0.0 && beta < 0.0)
        throw NonIntegrableDual("constant weight: zero value, negative power");
      return std::pow(c.value, beta) * I.length();
    }
    double operator()(const Weight::Power& p) const {
      return floored_power_integral(I, p.alpha * beta, p.floor);
    }
    double operator()(const Weight::Piecewise& pw) const {
      double total = 0.0;
      double cursor = I.left;
      auto outside_chunk = [&](double from, double to) {
        if (to <= from) return;
        if (pw.outside == 0.0 && beta < 0.0)
          throw NonIntegrableDual("piecewise weight: zero outside value");
        total += std::pow(pw.outside, beta) * (to - from);
      };
      for (const auto& [iv, val] : pw.pieces) {
        const double lo = std::max(I.left, iv.left);
        const double hi = std::min(I.right, iv.right);
        if (hi <= lo) continue;
        outside_chunk(cursor, lo);
        if (val == 0.0 && beta < 0.0)
          throw NonIntegrableDual("piecewise weight: zero piece value");
        total += std::pow(val, beta) * (hi - lo);
        cursor = hi;
      }
      outside_chunk(cursor, I.right);
      return total;
    }
    double operator()(const Weight::Cosine& c) const {
      if (beta == 1.0) return cosine_integral(c, I);
      const double min_val = c.base - std::abs(c.amp);
      auto g = [&c, this](double t) {
        const double v =
            c.base + c.amp * std::cos(2.0 * std::numbers::pi *
                                      (c.freq * t + c.phase));
        return std::pow(v, beta);
      };
      const double coarse = simpson(g, I, 4096);
      if (beta < 0.0 && min_val <= 1e-12) {
        const double fine = simpson(g, I, 8192);
        if (!std::isfinite(coarse) || !std::isfinite(fine) ||
            std::abs(fine - coarse) >
                0.25 * std::max(std::abs(fine), std::abs(coarse)))
          throw NonIntegrableDual("cosine weight: divergent dual integral");
        return fine;
      }
      return coarse;
    }
    double operator()(const Weight::Sampled& s) const {
      return sampled_integral_pow(*s.table, I, beta);
    }
  };
  const double base = std::visit(Visitor{I, beta}, w.data());
  if (!std::isfinite(base))
    throw NonIntegrableDual("weight integral: non-finite result for " +
                            w.descriptor());
  return scale_pow * base;
}

double weight_min_on(const Weight& w, Interval I, double scan_step) {
  double lo = w.eval(I.left);
  lo = std::min(lo, w.eval(I.right));
  const auto n = std::max<long long>(1, std::llround(I.length() / scan_step));
  for (long long i = 1; i < n; ++i)
    lo = std::min(lo, w.eval(I.left + I.length() * double(i) / double(n)));
  return lo;
}

// ---------------------------------------------------------------------------
// Interval families

std::vector<Interval> IntervalFamily::intervals() const {
  std::vector<Interval> out;
  out.reserve(centers.size() * lengths.size());
  for (double len : lengths)
    for (double c : centers) out.push_back({c - 0.5 * len, c + 0.5 * len});
  return out;
}

IntervalFamily IntervalFamily::dyadic(int k_lo, int k_hi, double center_lo,
                                      double center_hi, double center_step) {
  IntervalFamily fam;
  for (int k = k_lo; k <= k_hi; ++k) fam.lengths.push_back(std::ldexp(1.0, k));
  for (double c = center_lo; c <= center_hi + 1e-12; c += center_step)
    fam.centers.push_back(c);
  return fam;
}

IntervalFamily IntervalFamily::symmetric_dyadic(int k_lo, int k_hi) {
  IntervalFamily fam;
  fam.centers.push_back(0.0);
  for (int k = k_lo; k <= k_hi; ++k) fam.lengths.push_back(std::ldexp(1.0, k));
  return fam;
}

IntervalFamily default_interval_family(double support_radius) {
  return IntervalFamily::dyadic(-8, 6, -support_radius, support_radius, 0.25);
}

// ---------------------------------------------------------------------------
// A_p / A_1 / A_infinity

namespace {

// Prefix tables over a sampled weight's grid make the interval loop O(1)
// per interval.
struct PowPrefix {
  double origin, step;
  Eigen::ArrayXd prefix;  // prefix[i] = ∫ of w^beta over the first i cells
  double left_end, right_end;
  bool finite;

  static PowPrefix build(const SampledFunction& table, double beta) {
    Eigen::ArrayXd powed(table.size());
    for (Eigen::Index i = 0; i < table.size(); ++i)
      powed[i] = beta == 1.0 ? table.samples()[i]
                             : std::pow(table.samples()[i], beta);
    const bool ok = powed.isFinite().all();
    Eigen::ArrayXd pre =
        ok ? trapezoid_prefix(powed, table.step()) : Eigen::ArrayXd();
    return PowPrefix{table.origin(), table.step(), std::move(pre),
                     table.origin(), table.right_end(), ok};
  }

  double integral(Interval I) const {
    const double lo = std::max(I.left, left_end);
    const double hi = std::min(I.right, right_end);
    if (!(hi > lo)) return 0.0;
    return at(hi) - at(lo);
  }

 private:
  double at(double t) const {
    const double pos = (t - origin) / step;
    const auto i = std::clamp<Eigen::Index>(Eigen::Index(std::floor(pos)), 0,
                                            prefix.size() - 1);
    const double frac = pos - double(i);
    if (i + 1 >= prefix.size() || frac <= 0.0) return prefix[i];
    // exact integral of the interpolant over the partial cell is quadratic;
    // the trapezoid-of-interpolant form keeps additivity with integrate().
    return prefix[i] + (prefix[i + 1] - prefix[i]) * frac;
  }
};

}  // namespace

std::vector<double> ap_products(const Weight& w, double p,
                                const IntervalFamily& fam) {
  if (!(p > 1.0)) throw std::invalid_argument("ap_constant: p <= 1");
  if (fam.centers.empty() || fam.lengths.empty())
    throw std::invalid_argument("ap_constant: empty interval family");
  const double dual = -1.0 / (p - 1.0);
  const auto ivs = fam.intervals();
  std::vector<double> out;
  out.reserve(ivs.size());

  if (const auto* s = std::get_if<Weight::Sampled>(&w.data())) {
    // Fast path: prefix tables over the sampled grid.
    const PowPrefix direct = PowPrefix::build(*s->table, 1.0);
    const PowPrefix dualp = PowPrefix::build(*s->table, dual);
    if (!direct.finite || !dualp.finite)
      throw NonIntegrableDual("sampled weight: non-finite dual samples");
    const double sd = w.scale();
    const double sdual = std::pow(w.scale(), dual);
    for (const Interval& I : ivs) {
      if (I.left < direct.left_end - 1e-12 ||
          I.right > direct.right_end + 1e-12)
        throw NonIntegrableDual(
            "sampled weight: family interval leaves the sampled range");
      const double a = sd * direct.integral(I) / I.length();
      const double b = sdual * dualp.integral(I) / I.length();
      out.push_back(a * std::pow(b, p - 1.0));
    }
    return out;
  }

  for (const Interval& I : ivs) {
    const double a = weight_integral_pow(w, I, 1.0) / I.length();
    const double b = weight_integral_pow(w, I, dual) / I.length();
    out.push_back(a * std::pow(b, p - 1.0));
  }
  return out;
}

double ap_constant(const Weight& w, double p, const IntervalFamily& fam) {
  const auto products = ap_products(w, p, fam);
  return *std::max_element(products.begin(), products.end());
}

namespace {

// Sliding-window minima over the sampled grid: out[i] = min(v[i..i+m]).
Eigen::ArrayXd sliding_min(const Eigen::ArrayXd& v, Eigen::Index m) {
  const Eigen::Index n = v.size();
  const Eigen::Index span = std::min(m, n - 1);
  Eigen::ArrayXd out(n - span);
  std::vector<Eigen::Index> deque;
  deque.reserve(std::size_t(span) + 1);
  std::size_t head = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    while (deque.size() > head && v[deque.back()] >= v[i]) deque.pop_back();
    deque.push_back(i);
    if (deque[head] <= i - span - 1) ++head;
    if (i >= span) out[i - span] = v[deque[head]];
  }
  return out;
}

double a1_constant_sampled(const Weight& w, const SampledFunction& table,
                           const IntervalFamily& fam) {
  const double h = table.step();
  const Eigen::ArrayXd prefix = trapezoid_prefix(table.samples(), h);
  double best = 0.0;
  for (double len : fam.lengths) {
    const auto m = std::max<Eigen::Index>(
        1, Eigen::Index(std::llround(len / h)));
    const Eigen::ArrayXd mins = sliding_min(table.samples(), m);
    for (double c : fam.centers) {
      const Interval I{c - 0.5 * len, c + 0.5 * len};
      const double pos = (I.left - table.origin()) / h;
      const auto i0 = Eigen::Index(std::llround(pos));
      double avg, inf;
      const bool aligned = i0 >= 0 && std::abs(pos - double(i0)) <= 1e-6 &&
                           std::abs(len / h - double(m)) <= 1e-6 &&
                           i0 + m < table.size() && i0 < mins.size();
      if (aligned) {
        inf = mins[i0];
        avg = (prefix[i0 + m] - prefix[i0]) / len;
      } else {
        inf = weight_min_on(w, I, h) / w.scale();
        avg = weight_integral(w, I) / I.length() / w.scale();
      }
      if (!(inf > 0.0))
        throw ZeroInfimum("a1_constant: zero grid minimum on [" +
                          format_number(I.left) + ", " +
                          format_number(I.right) + "]");
      best = std::max(best, avg / inf);
    }
  }
  return best;
}

}  // namespace

double a1_constant(const Weight& w, const IntervalFamily& fam,
                   double scan_step) {
  if (fam.centers.empty() || fam.lengths.empty())
    throw std::invalid_argument("a1_constant: empty interval family");
  if (const auto* s = std::get_if<Weight::Sampled>(&w.data()))
    return a1_constant_sampled(w, *s->table, fam);
  double best = 0.0;
  for (const Interval& I : fam.intervals()) {
    const double avg = weight_integral(w, I) / I.length();
    const double inf = weight_min_on(w, I, scan_step);
    if (!(inf > 0.0))
      throw ZeroInfimum("a1_constant: zero grid minimum on [" +
                        format_number(I.left) + ", " + format_number(I.right) +
                        "]");
    best = std::max(best, avg / inf);
  }
  return best;
}

AInftyResult a_infty_check(const Weight& w, Interval I, double delta,
                           const std::vector<CellUnion>& subsets) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("a_infty_check: delta outside (0,1)");
  if (subsets.empty())
    throw EmptySubsetFamily("a_infty_check: no subsets supplied");
  const double wI = weight_integral(w, I);
  double worst = 0.0;
  for (const CellUnion& cells : subsets) {
    double measure = 0.0, wE = 0.0;
    for (const Interval& cell : cells) {
      if (cell.left < I.left - 1e-12 || cell.right > I.right + 1e-12)
        throw std::invalid_argument("a_infty_check: subset leaves I");
      measure += cell.length();
      wE += weight_integral(w, cell);
    }
    if (!(measure < delta * I.length()))
      throw std::invalid_argument("a_infty_check: subset too large");
    worst = std::max(worst, wE / wI);
  }
  const double eps = 1.0 - worst;
  return AInftyResult{eps, eps > 0.0};
}

std::vector<CellUnion> make_ainfty_subsets(const Weight& w, Interval I,
                                           double delta, int count,
                                           std::uint64_t seed,
                                           double cell_step) {
  const auto n_cells =
      std::max<long long>(4, std::llround(I.length() / cell_step));
  const double h = I.length() / double(n_cells);
  auto cell = [&](long long i) {
    return Interval{I.left + h * double(i), I.left + h * double(i + 1)};
  };
  const auto budget =
      std::llround(std::floor(0.95 * delta * double(n_cells)));
  if (budget < 1)
    throw std::invalid_argument(
        "make_ainfty_subsets: cell_step too coarse for this delta");

  std::vector<CellUnion> out;

  // Deterministic slivers accumulating cells around the weight's maximum.
  long long arg_max = 0;
  double best = -1.0;
  for (long long i = 0; i < n_cells; ++i) {
    const double mid = I.left + h * (double(i) + 0.5);
    const double v = w.eval(mid);
    if (v > best) {
      best = v;
      arg_max = i;
    }
  }
  for (long long width = 1; width <= budget; width *= 2) {
    CellUnion sliver;
    for (long long d = 0; d < width; ++d) {
      const long long i = arg_max + (d % 2 == 0 ? d / 2 : -(d / 2 + 1));
      if (i >= 0 && i < n_cells) sliver.push_back(cell(i));
    }
    if (!sliver.empty()) out.push_back(std::move(sliver));
  }

  // Seeded random unions of cells.
  SplitMix64 rng(seed);
  while (int(out.size()) < count) {
    CellUnion pick;
    const auto want = 1 + rng.below(std::uint64_t(budget));
    std::vector<bool> used(std::size_t(n_cells), false);
    for (std::uint64_t k = 0; k < want; ++k) {
      const auto i = rng.below(std::uint64_t(n_cells));
      if (!used[i]) {
        used[i] = true;
        pick.push_back(cell(static_cast<long long>(i)));
      }
    }
    if (!pick.empty()) out.push_back(std::move(pick));
  }
  return out;
}

}  // namespace ergo
