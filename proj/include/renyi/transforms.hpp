#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "renyi/densities.hpp"
#include "renyi/error.hpp"
#include "renyi/functionals.hpp"
#include "renyi/interpolation.hpp"
#include "renyi/quadrature.hpp"

namespace renyi {

/// f^ξ with y' = f^{1-ξ}.
struct EscortSpec {
  double xi;
};
/// (f/h)^ξ with y' = f^{1-ξ} h^ξ.
struct RelEscortSpec {
  Density h;
  double xi;
};
/// f^a / |f'|^b with y' = f^{1-a} |f'|^b; f decreasing.
struct DownSpec {
  double a, b;
};
/// |(a-2)x|^{1/(2-a)} with y' = -|(a-2)x|^{1/(a-2)} f; a != 2.
struct UpSpec {
  double a;
};
/// e^{-x} with y' = -e^x f.
struct UpExpSpec {};

using TransformSpec = std::variant<EscortSpec, RelEscortSpec, DownSpec, UpSpec, UpExpSpec>;

inline std::string describe(const TransformSpec& spec) {
  struct V {
    std::string operator()(const EscortSpec& s) const { return "escort:xi=" + detail::fmt(s.xi); }
    std::string operator()(const RelEscortSpec& s) const {
      return "rel_escort:h=(" + s.h.spec() + "),xi=" + detail::fmt(s.xi);
    }
    std::string operator()(const DownSpec& s) const { return "down:a=" + detail::fmt(s.a) + ",b=" + detail::fmt(s.b); }
    std::string operator()(const UpSpec& s) const { return "up:a=" + detail::fmt(s.a); }
    std::string operator()(const UpExpSpec&) const { return "up_exp"; }
  };
  return std::visit(V{}, spec);
}

/// Checks the hypotheses the transformation places on the driving density f.
inline void validate_transform(const Density& f, const TransformSpec& spec) {
  if (const auto* r = std::get_if<RelEscortSpec>(&spec)) require_same_support(f, r->h);
  if (std::holds_alternative<DownSpec>(spec)) {
    if (f.max_order() < 1) fail(ErrorKind::NotDifferentiable, f.spec() + " is not differentiable");
    if (!is_decreasing(f)) fail(ErrorKind::PreconditionViolated, "down transformation needs a decreasing f");
  }
  if (const auto* u = std::get_if<UpSpec>(&spec)) {
    require(u->a != 2.0, ErrorKind::InvalidArgument, "up transformation with a = 2 is up_exp");
    if (f.support().lo < 0.0)
      fail(ErrorKind::PreconditionViolated, "up transformation needs support in (0, inf)");
  }
}

namespace detail {

/// Closed-form pieces of one transformation at a point x of the support.
class TransformKernel {
 public:
  TransformKernel(Density f, TransformSpec spec) : f_(std::move(f)), spec_(std::move(spec)) {
    validate_transform(f_, spec_);
  }

  const Density& f() const { return f_; }
  const TransformSpec& spec() const { return spec_; }

  /// log O[f](x).
  double log_O(double x) const {
    const double lf = f_.model().log_pdf(x);
    struct V {
      const TransformKernel& k;
      double x, lf;
      double operator()(const EscortSpec& s) const { return s.xi * lf; }
      double operator()(const RelEscortSpec& s) const { return s.xi * (lf - s.h.model().log_pdf(x)); }
      double operator()(const DownSpec& s) const { return (s.a - s.b) * lf - s.b * log_abs_score(k.f_, x); }
      double operator()(const UpSpec& s) const { return std::log(std::abs((s.a - 2.0) * x)) / (2.0 - s.a); }
      double operator()(const UpExpSpec&) const { return -x; }
    };
    return std::visit(V{*this, x, lf}, spec_);
  }

  /// d log O / dx.
  double dlog_O(double x) const {
    struct V {
      const TransformKernel& k;
      double x;
      double operator()(const EscortSpec& s) const { return s.xi * k.f_.model().score(x); }
      double operator()(const RelEscortSpec& s) const {
        return s.xi * (k.f_.model().score(x) - s.h.model().score(x));
      }
      double operator()(const DownSpec& s) const {
        const double s1 = k.f_.model().score(x);
        return (s.a - s.b) * s1 - s.b * k.f_.model().score_slope(x) / s1;
      }
      double operator()(const UpSpec& s) const { return 1.0 / ((2.0 - s.a) * x); }
      double operator()(const UpExpSpec&) const { return -1.0; }
    };
    return std::visit(V{*this, x}, spec_);
  }

  /// log |y'(x)| = log f - log O.
  double log_weight(double x) const { return f_.model().log_pdf(x) - log_O(x); }

  /// The up kinds run right to left.
  bool increasing() const {
    return !(std::holds_alternative<UpSpec>(spec_) || std::holds_alternative<UpExpSpec>(spec_));
  }

  /// Whether y(x) has a canonical closed anchor (so |y| is meaningful).
  bool has_anchor() const {
    if (std::holds_alternative<UpSpec>(spec_)) return true;
    if (const auto* d = std::get_if<DownSpec>(&spec_)) return d->b == 1.0;
    return false;
  }

  /// log |y(x)| for the canonical anchor: y = ∫_x^hi |w| for up, and
  /// y = -f^{2-a}/(2-a) (or -log f at a = 2) for the one-parameter down.
  double log_abs_y(double x) const {
    if (std::holds_alternative<UpSpec>(spec_)) return tail().log_value(x);
    if (const auto* d = std::get_if<DownSpec>(&spec_); d && d->b == 1.0) return std::log(std::abs(anchor_y(x)));
    fail(ErrorKind::InvalidArgument, describe(spec_) + " has no canonical anchor for y");
  }

  /// Signed y(x) for the canonical anchor.
  double anchor_y(double x) const {
    if (std::holds_alternative<UpSpec>(spec_)) return std::exp(tail().log_value(x));
    if (const auto* d = std::get_if<DownSpec>(&spec_); d && d->b == 1.0) {
      const double lf = f_.model().log_pdf(x);
      if (d->a == 2.0) return -lf;
      return -std::exp((2.0 - d->a) * lf) / (2.0 - d->a);
    }
    fail(ErrorKind::InvalidArgument, describe(spec_) + " has no canonical anchor for y");
  }

  std::vector<double> singular_points() const {
    auto s = f_.singular_points();
    if (const auto* r = std::get_if<RelEscortSpec>(&spec_))
      for (double v : r->h.singular_points()) s.push_back(v);
    if (std::holds_alternative<UpSpec>(spec_) && f_.support().contains(0.0)) s.push_back(0.0);
    return s;
  }

 private:
  const UpperTail& tail() const {
    if (!tail_) tail_ = std::make_shared<UpperTail>(f_, std::get<UpSpec>(spec_).a);
    return *tail_;
  }

  Density f_;
  TransformSpec spec_;
  mutable std::shared_ptr<const UpperTail> tail_;
};

}  // namespace detail

/// Exponents of a y-domain integrand O^{p_of} Ō^{p_bar} |dO/dy|^{p_deriv} |y|^{p_y}.
struct PullbackPowers {
  double p_of = 0.0;
  double p_bar = 0.0;
  double p_deriv = 0.0;
  double p_y = 0.0;
};

/// log of the y-domain integral of the powers above for the pair (O[f], Ō[g]),
/// computed as a single x-domain quadrature by substitution:
///   dy = (f/O) dx,  Ō = (g/f) O,  |dO/dy| = (O^2/f) |d log O/dx|.
inline LogIntegral pullback_log(const Density& f, const Density& g, const TransformSpec& spec,
                                const PullbackPowers& pw, QuadratureConfig cfg = {}) {
  require_same_support(f, g);
  const detail::TransformKernel k(f, spec);
  for (double v : k.singular_points()) cfg.singular_points.push_back(v);
  for (double v : g.singular_points()) cfg.singular_points.push_back(v);
  if (pw.p_y != 0.0 && !k.has_anchor())
    fail(ErrorKind::InvalidArgument, describe(spec) + " has no canonical anchor for |y|");
  const auto& mf = f.model();
  const auto& mg = g.model();
  return integrate_log(
      [&](double x) {
        const double lf = mf.log_pdf(x);
        const double lo = k.log_O(x);
        double v = lf + (pw.p_of - 1.0) * lo;
        if (pw.p_bar != 0.0) v += pw.p_bar * (mg.log_pdf(x) - lf + lo);
        if (pw.p_deriv != 0.0) v += pw.p_deriv * (2.0 * lo - lf + std::log(std::abs(k.dlog_O(x))));
        if (pw.p_y != 0.0) v += pw.p_y * k.log_abs_y(x);
        return v;
      },
      f.support(), cfg);
}

/// H_γ of the transformed pair (O[f], Ō[g]) through the substitution path.
inline Estimate pullback_cross_entropy(const Density& f, const Density& g, const TransformSpec& spec, double gamma,
                                       const QuadratureConfig& cfg = {}) {
  require(gamma != 1.0, ErrorKind::InvalidArgument, "γ must differ from 1");
  const LogIntegral L = pullback_log(f, g, spec, {1.0, gamma - 1.0, 0.0, 0.0}, cfg);
  return {L.log_value / (1.0 - gamma), L.rel_error / std::abs(1.0 - gamma)};
}

/// D_γ of the transformed pair through the substitution path.
inline Estimate pullback_divergence(const Density& f, const Density& g, const TransformSpec& spec, double gamma,
                                    const QuadratureConfig& cfg = {}) {
  require(gamma != 1.0, ErrorKind::InvalidArgument, "γ must differ from 1");
  const LogIntegral L = pullback_log(f, g, spec, {gamma, 1.0 - gamma, 0.0, 0.0}, cfg);
  return {L.log_value / (gamma - 1.0), L.rel_error / std::abs(gamma - 1.0)};
}

/// R_α of O[f] through the substitution path.
inline Estimate pullback_renyi(const Density& f, const TransformSpec& spec, double alpha,
                               const QuadratureConfig& cfg = {}) {
  require(alpha != 1.0, ErrorKind::InvalidArgument, "α must differ from 1");
  const LogIntegral L = pullback_log(f, f, spec, {alpha, 0.0, 0.0, 0.0}, cfg);
  return {L.log_value / (1.0 - alpha), L.rel_error / std::abs(1.0 - alpha)};
}

/// Tail mass left outside a grid window at each end.
inline constexpr double kGridTailMass = 1e-30;

struct GridOptions {
  int nodes = 4096;
  int end_refine = 4;
  double tail_mass = kGridTailMass;
  double tail_ratio = 1.1;
};

/// Numeric change of variable on a grid: x nodes at mass quantiles of f,
/// y(x_i) by cellwise quadrature of the weight y'(x).
struct PushforwardMap {
  std::vector<double> x, y, weight;
  std::vector<double> dy;  // |y_{i+1} - y_i| from the cell quadrature, exact even where y is not
  std::size_t lookup_lo = 0, lookup_hi = 0;  // longest strictly monotone run of y, for x(y) lookups
  bool increasing = true;
  Interval window{0.0, 1.0};
  double truncated_mass = 0.0;  // f-mass outside the window, both ends
  double span_residual = 0.0;   // relative mismatch of ∫|y'| over the window and the summed cells
};

namespace detail {

/// Grid node masses as (mass, from_left): mass below the node when from_left,
/// above it otherwise, so both tails keep full relative precision.
inline std::vector<std::pair<double, bool>> grid_masses(const GridOptions& opt) {
  const int n = opt.nodes;
  std::vector<std::pair<double, bool>> m;
  for (double v = opt.tail_mass; v < 1.0 / n; v *= opt.tail_ratio) m.emplace_back(v, true);
  const double h = 1.0 / n;
  const int r = opt.end_refine;
  for (int j = 1; j < n; ++j) {
    const bool edge = j < 8 || j >= n - 8;
    const int sub = edge ? r : 1;
    for (int s = 0; s < sub; ++s) {
      const double v = (j + static_cast<double>(s) / sub) * h;
      if (v <= 0.5) m.emplace_back(v, true);
      else if (1.0 - v >= 1.0 / n) m.emplace_back(1.0 - v, false);
    }
  }
  m.emplace_back(1.0 / n, false);
  std::vector<std::pair<double, bool>> right;
  for (double v = opt.tail_mass; v < 1.0 / n; v *= opt.tail_ratio) right.emplace_back(v, false);
  std::reverse(right.begin(), right.end());
  m.insert(m.end(), right.begin(), right.end());
  return m;
}

}  // namespace detail

/// A transformed density O[f] (or a reciprocal Ō[g]) represented on the grid
/// of a PushforwardMap. Values at arbitrary y go through the interpolated
/// inverse x(y) and the closed form of O at that x.
class TransformedDensity {
 public:
  TransformedDensity(std::shared_ptr<const detail::TransformKernel> kernel, std::shared_ptr<const PushforwardMap> map,
                     std::optional<Density> g)
      : k_(std::move(kernel)), map_(std::move(map)), g_(std::move(g)) {
    const auto& m = *map_;
    const auto lo = static_cast<std::ptrdiff_t>(m.lookup_lo), hi = static_cast<std::ptrdiff_t>(m.lookup_hi) + 1;
    std::vector<double> ys(m.y.begin() + lo, m.y.begin() + hi), xs(m.x.begin() + lo, m.x.begin() + hi), dx;
    dx.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dx[i] = 1.0 / m.weight[m.lookup_lo + i];
    if (!m.increasing) {
      std::reverse(ys.begin(), ys.end());
      std::reverse(xs.begin(), xs.end());
      std::reverse(dx.begin(), dx.end());
    }
    x_of_y_ = std::make_shared<MonotoneCubic>(ys, xs, dx);
    values.reserve(m.x.size());
    for (double x : m.x) values.push_back(std::exp(log_value_at_x(x)));
  }

  const PushforwardMap& map() const { return *map_; }
  const detail::TransformKernel& kernel() const { return *k_; }
  std::shared_ptr<const PushforwardMap> shared_map() const { return map_; }

  /// Density values on map().y.
  std::vector<double> values;

  /// x(y) by monotone cubic interpolation; clamped to the resolvable part of the window.
  double x_of(double y) const {
    const auto& m = *map_;
    return std::clamp((*x_of_y_)(y), m.x[m.lookup_lo], m.x[m.lookup_hi]);
  }

  double log_value_at_x(double x) const {
    const double lo = k_->log_O(x);
    if (!g_) return lo;
    return g_->model().log_pdf(x) - k_->f().model().log_pdf(x) + lo;
  }

  double operator()(double y) const { return std::exp(log_value_at_x(x_of(y))); }

  /// ∫ fn(y, x(y)) dy over grid cell i (positive orientation). Inside the
  /// cell x(y) is the Hermite cubic in the local offset s = |y - y_i| with
  /// slopes dx/dy = 1/|y'| at both ends, limited to stay monotone.
  template <class Fn>
  double cell_integral(std::size_t i, Fn&& fn) const {
    const auto& m = *map_;
    const double w = m.dy[i];
    if (!(w > 0.0)) return 0.0;
    const double x0 = m.x[i], x1 = m.x[i + 1];
    const double secant = (x1 - x0) / w;
    double d0 = 1.0 / std::abs(m.weight[i]), d1 = 1.0 / std::abs(m.weight[i + 1]);
    if (!std::isfinite(d0)) d0 = 3.0 * secant;
    if (!std::isfinite(d1)) d1 = 3.0 * secant;
    const double r = std::hypot(d0, d1) / secant;
    if (r > 3.0) {
      d0 *= 3.0 / r;
      d1 *= 3.0 / r;
    }
    const double sign = m.increasing ? 1.0 : -1.0;
    const double a0 = std::abs(m.y[i]), a1 = std::abs(m.y[i + 1]);
    // Geometric tail cells: a cubic in y cannot follow x = log y to better
    // than ~1e-6 per cell, so interpolate in v = log|y| instead.
    if (m.y[i] * m.y[i + 1] > 0.0 && std::max(a0, a1) > 1.05 * std::min(a0, a1) &&
        std::abs(std::abs(a1 - a0) - w) <= 1e-9 * w) {
      const double v0 = std::log(a0), v1 = std::log(a1), dv = v1 - v0;
      double e0 = a0 * d0 * std::abs(dv) / (x1 - x0), e1 = a1 * d1 * std::abs(dv) / (x1 - x0);
      if (const double q = std::hypot(e0, e1); q > 3.0) {
        e0 *= 3.0 / q;
        e1 *= 3.0 / q;
      }
      const double ys = m.y[i] > 0.0 ? 1.0 : -1.0;
      double s = 0.0;
      for (const auto& [t, wt] : gl_nodes()) {
        const double u = 0.5 * (1.0 + t);
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        const double x = x0 + (x1 - x0) * std::clamp(h01 + h10 * e0 + h11 * e1, 0.0, 1.0);
        const double a = std::exp(v0 + u * dv);
        s += wt * a * fn(ys * a, x);
      }
      return 0.5 * std::abs(dv) * s;
    }
    double s = 0.0;
    for (const auto& [t, wt] : gl_nodes()) {
      const double u = 0.5 * (1.0 + t);  // local coordinate in [0, 1]
      const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
      const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
      const double x = std::clamp(h00 * x0 + h10 * w * d0 + h01 * x1 + h11 * w * d1, x0, x1);
      s += wt * fn(m.y[i] + sign * u * w, x);
    }
    return 0.5 * w * s;
  }

  /// ∫ fn(y, x(y)) dy over the grid window.
  template <class Fn>
  double integrate_y(Fn&& fn) const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < map_->x.size(); ++i) total += cell_integral(i, fn);
    return total;
  }

  /// Grid quadrature of the density itself.
  double mass() const {
    return integrate_y([&](double, double x) { return std::exp(log_value_at_x(x)); });
  }

 private:
  static const std::vector<std::pair<double, double>>& gl_nodes() {
    static const std::vector<std::pair<double, double>> nodes = [] {
      std::vector<std::pair<double, double>> v;
      const auto& abs = boost::math::quadrature::gauss<double, 20>::abscissa();
      const auto& wts = boost::math::quadrature::gauss<double, 20>::weights();
      for (std::size_t i = 0; i < abs.size(); ++i) {
        v.emplace_back(abs[i], wts[i]);
        if (abs[i] != 0.0) v.emplace_back(-abs[i], wts[i]);
      }
      return v;
    }();
    return nodes;
  }

  std::shared_ptr<const detail::TransformKernel> k_;
  std::shared_ptr<const PushforwardMap> map_;
  std::optional<Density> g_;
  std::shared_ptr<const MonotoneCubic> x_of_y_;
};

namespace detail {

inline std::shared_ptr<const PushforwardMap> build_map(const TransformKernel& k, const GridOptions& opt) {
  const Density& f = k.f();
  if (std::holds_alternative<UpExpSpec>(k.spec())) {
    // The map has finite extent only when ∫ e^x f converges.
    QuadratureConfig c;
    c.singular_points = f.singular_points();
    integrate_log([&](double x) { return f.model().log_pdf(x) + x; }, f.support(), c);
  }
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-300;
  cfg.singular_points = k.singular_points();
  const CumulativeTable cdf = cumulative([&f](double x) { return f.pdf(x); }, f.support(), 64, cfg);

  auto map = std::make_shared<PushforwardMap>();
  for (const auto& [m, from_left] : grid_masses(opt)) {
    const double x = from_left ? cdf.quantile(m * cdf.total()) : cdf.upper_quantile(m * cdf.total());
    if (map->x.empty() || x > map->x.back()) map->x.push_back(x);
  }
  const std::vector<double> xs = map->x;
  const std::size_t n = xs.size();
  map->window = {xs.front(), xs.back()};
  map->truncated_mass = cdf.lower(xs.front()) + cdf.upper(xs.back());
  map->increasing = k.increasing();
  const double sign = map->increasing ? 1.0 : -1.0;

  map->weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) map->weight[i] = sign * std::exp(k.log_weight(xs[i]));

  // Cell integrals of |y'| by Gauss–Legendre.
  const auto& abs = boost::math::quadrature::gauss<double, 20>::abscissa();
  const auto& wts = boost::math::quadrature::gauss<double, 20>::weights();
  std::vector<double> cell(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double c = 0.5 * (xs[i] + xs[i + 1]), h = 0.5 * (xs[i + 1] - xs[i]);
    double s = 0.0;
    for (std::size_t j = 0; j < abs.size(); ++j) {
      s += wts[j] * std::exp(k.log_weight(c + h * abs[j]));
      if (abs[j] != 0.0) s += wts[j] * std::exp(k.log_weight(c - h * abs[j]));
    }
    cell[i] = h * s;
  }

  // Anchor where |y| is smallest so increments near that end stay resolvable:
  // the canonical anchor when there is one, else zero at the end whose
  // weight is smaller.
  map->y.assign(n, 0.0);
  bool from_right;
  double anchor = 0.0;
  if (k.has_anchor()) {
    const double yl = k.anchor_y(xs.front()), yr = k.anchor_y(xs.back());
    from_right = std::abs(yr) < std::abs(yl);
    anchor = from_right ? yr : yl;
  } else {
    from_right = k.log_weight(xs.back()) < k.log_weight(xs.front());
  }
  if (from_right) {
    map->y[n - 1] = anchor;
    for (std::size_t i = n - 1; i-- > 0;) map->y[i] = map->y[i + 1] - sign * cell[i];
  } else {
    map->y[0] = anchor;
    for (std::size_t i = 0; i + 1 < n; ++i) map->y[i + 1] = map->y[i] + sign * cell[i];
  }

  map->dy = cell;
  // Far from the anchor, increments can fall below the spacing of doubles
  // at |y|. Absolute lookups use the longest strictly monotone run; cell
  // integrals use dy and never need y to resolve them.
  std::size_t best_lo = 0, best_hi = 0, run_lo = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool ok = map->increasing ? map->y[i + 1] > map->y[i] : map->y[i + 1] < map->y[i];
    if (!ok) {
      run_lo = i + 1;
      continue;
    }
    if (i + 1 - run_lo > best_hi - best_lo) {
      best_lo = run_lo;
      best_hi = i + 1;
    }
  }
  require(best_hi - best_lo >= 16, ErrorKind::NonFiniteIntegrand, "pushforward map is not resolvable in y");
  map->lookup_lo = best_lo;
  map->lookup_hi = best_hi;

  QuadratureConfig wc;
  wc.singular_points = k.singular_points();
  // Grid nodes as breakpoints keep wide windows resolved.
  for (std::size_t i = 64; i + 1 < n; i += 64) wc.singular_points.push_back(xs[i]);
  const double direct = integrate([&](double x) { return std::exp(k.log_weight(x)); }, map->window, wc).value;
  const double span = std::accumulate(map->dy.begin(), map->dy.end(), 0.0);
  map->span_residual = std::abs(direct - span) / std::max(1.0, span);
  return map;
}

}  // namespace detail

/// O[f] on a grid.
inline TransformedDensity transform(const Density& f, const TransformSpec& spec, const GridOptions& opt = {}) {
  auto k = std::make_shared<const detail::TransformKernel>(f, spec);
  auto map = detail::build_map(*k, opt);
  return TransformedDensity(k, map, std::nullopt);
}

/// Ō[g] = (g/f) O[f] through the map of an existing O[f].
inline TransformedDensity reciprocal_transform(const Density& g, const TransformedDensity& of) {
  require_same_support(g, of.kernel().f());
  auto k = std::make_shared<const detail::TransformKernel>(of.kernel());
  return TransformedDensity(k, of.shared_map(), g);
}

/// Ō[g] driven by f, building the map.
inline TransformedDensity reciprocal_transform(const Density& g, const Density& f, const TransformSpec& spec,
                                               const GridOptions& opt = {}) {
  require_same_support(g, f);
  return reciprocal_transform(g, transform(f, spec, opt));
}

/// D_γ between two densities sharing one grid map, by y-domain quadrature.
inline double grid_divergence(const TransformedDensity& p, const TransformedDensity& q, double gamma) {
  require(&p.map() == &q.map(), ErrorKind::InvalidArgument, "grid divergence needs a shared map");
  require(gamma != 1.0, ErrorKind::InvalidArgument, "γ must differ from 1");
  const double I = p.integrate_y([&](double, double x) {
    return std::exp(gamma * p.log_value_at_x(x) + (1.0 - gamma) * q.log_value_at_x(x));
  });
  return std::log(I) / (gamma - 1.0);
}

/// R_α of a gridded density.
inline double grid_renyi(const TransformedDensity& p, double alpha) {
  require(alpha != 1.0, ErrorKind::InvalidArgument, "α must differ from 1");
  const double I = p.integrate_y([&](double, double x) { return std::exp(alpha * p.log_value_at_x(x)); });
  return std::log(I) / (1.0 - alpha);
}

struct PreservationReport {
  double direct = 0.0;
  double grid = 0.0;
  double gap = 0.0;
  double mass_f = 0.0;
  double mass_g = 0.0;
};

/// |D_γ of the gridded transformed pair - D_γ[f||g]|.
inline PreservationReport verify_divergence_preservation(const Density& f, const Density& g,
                                                         const TransformSpec& spec, double gamma,
                                                         const GridOptions& opt = {}) {
  const TransformedDensity tf = transform(f, spec, opt);
  const TransformedDensity tg = reciprocal_transform(g, tf);
  PreservationReport r;
  r.direct = renyi_divergence(f, g, gamma).value;
  r.grid = grid_divergence(tf, tg, gamma);
  r.gap = std::abs(r.grid - r.direct);
  r.mass_f = tf.mass();
  r.mass_g = tg.mass();
  return r;
}

struct TransformedRenyi {
  double closed = 0.0;
  double grid = 0.0;
  double difference = 0.0;
};

/// R_α[O[f]] from the closed reduction for each kind:
///   escort        ξ R_{1+(α-1)ξ}[f]
///   rel. escort   -ξ D_{1+(α-1)ξ}[f||h]
///   down (a,b)    (1/(1-α)) log ∫ f^{1+a(α-1)} |f'|^{b(1-α)}
///   up a          (1/(a-2)) log(|2-a| σ_{(α-1)/(2-a)}[f])
///   up_exp        (1/(1-α)) log ⟨e^{(1-α)x}⟩_f
inline double renyi_of_transformed_closed(const Density& f, const TransformSpec& spec, double alpha,
                                          const QuadratureConfig& cfg = {}) {
  require(alpha != 1.0, ErrorKind::InvalidArgument, "α must differ from 1");
  validate_transform(f, spec);
  struct V {
    const Density& f;
    double alpha;
    const QuadratureConfig& cfg;
    double operator()(const EscortSpec& s) const {
      if (s.xi == 0.0) return 0.0;
      return s.xi * renyi_entropy(f, 1.0 + (alpha - 1.0) * s.xi, cfg).value;
    }
    double operator()(const RelEscortSpec& s) const {
      if (s.xi == 0.0) return 0.0;
      return -s.xi * renyi_divergence(f, s.h, 1.0 + (alpha - 1.0) * s.xi, cfg).value;
    }
    double operator()(const DownSpec& s) const {
      return integrals::cross_fisher(f, f, 2.0 - s.a, s.b, 1.0 - alpha, cfg).log_value / (1.0 - alpha);
    }
    double operator()(const UpSpec& s) const {
      const double p = (alpha - 1.0) / (2.0 - s.a);
      const double log_sigma = integrals::moment(f, p, cfg).log_value / p;
      return (std::log(std::abs(2.0 - s.a)) + log_sigma) / (s.a - 2.0);
    }
    double operator()(const UpExpSpec&) const {
      return integrals::exp_moment(f, 1.0 - alpha, cfg).log_value / (1.0 - alpha);
    }
  };
  return std::visit(V{f, alpha, cfg}, spec);
}

/// Closed reduction alongside the grid quadrature of R_α[O[f]].
inline TransformedRenyi renyi_of_transformed(const Density& f, const TransformSpec& spec, double alpha,
                                             const GridOptions& opt = {}) {
  TransformedRenyi r;
  r.closed = renyi_of_transformed_closed(f, spec, alpha);
  r.grid = grid_renyi(transform(f, spec, opt), alpha);
  r.difference = std::abs(r.grid - r.closed);
  return r;
}

struct RoundtripReport {
  double max_value_error = 0.0;  // relative, recovered f vs f
  double max_shift_error = 0.0;  // spread of z(x) + x over the window
};

/// Down (a, b = 1) followed by up a: the up map is integrated numerically over
/// the down grid, z = -∫ |(a-2)y|^{1/(a-2)} F(y) dy, and should reproduce
/// f(x) = |(a-2)y(x)|^{1/(2-a)} with z = -x + const.
inline RoundtripReport up_down_roundtrip(const Density& f, double a, const GridOptions& opt = {}) {
  require(a != 2.0, ErrorKind::InvalidArgument, "roundtrip needs a != 2");
  const TransformedDensity F = transform(f, DownSpec{a, 1.0}, opt);
  const auto& m = F.map();
  const std::size_t n = m.x.size();
  std::vector<double> z(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s = F.cell_integral(i, [&](double y, double x) {
      return std::pow(std::abs((a - 2.0) * y), 1.0 / (a - 2.0)) * std::exp(F.log_value_at_x(x));
    });
    z[i + 1] = z[i] - s;
  }
  RoundtripReport r;
  const double c0 = z[0] + m.x[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double rec = std::pow(std::abs((a - 2.0) * m.y[i]), 1.0 / (2.0 - a));
    const double fx = f.pdf(m.x[i]);
    r.max_value_error = std::max(r.max_value_error, std::abs(rec - fx) / fx);
    r.max_shift_error = std::max(r.max_shift_error, std::abs(z[i] + m.x[i] - c0));
  }
  return r;
}

}  // namespace renyi
