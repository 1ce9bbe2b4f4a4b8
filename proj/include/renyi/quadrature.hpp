#pragma once

// Adaptive integration over bounded and unbounded intervals.
//
// Every interval is mapped onto a finite parameter range t:
//   (lo, hi)        x = t
//   (lo, +inf)      x = lo + u^2,  u = t / (1 - t),        t in (0, 1)
//   (-inf, hi)      x = hi - u^2,  u = (1 - t) / t,        t in (0, 1)
//   (-inf, +inf)    x = sgn(t) u^2, u = |t| / (1 - |t|),   t in (-1, 1)
// The squared form turns a power tail x^-p into (1-t)^(2p-3) and an
// endpoint singularity x^(k-1) into t^(2k-1), both milder than the plain
// rational map. Panels are integrated with a 10/21-point Gauss–Kronrod
// pair, always bisecting the panel with the largest error estimate first.
// Abscissae are interior to each panel, so endpoints and declared singular
// points are never sampled.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "renyi/error.hpp"
#include "renyi/interpolation.hpp"

namespace renyi {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo;
  double hi;

  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    require(!std::isnan(lo) && !std::isnan(hi) && lo < hi && lo != kInf && hi != -kInf,
            ErrorKind::InvalidArgument, "interval requires lo < hi");
  }

  bool contains(double x) const { return x > lo && x < hi; }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  std::vector<double> singular_points{};
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr double kOverflowGuard = 1e300;

class IntervalMap {
 public:
  explicit IntervalMap(Interval iv) : iv_(iv) {
    if (iv.bounded()) kind_ = Kind::Finite;
    else if (std::isfinite(iv.lo)) kind_ = Kind::UpperInf;
    else if (std::isfinite(iv.hi)) kind_ = Kind::LowerInf;
    else kind_ = Kind::BothInf;
  }

  const Interval& interval() const { return iv_; }

  double t_lo() const {
    switch (kind_) {
      case Kind::Finite: return iv_.lo;
      case Kind::BothInf: return -1.0;
      default: return 0.0;
    }
  }
  double t_hi() const { return kind_ == Kind::Finite ? iv_.hi : 1.0; }

  double x(double t) const {
    switch (kind_) {
      case Kind::Finite: return t;
      case Kind::UpperInf: {
        const double u = t / (1.0 - t);
        return iv_.lo + u * u;
      }
      case Kind::LowerInf: {
        const double u = (1.0 - t) / t;
        return iv_.hi - u * u;
      }
      case Kind::BothInf: {
        const double a = std::abs(t);
        const double u = a / (1.0 - a);
        return t < 0 ? -u * u : u * u;
      }
    }
    return t;
  }

  double jacobian(double t) const {
    switch (kind_) {
      case Kind::Finite: return 1.0;
      case Kind::UpperInf: {
        const double v = 1.0 - t;
        return 2.0 * t / (v * v * v);
      }
      case Kind::LowerInf: return 2.0 * (1.0 - t) / (t * t * t);
      case Kind::BothInf: {
        const double a = std::abs(t), v = 1.0 - a;
        return 2.0 * a / (v * v * v);
      }
    }
    return 1.0;
  }

  double t_of(double x) const {
    if (x <= iv_.lo) return t_lo();
    if (x >= iv_.hi) return t_hi();
    switch (kind_) {
      case Kind::Finite: return x;
      case Kind::UpperInf: {
        const double u = std::sqrt(x - iv_.lo);
        return u / (1.0 + u);
      }
      case Kind::LowerInf: return 1.0 / (1.0 + std::sqrt(iv_.hi - x));
      case Kind::BothInf: {
        const double u = std::sqrt(std::abs(x));
        return x < 0 ? -u / (1.0 + u) : u / (1.0 + u);
      }
    }
    return x;
  }

  /// Interior parameter values that must be panel boundaries.
  std::vector<double> natural_breaks() const {
    if (kind_ == Kind::BothInf) return {0.0};
    return {};
  }

 private:
  enum class Kind { Finite, UpperInf, LowerInf, BothInf };
  Interval iv_;
  Kind kind_ = Kind::Finite;
};

struct Panel {
  double a = 0, b = 0;
  double value = 0, error = 0;
};

/// Integrand pulled back to the t parameter. Points that round onto an
/// endpoint or a singular abscissa contribute zero.
class MappedIntegrand {
 public:
  MappedIntegrand(const std::function<double(double)>& fn, const IntervalMap& map,
                  std::span<const double> singular)
      : fn_(fn), map_(map), singular_(singular) {}

  double operator()(double t) const {
    ++evaluations;
    const double x = map_.x(t);
    if (!(x > map_.interval().lo && x < map_.interval().hi)) return 0.0;
    for (double s : singular_)
      if (x == s) return 0.0;
    const double v = fn_(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "integrand returned " << v << " at x=" << x;
      if (std::isinf(v)) fail(ErrorKind::DivergentIntegral, os.str());
      fail(ErrorKind::NonFiniteIntegrand, os.str());
    }
    const double g = v * map_.jacobian(t);
    if (std::abs(g) > kOverflowGuard || !std::isfinite(g))
      fail(ErrorKind::DivergentIntegral, "integrand exceeds overflow guard");
    return g;
  }

  mutable long evaluations = 0;

 private:
  const std::function<double(double)>& fn_;
  const IntervalMap& map_;
  std::span<const double> singular_;
};

inline Panel gauss_kronrod_panel(const MappedIntegrand& g, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = g(c);
  double kron = wk[0] * fc;
  double gauss = 0.0;
  // Gauss–Legendre 10 nodes sit at the odd Kronrod indices.
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = h * xk[i];
    const double s = g(c - dx) + g(c + dx);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  Panel p{a, b, kron * h, std::abs((kron - gauss) * h)};
  return p;
}

/// Fixed 20-point Gauss–Legendre on [a, b] in t.
inline double gauss_legendre(const MappedIntegrand& g, double a, double b) {
  using G = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  if (h <= 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = h * xs[i];
    sum += ws[i] * (xs[i] == 0.0 ? g(c) : g(c - dx) + g(c + dx));
  }
  return sum * h;
}

struct AdaptiveOutcome {
  QuadratureResult result;
  std::vector<Panel> panels;  // sorted by a
};

inline bool too_narrow(const Panel& p) {
  const double scale = std::max(std::abs(p.a), std::abs(p.b));
  const double mid = 0.5 * (p.a + p.b);
  return mid <= p.a || mid >= p.b || (p.b - p.a) <= 8.0 * std::numeric_limits<double>::epsilon() * scale;
}

inline AdaptiveOutcome adaptive(const std::function<double(double)>& fn, const Interval& iv,
                                const QuadratureConfig& cfg, std::vector<double> t_breaks_extra = {},
                                int n_uniform = 1) {
  require(cfg.rel_tol > 0 && cfg.abs_tol > 0 && cfg.max_subdivisions >= 1,
          ErrorKind::InvalidArgument, "quadrature tolerances must be positive");
  IntervalMap map(iv);
  std::vector<double> singular;
  for (double s : cfg.singular_points)
    if (iv.contains(s) || s == iv.lo || s == iv.hi) singular.push_back(s);
  MappedIntegrand g(fn, map, singular);

  std::vector<double> breaks{map.t_lo(), map.t_hi()};
  for (double s : singular)
    if (iv.contains(s)) breaks.push_back(map.t_of(s));
  for (double t : map.natural_breaks()) breaks.push_back(t);
  for (double t : t_breaks_extra)
    if (t > map.t_lo() && t < map.t_hi()) breaks.push_back(t);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (n_uniform > 1) {
    std::vector<double> refined;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
      for (int j = 0; j < n_uniform; ++j)
        refined.push_back(breaks[i] + (breaks[i + 1] - breaks[i]) * j / n_uniform);
    refined.push_back(breaks.back());
    breaks = std::move(refined);
  }
  std::vector<double> singular_t;
  for (double s : singular) singular_t.push_back(map.t_of(s));

  auto cmp = [](const Panel& l, const Panel& r) { return l.error < r.error; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
  std::vector<Panel> frozen;
  double total = 0.0, total_err = 0.0, frozen_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Panel p = gauss_kronrod_panel(g, breaks[i], breaks[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }

  int subdivisions = 0;
  bool converged = false;
  for (;;) {
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
    if (total_err <= tol) {
      converged = true;
      break;
    }
    if (heap.empty() || frozen_err > tol || subdivisions >= cfg.max_subdivisions) break;
    Panel p = heap.top();
    heap.pop();
    if (too_narrow(p)) {
      frozen_err += p.error;
      frozen.push_back(p);
      continue;
    }
    const double mid = 0.5 * (p.a + p.b);
    Panel l = gauss_kronrod_panel(g, p.a, mid);
    Panel r = gauss_kronrod_panel(g, mid, p.b);
    total += l.value + r.value - p.value;
    total_err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
    ++subdivisions;
  }

  AdaptiveOutcome out;
  out.panels = std::move(frozen);
  while (!heap.empty()) {
    out.panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(out.panels.begin(), out.panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  double sum = 0.0, err = 0.0;
  for (const auto& p : out.panels) {
    sum += p.value;
    err += p.error;
  }
  if (!std::isfinite(sum) || std::abs(sum) > kOverflowGuard)
    fail(ErrorKind::DivergentIntegral, "partial sums exceed overflow guard");

  if (!converged) {
    const auto worst = std::max_element(out.panels.begin(), out.panels.end(),
                                        [](const Panel& l, const Panel& r) { return l.error < r.error; });
    const double span = map.t_hi() - map.t_lo();
    auto touches = [&](double t) { return worst->a == t || worst->b == t; };
    bool at_edge = touches(map.t_lo()) || touches(map.t_hi());
    for (double s : singular_t) at_edge = at_edge || touches(s);
    // Near an interior singular point the narrowest panel is bounded by the
    // spacing of doubles; an integrable singularity leaves it a negligible
    // share of the total and is reported as unconverged instead.
    const bool share = std::abs(worst->value) > 1e-6 * std::abs(sum);
    if (at_edge && share && (worst->b - worst->a) < 1e-9 * span)
      fail(ErrorKind::DivergentIntegral, "non-decaying contribution at an endpoint or singular point");
  }
  out.result = QuadratureResult{sum, err, g.evaluations, converged};
  return out;
}

}  // namespace detail

/// Integral of fn over iv. A tolerance miss is reported through
/// `converged = false`, never hidden.
inline QuadratureResult integrate(const std::function<double(double)>& fn, const Interval& iv,
                                  const QuadratureConfig& cfg = {}) {
  return detail::adaptive(fn, iv, cfg).result;
}

/// Tail-integral table Y(x) = ∫_x^hi fn for a non-negative integrand.
/// Node values come from adaptive panels; between nodes, `upper`/`lower`
/// add a 20-point Gauss–Legendre piece, `interpolate_upper` uses a
/// monotone cubic through the nodes.
class CumulativeTable {
 public:
  CumulativeTable(std::function<double(double)> fn, Interval iv, std::vector<detail::Panel> panels,
                  double error)
      : fn_(std::move(fn)), map_(iv), error_(error) {
    t_.reserve(panels.size() + 1);
    for (const auto& p : panels) t_.push_back(p.a);
    t_.push_back(panels.back().b);
    lower_.assign(t_.size(), 0.0);
    upper_.assign(t_.size(), 0.0);
    for (std::size_t i = 0; i < panels.size(); ++i) lower_[i + 1] = lower_[i] + panels[i].value;
    for (std::size_t i = panels.size(); i-- > 0;) upper_[i] = upper_[i + 1] + panels[i].value;
    for (std::size_t i = 0; i < panels.size(); ++i)
      require(panels[i].value >= -std::max(1e-12, 1e3 * panels[i].error), ErrorKind::InvalidArgument,
              "cumulative table requires a non-negative integrand");
    x_.resize(t_.size());
    for (std::size_t i = 0; i < t_.size(); ++i) x_[i] = map_.x(t_[i]);
    x_.front() = iv.lo;
    x_.back() = iv.hi;
    // Interpolated in the mapped coordinate so infinite ends are representable.
    interp_ = MonotoneCubic(t_, upper_);
  }

  const Interval& interval() const { return map_.interval(); }
  std::span<const double> x() const { return x_; }
  std::span<const double> upper_nodes() const { return upper_; }
  std::span<const double> lower_nodes() const { return lower_; }
  std::size_t size() const { return x_.size(); }
  double total() const { return upper_.front(); }
  double error_bound() const { return error_; }

  /// ∫_x^hi fn.
  double upper(double x) const {
    if (x <= map_.interval().lo) return upper_.front();
    if (x >= map_.interval().hi) return 0.0;
    const double t = map_.t_of(x);
    const std::size_t k = cell(t);
    detail::MappedIntegrand g(fn_, map_, {});
    return upper_[k + 1] + detail::gauss_legendre(g, t, t_[k + 1]);
  }

  /// ∫_lo^x fn.
  double lower(double x) const {
    if (x <= map_.interval().lo) return 0.0;
    if (x >= map_.interval().hi) return lower_.back();
    const double t = map_.t_of(x);
    const std::size_t k = cell(t);
    detail::MappedIntegrand g(fn_, map_, {});
    return lower_[k] + detail::gauss_legendre(g, t_[k], t);
  }

  double interpolate_upper(double x) const {
    if (x <= map_.interval().lo) return upper_.front();
    if (x >= map_.interval().hi) return 0.0;
    return std::max(0.0, interp_(map_.t_of(x)));
  }

  /// Solves lower(x) = mass for mass in (0, total) using the shorter tail.
  double quantile(double mass) const;
  /// Solves upper(x) = tail; keeps full relative precision for tails below 1e-16.
  double upper_quantile(double tail) const;

  double t_of(double x) const { return map_.t_of(x); }
  double x_of(double t) const { return map_.x(t); }

 private:
  double solve_quantile(bool from_left, double amount) const;

  std::size_t cell(double t) const {
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t k = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    return std::min(k, t_.size() - 2);
  }

  std::function<double(double)> fn_;
  detail::IntervalMap map_;
  std::vector<double> t_, x_, lower_, upper_;
  double error_ = 0.0;
  MonotoneCubic interp_;
};

namespace detail {

/// Panels refined until each one is accurate relative to its own value, so
/// that partial sums stay accurate deep into a decaying tail. A panel at an
/// endpoint or singular point whose relative error stops improving under
/// bisection (an integrable singularity) is accepted once its absolute
/// error is negligible against the total.
inline std::vector<Panel> locally_relative_panels(const std::function<double(double)>& fn, const Interval& iv,
                                                  const QuadratureConfig& cfg, int n_uniform, double& error_sum) {
  IntervalMap map(iv);
  std::vector<double> singular;
  for (double s : cfg.singular_points)
    if (iv.contains(s) || s == iv.lo || s == iv.hi) singular.push_back(s);
  MappedIntegrand g(fn, map, singular);

  std::vector<double> breaks{map.t_lo(), map.t_hi()};
  for (double s : singular)
    if (iv.contains(s)) breaks.push_back(map.t_of(s));
  for (double t : map.natural_breaks()) breaks.push_back(t);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> edges = breaks;
  for (double s : singular) edges.push_back(map.t_of(s));

  struct Item {
    Panel p;
    double prev_rel;
  };
  std::vector<Item> stack;
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    for (int j = 0; j < n_uniform; ++j) {
      const double a = breaks[i] + (breaks[i + 1] - breaks[i]) * j / n_uniform;
      const double b = j + 1 == n_uniform ? breaks[i + 1] : breaks[i] + (breaks[i + 1] - breaks[i]) * (j + 1) / n_uniform;
      Panel p = gauss_kronrod_panel(g, a, b);
      scale += std::abs(p.value);
      stack.push_back({p, kInf});
    }
  std::reverse(stack.begin(), stack.end());
  const double abs_target = std::max(cfg.abs_tol, 1e-3 * cfg.rel_tol * scale);
  const std::size_t budget = static_cast<std::size_t>(std::max(cfg.max_subdivisions, 50 * n_uniform)) * 8;

  std::vector<Panel> done;
  error_sum = 0.0;
  auto touches_edge = [&](const Panel& p) {
    for (double e : edges)
      if (p.a == e || p.b == e) return true;
    return false;
  };
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const Panel& p = it.p;
    const double rel = p.value != 0.0 ? p.error / std::abs(p.value) : (p.error == 0.0 ? 0.0 : kInf);
    const bool edge = touches_edge(p);
    bool accept = rel <= cfg.rel_tol || p.error <= 1e-300;
    if (!accept && edge && rel > 0.5 * it.prev_rel && p.error <= abs_target) accept = true;
    if (!accept && too_narrow(p)) {
      if (edge && p.error > 1e-6 * std::max(scale, 1e-300))
        fail(ErrorKind::DivergentIntegral, "non-decaying contribution at an endpoint or singular point");
      accept = true;
    }
    if (!accept && done.size() + stack.size() > budget) {
      if (edge && p.error > abs_target)
        fail(ErrorKind::DivergentIntegral, "cumulative table did not converge at an endpoint");
      accept = true;
    }
    if (accept) {
      done.push_back(p);
      error_sum += p.error;
      continue;
    }
    const double mid = 0.5 * (p.a + p.b);
    stack.push_back({gauss_kronrod_panel(g, mid, p.b), rel});
    stack.push_back({gauss_kronrod_panel(g, p.a, mid), rel});
  }
  std::sort(done.begin(), done.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  double sum = 0.0;
  for (const auto& p : done) sum += p.value;
  if (!std::isfinite(sum) || std::abs(sum) > kOverflowGuard)
    fail(ErrorKind::DivergentIntegral, "partial sums exceed overflow guard");
  return done;
}

}  // namespace detail

/// Builds the tail table from at least n uniform panels in the mapped
/// coordinate, each refined to the configured relative tolerance.
inline CumulativeTable cumulative(std::function<double(double)> fn, const Interval& iv, int n = 16,
                                  const QuadratureConfig& cfg = {}) {
  require(n >= 16, ErrorKind::InvalidArgument, "cumulative table needs n >= 16");
  double err = 0.0;
  auto panels = detail::locally_relative_panels(fn, iv, cfg, n, err);
  return CumulativeTable(std::move(fn), iv, std::move(panels), err);
}

/// Interior sample abscissae, uniform in the mapped coordinate.
inline std::vector<double> interior_points(const Interval& iv, int n) {
  detail::IntervalMap map(iv);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n));
  const double a = map.t_lo(), b = map.t_hi();
  for (int i = 0; i < n; ++i) {
    const double x = map.x(a + (b - a) * (i + 0.5) / n);
    if (iv.contains(x)) xs.push_back(x);
  }
  return xs;
}

/// log of a positive integral, carried as a log so tiny or huge masses survive.
struct LogIntegral {
  double log_value = 0.0;
  double rel_error = 0.0;
  bool converged = true;
};

/// ∫ exp(log_fn) over iv. The integrand is shifted by its sampled maximum
/// before exponentiation. A result whose relative error stays above 1e-6
/// after the subdivision budget is treated as divergent.
inline LogIntegral integrate_log(const std::function<double(double)>& log_fn, const Interval& iv,
                                 QuadratureConfig cfg = {}) {
  double shift = -kInf;
  for (double x : interior_points(iv, 65)) {
    const double v = log_fn(x);
    if (std::isfinite(v)) shift = std::max(shift, v);
  }
  if (!std::isfinite(shift)) shift = 0.0;
  cfg.abs_tol = std::min(cfg.abs_tol, 1e-300);
  auto fn = [&](double x) {
    const double v = log_fn(x);
    if (std::isnan(v)) return v;
    return std::exp(v - shift);
  };
  const QuadratureResult r = integrate(fn, iv, cfg);
  require(r.value > 0, ErrorKind::ZeroMass, "integral of a positive integrand vanished");
  const double rel = r.error_estimate / r.value;
  if (!r.converged && rel > 1e-6) fail(ErrorKind::DivergentIntegral, "quadrature failed to converge");
  return LogIntegral{std::log(r.value) + shift, rel, r.converged};
}

inline double CumulativeTable::quantile(double mass) const {
  const double total = this->total();
  require(mass > 0 && mass < total, ErrorKind::InvalidArgument, "quantile mass outside (0, total)");
  if (mass > 0.5 * total) return upper_quantile(total - mass);
  return solve_quantile(true, mass);
}

inline double CumulativeTable::upper_quantile(double tail) const {
  const double total = this->total();
  require(tail > 0 && tail < total, ErrorKind::InvalidArgument, "quantile mass outside (0, total)");
  if (tail > 0.5 * total) return quantile(total - tail);
  return solve_quantile(false, tail);
}

inline double CumulativeTable::solve_quantile(bool from_left, double amount) const {
  const double mass = amount, tail = amount;
  std::size_t k;
  if (from_left) {
    auto it = std::upper_bound(lower_.begin(), lower_.end(), mass);
    k = std::min<std::size_t>(static_cast<std::size_t>(it - lower_.begin()) - 1, t_.size() - 2);
  } else {
    std::size_t lo = 0, hi = t_.size() - 1;  // upper_ is non-increasing
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (upper_[mid] >= tail) lo = mid;
      else hi = mid;
    }
    k = std::min(lo, t_.size() - 2);
  }
  detail::MappedIntegrand g(fn_, map_, {});
  // Residual is measured from the nearer end so tiny tail masses keep full relative precision.
  auto residual = [&](double t) {
    if (from_left) return lower_[k] + detail::gauss_legendre(g, t_[k], t) - mass;
    return tail - (upper_[k + 1] + detail::gauss_legendre(g, t, t_[k + 1]));
  };
  double a = t_[k], b = t_[k + 1];
  double fa = residual(a), fb = residual(b);
  if (fa >= 0) return map_.x(a);
  if (fb <= 0) return map_.x(b);
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(residual, a, b, fa, fb,
                                             boost::math::tools::eps_tolerance<double>(50), iters);
  return map_.x(0.5 * (r.first + r.second));
}

}  // namespace renyi
