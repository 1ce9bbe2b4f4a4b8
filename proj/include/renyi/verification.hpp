#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "renyi/densities.hpp"
#include "renyi/error.hpp"
#include "renyi/inequalities.hpp"

namespace renyi {

// Discrete oracle. Sums replace integrals, so the check involves no quadrature.

/// Positive weights, not necessarily normalized.
struct DiscreteDistribution {
  std::vector<double> weights;
};

/// Oriented gap of
///   (1/(γ-1)) log Σ u v^{γ-1} + (1/(1-α)) log Σ u^α  ≤  (1/(1-β)) log Σ u^β v^{1-β}
/// (reversed when α < β), accumulated in long double.
inline double discrete_rrr_check(const DiscreteDistribution& u, const DiscreteDistribution& v, double alpha,
                                 double beta) {
  require(u.weights.size() == v.weights.size() && u.weights.size() >= 2, ErrorKind::InvalidArgument,
          "discrete check needs equal lengths of at least 2");
  const auto t = solve_triple(alpha, beta);
  using L = long double;
  // γ - 1 from α and β directly: near α = 1 the rounded γ would carry a
  // relative error in γ - 1 far above long double precision.
  const L a = alpha, b = beta, gm1 = (a - 1) * (1 - b) / (a - b);
  const std::size_t n = u.weights.size();
  std::vector<L> t_cross(n), t_pow(n), t_div(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(u.weights[i] > 0 && v.weights[i] > 0, ErrorKind::InvalidArgument, "discrete weights must be positive");
    const L lu = std::log(static_cast<L>(u.weights[i])), lv = std::log(static_cast<L>(v.weights[i]));
    t_cross[i] = lu + gm1 * lv;
    t_pow[i] = a * lu;
    t_div[i] = b * lu + (1 - b) * lv;
  }
  auto log_sum = [](const std::vector<L>& x) {
    const L m = *std::max_element(x.begin(), x.end());
    L s = 0;
    for (L xi : x) s += std::exp(xi - m);
    return m + std::log(s);
  };
  const L lhs = log_sum(t_cross) / gm1 + log_sum(t_pow) / (1 - a);
  const L rhs = log_sum(t_div) / (1 - b);
  return static_cast<double>(t.reversed() ? lhs - rhs : rhs - lhs);
}

/// v ∝ u^k, the discrete equality case. Raises when a weight of v is not
/// representable as a normal double.
inline DiscreteDistribution discrete_witness(const DiscreteDistribution& u, double alpha, double beta) {
  const double k = witness_exponents(solve_triple(alpha, beta)).k;
  std::vector<double> lv;
  for (double w : u.weights) lv.push_back(k * std::log(w));
  const double top = *std::max_element(lv.begin(), lv.end());
  DiscreteDistribution v;
  double s = 0;
  for (double l : lv) {
    const double w = std::exp(l - top);
    require(w >= std::numeric_limits<double>::min(), ErrorKind::DegenerateParameters,
            "escort weight underflows for k=" + detail::fmt(k));
    v.weights.push_back(w);
    s += w;
  }
  for (double& w : v.weights) w /= s;
  return v;
}

// Seeded sampling.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for item i of a run seeded with seed.
inline std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t i) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ i));
}

inline double draw_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(draw_uniform(rng, std::log(lo), std::log(hi)));
}

/// α, β in [0.15, 3], each at least 1e-3 from 1 and from each other.
inline std::pair<double, double> sample_orders(std::mt19937_64& rng) {
  for (;;) {
    const double a = draw_uniform(rng, 0.15, 3.0), b = draw_uniform(rng, 0.15, 3.0);
    if (std::abs(a - 1.0) >= 1e-3 && std::abs(b - 1.0) >= 1e-3 && std::abs(a - b) >= 1e-3) return {a, b};
  }
}

struct Instance {
  std::size_t index = 0;
  TheoremId theorem = TheoremId::RRR;
  Density f = exponential(1.0);
  Density g = exponential(1.0);
  double alpha = 2.0, beta = 0.0;
  Extras extras;
};

using InstanceSampler = std::function<Instance(std::mt19937_64&)>;

namespace sampling {

/// Exponential, Weibull or gamma on (0, inf), rates and shapes log-uniform in [0.2, 5].
inline Density positive_family(std::mt19937_64& rng) {
  const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
  if (kind == 0) return exponential(log_uniform(rng, 0.2, 5.0));
  if (kind == 1) return weibull(log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.2, 5.0));
  return generalized_gamma(log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.2, 5.0), 1.0);
}

/// Decreasing and differentiable on (0, inf).
inline Density decreasing_family(std::mt19937_64& rng) {
  const int kind = std::uniform_int_distribution<int>(0, 3)(rng);
  if (kind == 0) return exponential(log_uniform(rng, 0.2, 5.0));
  if (kind == 1) return weibull(draw_uniform(rng, 0.2, 1.0), log_uniform(rng, 0.2, 5.0));
  if (kind == 2) return generalized_gamma(log_uniform(rng, 0.2, 5.0), draw_uniform(rng, 0.2, 1.0), 1.0);
  return half_generalized_normal(log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.2, 5.0));
}

/// Twice differentiable, decreasing, with f f''/f'^2 bounded above.
inline Density curvature_bounded_family(std::mt19937_64& rng) {
  const int kind = std::uniform_int_distribution<int>(0, 1)(rng);
  if (kind == 0) return exponential(log_uniform(rng, 0.2, 5.0));
  return half_generalized_normal(draw_uniform(rng, 1.0, 4.0), log_uniform(rng, 0.2, 5.0));
}

inline std::pair<Density, Density> pareto_pair(std::mt19937_64& rng) {
  const double xm = log_uniform(rng, 0.2, 5.0);
  return {pareto(xm, log_uniform(rng, 0.2, 5.0)), pareto(xm, log_uniform(rng, 0.2, 5.0))};
}

}  // namespace sampling

/// Default sampler per theorem: families on (0, inf) (or Pareto pairs sharing
/// xm), orders from sample_orders, and extras drawn from the ranges where the
/// theorem's hypotheses can hold.
inline InstanceSampler standard_sampler(TheoremId id) {
  return [id](std::mt19937_64& rng) {
    Instance in;
    in.theorem = id;
    std::tie(in.alpha, in.beta) = sample_orders(rng);
    const bool use_pareto = std::uniform_int_distribution<int>(0, 3)(rng) == 0;
    auto pair = [&](bool decreasing) -> std::pair<Density, Density> {
      if (use_pareto) return sampling::pareto_pair(rng);
      if (decreasing) return {sampling::decreasing_family(rng), sampling::decreasing_family(rng)};
      return {sampling::positive_family(rng), sampling::positive_family(rng)};
    };
    auto shape_a = [&] {
      for (;;) {
        const double a = draw_uniform(rng, -2.0, 5.0);
        if (std::abs(a - 2.0) >= 0.2) return a;
      }
    };
    switch (id) {
      case TheoremId::RRR:
      case TheoremId::UpExp: std::tie(in.f, in.g) = pair(false); break;
      case TheoremId::Escort:
        std::tie(in.f, in.g) = pair(false);
        in.extras.xi = draw_uniform(rng, -2.0, 3.0);
        break;
      case TheoremId::RelEscort: {
        std::tie(in.f, in.g) = pair(false);
        in.extras.h = use_pareto ? pareto(in.f.support().lo, log_uniform(rng, 0.2, 5.0))
                                 : sampling::positive_family(rng);
        in.extras.xi = draw_uniform(rng, -2.0, 3.0);
        break;
      }
      case TheoremId::BipDown:
        std::tie(in.f, in.g) = pair(true);
        for (;;) {
          in.extras.a = draw_uniform(rng, -2.0, 3.0);
          in.extras.b = draw_uniform(rng, -2.0, 2.0);
          if (std::abs(in.extras.b) >= 0.1 && std::abs(in.extras.a - 2.0 * in.extras.b) >= 0.1) break;
        }
        break;
      case TheoremId::DownFisher: {
        if (use_pareto) {
          std::tie(in.f, in.g) = sampling::pareto_pair(rng);
        } else {
          in.f = sampling::curvature_bounded_family(rng);
          in.g = sampling::decreasing_family(rng);
        }
        in.extras.xi = sup_curvature_ratio(in.f) + draw_uniform(rng, 0.05, 2.0);
        for (;;) {
          in.extras.a = draw_uniform(rng, -2.0, 3.0);
          in.extras.b = draw_uniform(rng, -2.0, 2.0);
          if (std::abs(in.extras.b) >= 0.1 && std::abs(in.extras.a - 2.0 * in.extras.b) >= 0.1) break;
        }
        break;
      }
      case TheoremId::Up:
        std::tie(in.f, in.g) = pair(false);
        in.extras.a = shape_a();
        break;
      case TheoremId::UpperMom:
        std::tie(in.f, in.g) = pair(false);
        in.extras.a = shape_a();
        in.extras.b = std::uniform_int_distribution<int>(0, 1)(rng) ? draw_uniform(rng, 2.5, 5.0) : draw_uniform(rng, -2.0, 0.8);
        break;
    }
    return in;
  };
}

inline CheckReport run_instance(const Instance& in, const CheckOptions& opt = {}) {
  return check(in.theorem, in.f, in.g, in.alpha, in.beta, in.extras, opt);
}

struct SearchResult {
  std::size_t n = 0;
  std::size_t evaluated = 0;
  std::size_t errors = 0;  // rejected draws, resampled
  std::size_t warnings = 0;
  std::size_t failures = 0;
  double worst_gap = std::numeric_limits<double>::infinity();
  std::optional<Instance> worst_case;
  std::optional<CheckReport> worst_report;
  std::vector<CheckReport> reports;
};

struct Draw {
  Instance instance;
  CheckReport report;
};

/// Item i of a seeded run: an instance whose evaluation raises is counted in
/// rejected and redrawn from the same stream, up to 20 times.
inline std::optional<Draw> evaluate_draw(const InstanceSampler& sampler, std::uint64_t seed, std::size_t i,
                                         const CheckOptions& opt, std::size_t& rejected) {
  auto rng = stream_for(seed, i);
  for (int attempt = 0; attempt < 20; ++attempt) {
    try {
      Instance in = sampler(rng);
      in.index = i;
      CheckReport r = run_instance(in, opt);
      return Draw{std::move(in), std::move(r)};
    } catch (const Error&) {
      ++rejected;
    }
  }
  return std::nullopt;
}

/// n seeded evaluations. Conditioning-flagged checks are counted as warnings
/// and kept out of worst_gap; ties keep the lowest index.
inline SearchResult random_search_violations(const InstanceSampler& sampler, std::size_t n, std::uint64_t seed,
                                             const CheckOptions& opt = {}, bool keep_reports = false) {
  SearchResult res;
  res.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    auto d = evaluate_draw(sampler, seed, i, opt, res.errors);
    if (!d) continue;
    ++res.evaluated;
    const CheckReport& r = d->report;
    if (r.conditioning_warning) {
      ++res.warnings;
    } else {
      if (!r.pass) ++res.failures;
      if (r.gap < res.worst_gap) {
        res.worst_gap = r.gap;
        res.worst_case = d->instance;
        res.worst_report = r;
      }
    }
    if (keep_reports) res.reports.push_back(std::move(d->report));
  }
  return res;
}

// Derivative-free sharpness probes.

struct OptimizationResult {
  std::vector<double> best_params;
  double best_gap = 0.0;
  double initial_gap = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  int max_evaluations = 2000;
  double f_tol = 1e-13;
  double x_tol = 1e-9;
  double initial_step = 0.1;  // relative to each start coordinate
};

/// Nelder–Mead simplex minimization. Non-finite objective values (invalid
/// candidates) rank last.
inline OptimizationResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                                      std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  const std::size_t n = x0.size();
  require(n >= 1, ErrorKind::InvalidArgument, "nothing to optimize");
  OptimizationResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = fn(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  std::vector<std::vector<double>> s(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += x0[i] != 0.0 ? opt.initial_step * x0[i] : opt.initial_step;
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(s[i]);
  out.initial_gap = fv[0];

  std::vector<std::size_t> idx(n + 1);
  auto order = [&] {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };
  auto combine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> r(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = c[j] + t * (w[j] - c[j]);
    return r;
  };
  while (out.evaluations < opt.max_evaluations) {
    order();
    const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];
    double size = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        size = std::max(size, std::abs(s[idx[i]][j] - s[best][j]) / std::max(1.0, std::abs(s[best][j])));
    if (std::isfinite(fv[worst]) && fv[worst] - fv[best] <= opt.f_tol && size <= opt.x_tol) {
      out.converged = true;
      break;
    }
    if (size <= 1e-15) {
      out.converged = std::isfinite(fv[best]);
      break;
    }
    ++out.iterations;
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[j] += s[idx[i]][j] / static_cast<double>(n);
    const auto xr = combine(c, s[worst], -1.0);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const auto xe = combine(c, s[worst], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        s[worst] = xe;
        fv[worst] = fe;
      } else {
        s[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      s[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const auto xc = combine(c, outside ? xr : s[worst], 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      s[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      s[idx[i]] = combine(s[best], s[idx[i]], 0.5);
      fv[idx[i]] = eval(s[idx[i]]);
    }
  }
  order();
  out.best_params = s[idx[0]];
  out.best_gap = fv[idx[0]];
  return out;
}

/// A box-bounded parametric family of candidate g, built relative to f so
/// that supports can be matched.
struct ParametricFamily {
  std::string name;
  std::vector<std::string> param_names;
  std::vector<double> lower, upper;
  std::function<Density(const std::vector<double>&, const Density& f)> make;
};

inline ParametricFamily exponential_family() {
  return {"exponential", {"rate"}, {1e-3}, {1e3}, [](const std::vector<double>& p, const Density&) {
            return exponential(p[0]);
          }};
}

inline ParametricFamily gaussian_family() {
  return {"gaussian", {"mu", "sigma"}, {-1e3, 1e-3}, {1e3, 1e3}, [](const std::vector<double>& p, const Density&) {
            return gaussian(p[0], p[1]);
          }};
}

/// Pareto with xm taken from the lower end of f's support.
inline ParametricFamily pareto_family() {
  return {"pareto", {"alpha"}, {1e-3}, {1e3}, [](const std::vector<double>& p, const Density& f) {
            return pareto(f.support().lo, p[0]);
          }};
}

inline ParametricFamily weibull_family() {
  return {"weibull", {"shape", "scale"}, {1e-3, 1e-3}, {1e3, 1e3}, [](const std::vector<double>& p, const Density&) {
            return weibull(p[0], p[1]);
          }};
}

inline ParametricFamily family_by_name(const std::string& name) {
  if (name == "exponential") return exponential_family();
  if (name == "gaussian" || name == "normal") return gaussian_family();
  if (name == "pareto") return pareto_family();
  if (name == "weibull") return weibull_family();
  fail(ErrorKind::ParseError, "unknown candidate family '" + name + "'");
}

/// Minimizes the oriented gap over the family's parameters with Nelder–Mead.
/// Candidates outside the box or failing to evaluate score +inf.
inline OptimizationResult minimize_gap(TheoremId id, const Density& f, const ParametricFamily& fam, double alpha,
                                       double beta, const Extras& e, std::vector<double> start,
                                       const NelderMeadOptions& nm = {}, const CheckOptions& opt = {}) {
  require(start.size() == fam.lower.size(), ErrorKind::InvalidArgument, "start point has the wrong dimension");
  auto objective = [&](const std::vector<double>& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!(p[i] >= fam.lower[i] && p[i] <= fam.upper[i])) return std::numeric_limits<double>::infinity();
    try {
      return check(id, f, fam.make(p, f), alpha, beta, e, opt).gap;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  return nelder_mead(objective, std::move(start), nm);
}

}  // namespace renyi
