#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "renyi/densities.hpp"
#include "renyi/error.hpp"
#include "renyi/quadrature.hpp"

namespace renyi {

/// A functional value and an absolute error bound inherited from quadrature.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Orders closer to 1 than this use the Shannon formulas.
inline constexpr double kShannonBand = 1e-9;

inline bool near_one(double v) { return std::abs(v - 1.0) < kShannonBand; }

namespace detail {

inline std::vector<double> merged_singular(std::initializer_list<const Density*> ds) {
  std::vector<double> s;
  for (const Density* d : ds)
    for (double v : d->singular_points()) s.push_back(v);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline QuadratureConfig with_singular(QuadratureConfig cfg, std::initializer_list<const Density*> ds) {
  for (double v : merged_singular(ds)) cfg.singular_points.push_back(v);
  return cfg;
}

/// (1/c) log ∫ f e^{c phi}; at c = 0 the limit ∫ f phi.
inline Estimate power_mean(const Density& f, const std::function<double(double)>& phi, double c,
                           const QuadratureConfig& cfg) {
  const DensityModel& m = f.model();
  if (std::abs(c) < kShannonBand) {
    auto fn = [&](double x) {
      const double lf = m.log_pdf(x);
      if (lf == -kInf) return 0.0;
      return std::exp(lf) * phi(x);
    };
    const QuadratureResult r = integrate(fn, f.support(), cfg);
    if (!r.converged && r.error_estimate > 1e-6 * std::max(1.0, std::abs(r.value)))
      fail(ErrorKind::DivergentIntegral, "Shannon-type integral failed to converge");
    return {r.value, r.error_estimate};
  }
  const LogIntegral L = integrate_log([&](double x) { return m.log_pdf(x) + c * phi(x); }, f.support(), cfg);
  return {L.log_value / c, L.rel_error / std::abs(c)};
}

inline double log_abs_score(const Density& f, double x) { return std::log(std::abs(f.model().score(x))); }

inline double curvature(const Density& f, double x) {
  const double s1 = f.model().score(x);
  return 1.0 + f.model().score_slope(x) / (s1 * s1);
}

inline void need_order(const Density& f, int order) {
  if (f.max_order() < order)
    fail(ErrorKind::NotDifferentiable, f.spec() + " has no derivative of order " + std::to_string(order));
}

}  // namespace detail

// Rényi-type functionals, all in log scale.

inline Estimate shannon_entropy(const Density& f, const QuadratureConfig& cfg = {}) {
  const auto& m = f.model();
  return detail::power_mean(f, [&](double x) { return -m.log_pdf(x); }, 0.0, detail::with_singular(cfg, {&f}));
}

inline Estimate kl_divergence(const Density& f, const Density& g, const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  const auto &mf = f.model(), &mg = g.model();
  return detail::power_mean(f, [&](double x) { return mf.log_pdf(x) - mg.log_pdf(x); }, 0.0,
                            detail::with_singular(cfg, {&f, &g}));
}

inline Estimate shannon_cross_entropy(const Density& f, const Density& g, const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  const auto& mg = g.model();
  return detail::power_mean(f, [&](double x) { return -mg.log_pdf(x); }, 0.0, detail::with_singular(cfg, {&f, &g}));
}

/// (1/(1-α)) log ∫ f^α.
inline Estimate renyi_entropy(const Density& f, double alpha, const QuadratureConfig& cfg = {}) {
  if (near_one(alpha)) return shannon_entropy(f, cfg);
  const auto& m = f.model();
  return detail::power_mean(f, [&](double x) { return -m.log_pdf(x); }, 1.0 - alpha,
                            detail::with_singular(cfg, {&f}));
}

/// exp(R_α).
inline double entropy_power(const Density& f, double alpha, const QuadratureConfig& cfg = {}) {
  return std::exp(renyi_entropy(f, alpha, cfg).value);
}

/// (1/(β-1)) log ∫ f^β g^{1-β}.
inline Estimate renyi_divergence(const Density& f, const Density& g, double beta, const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  if (near_one(beta)) return kl_divergence(f, g, cfg);
  const auto &mf = f.model(), &mg = g.model();
  return detail::power_mean(f, [&](double x) { return mf.log_pdf(x) - mg.log_pdf(x); }, beta - 1.0,
                            detail::with_singular(cfg, {&f, &g}));
}

/// (1/(1-γ)) log ∫ f g^{γ-1}.
inline Estimate renyi_cross_entropy(const Density& f, const Density& g, double gamma,
                                    const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  if (near_one(gamma)) return shannon_cross_entropy(f, g, cfg);
  const auto& mg = g.model();
  return detail::power_mean(f, [&](double x) { return -mg.log_pdf(x); }, 1.0 - gamma,
                            detail::with_singular(cfg, {&f, &g}));
}

/// (1/(1-γ)) log ∫ f^{1+(ξ-1)(γ-1)} g^{γ-1}. Carried in log scale so that it
/// adds to the entropies it is compared with.
inline Estimate escort_cross_entropy(const Density& f, const Density& g, double gamma, double xi,
                                     const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  const auto &mf = f.model(), &mg = g.model();
  return detail::power_mean(f, [&](double x) { return -((xi - 1.0) * mf.log_pdf(x) + mg.log_pdf(x)); },
                            near_one(gamma) ? 0.0 : 1.0 - gamma, detail::with_singular(cfg, {&f, &g}));
}

/// (1/(1-a)) log ∫ f (f^{b-1} g / h^b)^{a-1}.
inline Estimate cross_divergence(const Density& f, const Density& g, const Density& h, double a, double b,
                                 const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  require_same_support(f, h);
  const auto &mf = f.model(), &mg = g.model(), &mh = h.model();
  return detail::power_mean(
      f, [&](double x) { return -((b - 1.0) * mf.log_pdf(x) + mg.log_pdf(x) - b * mh.log_pdf(x)); },
      near_one(a) ? 0.0 : 1.0 - a, detail::with_singular(cfg, {&f, &g, &h}));
}

// Raw integrals behind the Fisher- and moment-type functionals. Each returns
// the logarithm of the integral so the checkers can stay in log scale.
namespace integrals {

/// ∫ f^{1+p(λ-2)} |f'|^p.
inline LogIntegral fisher(const Density& f, double p, double lambda, const QuadratureConfig& cfg = {}) {
  detail::need_order(f, 1);
  return integrate_log(
      [&](double x) { return (1.0 + p * (lambda - 1.0)) * f.model().log_pdf(x) + p * detail::log_abs_score(f, x); },
      f.support(), detail::with_singular(cfg, {&f}));
}

/// ∫ f^{1+(a-1)c} g^{-c} |f'|^{bc}.
inline LogIntegral cross_fisher(const Density& f, const Density& g, double a, double b, double c,
                                const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  detail::need_order(f, 1);
  return integrate_log(
      [&](double x) {
        return (1.0 + (a - 1.0) * c + b * c) * f.model().log_pdf(x) - c * g.model().log_pdf(x) +
               b * c * detail::log_abs_score(f, x);
      },
      f.support(), detail::with_singular(cfg, {&f, &g}));
}

/// ∫ f^{1+p(λ-2)} |f'|^q |pλ/(p-q) - f f''/f'^2|^p.
inline LogIntegral down_fisher(const Density& f, double p, double q, double lambda, const QuadratureConfig& cfg = {}) {
  require(p != q, ErrorKind::InvalidArgument, "down-Fisher requires p != q");
  detail::need_order(f, 2);
  const double shift = p * lambda / (p - q);
  return integrate_log(
      [&](double x) {
        const double lf = f.model().log_pdf(x);
        return (1.0 + p * (lambda - 2.0)) * lf + q * (lf + detail::log_abs_score(f, x)) +
               p * std::log(std::abs(shift - detail::curvature(f, x)));
      },
      f.support(), detail::with_singular(cfg, {&f}));
}

/// ∫ f [|f'|^{a-b} f^{-aξ-2b(1-ξ)} (f/g) |ξ - f f''/f'^2|^b]^c.
inline LogIntegral cross_down_fisher(const Density& f, const Density& g, double a, double b, double c, double xi,
                                     const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  detail::need_order(f, 2);
  return integrate_log(
      [&](double x) {
        const double lf = f.model().log_pdf(x);
        const double inner = (a - b) * (lf + detail::log_abs_score(f, x)) +
                             (-a * xi - 2.0 * b * (1.0 - xi)) * lf + lf - g.model().log_pdf(x) +
                             b * std::log(std::abs(xi - detail::curvature(f, x)));
        return lf + c * inner;
      },
      f.support(), detail::with_singular(cfg, {&f, &g}));
}

/// ∫ f |x|^p.
inline LogIntegral moment(const Density& f, double p, const QuadratureConfig& cfg = {}) {
  auto c = detail::with_singular(cfg, {&f});
  if (f.support().contains(0.0)) c.singular_points.push_back(0.0);
  return integrate_log([&](double x) { return f.model().log_pdf(x) + p * std::log(std::abs(x)); }, f.support(), c);
}

/// ∫ f^{2-γ} g^{γ-1} |x|^p.
inline LogIntegral cross_moment(const Density& f, const Density& g, double p, double gamma,
                                const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  auto c = detail::with_singular(cfg, {&f, &g});
  if (f.support().contains(0.0)) c.singular_points.push_back(0.0);
  return integrate_log(
      [&](double x) {
        return (2.0 - gamma) * f.model().log_pdf(x) + (gamma - 1.0) * g.model().log_pdf(x) +
               p * std::log(std::abs(x));
      },
      f.support(), c);
}

/// ∫ f e^{s x}.
inline LogIntegral exp_moment(const Density& f, double s, const QuadratureConfig& cfg = {}) {
  return integrate_log([&](double x) { return f.model().log_pdf(x) + s * x; }, f.support(),
                       detail::with_singular(cfg, {&f}));
}

/// ∫ f^{2-γ} g^{γ-1} e^{(1-γ)x}.
inline LogIntegral exp_cross_moment(const Density& f, const Density& g, double gamma,
                                    const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  return integrate_log(
      [&](double x) {
        return (2.0 - gamma) * f.model().log_pdf(x) + (gamma - 1.0) * g.model().log_pdf(x) + (1.0 - gamma) * x;
      },
      f.support(), detail::with_singular(cfg, {&f, &g}));
}

/// ∫ f^{1-λ} g^λ T^p with T the upper tail of f.
inline LogIntegral cross_upper_moment(const UpperTail& tail, const Density& g, double p, double lambda,
                                      const QuadratureConfig& cfg = {}) {
  const Density& f = tail.base();
  require_same_support(f, g);
  return integrate_log(
      [&](double x) {
        return (1.0 - lambda) * f.model().log_pdf(x) + lambda * g.model().log_pdf(x) + p * tail.log_value(x);
      },
      f.support(), detail::with_singular(cfg, {&f, &g}));
}

/// ∫ f T^p.
inline LogIntegral upper_moment(const UpperTail& tail, double p, const QuadratureConfig& cfg = {}) {
  return cross_upper_moment(tail, tail.base(), p, 0.0, cfg);
}

}  // namespace integrals

// Fisher-type functionals.

struct FisherValue {
  double F = 0.0;
  double phi = 0.0;
  double error = 0.0;  // absolute, on F
};

/// F = ∫ f^{1+p(λ-2)} |f'|^p and phi = F^{1/(pλ)}.
inline FisherValue generalized_fisher(const Density& f, double p, double lambda, const QuadratureConfig& cfg = {}) {
  require(p * lambda != 0.0, ErrorKind::InvalidArgument, "Fisher information requires p·λ != 0");
  const LogIntegral L = integrals::fisher(f, p, lambda, cfg);
  const double F = std::exp(L.log_value);
  return {F, std::exp(L.log_value / (p * lambda)), F * L.rel_error};
}

/// (∫ f^{1+(a-1)c} g^{-c} |f'|^{bc})^{1/c}.
inline Estimate cross_fisher(const Density& f, const Density& g, double a, double b, double c,
                             const QuadratureConfig& cfg = {}) {
  require(c != 0.0, ErrorKind::InvalidArgument, "cross-Fisher requires c != 0");
  const LogIntegral L = integrals::cross_fisher(f, g, a, b, c, cfg);
  const double v = std::exp(L.log_value / c);
  return {v, v * L.rel_error / std::abs(c)};
}

inline Estimate down_fisher(const Density& f, double p, double q, double lambda, const QuadratureConfig& cfg = {}) {
  const LogIntegral L = integrals::down_fisher(f, p, q, lambda, cfg);
  const double v = std::exp(L.log_value);
  return {v, v * L.rel_error};
}

/// Returned as the bare integral, without an outer root.
inline Estimate cross_down_fisher(const Density& f, const Density& g, double a, double b, double c, double xi,
                                  const QuadratureConfig& cfg = {}) {
  const LogIntegral L = integrals::cross_down_fisher(f, g, a, b, c, xi, cfg);
  const double v = std::exp(L.log_value);
  return {v, v * L.rel_error};
}

// Moment-type functionals.

/// (∫ f |x|^p)^{1/p}.
inline Estimate deviation(const Density& f, double p, const QuadratureConfig& cfg = {}) {
  require(p != 0.0, ErrorKind::InvalidArgument, "deviation requires p != 0");
  const LogIntegral L = integrals::moment(f, p, cfg);
  const double v = std::exp(L.log_value / p);
  return {v, v * L.rel_error / std::abs(p)};
}

/// (∫ f^{2-γ} g^{γ-1} |x|^p)^{1/p}.
inline Estimate cross_deviation(const Density& f, const Density& g, double p, double gamma,
                                const QuadratureConfig& cfg = {}) {
  require(p != 0.0, ErrorKind::InvalidArgument, "cross-deviation requires p != 0");
  const LogIntegral L = integrals::cross_moment(f, g, p, gamma, cfg);
  const double v = std::exp(L.log_value / p);
  return {v, v * L.rel_error / std::abs(p)};
}

/// (∫ f^{2-γ} g^{γ-1} e^{(1-γ)x})^{1/(1-γ)}.
inline Estimate exp_cross_deviation(const Density& f, const Density& g, double gamma,
                                    const QuadratureConfig& cfg = {}) {
  require(gamma != 1.0, ErrorKind::InvalidArgument, "exponential cross-deviation requires γ != 1");
  const LogIntegral L = integrals::exp_cross_moment(f, g, gamma, cfg);
  const double v = std::exp(L.log_value / (1.0 - gamma));
  return {v, v * L.rel_error / std::abs(1.0 - gamma)};
}

/// ∫ f e^{s x}.
inline Estimate exp_moment(const Density& f, double s, const QuadratureConfig& cfg = {}) {
  const LogIntegral L = integrals::exp_moment(f, s, cfg);
  const double v = std::exp(L.log_value);
  return {v, v * L.rel_error};
}

struct UpperMomentValue {
  double M = 0.0;
  double m = 0.0;
  double error = 0.0;  // absolute, on M
};

/// M = ∫ f T^p with T(x) = ∫_x^hi |(a-2)t|^{1/(a-2)} f, and m = M^{(a-2)/p}.
inline UpperMomentValue upper_moment(const Density& f, double p, double a, const QuadratureConfig& cfg = {}) {
  require(p != 0.0, ErrorKind::InvalidArgument, "upper moment requires p != 0");
  const UpperTail tail(f, a);
  const LogIntegral L = integrals::upper_moment(tail, p, cfg);
  const double M = std::exp(L.log_value);
  return {M, std::exp(L.log_value * (a - 2.0) / p), M * L.rel_error};
}

/// M = ∫ f^{1-λ} g^λ T^p with T built from f and index b, m = M^{(b-2)/p}.
inline UpperMomentValue cross_upper_moment(const Density& f, const Density& g, double p, double lambda, double b,
                                           const QuadratureConfig& cfg = {}) {
  require(p != 0.0, ErrorKind::InvalidArgument, "upper moment requires p != 0");
  const UpperTail tail(f, b);
  const LogIntegral L = integrals::cross_upper_moment(tail, g, p, lambda, cfg);
  const double M = std::exp(L.log_value);
  return {M, std::exp(L.log_value * (b - 2.0) / p), M * L.rel_error};
}

}  // namespace renyi
