#include <gtest/gtest.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "renyi/densities.hpp"
#include "renyi/functionals.hpp"
#include "renyi/inequalities.hpp"

using namespace renyi;

namespace {

// Independent reference quadrature (GSL QAGS/QAGIU/QAGI).
double oracle(const std::function<double(double)>& fn, double lo, double hi) {
  gsl_set_error_handler_off();
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(4000);
  gsl_function F;
  F.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
  F.params = const_cast<std::function<double(double)>*>(&fn);
  double r = 0, e = 0;
  if (std::isinf(lo) && std::isinf(hi)) gsl_integration_qagi(&F, 1e-13, 1e-12, 4000, w, &r, &e);
  else if (std::isinf(hi)) gsl_integration_qagiu(&F, lo, 1e-13, 1e-12, 4000, w, &r, &e);
  else gsl_integration_qags(&F, lo, hi, 1e-13, 1e-12, 4000, w, &r, &e);
  gsl_integration_workspace_free(w);
  return r;
}

double weibull_pdf(double x, double k, double s) { return (k / s) * std::pow(x / s, k - 1) * std::exp(-std::pow(x / s, k)); }
double gamma2_pdf(double x) { return x * std::exp(-x / 0.8) / 0.64; }

// Weibull(1.7, 1.2) and gamma(shape 2, scale 0.8); reference values frozen
// from a 30-digit quadrature and re-checked against the GSL oracle.
const Density W = weibull(1.7, 1.2);
const Density G = generalized_gamma(0.8, 2.0, 1.0);
constexpr double kRenyiHalfW = 1.06812638936874254590;
constexpr double kShannonW = 0.88937034422065070199;
constexpr double kDiv07WG = 0.13246411321345789146;
constexpr double kKLWG = 0.15992637651862786020;
constexpr double kCross15WG = 1.02028500304708276999;
constexpr double kEscort15xi2WG = 1.76109890137074512964;
constexpr double kCrossDivExp = -0.18460228595514320247;

std::vector<Density> closed_families() {
  return {exponential(0.7), gaussian(0.4, 1.6), weibull(1.7, 1.2), generalized_gamma(0.8, 2.0, 1.0),
          half_generalized_normal(2.0, 1.3), rayleigh(0.9), uniform(-0.5, 2.0)};
}

}  // namespace

TEST(RenyiEntropy, ClosedForms) {
  EXPECT_NEAR(renyi_entropy(uniform(0.0, 1.0), 2.0).value, 0.0, 1e-12);
  EXPECT_NEAR(renyi_entropy(uniform(0.0, 1.0), 0.3).value, 0.0, 1e-12);
  EXPECT_NEAR(renyi_entropy(exponential(1.0), 2.0).value, std::log(2.0), 1e-10);
  // log(σ√(2π)) + log α / (2(α-1))
  const double g2 = std::log(std::sqrt(2.0 * std::numbers::pi)) + std::log(2.0) / 2.0;
  EXPECT_NEAR(renyi_entropy(gaussian(0.0, 1.0), 2.0).value, g2, 1e-10);
  EXPECT_NEAR(g2, 1.265512, 1e-6);
  EXPECT_NEAR(entropy_power(exponential(1.0), 2.0), 2.0, 1e-9);
}

TEST(RenyiEntropy, FrozenWeibullValue) {
  const double ref = std::log(oracle([](double x) { return std::sqrt(weibull_pdf(x, 1.7, 1.2)); }, 0, kInf)) / 0.5;
  EXPECT_NEAR(ref, kRenyiHalfW, 1e-9);
  EXPECT_NEAR(renyi_entropy(W, 0.5).value, kRenyiHalfW, 1e-9);
}

TEST(RenyiEntropy, OrderOneRoutesToShannon) {
  EXPECT_EQ(renyi_entropy(W, 1.0).value, shannon_entropy(W).value);
  EXPECT_NEAR(shannon_entropy(W).value, kShannonW, 1e-9);
}

TEST(RenyiEntropy, NonIntegrablePowerRaises) {
  // ∫ f^{1/4} diverges for Pareto(1, 1)
  EXPECT_THROW(renyi_entropy(pareto(1.0, 1.0), 0.25), Error);
}

TEST(Shannon, ClosedForms) {
  EXPECT_NEAR(shannon_entropy(uniform(0.0, 1.0)).value, 0.0, 1e-12);
  EXPECT_NEAR(kl_divergence(exponential(2.0), exponential(1.0)).value, std::log(2.0) - 0.5, 1e-10);
  for (const auto& f : closed_families()) EXPECT_NEAR(kl_divergence(f, f).value, 0.0, 1e-12) << f.spec();
  EXPECT_NEAR(kl_divergence(W, G).value, kKLWG, 1e-9);
}

TEST(Shannon, SupportMismatchRaises) {
  EXPECT_THROW(kl_divergence(exponential(1.0), gaussian(0.0, 1.0)), Error);
  EXPECT_THROW(renyi_divergence(exponential(1.0), pareto(1.0, 2.0), 0.5), Error);
}

TEST(ShannonProperty, EntropyPlusDivergenceIsCrossEntropy) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.3, 3.0);
  for (int i = 0; i < 50; ++i) {
    const Density f = i % 2 ? weibull(U(rng), U(rng)) : exponential(U(rng));
    const Density g = i % 3 ? generalized_gamma(U(rng), U(rng), 1.0) : exponential(U(rng));
    const double lhs = shannon_entropy(f).value + kl_divergence(f, g).value;
    EXPECT_NEAR(lhs, shannon_cross_entropy(f, g).value, 1e-8) << f.spec() << " " << g.spec();
  }
}

TEST(RenyiDivergence, ClosedForms) {
  EXPECT_NEAR(renyi_divergence(exponential(2.0), exponential(1.0), 2.0).value, std::log(4.0 / 3.0), 1e-10);
  for (const auto& f : closed_families())
    for (double b : {0.3, 2.0}) EXPECT_NEAR(renyi_divergence(f, f, b).value, 0.0, 1e-10) << f.spec();
  EXPECT_NEAR(renyi_divergence(W, G, 0.0).value, 0.0, 1e-10);
  EXPECT_EQ(renyi_divergence(W, G, 1.0).value, kl_divergence(W, G).value);
}

TEST(RenyiDivergence, FrozenValue) {
  const double ref =
      std::log(oracle([](double x) { return std::pow(weibull_pdf(x, 1.7, 1.2), 0.7) * std::pow(gamma2_pdf(x), 0.3); },
                      0, kInf)) /
      (0.7 - 1.0);
  EXPECT_NEAR(ref, kDiv07WG, 1e-9);
  EXPECT_NEAR(renyi_divergence(W, G, 0.7).value, kDiv07WG, 1e-9);
}

TEST(CrossEntropy, ClosedForms) {
  EXPECT_NEAR(renyi_cross_entropy(exponential(1.0), exponential(0.5), 1.5).value,
              -2.0 * std::log(std::sqrt(0.5) * 0.8), 1e-10);
  EXPECT_NEAR(renyi_cross_entropy(exponential(1.0), exponential(0.5), 1.5).value, 1.139434, 1e-6);
  EXPECT_NEAR(renyi_cross_entropy(exponential(1.0), exponential(2.0), 1.5).value, std::log(2.0), 1e-10);
  EXPECT_NEAR(renyi_cross_entropy(W, G, 1.5).value, kCross15WG, 1e-9);
}

TEST(CrossEntropy, EscortForm) {
  EXPECT_NEAR(escort_cross_entropy(W, G, 1.5, 2.0).value, kEscort15xi2WG, 1e-9);
  for (double g : {0.4, 1.7})
    EXPECT_NEAR(escort_cross_entropy(W, G, g, 1.0).value, renyi_cross_entropy(W, G, g).value, 1e-12);
  for (double g : {0.4, 1.7})
    for (double xi : {-0.5, 0.5, 2.0})
      EXPECT_NEAR(escort_cross_entropy(uniform(0.0, 1.0), uniform(0.0, 1.0), g, xi).value, 0.0, 1e-12);
  // g = f: (1/(1-γ)) log ∫ f^{1+ξ(γ-1)} = ξ R_{1+ξ(γ-1)}[f]
  for (double xi : {0.5, 2.0}) {
    const double gam = 1.4;
    EXPECT_NEAR(escort_cross_entropy(W, W, gam, xi).value, xi * renyi_entropy(W, 1.0 + xi * (gam - 1.0)).value,
                1e-9);
  }
}

TEST(CrossEntropyProperty, SelfCrossEntropyIsRenyiEntropy) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> U(0.2, 3.0);
  for (const auto& f : closed_families()) {
    for (int i = 0; i < 20; ++i) {
      double g = U(rng);
      if (std::abs(g - 1.0) < 1e-3) g += 0.1;
      EXPECT_NEAR(renyi_cross_entropy(f, f, g).value, renyi_entropy(f, g).value, 1e-8) << f.spec() << " " << g;
    }
  }
}

TEST(LimitProperty, OrderOneContinuity) {
  const std::vector<Density> fs = {exponential(0.7), gaussian(0.4, 1.6), weibull(1.7, 1.2), uniform(-0.5, 2.0)};
  const Density g2 = exponential(1.3);
  for (const auto& f : fs) {
    for (double d : {-1e-4, 1e-4}) {
      EXPECT_NEAR(renyi_entropy(f, 1.0 + d).value, shannon_entropy(f).value, 1e-3) << f.spec();
    }
  }
  for (double d : {-1e-4, 1e-4}) {
    EXPECT_NEAR(renyi_divergence(W, G, 1.0 + d).value, kl_divergence(W, G).value, 1e-3);
    EXPECT_NEAR(renyi_cross_entropy(W, G, 1.0 + d).value, shannon_cross_entropy(W, G).value, 1e-3);
    EXPECT_NEAR(renyi_divergence(exponential(0.7), g2, 1.0 + d).value,
                kl_divergence(exponential(0.7), g2).value, 1e-3);
  }
}

TEST(ScaleProperty, ExponentialRenyiEntropyShiftsByLogRate) {
  for (double rate : {0.2, 3.0, 17.0})
    for (double a : {0.5, 2.0, 4.0})
      EXPECT_NEAR(renyi_entropy(exponential(rate), a).value, renyi_entropy(exponential(1.0), a).value - std::log(rate),
                  1e-8);
}

TEST(CrossDivergence, FrozenExponentialTriple) {
  const double v = cross_divergence(exponential(1.0), exponential(2.0), exponential(0.5), 1.7, 0.6).value;
  EXPECT_NEAR(v, kCrossDivExp, 1e-9);
}

TEST(CrossDivergence, ParticularCases) {
  const Density f = W, g = G, h = weibull(1.2, 0.9);
  const double a = 1.6, b = 0.7;
  EXPECT_NEAR(cross_divergence(f, h, h, a, 1.0).value, 0.0, 1e-9);
  EXPECT_NEAR(cross_divergence(f, f, h, a, b).value, -b * renyi_divergence(f, h, 1.0 + b * (a - 1.0)).value, 1e-8);
  EXPECT_NEAR(cross_divergence(f, g, f, a, b).value, renyi_divergence(f, g, 2.0 - a).value, 1e-8);
  EXPECT_NEAR(cross_divergence(f, g, h, a, 0.0).value, renyi_divergence(f, g, 2.0 - a).value, 1e-8);
}

TEST(CrossDivergenceProperty, IdentitiesOnRandomTriples) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.5, 2.0), A(0.3, 1.8), B(0.2, 1.2);
  for (int i = 0; i < 15; ++i) {
    const Density f = exponential(U(rng)), g = weibull(U(rng), U(rng)), h = generalized_gamma(U(rng), U(rng), 1.0);
    double a = A(rng);
    if (std::abs(a - 1.0) < 0.05) a += 0.1;
    const double b = B(rng);
    try {
      const auto rep = cross_divergence_identities(f, g, h, a, b);
      EXPECT_LE(rep.max_residual, 1e-7) << f.spec() << " " << g.spec() << " " << h.spec() << " a=" << a << " b=" << b;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::DivergentIntegral) << e.what();
    }
  }
}

TEST(Fisher, ExponentialClosedForm) {
  EXPECT_NEAR(generalized_fisher(exponential(3.0), 2.0, 1.0).F, 9.0, 1e-8);
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> R(0.3, 4.0), P(0.5, 3.0), L(0.2, 2.5);
  for (int i = 0; i < 30; ++i) {
    const double r = R(rng), p = P(rng), l = L(rng);
    if (1.0 + p * (l - 1.0) <= 0.05) continue;
    const double closed = std::pow(r, p * l) / (1.0 + p * (l - 1.0));
    const auto v = generalized_fisher(exponential(r), p, l);
    EXPECT_NEAR(v.F / closed, 1.0, 1e-8) << r << " " << p << " " << l;
    EXPECT_NEAR(v.phi, std::pow(closed, 1.0 / (p * l)), 1e-8 * v.phi);
  }
}

TEST(Fisher, GaussianStandardFisherIsInverseVariance) {
  EXPECT_NEAR(generalized_fisher(gaussian(0.0, 2.0), 2.0, 1.0).F, 0.25, 1e-9);
}

TEST(Fisher, UniformIsNotDifferentiable) {
  try {
    generalized_fisher(uniform(0.0, 1.0), 2.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotDifferentiable);
  }
}

TEST(CrossFisher, CollapsesToGeneralizedFisher) {
  // f = g, b = 1: ∫ f^{1+(a-2)c} |f'|^c, the (p, λ) = (c, a) form.
  const Density f = exponential(1.0);
  EXPECT_NEAR(cross_fisher(f, f, 2.0, 1.0, 2.0).value, std::sqrt(generalized_fisher(f, 2.0, 2.0).F), 1e-9);
  std::mt19937_64 rng(25);
  // 1 + (a-2)c > -1 keeps the half-Gaussian integral finite
  std::uniform_real_distribution<double> A(1.0, 2.5), C(0.5, 2.5);
  const Density h = half_generalized_normal(2.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double a = A(rng), c = C(rng);
    const double F = generalized_fisher(h, c, a).F;
    EXPECT_NEAR(cross_fisher(h, h, a, 1.0, c).value, std::pow(F, 1.0 / c), 1e-8 * std::pow(F, 1.0 / c));
  }
  for (double c : {-1.0, 1.0}) {
    const double v = cross_fisher(f, exponential(1.5), 1.5, 1.0, c).value;
    EXPECT_TRUE(std::isfinite(v) && v > 0.0) << c;
  }
}

TEST(DownFisher, ExponentialReductions) {
  // f f''/f'^2 = 1: integrand e^{-(1+p(λ-2)+q)x} |pλ/(p-q) - 1|^p
  const Density f = exponential(1.0);
  EXPECT_NEAR(down_fisher(f, 1.0, 0.0, 2.0).value, 1.0, 1e-9);
  for (auto [p, q, l] : {std::tuple{2.0, 1.0, 1.5}, std::tuple{1.5, 0.5, 2.0}, std::tuple{0.5, 1.0, 3.0}}) {
    const double rate = 1.0 + p * (l - 2.0) + q;
    const double closed = std::pow(std::abs(p * l / (p - q) - 1.0), p) / rate;
    EXPECT_NEAR(down_fisher(f, p, q, l).value, closed, 1e-9 * closed) << p << " " << q << " " << l;
  }
  EXPECT_THROW(down_fisher(f, 1.0, 1.0, 2.0), Error);
}

TEST(CrossDownFisher, Reductions) {
  const Density f = exponential(1.0);
  EXPECT_NEAR(cross_down_fisher(f, exponential(2.0), 1.3, 0.4, 0.0, 2.0).value, 1.0, 1e-10);
  // f = g = Exp(1), ξ = 2: |f'| = f and the bracket is f^{b-a}, so the integral is 1/(1 + c(b-a))
  for (auto [a, b, c] : {std::tuple{0.3, 0.3, 0.7}, std::tuple{0.5, 0.2, 0.5}, std::tuple{0.2, 0.6, -0.4}}) {
    EXPECT_NEAR(cross_down_fisher(f, f, a, b, c, 2.0).value, 1.0 / (1.0 + c * (b - a)), 1e-9) << a << " " << b;
  }
}

TEST(Moments, ClosedForms) {
  const Density e = exponential(1.0);
  EXPECT_NEAR(deviation(e, 1.0).value, 1.0, 1e-10);
  EXPECT_NEAR(deviation(e, 2.0).value, std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(exp_moment(e, -1.0).value, 0.5, 1e-10);
  // E|X|^3 for N(0,1) is 2√(2/π)
  EXPECT_NEAR(deviation(gaussian(0.0, 1.0), 3.0).value, std::cbrt(2.0 * std::sqrt(2.0 / std::numbers::pi)), 1e-9);
  EXPECT_THROW(deviation(pareto(1.0, 2.0), 3.0), Error);
}

TEST(MomentsProperty, SelfCrossDeviationIsDeviation) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> P(0.3, 3.0), Gm(0.2, 2.5);
  for (int i = 0; i < 20; ++i) {
    const double p = P(rng), g = Gm(rng);
    EXPECT_NEAR(cross_deviation(W, W, p, g).value, deviation(W, p).value, 1e-9) << p << " " << g;
  }
  // exponential form with f = g: (∫ f e^{(1-γ)x})^{1/(1-γ)}
  EXPECT_NEAR(exp_cross_deviation(exponential(1.0), exponential(1.0), 2.0).value, 2.0, 1e-10);
}

TEST(UpperMoment, ClosedForms) {
  // inner (1+x)e^{-x}, M = ∫ (1+x) e^{-2x} = 3/4
  const auto u = upper_moment(exponential(1.0), 1.0, 3.0);
  EXPECT_NEAR(u.M, 0.75, 1e-9);
  EXPECT_NEAR(u.m, 0.75, 1e-9);
  // Uniform(0,1), a = 3: inner (1-x²)/2; p = 2 gives 2/15
  EXPECT_NEAR(upper_moment(uniform(0.0, 1.0), 2.0, 3.0).M, 2.0 / 15.0, 1e-9);
  EXPECT_NEAR(upper_moment(uniform(0.0, 1.0), 1.0, 3.0).M, 1.0 / 3.0, 1e-9);
}

TEST(UpperMomentProperty, CrossFormCollapsesWhenGEqualsF) {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> L(-1.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const double l = L(rng);
    const auto c = cross_upper_moment(W, W, 1.5, l, 3.0);
    const auto u = upper_moment(W, 1.5, 3.0);
    EXPECT_NEAR(c.M, u.M, 1e-9 * u.M) << l;
  }
}

TEST(ParameterTripleProperty, RelationHolds) {
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> U(0.1, 4.0);
  for (int i = 0; i < 200; ++i) {
    const double a = U(rng), b = U(rng);
    if (std::abs(a - 1) < 1e-3 || std::abs(b - 1) < 1e-3 || std::abs(a - b) < 1e-3) continue;
    const auto t = solve_triple(a, b);
    EXPECT_LE(t.residual(), 1e-12 * std::max(1.0, (a - 1) * (a - 1)));
    EXPECT_NEAR(t.gamma - 1.0, (a - 1.0) * (1.0 - b) / (a - b), 1e-12 * std::max(1.0, std::abs(t.gamma)));
    const auto back = solve_beta(a, t.gamma);
    EXPECT_NEAR(back.beta, b, 1e-9 * std::max(1.0, std::abs(b)));
  }
  EXPECT_THROW(solve_triple(1.0, 0.5), Error);
  EXPECT_THROW(solve_triple(2.0, 2.0), Error);
}
