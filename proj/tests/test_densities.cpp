#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "renyi/densities.hpp"
#include "renyi/density_spec.hpp"

using namespace renyi;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::InvalidArgument;
}

std::vector<Density> differentiable_families() {
  return {exponential(1.7),       gaussian(-0.5, 1.3),     half_generalized_normal(2.0, 1.0),
          half_generalized_normal(3.5, 0.6), generalized_normal(2.5, 1.2), q_exponential(1.4, 0.8),
          q_exponential(0.6, 1.5), weibull(1.8, 1.1),        generalized_gamma(1.3, 2.2, 1.4),
          pareto(0.7, 2.5),        rayleigh(1.4)};
}

}  // namespace

TEST(Evaluate, ExponentialValue) { EXPECT_NEAR(exponential(1.0).evaluate(0.5, 0), std::exp(-0.5), 1e-15); }

TEST(Evaluate, ExponentialCurvatureRatioIsOne) {
  const auto f = exponential(1.0);
  for (double x : {0.01, 0.5, 3.0, 40.0}) {
    const double r = f.evaluate(x, 0) * f.evaluate(x, 2) / std::pow(f.evaluate(x, 1), 2);
    EXPECT_NEAR(r, 1.0, 1e-12);
    EXPECT_NEAR(f.curvature_ratio(x), 1.0, 1e-12);
  }
}

TEST(Evaluate, UniformValueAndNoDerivative) {
  const auto u = uniform(0.0, 2.0);
  EXPECT_DOUBLE_EQ(u.evaluate(1.0, 0), 0.5);
  EXPECT_EQ(kind_of([&] { u.evaluate(1.0, 1); }), ErrorKind::NotDifferentiable);
}

TEST(Evaluate, OutsideSupport) {
  EXPECT_EQ(kind_of([] { exponential(1.0).pdf(-1.0); }), ErrorKind::OutsideSupport);
  EXPECT_EQ(kind_of([] { pareto(1.0, 2.0).pdf(0.5); }), ErrorKind::OutsideSupport);
}

TEST(Construction, ParameterDomainsValidated) {
  EXPECT_THROW(exponential(0.0), Error);
  EXPECT_THROW(exponential(-1.0), Error);
  EXPECT_THROW(gaussian(0.0, 0.0), Error);
  EXPECT_THROW(weibull(-1.0, 1.0), Error);
  EXPECT_THROW(pareto(1.0, 0.0), Error);
  EXPECT_THROW(q_exponential(2.5, 1.0), Error);
  EXPECT_THROW(uniform(1.0, 0.0), Error);
}

TEST(Normalize, SquareOfExponentialIsRateTwo) {
  const auto g = escort(exponential(1.0), 2.0), e2 = exponential(2.0);
  for (double x : {0.01, 0.3, 1.0, 5.0, 12.0}) EXPECT_NEAR(g.pdf(x) / e2.pdf(x), 1.0, 1e-10) << x;
}

TEST(Normalize, CubeRootOfExponential) {
  const auto g = escort(exponential(1.0), 1.0 / 3.0), e = exponential(1.0 / 3.0);
  for (double x : {0.01, 0.3, 1.0, 5.0, 30.0}) EXPECT_NEAR(g.pdf(x) / e.pdf(x), 1.0, 1e-10) << x;
}

TEST(Normalize, UniformIsFixedByPowers) {
  for (double e : {0.3, 2.0, 7.0}) {
    const auto g = escort(uniform(0.0, 1.0), e);
    EXPECT_NEAR(g.pdf(0.4), 1.0, 1e-10);
  }
}

TEST(Normalize, NonIntegrablePowerRaises) {
  EXPECT_EQ(kind_of([] { escort(pareto(1.0, 1.0), 0.5); }), ErrorKind::NotNormalizable);
}

TEST(Normalize, TiltsProduceClosedFormFamilies) {
  // f e^{-x} with f = Exp(1) is Exp(2); f x^2 is gamma(shape 3).
  const auto a = normalize(exponential(1.0), ExpTilt{-1.0});
  const auto b = normalize(exponential(1.0), PowerTilt{2.0});
  const auto g3 = generalized_gamma(1.0, 3.0, 1.0);
  for (double x : {0.1, 1.0, 4.0}) {
    EXPECT_NEAR(a.pdf(x), 2.0 * std::exp(-2.0 * x), 1e-10);
    EXPECT_NEAR(b.pdf(x) / g3.pdf(x), 1.0, 1e-9);
  }
}

TEST(CheckDensity, GaussianOk) {
  const auto r = check_density(gaussian(0.0, 1.0));
  EXPECT_TRUE(r.ok);
  EXPECT_NEAR(r.mass, 1.0, 1e-10);
  // far-tail samples may underflow; positivity is judged on log f
  EXPECT_GE(r.min_pdf_sampled, 0.0);
}

TEST(CheckDensity, ScaledExponentialHasMassTwo) {
  const auto r = check_density(scaled_unnormalized(exponential(1.0), 2.0));
  EXPECT_FALSE(r.ok);
  EXPECT_NEAR(r.mass, 2.0, 1e-8);
}

TEST(CheckDensity, QExponentialOk) { EXPECT_TRUE(check_density(q_exponential(1.5, 1.0)).ok); }

TEST(DensityProperty, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& d : differentiable_families()) {
    const auto iv = d.support();
    const double lo = std::isfinite(iv.lo) ? iv.lo : -4.0, hi = std::isfinite(iv.hi) ? iv.hi : lo + 6.0;
    for (int i = 0; i < 100; ++i) {
      const double x = lo + (hi - lo) * (0.02 + 0.96 * U(rng));
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      if (!d.contains(x - h) || !d.contains(x + h)) continue;
      for (int order = 1; order <= 2; ++order) {
        const double fd = (d.evaluate(x + h, order - 1) - d.evaluate(x - h, order - 1)) / (2 * h);
        const double an = d.evaluate(x, order);
        const double scale = std::max({std::abs(an), std::abs(d.evaluate(x, order - 1)), 1e-3});
        EXPECT_NEAR(fd, an, 1e-6 * scale) << d.spec() << " x=" << x << " order " << order;
      }
    }
  }
}

TEST(DensityProperty, EscortComposition) {
  const auto f = gaussian(0.3, 1.2);
  const auto lhs = escort(escort(f, 1.5), 0.8), rhs = escort(f, 1.2);
  for (double x = -4.0; x <= 4.0; x += 0.5) EXPECT_NEAR(lhs.pdf(x), rhs.pdf(x), 1e-9) << x;
}

TEST(DensityProperty, UnitEscortIsIdentity) {
  for (const auto& f : differentiable_families()) {
    const auto g = escort(f, 1.0);
    EXPECT_EQ(g.spec(), f.spec());
    for (double x : interior_points(f.support(), 9)) EXPECT_EQ(g.pdf(x), f.pdf(x));
  }
}

TEST(DensityProperty, DeclaredDecreasingFamiliesHaveNegativeSlope) {
  const std::vector<Density> ds = {exponential(0.4), pareto(1.0, 1.5), half_generalized_normal(2.0, 1.0),
                                   half_generalized_normal(0.8, 2.0), q_exponential(1.3, 1.0),
                                   q_exponential(0.7, 2.0)};
  for (const auto& d : ds) {
    ASSERT_TRUE(d.declared_decreasing().value_or(false)) << d.spec();
    EXPECT_TRUE(is_decreasing(d)) << d.spec();
    // f' = f (log f)'; the score keeps its sign where f underflows
    for (double x : interior_points(d.support(), 512)) EXPECT_LT(d.score(x), 0.0) << d.spec() << " " << x;
  }
  EXPECT_FALSE(is_decreasing(gaussian(0.0, 1.0)));
  EXPECT_FALSE(is_decreasing(rayleigh(1.0)));
}

TEST(DensityProperty, SupportComparisonIsExact) {
  EXPECT_TRUE(exponential(1.0).same_support(weibull(2.0, 1.0)));
  EXPECT_FALSE(exponential(1.0).same_support(pareto(1.0, 2.0)));
  EXPECT_EQ(kind_of([] { require_same_support(exponential(1.0), gaussian(0.0, 1.0)); }), ErrorKind::SupportMismatch);
}

TEST(SpecGrammar, RoundTripsThroughSpecString) {
  for (const auto& d : differentiable_families()) {
    const auto p = parse_density(d.spec());
    EXPECT_EQ(p.spec(), d.spec());
    const double x = interior_points(d.support(), 7)[3];
    EXPECT_DOUBLE_EQ(p.pdf(x), d.pdf(x));
  }
}

TEST(SpecGrammar, NestedAndAliasForms) {
  const auto e = parse_density("escort:base=(exponential:rate=1),exp=2");
  EXPECT_NEAR(e.pdf(1.0), 2.0 * std::exp(-2.0), 1e-10);
  const auto t = parse_density("tilt_power:base=(exponential:rate=1),r=1");
  EXPECT_NEAR(t.pdf(2.0), 2.0 * std::exp(-2.0), 1e-10);
  const auto g = parse_density("gamma:shape=2,scale=0.5");
  EXPECT_NEAR(g.pdf(1.0), 4.0 * std::exp(-2.0), 1e-12);
  EXPECT_NEAR(parse_density("normal:mu=1,sigma=2").pdf(1.0), 1.0 / (2.0 * std::sqrt(2.0 * M_PI)), 1e-15);
}

TEST(SpecGrammar, MalformedInputIsParseError) {
  for (const char* s : {"", "exponential:rate=", "nosuch:x=1", "exponential:rate=1,", "exponential:speed=1",
                        "escort:base=(exponential:rate=1,exp=2", "pareto:xm=1,alpha=abc"}) {
    EXPECT_EQ(kind_of([&] { parse_density(s); }), ErrorKind::ParseError) << s;
  }
}
