#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "renyi/densities.hpp"
#include "renyi/functionals.hpp"
#include "renyi/transforms.hpp"

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

const Density E1 = exponential(1.0);

void expect_monotone(const PushforwardMap& m) {
  for (std::size_t i = m.lookup_lo; i < m.lookup_hi; ++i) {
    if (m.increasing) EXPECT_LT(m.y[i], m.y[i + 1]) << i;
    else EXPECT_GT(m.y[i], m.y[i + 1]) << i;
  }
  for (std::size_t i = 0; i < m.x.size(); ++i) EXPECT_EQ(m.weight[i] > 0, m.weight[0] > 0) << i;
}

std::vector<TransformSpec> all_kinds() {
  return {EscortSpec{2.0}, RelEscortSpec{exponential(0.5), 0.7}, DownSpec{1.0, 1.0}, UpSpec{3.0}, UpExpSpec{}};
}

// up_exp needs ∫ e^x f < inf, so the exponential is replaced by a half-normal there.
Density driver(const TransformSpec& spec, double scale = 1.0) {
  if (std::holds_alternative<UpExpSpec>(spec)) return half_generalized_normal(2.0, scale);
  return exponential(1.0 / scale);
}

}  // namespace

TEST(Transform, UnitEscortIsIdentity) {
  const auto t = transform(E1, EscortSpec{1.0});
  const auto& m = t.map();
  for (std::size_t i = 0; i < m.x.size(); i += 97) {
    EXPECT_NEAR(m.y[i] - m.y[0], m.x[i] - m.x[0], 1e-9 * std::max(1.0, m.x[i]));
    EXPECT_NEAR(t.values[i], E1.pdf(m.x[i]), 1e-14);
  }
}

TEST(Transform, SquareEscortEntropyIdentity) {
  const auto t = transform(E1, EscortSpec{2.0});
  for (double a : {0.7, 1.5, 2.0}) {
    // R_α = 2 R_{2α-1}[Exp(1)]
    const double closed = 2.0 * renyi_entropy(E1, 2.0 * a - 1.0).value;
    EXPECT_NEAR(grid_renyi(t, a), closed, 1e-4) << a;
    EXPECT_NEAR(renyi_of_transformed_closed(E1, EscortSpec{2.0}, a), closed, 1e-10);
  }
}

TEST(Transform, DownOfExponentialIsUniform) {
  // f / |f'| = 1 and y' = f^0 |f'| = e^{-x}: uniform on an interval of length 1.
  const auto t = transform(E1, DownSpec{1.0, 1.0});
  const auto& m = t.map();
  EXPECT_NEAR(std::abs(m.y[m.lookup_hi] - m.y[m.lookup_lo]), 1.0, 1e-9);
  for (std::size_t i = m.lookup_lo; i <= m.lookup_hi; i += 101) EXPECT_NEAR(t.values[i], 1.0, 1e-12);
  EXPECT_NEAR(grid_renyi(t, 2.0), 0.0, 1e-8);
}

TEST(Transform, Preconditions) {
  EXPECT_EQ(kind_of([] { transform(gaussian(0.0, 1.0), DownSpec{1.0, 1.0}); }), ErrorKind::PreconditionViolated);
  EXPECT_EQ(kind_of([] { transform(gaussian(0.0, 1.0), UpSpec{3.0}); }), ErrorKind::PreconditionViolated);
  EXPECT_EQ(kind_of([] { transform(uniform(0.0, 1.0), DownSpec{1.0, 1.0}); }), ErrorKind::NotDifferentiable);
  EXPECT_THROW(transform(E1, UpSpec{2.0}), Error);
  EXPECT_EQ(kind_of([] { reciprocal_transform(gaussian(0.0, 1.0), E1, EscortSpec{2.0}); }),
            ErrorKind::SupportMismatch);
}

TEST(Reciprocal, SelfReciprocalEqualsTransform) {
  for (const auto& spec : all_kinds()) {
    const Density f = driver(spec);
    const auto t = transform(f, spec);
    const auto r = reciprocal_transform(f, t);
    for (std::size_t i = 0; i < t.values.size(); i += 53) EXPECT_DOUBLE_EQ(r.values[i], t.values[i]) << describe(spec);
  }
}

TEST(Reciprocal, EscortValuesFollowTheDefiningFormula) {
  const Density g = weibull(1.4, 1.1);
  const double xi = 1.7;
  const auto t = transform(E1, EscortSpec{xi});
  const auto r = reciprocal_transform(g, t);
  const auto& m = t.map();
  for (std::size_t i = 0; i < m.x.size(); i += 61) {
    const double x = m.x[i];
    EXPECT_NEAR(r.values[i], g.pdf(x) * std::pow(E1.pdf(x), xi - 1.0), 1e-12 * std::max(1.0, r.values[i]));
  }
}

TEST(ReciprocalProperty, MassIsPreserved) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  for (int i = 0; i < 10; ++i) {
    const Density f = exponential(U(rng)), g = exponential(U(rng));
    for (const auto& spec : {TransformSpec{EscortSpec{1.5}}, TransformSpec{DownSpec{1.0, 1.0}}}) {
      const auto t = transform(f, spec);
      EXPECT_NEAR(t.mass(), 1.0, 1e-6) << f.spec() << " " << describe(spec);
      EXPECT_NEAR(reciprocal_transform(g, t).mass(), 1.0, 1e-6) << g.spec() << " " << describe(spec);
    }
  }
}

TEST(MapProperty, MonotoneAndSpanConsistent) {
  for (const auto& spec : all_kinds()) {
    const auto t = transform(driver(spec), spec);
    expect_monotone(t.map());
    EXPECT_LE(t.map().span_residual, 1e-6) << describe(spec);
    EXPECT_NEAR(t.mass(), 1.0, 1e-6) << describe(spec);
  }
}

TEST(Pullback, EscortCrossEntropyIdentity) {
  const Density g = exponential(1.5);
  for (double gam : {0.6, 1.5})
    for (double xi : {0.5, 2.0})
      EXPECT_NEAR(pullback_cross_entropy(E1, g, EscortSpec{xi}, gam).value,
                  escort_cross_entropy(E1, g, gam, xi).value, 1e-9)
          << gam << " " << xi;
}

TEST(Pullback, DownCrossEntropyIsCrossFisher) {
  const Density f = half_generalized_normal(2.0, 1.0), g = half_generalized_normal(2.0, 1.4);
  for (auto [a, b, gam] : {std::tuple{1.0, 1.0, 0.5}, std::tuple{0.5, 0.8, 1.3}}) {
    const double lhs = pullback_cross_entropy(f, g, DownSpec{a, b}, gam).value;
    const double rhs = std::log(cross_fisher(f, g, 2.0 - a, b, 1.0 - gam).value);
    EXPECT_NEAR(lhs, rhs, 1e-9) << a << " " << b << " " << gam;
  }
}

TEST(Pullback, UpCrossEntropyIsCrossDeviation) {
  const Density f = pareto(1.0, 3.0), g = pareto(1.0, 2.0);
  for (auto [a, gam] : {std::tuple{3.0, 1.5}, std::tuple{4.0, 0.6}, std::tuple{1.0, 1.4}}) {
    const double p = (gam - 1.0) / (2.0 - a);
    const double rhs = (std::log(std::abs(2.0 - a)) + std::log(cross_deviation(f, g, p, gam).value)) / (a - 2.0);
    EXPECT_NEAR(pullback_cross_entropy(f, g, UpSpec{a}, gam).value, rhs, 1e-9) << a << " " << gam;
  }
}

TEST(Pullback, DivergenceIsPreservedExactly) {
  for (const auto& spec : all_kinds()) {
    const Density f = driver(spec), g = driver(spec, 0.7);
    EXPECT_NEAR(pullback_divergence(f, g, spec, 0.6).value, renyi_divergence(f, g, 0.6).value, 1e-9)
        << describe(spec);
  }
}

TEST(Preservation, GridPathExamples) {
  EXPECT_LE(verify_divergence_preservation(E1, exponential(2.0), EscortSpec{1.0}, 1.5).gap, 1e-6);
  EXPECT_LE(verify_divergence_preservation(E1, exponential(2.0), EscortSpec{2.0}, 1.5).gap, 1e-4);
  EXPECT_LE(verify_divergence_preservation(E1, exponential(3.0), DownSpec{1.0, 1.0}, 0.5).gap, 1e-4);
}

TEST(PreservationProperty, EveryKindOnRandomPairs) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> U(0.6, 1.6), Gm(0.3, 0.9);
  for (const auto& spec : all_kinds()) {
    for (int i = 0; i < 3; ++i) {
      const Density f = driver(spec, U(rng)), g = driver(spec, U(rng));
      const auto r = verify_divergence_preservation(f, g, spec, Gm(rng));
      EXPECT_LE(r.gap, 1e-4) << describe(spec) << " " << f.spec() << " " << g.spec();
      EXPECT_NEAR(r.mass_f, 1.0, 1e-6);
      EXPECT_NEAR(r.mass_g, 1.0, 1e-6);
    }
  }
}

TEST(TransformedRenyi, ClosedReductionsAgainstGrid) {
  for (double xi : {0.5, 2.0}) {
    const auto r = renyi_of_transformed(uniform(0.0, 1.0), EscortSpec{xi}, 1.5);
    EXPECT_NEAR(r.closed, 0.0, 1e-12);
    EXPECT_NEAR(r.grid, 0.0, 1e-8);
  }
  const auto e = renyi_of_transformed(E1, EscortSpec{2.0}, 1.5);
  EXPECT_NEAR(e.closed, 2.0 * std::log(2.0), 1e-10);
  EXPECT_LE(e.difference, 1e-4);
  // h = Exp(0.5): R_2 of the relative escort is -D_2[Exp(1)||Exp(0.5)]
  const auto h = renyi_of_transformed(E1, RelEscortSpec{exponential(0.5), 1.0}, 2.0);
  EXPECT_NEAR(h.closed, -renyi_divergence(E1, exponential(0.5), 2.0).value, 1e-10);
  EXPECT_LE(h.difference, 1e-4);
  for (const auto& spec : {TransformSpec{DownSpec{0.5, 1.0}}, TransformSpec{UpExpSpec{}}}) {
    const Density f = driver(spec);
    const auto r = renyi_of_transformed(f, spec, 0.7);
    EXPECT_LE(r.difference, 1e-4) << describe(spec);
    EXPECT_NEAR(r.closed, pullback_renyi(f, spec, 0.7).value, 1e-9) << describe(spec);
  }
}

TEST(TransformedRenyi, RelativeEscortWithHeavierReferenceDiverges) {
  // ∫ f^2 / h diverges for h = Exp(2), so the reduction has no finite value.
  EXPECT_THROW(renyi_of_transformed_closed(E1, RelEscortSpec{exponential(2.0), 1.0}, 2.0), Error);
}

TEST(Roundtrip, UpInvertsDown) {
  for (double a : {1.0, 3.0}) {
    const auto r = up_down_roundtrip(E1, a);
    EXPECT_LE(r.max_value_error, 1e-4) << a;
    EXPECT_LE(r.max_shift_error, 1e-4) << a;
  }
}
