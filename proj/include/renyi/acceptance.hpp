#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "renyi/densities.hpp"
#include "renyi/functionals.hpp"
#include "renyi/inequalities.hpp"
#include "renyi/transforms.hpp"
#include "renyi/verification.hpp"

namespace renyi::acceptance {

/// One measured quantity and the bound it must respect.
struct Measure {
  std::string label;
  double value = 0.0;
  double bound = 0.0;
  bool at_most = true;  // value <= bound, otherwise value >= bound

  bool ok() const { return std::isfinite(value) && (at_most ? value <= bound : value >= bound); }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Measure> measures;
  std::size_t evaluated = 0;
  std::size_t rejected = 0;  // draws that raised and were redrawn

  bool pass() const {
    if (measures.empty()) return false;
    for (const auto& m : measures)
      if (!m.ok()) return false;
    return true;
  }
};

struct Settings {
  std::uint64_t seed = 42;
  std::size_t shannon_pairs = 50;
  std::size_t rrr_instances = 2000;
  std::size_t transform_configs = 10;
  std::size_t sweep_points = 500;
  std::size_t identity_instances = 100;
  std::size_t discrete_instances = 1000000;
  double tol_floor = 1e-7;
};

namespace detail {

/// Calls draw(rng) until it returns without raising, at most 20 times per index.
template <class Fn>
void for_each_draw(std::uint64_t seed, std::size_t n, CriterionResult& out, Fn&& draw) {
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = stream_for(seed, i);
    for (int attempt = 0; attempt < 20; ++attempt) {
      try {
        draw(rng);
        ++out.evaluated;
        break;
      } catch (const Error&) {
        ++out.rejected;
      }
    }
  }
}

inline std::uint64_t subseed(std::uint64_t seed, int criterion) {
  return splitmix64(seed + static_cast<std::uint64_t>(criterion));
}

}  // namespace detail

inline CriterionResult closed_forms() {
  CriterionResult r{1, "closed-form functionals", {}};
  const auto e1 = exponential(1.0), e2 = exponential(2.0), n01 = gaussian(0.0, 1.0);
  auto add = [&](std::string label, double got, double want) {
    r.measures.push_back({std::move(label), std::abs(got - want), 1e-8});
    ++r.evaluated;
  };
  add("R_2[Exp(1)]", renyi_entropy(e1, 2.0).value, std::log(2.0));
  add("R_2[N(0,1)]", renyi_entropy(n01, 2.0).value, std::log(2.0 * std::sqrt(std::numbers::pi)));
  add("D_2[Exp(2)||Exp(1)]", renyi_divergence(e2, e1, 2.0).value, std::log(4.0 / 3.0));
  add("KL[Exp(2)||Exp(1)]", kl_divergence(e2, e1).value, std::log(2.0) - 0.5);
  return r;
}

/// Exponential, Weibull or gamma with rates and shapes log-uniform in [0.5, 2].
/// Away from order 1 the deviations grow like |order - 1|·Var(log f)/2 (and
/// Var(log f/g)/2 for pairs), so the continuity bound is only meaningful
/// where those variances are moderate.
inline Density moderate_family(std::mt19937_64& rng) {
  const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
  if (kind == 0) return exponential(log_uniform(rng, 0.5, 2.0));
  if (kind == 1) return weibull(log_uniform(rng, 0.5, 2.0), log_uniform(rng, 0.5, 2.0));
  return generalized_gamma(log_uniform(rng, 0.5, 2.0), log_uniform(rng, 0.5, 2.0), 1.0);
}

inline CriterionResult shannon_bridge(const Settings& s) {
  CriterionResult r{2, "Shannon bridge and order-1 continuity", {}};
  double bridge = 0.0, limit = 0.0;
  detail::for_each_draw(detail::subseed(s.seed, 2), s.shannon_pairs, r, [&](std::mt19937_64& rng) {
    Density f = moderate_family(rng), g = moderate_family(rng);
    if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
      f = gaussian(draw_uniform(rng, -1.0, 1.0), log_uniform(rng, 0.5, 2.0));
      g = gaussian(draw_uniform(rng, -1.0, 1.0), log_uniform(rng, 0.5, 2.0));
    }
    const double S = shannon_entropy(f).value, K = kl_divergence(f, g).value, H = shannon_cross_entropy(f, g).value;
    double lim = 0.0;
    for (double d : {-1e-4, 1e-4}) {
      lim = std::max(lim, std::abs(renyi_entropy(f, 1.0 + d).value - S));
      lim = std::max(lim, std::abs(renyi_divergence(f, g, 1.0 + d).value - K));
      lim = std::max(lim, std::abs(renyi_cross_entropy(f, g, 1.0 + d).value - H));
    }
    bridge = std::max(bridge, std::abs(S + K - H));
    limit = std::max(limit, lim);
  });
  r.measures.push_back({"max |S + KL - H|", bridge, 1e-8});
  r.measures.push_back({"max order-1 limit deviation", limit, 1e-3});
  return r;
}

inline CriterionResult main_inequality(const Settings& s) {
  CriterionResult r{3, "main inequality, random families", {}};
  const auto res = random_search_violations(standard_sampler(TheoremId::RRR), s.rrr_instances,
                                            detail::subseed(s.seed, 3), {QuadratureConfig{}, s.tol_floor}, true);
  double fwd = kInf, rev = kInf;
  std::size_t n_fwd = 0, n_rev = 0;
  for (const auto& c : res.reports) {
    if (c.conditioning_warning) continue;
    (c.reversed ? rev : fwd) = std::min(c.reversed ? rev : fwd, c.gap);
    ++(c.reversed ? n_rev : n_fwd);
  }
  r.evaluated = res.evaluated;
  r.rejected = res.errors;
  r.measures.push_back({"worst gap, alpha > beta", fwd, -s.tol_floor, false});
  r.measures.push_back({"worst gap, alpha < beta", rev, -s.tol_floor, false});
  r.measures.push_back({"forward instances", static_cast<double>(n_fwd), 1.0, false});
  r.measures.push_back({"reversed instances", static_cast<double>(n_rev), 1.0, false});
  return r;
}

inline CriterionResult equality_adjudication() {
  CriterionResult r{4, "equality adjudication", {}};
  const auto e1 = exponential(1.0);
  for (auto [a, b] : {std::pair{2.0, 0.0}, std::pair{0.5, 0.25}}) {
    const double gap = check_rrr(e1, equality_witness(TheoremId::RRR, e1, a, b, {}), a, b).gap;
    r.measures.push_back({"|gap| corrected witness (" + renyi::detail::fmt(a) + "," + renyi::detail::fmt(b) + ")",
                          std::abs(gap), 1e-7});
  }
  const double paper = check_rrr(e1, equality_witness(TheoremId::RRR, e1, 2.0, 0.0, {}, WitnessMode::Paper), 2.0, 0.0).gap;
  r.measures.push_back({"|gap - 0.446287| printed witness (2,0)", std::abs(paper - 0.446287), 1e-5});
  r.evaluated = 3;
  return r;
}

/// A random transformation together with the pair it acts on and an order.
struct TransformCase {
  Density f = exponential(1.0);
  Density g = exponential(1.0);
  TransformSpec spec = UpExpSpec{};
  double gamma = 2.0;
};

inline TransformCase sample_transform_case(int kind, std::mt19937_64& rng) {
  TransformCase c;
  for (;;) {
    c.gamma = draw_uniform(rng, 0.3, 2.5);
    if (std::abs(c.gamma - 1.0) >= 0.05) break;
  }
  c.f = sampling::positive_family(rng);
  c.g = sampling::positive_family(rng);
  switch (kind) {
    case 0: {
      double xi;
      do xi = draw_uniform(rng, -1.0, 2.5);
      while (std::abs(xi) < 0.1);
      c.spec = EscortSpec{xi};
      break;
    }
    case 1: {
      double xi;
      do xi = draw_uniform(rng, -1.0, 2.0);
      while (std::abs(xi) < 0.1);
      c.spec = RelEscortSpec{sampling::positive_family(rng), xi};
      break;
    }
    case 2: {
      c.f = sampling::decreasing_family(rng);
      c.g = sampling::decreasing_family(rng);
      double b;
      do b = draw_uniform(rng, -1.0, 1.5);
      while (std::abs(b) < 0.2);
      c.spec = DownSpec{draw_uniform(rng, -1.0, 2.0), b};
      break;
    }
    case 3: {
      double a;
      do a = draw_uniform(rng, -1.0, 4.0);
      while (std::abs(a - 2.0) < 0.3);
      c.spec = UpSpec{a};
      break;
    }
    default: c.spec = UpExpSpec{}; break;
  }
  return c;
}

inline CriterionResult divergence_preservation(const Settings& s) {
  CriterionResult r{5, "divergence preservation on the grid path", {}};
  static const char* kinds[] = {"escort", "rel_escort", "down", "up", "up_exp"};
  for (int kind = 0; kind < 5; ++kind) {
    double worst = 0.0;
    detail::for_each_draw(detail::subseed(s.seed, 50 + kind), s.transform_configs, r, [&](std::mt19937_64& rng) {
      const auto c = sample_transform_case(kind, rng);
      worst = std::max(worst, verify_divergence_preservation(c.f, c.g, c.spec, c.gamma).gap);
    });
    r.measures.push_back({std::string("max |D_grid - D| ") + kinds[kind], worst, 1e-4});
  }
  return r;
}

struct WitnessCase {
  std::string label;
  TheoremId theorem;
  Density f;
  double alpha, beta;
  Extras extras;
};

/// Closed-form instances where the corrected witness is an explicit family.
inline std::vector<WitnessCase> witness_cases() {
  const auto e1 = exponential(1.0);
  const auto hg = half_generalized_normal(2.0, 1.0);
  std::vector<WitnessCase> v;
  v.push_back({"rrr Exp(1)", TheoremId::RRR, e1, 2.0, 0.0, {}});
  v.push_back({"escort Exp(1) xi=2", TheoremId::Escort, e1, 2.0, 0.0, {2.0, 0.0, 1.0, {}}});
  v.push_back({"rel_escort Exp(1) h=Exp(0.5)", TheoremId::RelEscort, e1, 2.0, 0.0, {1.0, 0.0, 1.0, exponential(0.5)}});
  v.push_back({"bip_down Exp(1) a=1,b=1", TheoremId::BipDown, e1, 2.0, 0.0, {1.0, 1.0, 1.0, {}}});
  v.push_back({"bip_down half-Gaussian a=0,b=-1", TheoremId::BipDown, hg, 2.0, 0.0, {1.0, 0.0, -1.0, {}}});
  v.push_back({"down_fisher Exp(1) a=0,b=1,xi=2", TheoremId::DownFisher, e1, 0.5, 0.25, {2.0, 0.0, 1.0, {}}});
  v.push_back({"up Pareto(1,3) a=3", TheoremId::Up, pareto(1.0, 3.0), 2.0, 0.0, {1.0, 3.0, 1.0, {}}});
  v.push_back({"up_exp Exp(1)", TheoremId::UpExp, e1, 2.0, 0.0, {}});
  v.push_back({"upper_mom Exp(1) a=1,b=3", TheoremId::UpperMom, e1, 2.0, 0.0, {1.0, 1.0, 3.0, {}}});
  return v;
}

inline CriterionResult theorem_sweeps(const Settings& s) {
  CriterionResult r{6, "transformed inequalities: sweeps and witnesses", {}};
  // Escort transformation identities through the substitution path.
  double lemma = 0.0;
  detail::for_each_draw(detail::subseed(s.seed, 60), s.sweep_points, r, [&](std::mt19937_64& rng) {
    const auto c = sample_transform_case(0, rng);
    const double xi = std::get<EscortSpec>(c.spec).xi;
    const double d = std::abs(pullback_divergence(c.f, c.g, c.spec, c.gamma).value -
                              renyi_divergence(c.f, c.g, c.gamma).value);
    const double h = std::abs(pullback_cross_entropy(c.f, c.g, c.spec, c.gamma).value -
                              escort_cross_entropy(c.f, c.g, c.gamma, xi).value);
    lemma = std::max({lemma, d, h});
  });
  r.measures.push_back({"escort identities max residual", lemma, s.tol_floor});
  for (std::size_t t = 0; t < kAllTheorems.size(); ++t) {
    const auto id = kAllTheorems[t];
    const auto res = random_search_violations(standard_sampler(id), s.sweep_points,
                                              detail::subseed(s.seed, 61 + static_cast<int>(t)),
                                              {QuadratureConfig{}, s.tol_floor});
    r.evaluated += res.evaluated;
    r.rejected += res.errors;
    r.measures.push_back({"worst gap " + std::string(to_string(id)), res.worst_gap, -s.tol_floor, false});
  }
  for (const auto& w : witness_cases()) {
    double gap = kInf;
    try {
      gap = std::abs(check(w.theorem, w.f, equality_witness(w.theorem, w.f, w.alpha, w.beta, w.extras), w.alpha,
                           w.beta, w.extras)
                         .gap);
    } catch (const Error&) {
    }
    r.measures.push_back({"|gap| witness " + w.label, gap, 1e-6});
  }
  return r;
}

inline CriterionResult identity_battery(const Settings& s) {
  CriterionResult r{7, "cross-divergence identities", {}};
  double worst = 0.0;
  detail::for_each_draw(detail::subseed(s.seed, 7), s.identity_instances, r, [&](std::mt19937_64& rng) {
    const Density f = sampling::positive_family(rng), g = sampling::positive_family(rng),
                  h = sampling::positive_family(rng);
    const double a = draw_uniform(rng, -1.0, 3.0), b = draw_uniform(rng, -1.0, 2.0);
    worst = std::max(worst, cross_divergence_identities(f, g, h, a, b).max_residual);
  });
  r.measures.push_back({"max identity residual", worst, 1e-7});
  return r;
}

/// Random positive weights of length 2..8 spanning six orders of magnitude.
inline DiscreteDistribution sample_discrete(std::mt19937_64& rng, int n) {
  DiscreteDistribution d;
  for (int j = 0; j < n; ++j) d.weights.push_back(std::exp(draw_uniform(rng, -7.0, 7.0)));
  return d;
}

inline CriterionResult discrete_oracle(const Settings& s) {
  CriterionResult r{8, "discrete Jensen oracle", {}};
  const auto seed = detail::subseed(s.seed, 8);
  double worst = kInf, equality = 0.0;
  for (std::size_t i = 0; i < s.discrete_instances; ++i) {
    auto rng = stream_for(seed, i);
    const auto [a, b] = sample_orders(rng);
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    const auto u = sample_discrete(rng, n), v = sample_discrete(rng, n);
    worst = std::min(worst, discrete_rrr_check(u, v, a, b));
    ++r.evaluated;
    if (i % 100 != 0) continue;
    try {
      equality = std::max(equality, std::abs(discrete_rrr_check(u, discrete_witness(u, a, b), a, b)));
    } catch (const Error&) {
      ++r.rejected;
    }
  }
  r.measures.push_back({"min discrete gap", worst, -1e-12, false});
  r.measures.push_back({"max |gap| discrete escort", equality, 1e-14});
  return r;
}

inline CriterionResult sharpness() {
  CriterionResult r{9, "sharpness probes", {}};
  const auto e1 = exponential(1.0);
  auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
  {
    const auto o = minimize_gap(TheoremId::RRR, e1, exponential_family(), 2.0, 0.0, {}, {1.0});
    r.measures.push_back({"rrr Exp: rel. error of rate", rel(o.best_params[0], 2.0), 0.01});
    r.measures.push_back({"rrr Exp: best gap", o.best_gap, 1e-6});
    r.measures.push_back({"rrr Exp: best gap floor", o.best_gap, -1e-6, false});
    r.evaluated += static_cast<std::size_t>(o.evaluations);
  }
  {
    const auto o = minimize_gap(TheoremId::RRR, gaussian(0.0, 1.0), gaussian_family(), 2.0, 0.0, {}, {0.3, 1.0});
    r.measures.push_back({"rrr Gaussian: |mean|", std::abs(o.best_params[0]), 0.01});
    r.measures.push_back({"rrr Gaussian: rel. error of sigma", rel(o.best_params[1], 1.0 / std::sqrt(2.0)), 0.01});
    r.measures.push_back({"rrr Gaussian: best gap", o.best_gap, 1e-6});
    r.measures.push_back({"rrr Gaussian: best gap floor", o.best_gap, -1e-6, false});
    r.evaluated += static_cast<std::size_t>(o.evaluations);
  }
  {
    Extras e;
    e.a = 2.0;
    const auto o = minimize_gap(TheoremId::Up, e1, exponential_family(), 2.0, 0.0, e, {1.0});
    r.measures.push_back({"up_exp Exp: rel. error of rate", rel(o.best_params[0], 2.0), 0.01});
    r.measures.push_back({"up_exp Exp: best gap", o.best_gap, 1e-6});
    r.measures.push_back({"up_exp Exp: best gap floor", o.best_gap, -1e-6, false});
    r.evaluated += static_cast<std::size_t>(o.evaluations);
  }
  return r;
}

/// Criteria 1-9. Determinism (10) compares two runs and lives with the caller.
inline std::vector<CriterionResult> run_all(const Settings& s, const std::function<void(const CriterionResult&)>& on_done = {}) {
  std::vector<CriterionResult> out;
  auto step = [&](CriterionResult r) {
    if (on_done) on_done(r);
    out.push_back(std::move(r));
  };
  step(closed_forms());
  step(shannon_bridge(s));
  step(main_inequality(s));
  step(equality_adjudication());
  step(divergence_preservation(s));
  step(theorem_sweeps(s));
  step(identity_battery(s));
  step(discrete_oracle(s));
  step(sharpness());
  return out;
}

}  // namespace renyi::acceptance
