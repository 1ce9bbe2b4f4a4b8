#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "renyi/densities.hpp"
#include "renyi/error.hpp"
#include "renyi/functionals.hpp"
#include "renyi/quadrature.hpp"

namespace renyi {

/// (α, β, γ) with (α-β)(α-γ) = (α-1)^2.
struct ParameterTriple {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  /// The inequality flips when α < β.
  bool reversed() const { return alpha < beta; }
  double residual() const {
    return std::abs((alpha - beta) * (alpha - gamma) - (alpha - 1.0) * (alpha - 1.0));
  }
};

/// γ = α - (α-1)^2/(α-β).
inline ParameterTriple solve_triple(double alpha, double beta) {
  require(std::isfinite(alpha) && std::isfinite(beta), ErrorKind::InvalidArgument, "α and β must be finite");
  if (alpha == 1.0 || beta == 1.0 || alpha == beta)
    fail(ErrorKind::DegenerateParameters, "need α != 1, β != 1 and α != β");
  const double d = alpha - beta;
  const double gamma = alpha - (alpha - 1.0) * (alpha - 1.0) / d;
  ParameterTriple t{alpha, beta, gamma};
  require(gamma != 1.0 && std::isfinite(gamma), ErrorKind::DegenerateParameters, "γ collapsed to 1");
  return t;
}

/// β = α - (α-1)^2/(α-γ), the same relation solved for β.
inline ParameterTriple solve_beta(double alpha, double gamma) {
  if (alpha == 1.0 || gamma == 1.0 || alpha == gamma)
    fail(ErrorKind::DegenerateParameters, "need α != 1, γ != 1 and α != γ");
  const double beta = alpha - (alpha - 1.0) * (alpha - 1.0) / (alpha - gamma);
  require(beta != 1.0 && std::isfinite(beta), ErrorKind::DegenerateParameters, "β collapsed to 1");
  return {alpha, beta, gamma};
}

/// Equality exponents: g ∝ f^k makes the main inequality tight, with
/// k = (α-1)/(γ-1) = (α-β)/(1-β). paper_k = (1-β)/(α-β) is the reciprocal
/// exponent as printed, kept for comparison.
struct WitnessExponents {
  double k = 0.0, tilt = 0.0, paper_k = 0.0, paper_tilt = 0.0;
};

inline WitnessExponents witness_exponents(const ParameterTriple& t) {
  WitnessExponents w;
  w.k = (t.alpha - t.beta) / (1.0 - t.beta);
  w.tilt = (t.alpha - 1.0) / (1.0 - t.beta);
  w.paper_k = (1.0 - t.beta) / (t.alpha - t.beta);
  w.paper_tilt = (1.0 - t.alpha) / (t.alpha - t.beta);
  return w;
}

enum class TheoremId { RRR, Escort, RelEscort, BipDown, DownFisher, Up, UpExp, UpperMom };

inline constexpr std::array<TheoremId, 8> kAllTheorems = {TheoremId::RRR,       TheoremId::Escort,
                                                          TheoremId::RelEscort, TheoremId::BipDown,
                                                          TheoremId::DownFisher, TheoremId::Up,
                                                          TheoremId::UpExp,     TheoremId::UpperMom};

inline constexpr std::string_view to_string(TheoremId t) {
  switch (t) {
    case TheoremId::RRR: return "rrr";
    case TheoremId::Escort: return "escort";
    case TheoremId::RelEscort: return "rel_escort";
    case TheoremId::BipDown: return "bip_down";
    case TheoremId::DownFisher: return "down_fisher";
    case TheoremId::Up: return "up";
    case TheoremId::UpExp: return "up_exp";
    case TheoremId::UpperMom: return "upper_mom";
  }
  return "unknown";
}

inline TheoremId parse_theorem(std::string_view s) {
  for (TheoremId t : kAllTheorems)
    if (to_string(t) == s) return t;
  fail(ErrorKind::ParseError, "unknown theorem '" + std::string(s) + "'");
}

/// Theorem-specific parameters. Which fields matter:
///   escort ξ; rel_escort h, ξ; bip_down a, b; down_fisher a, b, ξ;
///   up a; upper_mom a, b.
struct Extras {
  double xi = 1.0;
  double a = 0.0;
  double b = 1.0;
  std::optional<Density> h;
};

/// The extras a theorem actually reads, as named values.
inline std::vector<Param> used_extras(TheoremId t, const Extras& e) {
  switch (t) {
    case TheoremId::RRR:
    case TheoremId::UpExp: return {};
    case TheoremId::Escort:
    case TheoremId::RelEscort: return {{"xi", e.xi}};
    case TheoremId::BipDown:
    case TheoremId::UpperMom: return {{"a", e.a}, {"b", e.b}};
    case TheoremId::DownFisher: return {{"a", e.a}, {"b", e.b}, {"xi", e.xi}};
    case TheoremId::Up: return {{"a", e.a}};
  }
  return {};
}

struct CheckReport {
  TheoremId theorem = TheoremId::RRR;
  ParameterTriple params;
  Extras extras;
  double lhs = 0.0, rhs = 0.0;
  /// rhs - lhs when α > β, lhs - rhs when α < β; non-negative when the theorem holds.
  double gap = 0.0;
  bool reversed = false;
  double quad_error = 0.0;
  bool pass = false;
  bool conditioning_warning = false;
  std::vector<std::string> notes;
};

struct CheckOptions {
  QuadratureConfig quad;
  double tol_floor = 1e-7;
};

inline constexpr double kConditioningBand = 1e-6;

namespace detail {

inline CheckReport finish(TheoremId id, const ParameterTriple& t, const Extras& e, Estimate lhs, Estimate rhs,
                          const CheckOptions& opt, std::vector<std::string> notes = {}) {
  CheckReport r;
  r.theorem = id;
  r.params = t;
  r.extras = e;
  r.lhs = lhs.value;
  r.rhs = rhs.value;
  r.reversed = t.reversed();
  r.gap = r.reversed ? lhs.value - rhs.value : rhs.value - lhs.value;
  r.quad_error = lhs.error + rhs.error;
  r.pass = r.gap >= -std::max(opt.tol_floor, 10.0 * r.quad_error);
  r.conditioning_warning = std::abs(t.alpha - t.beta) < kConditioningBand ||
                           std::abs(t.alpha - 1.0) < kConditioningBand ||
                           std::abs(t.beta - 1.0) < kConditioningBand ||
                           std::abs(t.gamma - 1.0) < kConditioningBand;
  r.notes = std::move(notes);
  return r;
}

inline Estimate add(Estimate a, Estimate b) { return {a.value + b.value, a.error + b.error}; }

/// (1/c) log I from a log-integral.
inline Estimate scaled_log(const LogIntegral& L, double c) { return {L.log_value / c, L.rel_error / std::abs(c)}; }

inline void require_decreasing(const Density& f, const char* what) {
  if (f.max_order() < 1) fail(ErrorKind::NotDifferentiable, f.spec() + " is not differentiable");
  if (!is_decreasing(f)) fail(ErrorKind::PreconditionViolated, std::string(what) + " needs a decreasing f");
}

inline void require_positive_support(const Density& f, const char* what) {
  if (f.support().lo < 0.0) fail(ErrorKind::PreconditionViolated, std::string(what) + " needs support in (0, inf)");
}

}  // namespace detail

/// R_α[f] + D_β[f||g] against H_γ[f;g].
inline CheckReport check_rrr(const Density& f, const Density& g, double alpha, double beta,
                             const CheckOptions& opt = {}) {
  require_same_support(f, g);
  const auto t = solve_triple(alpha, beta);
  const Estimate lhs = detail::add(renyi_entropy(f, alpha, opt.quad), renyi_divergence(f, g, beta, opt.quad));
  const Estimate rhs = renyi_cross_entropy(f, g, t.gamma, opt.quad);
  return detail::finish(TheoremId::RRR, t, {}, lhs, rhs, opt);
}

/// ξ R_{1+(α-1)ξ}[f] + D_β[f||g] against H_{γ,ξ}[f;g].
inline CheckReport check_escort(const Density& f, const Density& g, double alpha, double beta, double xi,
                                const CheckOptions& opt = {}) {
  require_same_support(f, g);
  const auto t = solve_triple(alpha, beta);
  Estimate ent{0.0, 0.0};
  if (xi != 0.0) {
    const Estimate r = renyi_entropy(f, 1.0 + (alpha - 1.0) * xi, opt.quad);
    ent = {xi * r.value, std::abs(xi) * r.error};
  }
  const Estimate lhs = detail::add(ent, renyi_divergence(f, g, beta, opt.quad));
  const Estimate rhs = escort_cross_entropy(f, g, t.gamma, xi, opt.quad);
  Extras e;
  e.xi = xi;
  return detail::finish(TheoremId::Escort, t, e, lhs, rhs, opt);
}

/// D_β[f||g] - ξ D_{1+(α-1)ξ}[f||h] against H̃_{γ,ξ}[f;g||h].
inline CheckReport check_rel_escort(const Density& f, const Density& g, const Density& h, double alpha, double beta,
                                    double xi, const CheckOptions& opt = {}) {
  require_same_support(f, g);
  require_same_support(f, h);
  const auto t = solve_triple(alpha, beta);
  Estimate rel{0.0, 0.0};
  if (xi != 0.0) {
    const Estimate d = renyi_divergence(f, h, 1.0 + (alpha - 1.0) * xi, opt.quad);
    rel = {-xi * d.value, std::abs(xi) * d.error};
  }
  const Estimate lhs = detail::add(renyi_divergence(f, g, beta, opt.quad), rel);
  const Estimate rhs = cross_divergence(f, g, h, t.gamma, xi, opt.quad);
  Extras e;
  e.xi = xi;
  e.h = h;
  return detail::finish(TheoremId::RelEscort, t, e, lhs, rhs, opt);
}

/// Log scale: (1/(1-α)) log ∫ f^{1+a(α-1)} |f'|^{b(1-α)} + D_β[f||g] against
/// (1/(1-γ)) log ∫ f^{1+(a-1)(γ-1)} g^{γ-1} |f'|^{b(1-γ)}.
inline CheckReport check_bip_down(const Density& f, const Density& g, double alpha, double beta, double a, double b,
                                  const CheckOptions& opt = {}) {
  require_same_support(f, g);
  require(b != 0.0 && a != 2.0 * b, ErrorKind::InvalidArgument, "biparametric down needs b != 0 and a != 2b");
  detail::require_decreasing(f, "biparametric down");
  const auto t = solve_triple(alpha, beta);
  const Estimate fisher =
      detail::scaled_log(integrals::cross_fisher(f, f, 2.0 - a, b, 1.0 - alpha, opt.quad), 1.0 - alpha);
  const Estimate lhs = detail::add(fisher, renyi_divergence(f, g, beta, opt.quad));
  const Estimate rhs =
      detail::scaled_log(integrals::cross_fisher(f, g, 2.0 - a, b, 1.0 - t.gamma, opt.quad), 1.0 - t.gamma);
  Extras e;
  e.a = a;
  e.b = b;
  return detail::finish(TheoremId::BipDown, t, e, lhs, rhs, opt);
}

/// Sampled sup of f f''/f'^2 over the interior.
inline double sup_curvature_ratio(const Density& f) {
  double s = -kInf;
  for (double x : interior_points(f.support(), 512)) s = std::max(s, f.curvature_ratio(x));
  return s;
}

/// Log scale: (1/(1-α)) log φ_{(1-α)b,(1-α)(a-b),ξ(2-a/b)}[f] + D_β[f||g]
/// against (1/(1-γ)) log of the cross-down-Fisher integral with c = 1-γ.
inline CheckReport check_down_fisher(const Density& f, const Density& g, double alpha, double beta, double a,
                                     double b, double xi, const CheckOptions& opt = {}) {
  require_same_support(f, g);
  require(b != 0.0 && a != 2.0 * b, ErrorKind::InvalidArgument, "down-Fisher needs b != 0 and a != 2b");
  if (f.max_order() < 2) fail(ErrorKind::NotDifferentiable, f.spec() + " is not twice differentiable");
  detail::require_decreasing(f, "down-Fisher");
  const double sup_r = sup_curvature_ratio(f);
  if (!(sup_r < xi))
    fail(ErrorKind::PreconditionViolated,
         "sup f f''/f'^2 = " + detail::fmt(sup_r) + " is not below ξ = " + detail::fmt(xi));
  std::vector<std::string> notes;
  if (g.max_order() < 1 || !is_decreasing(g)) notes.emplace_back("g is not decreasing");
  const auto t = solve_triple(alpha, beta);
  const double p = (1.0 - alpha) * b, q = (1.0 - alpha) * (a - b), lambda = xi * (2.0 - a / b);
  const Estimate fisher = detail::scaled_log(integrals::down_fisher(f, p, q, lambda, opt.quad), 1.0 - alpha);
  const Estimate lhs = detail::add(fisher, renyi_divergence(f, g, beta, opt.quad));
  const Estimate rhs =
      detail::scaled_log(integrals::cross_down_fisher(f, g, a, b, 1.0 - t.gamma, xi, opt.quad), 1.0 - t.gamma);
  Extras e;
  e.a = a;
  e.b = b;
  e.xi = xi;
  return detail::finish(TheoremId::DownFisher, t, e, lhs, rhs, opt, std::move(notes));
}

/// a = 2: (1/(1-α)) log ⟨e^{(1-α)x}⟩_f + D_β[f||g] against
/// (1/(1-γ)) log ∫ f^{2-γ} g^{γ-1} e^{(1-γ)x}.
inline CheckReport check_up_exp(const Density& f, const Density& g, double alpha, double beta,
                                const CheckOptions& opt = {}) {
  require_same_support(f, g);
  const auto t = solve_triple(alpha, beta);
  const Estimate mom = detail::scaled_log(integrals::exp_moment(f, 1.0 - alpha, opt.quad), 1.0 - alpha);
  const Estimate lhs = detail::add(mom, renyi_divergence(f, g, beta, opt.quad));
  const Estimate rhs =
      detail::scaled_log(integrals::exp_cross_moment(f, g, t.gamma, opt.quad), 1.0 - t.gamma);
  Extras e;
  e.a = 2.0;
  return detail::finish(TheoremId::UpExp, t, e, lhs, rhs, opt);
}

/// a != 2: (1/(1-α)) log ∫ f |x|^{(α-1)/(2-a)} + D_β[f||g] against
/// (1/(1-γ)) log ∫ f^{2-γ} g^{γ-1} |x|^{(γ-1)/(2-a)}. The |2-a| constants cancel.
inline CheckReport check_up(const Density& f, const Density& g, double alpha, double beta, double a,
                            const CheckOptions& opt = {}) {
  if (a == 2.0) return check_up_exp(f, g, alpha, beta, opt);
  require_same_support(f, g);
  detail::require_positive_support(f, "up");
  const auto t = solve_triple(alpha, beta);
  const Estimate mom =
      detail::scaled_log(integrals::moment(f, (alpha - 1.0) / (2.0 - a), opt.quad), 1.0 - alpha);
  const Estimate lhs = detail::add(mom, renyi_divergence(f, g, beta, opt.quad));
  const Estimate rhs = detail::scaled_log(
      integrals::cross_moment(f, g, (t.gamma - 1.0) / (2.0 - a), t.gamma, opt.quad), 1.0 - t.gamma);
  Extras e;
  e.a = a;
  return detail::finish(TheoremId::Up, t, e, lhs, rhs, opt);
}

/// Log scale: (1/(1-α)) log M_{(α-1)/(2-a),b}[f] + D_β[f||g] against
/// (1/(1-γ)) log M_{(γ-1)/(2-a),γ-1,b}[f;g]; one tail table serves both sides.
inline CheckReport check_upper_mom(const Density& f, const Density& g, double alpha, double beta, double a, double b,
                                   const CheckOptions& opt = {}) {
  require_same_support(f, g);
  require(a != 2.0 && b != 2.0, ErrorKind::InvalidArgument, "upper moments need a != 2 and b != 2");
  detail::require_positive_support(f, "upper moments");
  const auto t = solve_triple(alpha, beta);
  const UpperTail tail(f, b);
  const Estimate mom =
      detail::scaled_log(integrals::upper_moment(tail, (alpha - 1.0) / (2.0 - a), opt.quad), 1.0 - alpha);
  const Estimate lhs = detail::add(mom, renyi_divergence(f, g, beta, opt.quad));
  const Estimate rhs = detail::scaled_log(
      integrals::cross_upper_moment(tail, g, (t.gamma - 1.0) / (2.0 - a), t.gamma - 1.0, opt.quad), 1.0 - t.gamma);
  Extras e;
  e.a = a;
  e.b = b;
  return detail::finish(TheoremId::UpperMom, t, e, lhs, rhs, opt);
}

/// Dispatches on the theorem id; the extras it needs are read from e.
inline CheckReport check(TheoremId id, const Density& f, const Density& g, double alpha, double beta,
                         const Extras& e, const CheckOptions& opt = {}) {
  switch (id) {
    case TheoremId::RRR: return check_rrr(f, g, alpha, beta, opt);
    case TheoremId::Escort: return check_escort(f, g, alpha, beta, e.xi, opt);
    case TheoremId::RelEscort:
      require(e.h.has_value(), ErrorKind::InvalidArgument, "rel_escort needs a reference density h");
      return check_rel_escort(f, g, *e.h, alpha, beta, e.xi, opt);
    case TheoremId::BipDown: return check_bip_down(f, g, alpha, beta, e.a, e.b, opt);
    case TheoremId::DownFisher: return check_down_fisher(f, g, alpha, beta, e.a, e.b, e.xi, opt);
    case TheoremId::Up: return check_up(f, g, alpha, beta, e.a, opt);
    case TheoremId::UpExp: return check_up_exp(f, g, alpha, beta, opt);
    case TheoremId::UpperMom: return check_upper_mom(f, g, alpha, beta, e.a, e.b, opt);
  }
  fail(ErrorKind::InvalidArgument, "unknown theorem");
}

enum class WitnessMode { Corrected, Paper };

/// The density g that makes the theorem tight for f. Corrected mode applies
/// g ∝ f·O^{tilt} at the level where the main inequality is used, with O the
/// composite transformation and tilt = (α-1)/(1-β). Paper mode uses the
/// printed exponents. tilt_scale perturbs the tilt for optimality probes.
inline Density equality_witness(TheoremId id, const Density& f, double alpha, double beta, const Extras& e,
                                WitnessMode mode = WitnessMode::Corrected, double tilt_scale = 1.0) {
  const auto t = solve_triple(alpha, beta);
  const auto w = witness_exponents(t);
  const bool paper = mode == WitnessMode::Paper;
  const double tilt = (paper ? w.paper_tilt : w.tilt) * tilt_scale;
  switch (id) {
    case TheoremId::RRR: return escort(f, 1.0 + tilt);
    case TheoremId::Escort: return escort(f, 1.0 + e.xi * tilt);
    case TheoremId::RelEscort:
      require(e.h.has_value(), ErrorKind::InvalidArgument, "rel_escort needs a reference density h");
      return normalize(f, RelativeTilt{*e.h, e.xi * tilt});
    case TheoremId::BipDown: return normalize(f, DerivativeTilt{1.0 + e.a * tilt, -e.b * tilt});
    case TheoremId::DownFisher:
      if (!paper) {
        return normalize(f, CurvatureTilt{1.0 + tilt * (e.a * e.xi - 2.0 * e.b * e.xi + 2.0 * e.b),
                                          tilt * (e.b - e.a), -e.b * tilt, e.xi});
      } else {
        // Printed chain: the bip-down exponents pulled back through the
        // derivative of the once-transformed density.
        const double A = 1.0 + e.a * tilt, B = -e.b * tilt;
        return normalize(f, CurvatureTilt{1.0 - e.a + A * e.a + 2.0 * (e.a - 1.0) * B,
                                          e.b - e.b * A + (1.0 - 2.0 * e.b) * B, B, e.a / e.b});
      }
    case TheoremId::Up:
      if (e.a == 2.0) return normalize(f, ExpTilt{-tilt});
      return normalize(f, PowerTilt{tilt / (2.0 - e.a)});
    case TheoremId::UpExp: return normalize(f, ExpTilt{-tilt});
    case TheoremId::UpperMom: return normalize(f, TailTilt{paper ? e.a : e.b, tilt / (2.0 - e.a)});
  }
  fail(ErrorKind::InvalidArgument, "unknown theorem");
}

struct IdentityResidual {
  std::string name;
  double lhs = 0.0, rhs = 0.0, residual = 0.0;
};

struct IdentityReport {
  std::vector<IdentityResidual> items;
  double max_residual = 0.0;
};

/// Residuals of the particular cases of the cross-divergence H̃_{a,b}. The
/// special-parameter cases (b = 0, b = 1, a = 2, (1-a)b = 1) substitute that
/// parameter and keep the other one from the input.
inline IdentityReport cross_divergence_identities(const Density& f, const Density& g, const Density& h, double a,
                                                  double b, const QuadratureConfig& cfg = {}) {
  require_same_support(f, g);
  require_same_support(f, h);
  require(a != 1.0 && b != 0.0, ErrorKind::InvalidArgument, "identities need a != 1 and b != 0");
  IdentityReport rep;
  auto add = [&](std::string name, double l, double r) {
    const double res = std::abs(l - r);
    rep.items.push_back({std::move(name), l, r, res});
    rep.max_residual = std::max(rep.max_residual, res);
  };
  auto H = [&](const Density& x, const Density& y, const Density& z, double aa, double bb) {
    return cross_divergence(x, y, z, aa, bb, cfg).value;
  };
  auto D = [&](const Density& x, const Density& y, double o) { return renyi_divergence(x, y, o, cfg).value; };

  add("b=0", H(f, g, h, a, 0.0), D(f, g, 2.0 - a));
  add("b=1,g=h", H(f, h, h, a, 1.0), 0.0);
  add("f=g", H(f, f, h, a, b), -b * D(f, h, 1.0 + b * (a - 1.0)));
  add("g=h", H(f, h, h, a, b), (1.0 - b) * D(f, h, 1.0 + (a - 1.0) * (b - 1.0)));
  add("f=h", H(f, g, f, a, b), D(f, g, 2.0 - a));
  add("a=2", H(f, g, h, 2.0, b), b * H(g, f, h, b + 1.0, 1.0));
  add("(1-a)b=1", H(f, g, h, a, 1.0 / (1.0 - a)), H(h, g, f, a, 1.0));
  const double abar = 1.0 + b * (1.0 - a), bbar = 1.0 / b;
  add("duality", H(f, g, h, a, b), -b * H(f, h, g, abar, bbar));
  return rep;
}

}  // namespace renyi
