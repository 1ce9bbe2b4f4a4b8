#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "renyi/error.hpp"
#include "renyi/quadrature.hpp"

namespace renyi {

struct Param {
  std::string name;
  double value;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double log_abs(double v) { return std::log(std::abs(v)); }

}  // namespace detail

/// Implementation interface. log_pdf, score and score_slope are only ever
/// called at points of the open support; Density performs the checks.
class DensityModel {
 public:
  virtual ~DensityModel() = default;
  virtual std::string family() const = 0;
  virtual std::vector<Param> params() const = 0;
  virtual Interval support() const = 0;
  virtual int max_order() const = 0;
  virtual double log_pdf(double x) const = 0;
  /// (log f)'.
  virtual double score(double) const { fail(ErrorKind::NotDifferentiable, family()); }
  /// (log f)''.
  virtual double score_slope(double) const { fail(ErrorKind::NotDifferentiable, family()); }
  virtual std::optional<bool> decreasing() const { return std::nullopt; }
  virtual std::vector<double> singular_points() const { return {}; }
  /// log of the constant divided out to normalize (0 for closed forms).
  virtual double log_normalizer() const { return 0.0; }
  virtual std::string spec() const {
    std::string s = family() + ":";
    bool first = true;
    for (const auto& p : params()) {
      if (!first) s += ",";
      s += p.name + "=" + detail::fmt(p.value);
      first = false;
    }
    return s;
  }
};

class Density {
 public:
  explicit Density(std::shared_ptr<const DensityModel> m) : m_(std::move(m)) {
    require(m_ != nullptr, ErrorKind::InvalidArgument, "null density model");
  }

  std::string family() const { return m_->family(); }
  std::vector<Param> params() const { return m_->params(); }
  Interval support() const { return m_->support(); }
  int max_order() const { return m_->max_order(); }
  std::optional<bool> declared_decreasing() const { return m_->decreasing(); }
  std::vector<double> singular_points() const { return m_->singular_points(); }
  std::string spec() const { return m_->spec(); }
  double normalizer() const { return std::exp(m_->log_normalizer()); }
  const DensityModel& model() const { return *m_; }

  bool contains(double x) const { return m_->support().contains(x); }

  double log_pdf(double x) const {
    check_support(x);
    return m_->log_pdf(x);
  }
  double pdf(double x) const { return std::exp(log_pdf(x)); }

  double score(double x) const {
    check_order(1);
    check_support(x);
    return m_->score(x);
  }
  double score_slope(double x) const {
    check_order(2);
    check_support(x);
    return m_->score_slope(x);
  }

  /// f, f' or f''.
  double evaluate(double x, int order) const {
    require(order >= 0 && order <= 2, ErrorKind::InvalidArgument, "order must be 0, 1 or 2");
    const double f = pdf(x);
    if (order == 0) return f;
    const double s1 = score(x);
    if (order == 1) return f * s1;
    return f * (score_slope(x) + s1 * s1);
  }

  /// f f'' / (f')^2.
  double curvature_ratio(double x) const {
    const double s1 = score(x);
    return 1.0 + score_slope(x) / (s1 * s1);
  }

  bool same_support(const Density& o) const { return support() == o.support(); }

 private:
  void check_support(double x) const {
    if (!m_->support().contains(x))
      fail(ErrorKind::OutsideSupport, "x=" + detail::fmt(x) + " outside support of " + m_->spec());
  }
  void check_order(int order) const {
    if (order > m_->max_order())
      fail(ErrorKind::NotDifferentiable,
           m_->spec() + " has no derivative of order " + std::to_string(order));
  }

  std::shared_ptr<const DensityModel> m_;
};

inline void require_same_support(const Density& a, const Density& b) {
  if (!a.same_support(b)) fail(ErrorKind::SupportMismatch, a.spec() + " vs " + b.spec());
}

namespace families {

inline void positive(double v, const char* what) {
  require(std::isfinite(v) && v > 0, ErrorKind::InvalidArgument, std::string(what) + " must be positive");
}

class Uniform final : public DensityModel {
 public:
  Uniform(double lo, double hi) : lo_(lo), hi_(hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorKind::InvalidArgument,
            "uniform requires finite lo < hi");
  }
  std::string family() const override { return "uniform"; }
  std::vector<Param> params() const override { return {{"lo", lo_}, {"hi", hi_}}; }
  Interval support() const override { return {lo_, hi_}; }
  int max_order() const override { return 0; }
  std::optional<bool> decreasing() const override { return false; }
  double log_pdf(double) const override { return -std::log(hi_ - lo_); }

 private:
  double lo_, hi_;
};

class Exponential final : public DensityModel {
 public:
  explicit Exponential(double rate) : rate_(rate) { positive(rate, "rate"); }
  std::string family() const override { return "exponential"; }
  std::vector<Param> params() const override { return {{"rate", rate_}}; }
  Interval support() const override { return {0.0, kInf}; }
  int max_order() const override { return 2; }
  std::optional<bool> decreasing() const override { return true; }
  double log_pdf(double x) const override { return std::log(rate_) - rate_ * x; }
  double score(double) const override { return -rate_; }
  double score_slope(double) const override { return 0.0; }

 private:
  double rate_;
};

class Gaussian final : public DensityModel {
 public:
  Gaussian(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    require(std::isfinite(mu), ErrorKind::InvalidArgument, "mu must be finite");
    positive(sigma, "sigma");
  }
  std::string family() const override { return "gaussian"; }
  std::vector<Param> params() const override { return {{"mu", mu_}, {"sigma", sigma_}}; }
  Interval support() const override { return {-kInf, kInf}; }
  int max_order() const override { return 2; }
  std::optional<bool> decreasing() const override { return false; }
  double log_pdf(double x) const override {
    const double z = (x - mu_) / sigma_;
    return -0.5 * z * z - std::log(sigma_) - 0.5 * std::log(2.0 * M_PI);
  }
  double score(double x) const override { return -(x - mu_) / (sigma_ * sigma_); }
  double score_slope(double) const override { return -1.0 / (sigma_ * sigma_); }

 private:
  double mu_, sigma_;
};

/// ∝ exp(-(x/s)^k) on (0, inf).
class HalfGeneralizedNormal final : public DensityModel {
 public:
  HalfGeneralizedNormal(double k, double scale) : k_(k), s_(scale) {
    positive(k, "k");
    positive(scale, "scale");
    log_c_ = std::log(k_) - std::log(s_) - std::lgamma(1.0 / k_);
  }
  std::string family() const override { return "half_gen_normal"; }
  std::vector<Param> params() const override { return {{"k", k_}, {"scale", s_}}; }
  Interval support() const override { return {0.0, kInf}; }
  int max_order() const override { return 2; }
  std::optional<bool> decreasing() const override { return true; }
  double log_pdf(double x) const override { return log_c_ - std::pow(x / s_, k_); }
  double score(double x) const override { return -(k_ / s_) * std::pow(x / s_, k_ - 1.0); }
  double score_slope(double x) const override {
    return -(k_ * (k_ - 1.0) / (s_ * s_)) * std::pow(x / s_, k_ - 2.0);
  }

 private:
  double k_, s_, log_c_;
};

/// ∝ exp(-|x/s|^k) on the real line.
class GeneralizedNormal final : public DensityModel {
 public:
  GeneralizedNormal(double k, double scale) : k_(k), s_(scale) {
    positive(k, "k");
    positive(scale, "scale");
    log_c_ = std::log(k_) - std::log(2.0 * s_) - std::lgamma(1.0 / k_);
  }
  std::string family() const override { return "gen_normal"; }
  std::vector<Param> params() const override { return {{"k", k_}, {"scale", s_}}; }
  Interval support() const override { return {-kInf, kInf}; }
  int max_order() const override { return k_ >= 2.0 ? 2 : (k_ > 1.0 ? 1 : 0); }
  std::optional<bool> decreasing() const override { return false; }
  std::vector<double> singular_points() const override {
    if (k_ == 2.0) return {};
    return {0.0};
  }
  double log_pdf(double x) const override { return log_c_ - std::pow(std::abs(x) / s_, k_); }
  double score(double x) const override {
    const double v = (k_ / s_) * std::pow(std::abs(x) / s_, k_ - 1.0);
    return x > 0 ? -v : v;
  }
  double score_slope(double x) const override {
    return -(k_ * (k_ - 1.0) / (s_ * s_)) * std::pow(std::abs(x) / s_, k_ - 2.0);
  }

 private:
  double k_, s_, log_c_;
};

/// ∝ [1 - (1-q) rate x]_+^{1/(1-q)}; bounded support for q < 1. The
/// normalizer is obtained by quadrature.
class QExponential final : public DensityModel {
 public:
  QExponential(double q, double rate) : q_(q), rate_(rate) {
    positive(rate, "rate");
    require(std::isfinite(q) && q < 2.0, ErrorKind::InvalidArgument, "q-exponential requires q < 2");
    hi_ = q_ < 1.0 ? 1.0 / ((1.0 - q_) * rate_) : kInf;
    if (q_ != 1.0) {
      QuadratureConfig cfg;
      cfg.rel_tol = 1e-13;
      log_z_ = integrate_log([this](double x) { return log_kernel(x); }, support(), cfg).log_value;
    } else {
      log_z_ = -std::log(rate_);
    }
  }
  std::string family() const override { return "q_exponential"; }
  std::vector<Param> params() const override { return {{"q", q_}, {"rate", rate_}}; }
  Interval support() const override { return {0.0, hi_}; }
  int max_order() const override { return 2; }
  std::optional<bool> decreasing() const override { return true; }
  double log_normalizer() const override { return log_z_; }
  double log_pdf(double x) const override { return log_kernel(x) - log_z_; }
  double score(double x) const override { return -rate_ / base(x); }
  double score_slope(double x) const override {
    const double u = base(x);
    return -rate_ * rate_ * (1.0 - q_) / (u * u);
  }

 private:
  double base(double x) const { return 1.0 - (1.0 - q_) * rate_ * x; }
  double log_kernel(double x) const {
    if (q_ == 1.0) return -rate_ * x;
    return std::log(base(x)) / (1.0 - q_);
  }
  double q_, rate_, hi_, log_z_ = 0.0;
};

class Weibull final : public DensityModel {
 public:
  Weibull(double shape, double scale) : k_(shape), s_(scale) {
    positive(shape, "shape");
    positive(scale, "scale");
  }
  std::string family() const override { return "weibull"; }
  std::vector<Param> params() const override { return {{"shape", k_}, {"scale", s_}}; }
  Interval support() const override { return {0.0, kInf}; }
  int max_order() const override { return 2; }
  std::optional<bool> decreasing() const override { return k_ <= 1.0; }
  double log_pdf(double x) const override {
    const double z = x / s_;
    return std::log(k_ / s_) + (k_ - 1.0) * std::log(z) - std::pow(z, k_);
  }
  double score(double x) const override {
    return (k_ - 1.0) / x - (k_ / s_) * std::pow(x / s_, k_ - 1.0);
  }
  double score_slope(double x) const override {
    return -(k_ - 1.0) / (x * x) - (k_ * (k_ - 1.0) / (s_ * s_)) * std::pow(x / s_, k_ - 2.0);
  }

 private:
  double k_, s_;
};

/// Stacy form: p / (a^d Γ(d/p)) x^{d-1} exp(-(x/a)^p).
class GeneralizedGamma final : public DensityModel {
 public:
  GeneralizedGamma(double a, double d, double p) : a_(a), d_(d), p_(p) {
    positive(a, "a");
    positive(d, "d");
    positive(p, "p");
    log_c_ = std::log(p_) - d_ * std::log(a_) - std::lgamma(d_ / p_);
  }
  std::string family() const override { return "gen_gamma"; }
  std::vector<Param> params() const override { return {{"a", a_}, {"d", d_}, {"p", p_}}; }
  Interval support() const override { return {0.0, kInf}; }
  int max_order() const override { return 2; }
  std::optional<bool> decreasing() const override { return d_ <= 1.0; }
  double log_pdf(double x) const override {
    return log_c_ + (d_ - 1.0) * std::log(x) - std::pow(x / a_, p_);
  }
  double score(double x) const override {
    return (d_ - 1.0) / x - (p_ / a_) * std::pow(x / a_, p_ - 1.0);
  }
  double score_slope(double x) const override {
    return -(d_ - 1.0) / (x * x) - (p_ * (p_ - 1.0) / (a_ * a_)) * std::pow(x / a_, p_ - 2.0);
  }

 private:
  double a_, d_, p_, log_c_;
};

class Pareto final : public DensityModel {
 public:
  Pareto(double xm, double alpha) : xm_(xm), alpha_(alpha) {
    positive(xm, "xm");
    positive(alpha, "alpha");
  }
  std::string family() const override { return "pareto"; }
  std::vector<Param> params() const override { return {{"xm", xm_}, {"alpha", alpha_}}; }
  Interval support() const override { return {xm_, kInf}; }
  int max_order() const override { return 2; }
  std::optional<bool> decreasing() const override { return true; }
  double log_pdf(double x) const override {
    return std::log(alpha_) + alpha_ * std::log(xm_) - (alpha_ + 1.0) * std::log(x);
  }
  double score(double x) const override { return -(alpha_ + 1.0) / x; }
  double score_slope(double x) const override { return (alpha_ + 1.0) / (x * x); }

 private:
  double xm_, alpha_;
};

class Rayleigh final : public DensityModel {
 public:
  explicit Rayleigh(double sigma) : sigma_(sigma) { positive(sigma, "sigma"); }
  std::string family() const override { return "rayleigh"; }
  std::vector<Param> params() const override { return {{"sigma", sigma_}}; }
  Interval support() const override { return {0.0, kInf}; }
  int max_order() const override { return 2; }
  std::optional<bool> decreasing() const override { return false; }
  double log_pdf(double x) const override {
    const double s2 = sigma_ * sigma_;
    return std::log(x / s2) - x * x / (2.0 * s2);
  }
  double score(double x) const override { return 1.0 / x - x / (sigma_ * sigma_); }
  double score_slope(double x) const override { return -1.0 / (x * x) - 1.0 / (sigma_ * sigma_); }

 private:
  double sigma_;
};

/// A density multiplied by a constant; deliberately not normalized.
class Scaled final : public DensityModel {
 public:
  Scaled(Density base, double factor) : base_(std::move(base)), factor_(factor) { positive(factor, "factor"); }
  std::string family() const override { return "scaled"; }
  std::vector<Param> params() const override { return {{"factor", factor_}}; }
  Interval support() const override { return base_.support(); }
  int max_order() const override { return base_.max_order(); }
  std::optional<bool> decreasing() const override { return base_.declared_decreasing(); }
  std::vector<double> singular_points() const override { return base_.singular_points(); }
  double log_pdf(double x) const override { return base_.model().log_pdf(x) + std::log(factor_); }
  double score(double x) const override { return base_.model().score(x); }
  double score_slope(double x) const override { return base_.model().score_slope(x); }
  std::string spec() const override { return "scaled:base=(" + base_.spec() + "),factor=" + detail::fmt(factor_); }

 private:
  Density base_;
  double factor_;
};

}  // namespace families

inline Density uniform(double lo, double hi) { return Density(std::make_shared<families::Uniform>(lo, hi)); }
inline Density exponential(double rate) { return Density(std::make_shared<families::Exponential>(rate)); }
inline Density gaussian(double mu, double sigma) {
  return Density(std::make_shared<families::Gaussian>(mu, sigma));
}
inline Density half_generalized_normal(double k, double scale) {
  return Density(std::make_shared<families::HalfGeneralizedNormal>(k, scale));
}
inline Density generalized_normal(double k, double scale) {
  return Density(std::make_shared<families::GeneralizedNormal>(k, scale));
}
inline Density q_exponential(double q, double rate) {
  return Density(std::make_shared<families::QExponential>(q, rate));
}
inline Density weibull(double shape, double scale) {
  return Density(std::make_shared<families::Weibull>(shape, scale));
}
inline Density generalized_gamma(double a, double d, double p) {
  return Density(std::make_shared<families::GeneralizedGamma>(a, d, p));
}
inline Density pareto(double xm, double alpha) { return Density(std::make_shared<families::Pareto>(xm, alpha)); }
inline Density rayleigh(double sigma) { return Density(std::make_shared<families::Rayleigh>(sigma)); }
inline Density scaled_unnormalized(Density base, double factor) {
  return Density(std::make_shared<families::Scaled>(std::move(base), factor));
}

// Modifiers: each describes an unnormalized density built from a base f.

/// f^e
struct PowerOfBase {
  double e;
};
/// f |x|^r
struct PowerTilt {
  double r;
};
/// f e^{s x}
struct ExpTilt {
  double s;
};
/// f^A |f'|^B
struct DerivativeTilt {
  double A, B;
};
/// f^A |f'|^B |f f''/f'^2 - shift|^C
struct CurvatureTilt {
  double A, B, C, shift;
};
/// f T(x)^r with T(x) = ∫_x^hi |(b-2)t|^{1/(b-2)} f(t) dt
struct TailTilt {
  double b, r;
};
/// f (f/h)^r
struct RelativeTilt {
  Density h;
  double r;
};

using Modifier = std::variant<PowerOfBase, PowerTilt, ExpTilt, DerivativeTilt, CurvatureTilt, TailTilt, RelativeTilt>;

namespace families {

/// log of the tail weight |(b-2)t|^{1/(b-2)}.
inline double log_tail_weight(double b, double t) { return std::log(std::abs((b - 2.0) * t)) / (b - 2.0); }

/// T(x) = ∫_x^hi |(b-2)t|^{1/(b-2)} f(t) dt for a base f on a subset of
/// (0, inf). Far in a light tail, where the table underflows, T is replaced
/// by its leading asymptotic w f / |(log w f)'|.
class UpperTail {
 public:
  UpperTail(Density f, double b) : f_(std::move(f)), b_(b) {
    require(b != 2.0, ErrorKind::InvalidArgument, "upper tail requires b != 2");
    require(f_.support().lo >= 0.0, ErrorKind::PreconditionViolated, "upper tail requires support in (0, inf)");
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-300;
    cfg.singular_points = f_.singular_points();
    Density base = f_;
    table_ = std::make_shared<CumulativeTable>(cumulative(
        [base, b](double t) { return std::exp(log_tail_weight(b, t) + base.model().log_pdf(t)); }, f_.support(), 64,
        cfg));
  }

  double b() const { return b_; }
  const Density& base() const { return f_; }
  const CumulativeTable& table() const { return *table_; }

  double log_value(double x) const {
    const double t = table_->upper(x);
    if (t > 1e-250) return std::log(t);
    if (f_.max_order() >= 1) {
      const double phi1 = f_.model().score(x) + 1.0 / ((b_ - 2.0) * x);
      if (phi1 < 0) return log_tail_weight(b_, x) + f_.model().log_pdf(x) - std::log(-phi1);
    }
    return t > 0 ? std::log(t) : -kInf;
  }

  /// w f / T, the logarithmic derivative of T with its sign flipped.
  double hazard(double x) const {
    return std::exp(log_tail_weight(b_, x) + f_.model().log_pdf(x) - log_value(x));
  }

 private:
  Density f_;
  double b_;
  std::shared_ptr<const CumulativeTable> table_;
};

class Numeric final : public DensityModel {
 public:
  Numeric(Density base, Modifier mod) : base_(std::move(base)), mod_(std::move(mod)) {
    std::visit([this](const auto& m) { setup(m); }, mod_);
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.singular_points = singular_points();
    try {
      log_z_ = integrate_log([this](double x) { return log_unnormalized(x); }, support(), cfg).log_value;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ZeroMass) throw;
      fail(ErrorKind::NotNormalizable, spec() + ": " + e.what());
    }
    require(std::isfinite(log_z_), ErrorKind::NotNormalizable, spec() + ": mass not finite");
  }

  std::string family() const override {
    return std::visit([](const auto& m) { return name_of(m); }, mod_);
  }
  std::vector<Param> params() const override {
    return std::visit([](const auto& m) { return params_of(m); }, mod_);
  }
  Interval support() const override { return base_.support(); }
  int max_order() const override { return max_order_; }
  std::optional<bool> decreasing() const override { return decreasing_; }
  std::vector<double> singular_points() const override {
    auto s = base_.singular_points();
    if (std::holds_alternative<PowerTilt>(mod_) && support().contains(0.0)) s.push_back(0.0);
    if (const auto* rt = std::get_if<RelativeTilt>(&mod_))
      for (double v : rt->h.singular_points()) s.push_back(v);
    return s;
  }
  double log_normalizer() const override { return log_z_; }
  double log_pdf(double x) const override { return log_unnormalized(x) - log_z_; }
  double score(double x) const override {
    return std::visit([&](const auto& m) { return score_of(m, x); }, mod_);
  }
  double score_slope(double x) const override {
    return std::visit([&](const auto& m) { return slope_of(m, x); }, mod_);
  }
  std::string spec() const override {
    std::string s = family() + ":base=(" + base_.spec() + ")";
    if (const auto* rt = std::get_if<RelativeTilt>(&mod_)) s += ",h=(" + rt->h.spec() + ")";
    for (const auto& p : params()) s += "," + p.name + "=" + detail::fmt(p.value);
    return s;
  }

  const Density& base() const { return base_; }
  const Modifier& modifier() const { return mod_; }

  double log_unnormalized(double x) const {
    return std::visit([&](const auto& m) { return log_of(m, x); }, mod_);
  }

 private:
  const DensityModel& f() const { return base_.model(); }
  double lf(double x) const { return f().log_pdf(x); }

  // PowerOfBase
  static std::string name_of(const PowerOfBase&) { return "escort"; }
  static std::vector<Param> params_of(const PowerOfBase& m) { return {{"exp", m.e}}; }
  void setup(const PowerOfBase& m) {
    max_order_ = base_.max_order();
    const auto d = base_.declared_decreasing();
    if (d && *d && m.e > 0) decreasing_ = true;
  }
  double log_of(const PowerOfBase& m, double x) const { return m.e * lf(x); }
  double score_of(const PowerOfBase& m, double x) const { return m.e * f().score(x); }
  double slope_of(const PowerOfBase& m, double x) const { return m.e * f().score_slope(x); }

  // PowerTilt
  static std::string name_of(const PowerTilt&) { return "tilt_power"; }
  static std::vector<Param> params_of(const PowerTilt& m) { return {{"r", m.r}}; }
  void setup(const PowerTilt& m) {
    max_order_ = base_.max_order();
    const auto d = base_.declared_decreasing();
    if (d && *d && m.r <= 0 && support().lo >= 0) decreasing_ = true;
  }
  double log_of(const PowerTilt& m, double x) const { return lf(x) + m.r * std::log(std::abs(x)); }
  double score_of(const PowerTilt& m, double x) const { return f().score(x) + m.r / x; }
  double slope_of(const PowerTilt& m, double x) const { return f().score_slope(x) - m.r / (x * x); }

  // ExpTilt
  static std::string name_of(const ExpTilt&) { return "tilt_exp"; }
  static std::vector<Param> params_of(const ExpTilt& m) { return {{"s", m.s}}; }
  void setup(const ExpTilt& m) {
    max_order_ = base_.max_order();
    const auto d = base_.declared_decreasing();
    if (d && *d && m.s <= 0) decreasing_ = true;
  }
  double log_of(const ExpTilt& m, double x) const { return lf(x) + m.s * x; }
  double score_of(const ExpTilt& m, double x) const { return f().score(x) + m.s; }
  double slope_of(const ExpTilt&, double x) const { return f().score_slope(x); }

  // DerivativeTilt: log = (A+B) log f + B log|s1|
  static std::string name_of(const DerivativeTilt&) { return "tilt_derivative"; }
  static std::vector<Param> params_of(const DerivativeTilt& m) { return {{"A", m.A}, {"B", m.B}}; }
  void setup(const DerivativeTilt&) {
    require(base_.max_order() >= 1, ErrorKind::NotDifferentiable, "derivative tilt needs a differentiable base");
    max_order_ = std::min(1, base_.max_order() - 1);
  }
  double log_of(const DerivativeTilt& m, double x) const {
    return (m.A + m.B) * lf(x) + m.B * detail::log_abs(f().score(x));
  }
  double score_of(const DerivativeTilt& m, double x) const {
    const double s1 = f().score(x);
    return (m.A + m.B) * s1 + m.B * f().score_slope(x) / s1;
  }
  double slope_of(const DerivativeTilt&, double) const {
    fail(ErrorKind::NotDifferentiable, "derivative tilt has no second derivative");
  }

  // CurvatureTilt
  static std::string name_of(const CurvatureTilt&) { return "tilt_curvature"; }
  static std::vector<Param> params_of(const CurvatureTilt& m) {
    return {{"A", m.A}, {"B", m.B}, {"C", m.C}, {"shift", m.shift}};
  }
  void setup(const CurvatureTilt&) {
    require(base_.max_order() >= 2, ErrorKind::NotDifferentiable, "curvature tilt needs a twice differentiable base");
    max_order_ = 0;
  }
  double log_of(const CurvatureTilt& m, double x) const {
    const double s1 = f().score(x);
    const double r = 1.0 + f().score_slope(x) / (s1 * s1);
    return (m.A + m.B) * lf(x) + m.B * detail::log_abs(s1) + m.C * detail::log_abs(r - m.shift);
  }
  double score_of(const CurvatureTilt&, double) const {
    fail(ErrorKind::NotDifferentiable, "curvature tilt is not differentiable here");
  }
  double slope_of(const CurvatureTilt&, double) const {
    fail(ErrorKind::NotDifferentiable, "curvature tilt is not differentiable here");
  }

  // TailTilt
  static std::string name_of(const TailTilt&) { return "tilt_tail"; }
  static std::vector<Param> params_of(const TailTilt& m) { return {{"b", m.b}, {"r", m.r}}; }
  void setup(const TailTilt& m) {
    tail_ = std::make_shared<UpperTail>(base_, m.b);
    max_order_ = std::min(2, base_.max_order() + 1);
  }
  double log_of(const TailTilt& m, double x) const {
    const double lt = tail_->log_value(x);
    if (lt == -kInf) return m.r > 0 ? -kInf : (m.r == 0 ? lf(x) : kInf);
    return lf(x) + m.r * lt;
  }
  double score_of(const TailTilt& m, double x) const { return f().score(x) - m.r * tail_->hazard(x); }
  double slope_of(const TailTilt& m, double x) const {
    // (T'/T)' = T''/T - (T'/T)^2 with T' = -w f, T'' = -w f ((log w)' + s1).
    const double hz = tail_->hazard(x);
    const double lw1 = 1.0 / ((m.b - 2.0) * x);
    return f().score_slope(x) + m.r * (-hz * (lw1 + f().score(x)) - hz * hz);
  }

  // RelativeTilt: log = (1+r) log f - r log h
  static std::string name_of(const RelativeTilt&) { return "tilt_relative"; }
  static std::vector<Param> params_of(const RelativeTilt& m) { return {{"r", m.r}}; }
  void setup(const RelativeTilt& m) {
    require_same_support(base_, m.h);
    max_order_ = std::min(base_.max_order(), m.h.max_order());
  }
  double log_of(const RelativeTilt& m, double x) const { return (1.0 + m.r) * lf(x) - m.r * m.h.model().log_pdf(x); }
  double score_of(const RelativeTilt& m, double x) const {
    return (1.0 + m.r) * f().score(x) - m.r * m.h.model().score(x);
  }
  double slope_of(const RelativeTilt& m, double x) const {
    return (1.0 + m.r) * f().score_slope(x) - m.r * m.h.model().score_slope(x);
  }

  Density base_;
  Modifier mod_;
  double log_z_ = 0.0;
  int max_order_ = 0;
  std::optional<bool> decreasing_;
  std::shared_ptr<const UpperTail> tail_;
};

}  // namespace families

using families::UpperTail;

/// Normalized density ∝ modifier applied to base.
inline Density normalize(const Density& base, Modifier mod) {
  return Density(std::make_shared<families::Numeric>(base, std::move(mod)));
}

/// g ∝ f^e. The identity exponent returns f itself.
inline Density escort(const Density& f, double e) {
  if (e == 1.0) return f;
  return normalize(f, PowerOfBase{e});
}

struct DensityReport {
  double mass = 0.0;
  double min_pdf_sampled = 0.0;
  bool ok = false;
};

/// Positivity is judged on log f, so far-tail samples that underflow in
/// double precision still count as positive.
inline DensityReport check_density(const Density& d) {
  DensityReport rep;
  QuadratureConfig cfg;
  cfg.singular_points = d.singular_points();
  rep.mass = integrate([&](double x) { return std::exp(d.model().log_pdf(x)); }, d.support(), cfg).value;
  double min_log = kInf;
  for (double x : interior_points(d.support(), 512)) {
    const double l = d.log_pdf(x);
    min_log = std::isnan(l) ? -kInf : std::min(min_log, l);
  }
  rep.min_pdf_sampled = std::exp(min_log);
  rep.ok = std::abs(rep.mass - 1.0) <= 1e-8 && min_log > -kInf;
  return rep;
}

/// Declared trait plus sampled verification on 512 interior points.
inline bool is_decreasing(const Density& d) {
  const auto declared = d.declared_decreasing();
  if (declared && !*declared) return false;
  const auto xs = interior_points(d.support(), 512);
  if (d.max_order() >= 1) {
    for (double x : xs)
      if (!(d.score(x) < 0)) return false;
    return true;
  }
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(d.log_pdf(xs[i]) < d.log_pdf(xs[i - 1]))) return false;
  return true;
}

}  // namespace renyi
