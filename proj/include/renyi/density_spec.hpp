#pragma once

// Text form of a density:
//   spec  := name [ ':' item { ',' item } ]
//   item  := key '=' ( number | '(' spec ')' )
// Nested densities (base, h) are always parenthesized, e.g.
//   escort:base=(exponential:rate=1),exp=2

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "renyi/densities.hpp"
#include "renyi/error.hpp"

namespace renyi {

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : s_(text) {}

  Density parse_all() {
    Density d = parse_spec();
    skip_ws();
    if (pos_ != s_.size()) error("unexpected trailing text");
    return d;
  }

 private:
  struct Items {
    std::map<std::string, double> numbers;
    std::map<std::string, Density> densities;
  };

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::ParseError, what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (pos_ == start) error("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    double v = 0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    if (first != last && *first == '+') ++first;
    auto r = std::from_chars(first, last, v);
    if (r.ec != std::errc() || r.ptr == first) error("expected a number");
    pos_ = static_cast<std::size_t>(r.ptr - s_.data());
    return v;
  }

  Density parse_spec() {
    const std::string name = ident();
    Items items;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      for (;;) {
        const std::string key = ident();
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '=') error("expected '=' after " + key);
        ++pos_;
        skip_ws();
        if (items.numbers.count(key) || items.densities.count(key)) error("duplicate key " + key);
        if (pos_ < s_.size() && s_[pos_] == '(') {
          ++pos_;
          items.densities.emplace(key, parse_spec());
          skip_ws();
          if (pos_ >= s_.size() || s_[pos_] != ')') error("expected ')'");
          ++pos_;
        } else {
          items.numbers[key] = number();
        }
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    return build(name, items);
  }

  Density build(const std::string& name, Items& it) {
    std::set<std::string> used;
    auto num = [&](const std::string& k, std::optional<double> def = std::nullopt) {
      used.insert(k);
      auto f = it.numbers.find(k);
      if (f != it.numbers.end()) return f->second;
      if (!def) error(name + " requires " + k);
      return *def;
    };
    auto den = [&](const std::string& k) {
      used.insert(k);
      auto f = it.densities.find(k);
      if (f == it.densities.end()) error(name + " requires a nested density " + k + "=(...)");
      return f->second;
    };
    auto make = [&]() -> Density {
      if (name == "uniform") return uniform(num("lo", 0.0), num("hi", 1.0));
      if (name == "exponential") return exponential(num("rate", 1.0));
      if (name == "gaussian" || name == "normal") return gaussian(num("mu", 0.0), num("sigma", 1.0));
      if (name == "half_gen_normal") return half_generalized_normal(num("k", 2.0), num("scale", 1.0));
      if (name == "half_gaussian") return half_generalized_normal(2.0, num("scale", 1.0));
      if (name == "gen_normal") return generalized_normal(num("k", 2.0), num("scale", 1.0));
      if (name == "q_exponential") return q_exponential(num("q"), num("rate", 1.0));
      if (name == "weibull") return weibull(num("shape"), num("scale", 1.0));
      if (name == "gamma") return generalized_gamma(num("scale", 1.0), num("shape"), 1.0);
      if (name == "gen_gamma") return generalized_gamma(num("a", 1.0), num("d"), num("p"));
      if (name == "pareto") return pareto(num("xm", 1.0), num("alpha"));
      if (name == "rayleigh") return rayleigh(num("sigma", 1.0));
      if (name == "scaled") return scaled_unnormalized(den("base"), num("factor"));
      if (name == "escort") return escort(den("base"), num("exp"));
      if (name == "tilt_power") return normalize(den("base"), PowerTilt{num("r")});
      if (name == "tilt_exp") return normalize(den("base"), ExpTilt{num("s")});
      if (name == "tilt_derivative") return normalize(den("base"), DerivativeTilt{num("A"), num("B")});
      if (name == "tilt_curvature")
        return normalize(den("base"), CurvatureTilt{num("A"), num("B"), num("C"), num("shift")});
      if (name == "tilt_tail") return normalize(den("base"), TailTilt{num("b"), num("r")});
      if (name == "tilt_relative") return normalize(den("base"), RelativeTilt{den("h"), num("r")});
      error("unknown density family '" + name + "'");
    };
    Density d = [&]() {
      try {
        return make();
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) fail(ErrorKind::ParseError, e.what());
        throw;
      }
    }();
    for (const auto& [k, v] : it.numbers)
      if (!used.count(k)) error("unknown key '" + k + "' for " + name);
    for (const auto& [k, v] : it.densities)
      if (!used.count(k)) error("unknown key '" + k + "' for " + name);
    return d;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the density grammar above; malformed input raises ParseError.
inline Density parse_density(std::string_view text) { return detail::SpecParser(text).parse_all(); }

}  // namespace renyi
