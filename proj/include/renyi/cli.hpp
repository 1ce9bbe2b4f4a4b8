#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "renyi/acceptance.hpp"
#include "renyi/densities.hpp"
#include "renyi/density_spec.hpp"
#include "renyi/functionals.hpp"
#include "renyi/inequalities.hpp"
#include "renyi/report.hpp"
#include "renyi/transforms.hpp"
#include "renyi/verification.hpp"

namespace renyi::cli {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kNumerical = 3 };

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DegenerateParameters: return kUsage;
    default: return kNumerical;
  }
}

/// Flags shared by every subcommand.
struct Global {
  std::string config;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 42;
  bool seed_given = false;
  std::optional<double> tol;
  bool strict = false;
  bool paper_witness = false;
  bool no_timestamp = false;
  unsigned threads = 0;  // 0: hardware concurrency

  CheckOptions check_options() const {
    CheckOptions o;
    if (tol) o.tol_floor = *tol;
    return o;
  }
  WitnessMode witness_mode() const { return paper_witness ? WitnessMode::Paper : WitnessMode::Corrected; }
};

/// Values given on the command line for a single theorem instance.
struct InstanceArgs {
  std::string theorem, f, g, h;
  double alpha = 2.0, beta = 0.0, xi = 1.0, a = 0.0, b = 1.0;
  bool witness = false;
  std::string replay;
};

namespace detail {

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
}

/// A bare instance object, or the worst case of a JSON-lines report.
inline json load_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json j = json::parse(text, nullptr, false);
  if (!j.is_discarded()) return j.contains("worst_case") ? j.at("worst_case") : j;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const json r = json::parse(line, nullptr, false);
    if (!r.is_discarded() && r.contains("summary") && r.at("summary").contains("worst_case"))
      return r.at("summary").at("worst_case");
  }
  fail(ErrorKind::ParseError, path + ": no instance or report summary with a worst case");
}

inline void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::ParseError, where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(ErrorKind::ParseError, "unknown key '" + k + "' in " + where);
}

inline double get_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) fail(ErrorKind::ParseError, where + " needs '" + key + "'");
  if (!j.at(key).is_number()) fail(ErrorKind::ParseError, where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::string get_string(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) fail(ErrorKind::ParseError, where + " needs '" + key + "'");
  if (!j.at(key).is_string()) fail(ErrorKind::ParseError, where + ": '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

/// Grid axis: a number, a list of numbers, {"from","to","step"} (inclusive)
/// or {"from","to","count"}.
inline std::vector<double> parse_axis(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array()) {
    std::vector<double> v;
    for (const auto& e : j) {
      if (!e.is_number()) fail(ErrorKind::ParseError, where + ": list entries must be numbers");
      v.push_back(e.get<double>());
    }
    if (v.empty()) fail(ErrorKind::ParseError, where + ": empty list");
    return v;
  }
  if (j.is_object()) {
    const double from = get_number(j, "from", where), to = get_number(j, "to", where);
    if (j.contains("step") == j.contains("count"))
      fail(ErrorKind::ParseError, where + ": give exactly one of 'step' and 'count'");
    std::vector<double> v;
    if (j.contains("step")) {
      only_keys(j, {"from", "to", "step"}, where);
      const double step = get_number(j, "step", where);
      if (!(step > 0) || !(to >= from)) fail(ErrorKind::ParseError, where + ": need step > 0 and to >= from");
      const double span = (to - from) / step;
      if (span > 1e6) fail(ErrorKind::ParseError, where + ": too many points");
      const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
      for (std::size_t k = 0; k < n; ++k) v.push_back(from + static_cast<double>(k) * step);
    } else {
      only_keys(j, {"from", "to", "count"}, where);
      const double c = get_number(j, "count", where);
      if (!(c >= 1) || c != std::floor(c) || c > 1e6) fail(ErrorKind::ParseError, where + ": count must be a positive integer");
      const auto n = static_cast<std::size_t>(c);
      for (std::size_t k = 0; k < n; ++k)
        v.push_back(n == 1 ? from : from + (to - from) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    return v;
  }
  fail(ErrorKind::ParseError, where + ": expected a number, a list or a range object");
}

inline void write_output(const Global& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(g.out, std::ios::binary);
  if (!os) fail(ErrorKind::ParseError, "cannot write '" + g.out + "'");
  os << text;
}

inline std::string render_report(const Global& g, const std::string& command, const std::vector<json>& records,
                                 const json& summary, const std::vector<std::string>& columns) {
  std::ostringstream os;
  if (g.format == "csv") {
    report::write_csv(os, columns, records);
  } else {
    report::write_json_lines(os, report::header_json(g.seed, !g.no_timestamp, command), records, summary);
  }
  return os.str();
}

/// Mass and positivity of a user-supplied density; a failure is fatal only
/// in strict mode.
inline void screen_density(const Density& d, const Global& g, std::vector<std::string>& notes) {
  const auto r = check_density(d);
  if (r.ok) return;
  const std::string msg = d.spec() + " fails the density check (mass " + report::format_number(r.mass) + ")";
  if (g.strict) fail(ErrorKind::PreconditionViolated, msg);
  notes.push_back(msg);
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// eval

struct EvalArgs {
  std::string functional, density, g, h;
  std::optional<double> alpha, xi, a, b, p, lambda;
};

inline int cmd_eval(const Global& gl, const EvalArgs& e) {
  const Density f = parse_density(e.density);
  auto need = [](const std::optional<double>& v, const char* name) {
    if (!v) fail(ErrorKind::ParseError, std::string("this functional needs --") + name);
    return *v;
  };
  auto other = [](const std::string& s, const char* name) {
    if (s.empty()) fail(ErrorKind::ParseError, std::string("this functional needs --") + name);
    return parse_density(s);
  };
  json j = {{"functional", e.functional}, {"density", f.spec()}};
  Estimate v{0.0, 0.0};
  const auto& fn = e.functional;
  if (fn == "shannon_entropy") {
    v = shannon_entropy(f);
  } else if (fn == "renyi_entropy") {
    j["alpha"] = need(e.alpha, "alpha");
    v = renyi_entropy(f, *e.alpha);
  } else if (fn == "entropy_power") {
    j["alpha"] = need(e.alpha, "alpha");
    v = {entropy_power(f, *e.alpha), 0.0};
  } else if (fn == "kl_divergence") {
    const Density g = other(e.g, "g");
    j["g"] = g.spec();
    v = kl_divergence(f, g);
  } else if (fn == "renyi_divergence") {
    const Density g = other(e.g, "g");
    j["g"] = g.spec();
    j["alpha"] = need(e.alpha, "alpha");
    v = renyi_divergence(f, g, *e.alpha);
  } else if (fn == "shannon_cross_entropy") {
    const Density g = other(e.g, "g");
    j["g"] = g.spec();
    v = shannon_cross_entropy(f, g);
  } else if (fn == "renyi_cross_entropy") {
    const Density g = other(e.g, "g");
    j["g"] = g.spec();
    j["alpha"] = need(e.alpha, "alpha");
    v = renyi_cross_entropy(f, g, *e.alpha);
  } else if (fn == "escort_cross_entropy") {
    const Density g = other(e.g, "g");
    j["g"] = g.spec();
    j["alpha"] = need(e.alpha, "alpha");
    j["xi"] = need(e.xi, "xi");
    v = escort_cross_entropy(f, g, *e.alpha, *e.xi);
  } else if (fn == "cross_divergence") {
    const Density g = other(e.g, "g"), h = other(e.h, "h");
    j["g"] = g.spec();
    j["h"] = h.spec();
    j["a"] = need(e.a, "a");
    j["b"] = need(e.b, "b");
    v = cross_divergence(f, g, h, *e.a, *e.b);
  } else if (fn == "fisher") {
    j["p"] = need(e.p, "p");
    j["lambda"] = need(e.lambda, "lambda");
    const auto r = generalized_fisher(f, *e.p, *e.lambda);
    j["phi"] = report::number(r.phi);
    v = {r.F, r.error};
  } else if (fn == "deviation") {
    j["p"] = need(e.p, "p");
    v = deviation(f, *e.p);
  } else if (fn == "mass") {
    const auto r = check_density(f);
    j["min_pdf_sampled"] = report::number(r.min_pdf_sampled);
    j["ok"] = r.ok;
    v = {r.mass, 0.0};
  } else {
    fail(ErrorKind::ParseError, "unknown functional '" + fn + "'");
  }
  j["value"] = report::number(v.value);
  j["error"] = report::number(v.error);
  if (gl.format == "csv") {
    std::vector<std::string> cols;
    for (const auto& [k, val] : j.items()) cols.push_back("/" + k);
    std::ostringstream os;
    report::write_csv(os, cols, {j});
    detail::write_output(gl, os.str());
  } else {
    detail::write_output(gl, j.dump() + "\n");
  }
  return kOk;
}

// check

inline Extras extras_from(const InstanceArgs& a) {
  Extras e;
  e.xi = a.xi;
  e.a = a.a;
  e.b = a.b;
  if (!a.h.empty()) e.h = parse_density(a.h);
  return e;
}

inline Instance instance_from_json(const json& j) {
  const std::string where = "replay instance";
  detail::only_keys(j, {"theorem", "f", "g", "alpha", "beta", "extras", "index"}, where);
  Instance in;
  in.theorem = parse_theorem(detail::get_string(j, "theorem", where));
  in.f = parse_density(detail::get_string(j, "f", where));
  in.g = parse_density(detail::get_string(j, "g", where));
  in.alpha = detail::get_number(j, "alpha", where);
  in.beta = detail::get_number(j, "beta", where);
  if (j.contains("extras")) {
    const auto& x = j.at("extras");
    detail::only_keys(x, {"xi", "a", "b", "h"}, "replay extras");
    if (x.contains("xi")) in.extras.xi = detail::get_number(x, "xi", "replay extras");
    if (x.contains("a")) in.extras.a = detail::get_number(x, "a", "replay extras");
    if (x.contains("b")) in.extras.b = detail::get_number(x, "b", "replay extras");
    if (x.contains("h")) in.extras.h = parse_density(detail::get_string(x, "h", "replay extras"));
  }
  return in;
}

inline int finish_rows(const Global& gl, const std::string& command, const std::vector<report::Row>& rows,
                       const std::vector<std::string>& extra_notes = {}) {
  std::vector<json> records;
  report::Summary sum;
  bool noted = !extra_notes.empty();
  for (const auto& r : rows) {
    records.push_back(report::record_json(r));
    sum.add(r);
    if (r.check && !r.check->notes.empty()) noted = true;
  }
  json summary = sum.to_json();
  // The worst checked row, replayable with check --replay on the report file.
  const report::Row* worst = nullptr;
  for (const auto& r : rows)
    if (r.check && !r.check->conditioning_warning && (!worst || r.check->gap < worst->check->gap)) worst = &r;
  if (worst) {
    summary["worst_case"] = {{"theorem", std::string(to_string(worst->theorem))},
                             {"f", worst->f},
                             {"g", worst->g},
                             {"alpha", worst->alpha},
                             {"beta", worst->beta},
                             {"extras", report::extras_json(worst->theorem, worst->extras)}};
  }
  if (!extra_notes.empty()) summary["notes"] = extra_notes;
  detail::write_output(gl, detail::render_report(gl, command, records, summary, report::check_columns()));
  if (sum.failures > 0) return kViolation;
  if (gl.strict && (sum.errors > 0 || noted)) return kNumerical;
  return kOk;
}

inline int cmd_check(const Global& gl, const InstanceArgs& a) {
  Instance in;
  std::vector<std::string> notes;
  if (!a.replay.empty()) {
    in = instance_from_json(detail::load_replay(a.replay));
  } else {
    if (a.theorem.empty() || a.f.empty()) fail(ErrorKind::ParseError, "check needs --theorem and --f (or --replay)");
    in.theorem = parse_theorem(a.theorem);
    in.f = parse_density(a.f);
    in.alpha = a.alpha;
    in.beta = a.beta;
    in.extras = extras_from(a);
    if (a.witness) {
      in.g = equality_witness(in.theorem, in.f, a.alpha, a.beta, in.extras, gl.witness_mode());
    } else {
      if (a.g.empty()) fail(ErrorKind::ParseError, "check needs --g or --witness");
      in.g = parse_density(a.g);
    }
  }
  detail::screen_density(in.f, gl, notes);
  if (!a.witness) detail::screen_density(in.g, gl, notes);
  if (in.extras.h) detail::screen_density(*in.extras.h, gl, notes);
  const CheckReport r = run_instance(in, gl.check_options());
  for (const auto& n : r.notes) std::cerr << "note: " << n << '\n';
  return finish_rows(gl, "check", {report::row_of(in, r)}, notes);
}

// sweep

struct SuitePlan {
  TheoremId theorem = TheoremId::RRR;
  std::optional<Density> f, g, h;
  bool g_witness = false;
  std::vector<double> alpha, beta, xi{1.0}, a{0.0}, b{1.0};
  std::size_t random_n = 0;
  std::uint64_t seed = 0;
  CheckOptions opt;

  bool random() const { return random_n > 0; }
  std::size_t size() const {
    return random() ? random_n : alpha.size() * beta.size() * xi.size() * a.size() * b.size();
  }
};

inline SuitePlan plan_suite(const json& s, std::size_t index, const Global& gl, const CheckOptions& base) {
  const std::string where = "suite " + std::to_string(index);
  SuitePlan p;
  p.theorem = parse_theorem(detail::get_string(s, "theorem", where));
  p.opt = base;
  p.seed = gl.seed + index;
  if (s.contains("seed")) {
    const double v = detail::get_number(s, "seed", where);
    if (!(v >= 0) || v != std::floor(v)) fail(ErrorKind::ParseError, where + ": seed must be a non-negative integer");
    p.seed = static_cast<std::uint64_t>(v);
  }
  if (s.contains("tol")) {
    p.opt.tol_floor = detail::get_number(s, "tol", where);
    if (!(p.opt.tol_floor > 0)) fail(ErrorKind::ParseError, where + ": tol must be positive");
  }
  if (s.contains("random")) {
    detail::only_keys(s, {"name", "theorem", "random", "seed", "tol"}, where);
    const auto& r = s.at("random");
    detail::only_keys(r, {"n"}, where + " random");
    const double n = detail::get_number(r, "n", where + " random");
    if (!(n >= 1) || n != std::floor(n) || n > 1e6) fail(ErrorKind::ParseError, where + ": n must be in [1, 1e6]");
    p.random_n = static_cast<std::size_t>(n);
    return p;
  }
  detail::only_keys(s, {"name", "theorem", "f", "g", "h", "alpha", "beta", "xi", "a", "b", "seed", "tol"}, where);
  p.f = parse_density(detail::get_string(s, "f", where));
  const std::string g = detail::get_string(s, "g", where);
  if (g == "witness") p.g_witness = true;
  else p.g = parse_density(g);
  if (s.contains("h")) p.h = parse_density(detail::get_string(s, "h", where));
  if (!s.contains("alpha") || !s.contains("beta")) fail(ErrorKind::ParseError, where + " needs 'alpha' and 'beta'");
  p.alpha = detail::parse_axis(s.at("alpha"), where + " alpha");
  p.beta = detail::parse_axis(s.at("beta"), where + " beta");
  if (s.contains("xi")) p.xi = detail::parse_axis(s.at("xi"), where + " xi");
  if (s.contains("a")) p.a = detail::parse_axis(s.at("a"), where + " a");
  if (s.contains("b")) p.b = detail::parse_axis(s.at("b"), where + " b");
  return p;
}

/// Point k of a grid suite in lexicographic order over (alpha, beta, xi, a, b).
inline report::Row run_grid_point(const SuitePlan& p, std::size_t k, WitnessMode mode) {
  const std::size_t nb = p.b.size(), na = p.a.size(), nx = p.xi.size(), nbeta = p.beta.size();
  report::Row row;
  row.theorem = p.theorem;
  row.extras.b = p.b[k % nb];
  k /= nb;
  row.extras.a = p.a[k % na];
  k /= na;
  row.extras.xi = p.xi[k % nx];
  k /= nx;
  row.beta = p.beta[k % nbeta];
  k /= nbeta;
  row.alpha = p.alpha[k];
  row.extras.h = p.h;
  row.f = p.f->spec();
  try {
    const Density g =
        p.g_witness ? equality_witness(p.theorem, *p.f, row.alpha, row.beta, row.extras, mode) : *p.g;
    row.g = g.spec();
    row.check = check(p.theorem, *p.f, g, row.alpha, row.beta, row.extras, p.opt);
  } catch (const std::exception& e) {
    if (row.g.empty()) row.g = p.g_witness ? "witness" : p.g->spec();
    row.error = e.what();
  }
  return row;
}

inline report::Row run_random_point(const SuitePlan& p, std::size_t k) {
  std::size_t rejected = 0;
  const auto d = evaluate_draw(standard_sampler(p.theorem), p.seed, k, p.opt, rejected);
  if (d) return report::row_of(d->instance, d->report);
  report::Row row;
  row.theorem = p.theorem;
  row.error = "no evaluable draw in 20 attempts";
  return row;
}

inline int cmd_sweep(Global gl) {
  if (gl.config.empty()) fail(ErrorKind::ParseError, "sweep needs --config");
  const json cfg = detail::load_json(gl.config);
  detail::only_keys(cfg, {"seed", "tol", "suites", "output"}, "config");
  if (cfg.contains("seed") && !gl.seed_given) gl.seed = cfg.at("seed").get<std::uint64_t>();
  CheckOptions base = gl.check_options();
  if (cfg.contains("tol") && !gl.tol) {
    base.tol_floor = detail::get_number(cfg, "tol", "config");
    if (!(base.tol_floor > 0)) fail(ErrorKind::ParseError, "config: tol must be positive");
  }
  if (cfg.contains("output")) {
    const auto& o = cfg.at("output");
    detail::only_keys(o, {"path", "format"}, "config output");
    if (o.contains("path") && gl.out.empty()) gl.out = detail::get_string(o, "path", "config output");
    if (o.contains("format")) gl.format = detail::get_string(o, "format", "config output");
    if (gl.format != "json" && gl.format != "csv") fail(ErrorKind::ParseError, "format must be json or csv");
  }
  if (!cfg.contains("suites") || !cfg.at("suites").is_array() || cfg.at("suites").empty())
    fail(ErrorKind::ParseError, "config needs a non-empty 'suites' list");
  std::vector<SuitePlan> plans;
  std::size_t total = 0;
  for (const auto& s : cfg.at("suites")) {
    plans.push_back(plan_suite(s, plans.size(), gl, base));
    total += plans.back().size();
    if (total > 1000000) fail(ErrorKind::ParseError, "sweep exceeds 1e6 rows");
  }
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t s = 0; s < plans.size(); ++s)
    for (std::size_t k = 0; k < plans[s].size(); ++k) jobs.emplace_back(s, k);
  std::vector<report::Row> rows(jobs.size());
  detail::parallel_for(jobs.size(), gl.threads, [&](std::size_t i) {
    const auto& p = plans[jobs[i].first];
    rows[i] = p.random() ? run_random_point(p, jobs[i].second) : run_grid_point(p, jobs[i].second, gl.witness_mode());
  });
  return finish_rows(gl, "sweep", rows);
}

// sharpness

struct SharpnessArgs {
  InstanceArgs inst;
  std::string family;
  std::vector<double> start;
  int budget = 2000;
};

inline int cmd_sharpness(const Global& gl, const SharpnessArgs& s) {
  const auto& a = s.inst;
  if (a.theorem.empty() || a.f.empty() || s.family.empty())
    fail(ErrorKind::ParseError, "sharpness needs --theorem, --f and --family");
  const TheoremId id = parse_theorem(a.theorem);
  const Density f = parse_density(a.f);
  const Extras e = extras_from(a);
  const ParametricFamily fam = family_by_name(s.family);
  std::vector<double> start = s.start;
  if (start.empty())
    for (std::size_t i = 0; i < fam.lower.size(); ++i) start.push_back(std::clamp(1.0, fam.lower[i], fam.upper[i]));
  if (start.size() != fam.lower.size())
    fail(ErrorKind::ParseError, s.family + " takes " + std::to_string(fam.lower.size()) + " parameters");
  NelderMeadOptions nm;
  nm.max_evaluations = s.budget;
  const auto o = minimize_gap(id, f, fam, a.alpha, a.beta, e, start, nm, gl.check_options());
  json j = {{"theorem", std::string(to_string(id))},
            {"f", f.spec()},
            {"family", fam.name},
            {"param_names", fam.param_names},
            {"alpha", a.alpha},
            {"beta", a.beta},
            {"extras", report::extras_json(id, e)},
            {"start", start},
            {"best_params", o.best_params},
            {"best_gap", report::number(o.best_gap)},
            {"initial_gap", report::number(o.initial_gap)},
            {"iterations", o.iterations},
            {"evaluations", o.evaluations},
            {"converged", o.converged}};
  try {
    const Density w = equality_witness(id, f, a.alpha, a.beta, e, gl.witness_mode());
    j["witness"] = w.spec();
    j["witness_gap"] = report::number(check(id, f, w, a.alpha, a.beta, e, gl.check_options()).gap);
  } catch (const Error& err) {
    j["witness_error"] = err.what();
  }
  detail::write_output(gl, j.dump() + "\n");
  const double tol = gl.check_options().tol_floor;
  if (std::isfinite(o.best_gap) && o.best_gap < -std::max(tol, 1e-6)) return kViolation;
  if (!o.converged) {
    std::cerr << "error: " << to_string(ErrorKind::BudgetExhausted) << ": no convergence in " << s.budget
              << " evaluations\n";
    return kNumerical;
  }
  return kOk;
}

// transform

struct TransformArgs {
  std::string f, kind, h, g;
  double xi = 1.0, a = 0.0, b = 1.0;
  std::optional<double> alpha, gamma;
  int nodes = 4096;
};

inline TransformSpec spec_from(const TransformArgs& t) {
  if (t.kind == "escort") return EscortSpec{t.xi};
  if (t.kind == "rel_escort") {
    if (t.h.empty()) fail(ErrorKind::ParseError, "rel_escort needs --h");
    return RelEscortSpec{parse_density(t.h), t.xi};
  }
  if (t.kind == "down") return DownSpec{t.a, t.b};
  if (t.kind == "up") return UpSpec{t.a};
  if (t.kind == "up_exp") return UpExpSpec{};
  fail(ErrorKind::ParseError, "unknown transformation '" + t.kind + "'");
}

inline int cmd_transform(const Global& gl, const TransformArgs& t) {
  if (t.f.empty() || t.kind.empty()) fail(ErrorKind::ParseError, "transform needs --f and --kind");
  const Density f = parse_density(t.f);
  const TransformSpec spec = spec_from(t);
  GridOptions go;
  go.nodes = t.nodes;
  const TransformedDensity tf = transform(f, spec, go);
  std::optional<TransformedDensity> tg;
  if (!t.g.empty()) tg = reciprocal_transform(parse_density(t.g), tf);
  const auto& m = tf.map();
  if (gl.format == "csv") {
    std::ostringstream os;
    os << "y,x,density" << (tg ? ",reciprocal" : "") << '\n';
    for (std::size_t i = m.lookup_lo; i <= m.lookup_hi; ++i) {
      os << report::format_number(m.y[i]) << ',' << report::format_number(m.x[i]) << ','
         << report::format_number(tf.values[i]);
      if (tg) os << ',' << report::format_number(tg->values[i]);
      os << '\n';
    }
    detail::write_output(gl, os.str());
    return kOk;
  }
  json j = {{"f", f.spec()},
            {"transform", describe(spec)},
            {"nodes", m.x.size()},
            {"window", {report::number(m.window.lo), report::number(m.window.hi)}},
            {"increasing", m.increasing},
            {"truncated_mass", report::number(m.truncated_mass)},
            {"span_residual", report::number(m.span_residual)},
            {"mass", report::number(tf.mass())}};
  if (tg) {
    j["g"] = t.g;
    j["reciprocal_mass"] = report::number(tg->mass());
  }
  if (t.alpha) {
    const double closed = renyi_of_transformed_closed(f, spec, *t.alpha);
    const double grid = grid_renyi(tf, *t.alpha);
    j["renyi"] = {{"alpha", *t.alpha}, {"closed", closed}, {"grid", grid}, {"difference", std::abs(grid - closed)}};
  }
  if (t.gamma) {
    if (!tg) fail(ErrorKind::ParseError, "--gamma needs --g");
    const double direct = renyi_divergence(f, parse_density(t.g), *t.gamma).value;
    const double grid = grid_divergence(tf, *tg, *t.gamma);
    j["divergence"] = {{"gamma", *t.gamma}, {"direct", direct}, {"grid", grid}, {"gap", std::abs(grid - direct)}};
  }
  detail::write_output(gl, j.dump() + "\n");
  return kOk;
}

// verify

inline acceptance::Settings settings_from(const json& cfg) {
  acceptance::Settings s;
  if (!cfg.contains("acceptance")) return s;
  const auto& a = cfg.at("acceptance");
  const std::string where = "acceptance";
  detail::only_keys(a, {"shannon_pairs", "rrr_instances", "transform_configs", "sweep_points", "identity_instances",
                        "discrete_instances", "tol_floor"},
                    where);
  auto count = [&](const char* key, std::size_t& dst) {
    if (!a.contains(key)) return;
    const double v = detail::get_number(a, key, where);
    if (!(v >= 1) || v != std::floor(v)) fail(ErrorKind::ParseError, std::string(key) + " must be a positive integer");
    dst = static_cast<std::size_t>(v);
  };
  count("shannon_pairs", s.shannon_pairs);
  count("rrr_instances", s.rrr_instances);
  count("transform_configs", s.transform_configs);
  count("sweep_points", s.sweep_points);
  count("identity_instances", s.identity_instances);
  count("discrete_instances", s.discrete_instances);
  if (a.contains("tol_floor")) {
    s.tol_floor = detail::get_number(a, "tol_floor", where);
    if (!(s.tol_floor > 0)) fail(ErrorKind::ParseError, "tol_floor must be positive");
  }
  return s;
}

inline json criterion_json(const acceptance::CriterionResult& r) {
  json ms = json::array();
  for (const auto& m : r.measures)
    ms.push_back({{"label", m.label},
                  {"value", report::number(m.value)},
                  {"bound", report::number(m.bound)},
                  {"relation", m.at_most ? "<=" : ">="},
                  {"ok", m.ok()}});
  return {{"criterion", r.id}, {"name", r.name},          {"pass", r.pass()},
          {"evaluated", r.evaluated}, {"rejected", r.rejected}, {"measures", ms}};
}

inline int cmd_verify(Global gl) {
  json cfg = json::object();
  if (!gl.config.empty()) {
    cfg = detail::load_json(gl.config);
    detail::only_keys(cfg, {"seed", "acceptance"}, "config");
  }
  if (cfg.contains("seed") && !gl.seed_given) gl.seed = cfg.at("seed").get<std::uint64_t>();
  acceptance::Settings s = settings_from(cfg);
  s.seed = gl.seed;
  if (gl.tol) s.tol_floor = *gl.tol;
  std::vector<json> records;
  std::size_t passes = 0, failures = 0;
  double worst = kInf;
  acceptance::run_all(s, [&](const acceptance::CriterionResult& r) {
    std::cerr << "criterion " << r.id << (r.pass() ? " PASS " : " FAIL ") << r.name << '\n';
    records.push_back(criterion_json(r));
    (r.pass() ? passes : failures) += 1;
    for (const auto& m : r.measures)
      if (m.label.rfind("worst gap", 0) == 0) worst = std::min(worst, m.value);
  });
  const json summary = {{"n", records.size()},
                        {"passes", passes},
                        {"failures", failures},
                        {"warnings", 0},
                        {"worst_gap", report::number(worst)}};
  static const std::vector<std::string> cols = {"/criterion", "/name", "/pass", "/evaluated", "/rejected"};
  detail::write_output(gl, detail::render_report(gl, "verify", records, summary, cols));
  return failures ? kViolation : kOk;
}

/// Parses argv and dispatches to a subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"Rényi-type functionals, transformations and sharp inequalities"};
  // "--h" names a density, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Global gl;
  app.add_option("--config", gl.config, "JSON configuration file");
  app.add_option("--out", gl.out, "Output path (default: standard output)");
  app.add_option("--format", gl.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  auto* seed_opt = app.add_option("--seed", gl.seed, "Random seed")->capture_default_str();
  double tol_value = 0.0;
  auto* tol_opt = app.add_option("--tol", tol_value, "Pass threshold floor")->check(CLI::PositiveNumber);
  app.add_flag("--strict", gl.strict, "Treat precondition warnings as fatal");
  app.add_flag("--paper-witness", gl.paper_witness, "Use the printed equality exponents for witnesses");
  app.add_flag("--no-timestamp", gl.no_timestamp, "Omit the timestamp from report headers");
  app.add_option("--threads", gl.threads, "Worker threads for sweeps (0: all cores)");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate one functional");
  eval->add_option("--functional", ev.functional)->required();
  eval->add_option("--density,--f", ev.density)->required();
  eval->add_option("--g", ev.g);
  eval->add_option("--h", ev.h);
  eval->add_option("--alpha,--order", ev.alpha);
  eval->add_option("--xi", ev.xi);
  eval->add_option("--a", ev.a);
  eval->add_option("--b", ev.b);
  eval->add_option("--p", ev.p);
  eval->add_option("--lambda", ev.lambda);

  auto add_instance = [](CLI::App* c, InstanceArgs& ia) {
    c->add_option("--theorem", ia.theorem);
    c->add_option("--f", ia.f);
    c->add_option("--alpha", ia.alpha);
    c->add_option("--beta", ia.beta);
    c->add_option("--xi", ia.xi);
    c->add_option("--a", ia.a);
    c->add_option("--b", ia.b);
    c->add_option("--h", ia.h);
  };
  InstanceArgs ck;
  auto* chk = app.add_subcommand("check", "Check one theorem instance");
  add_instance(chk, ck);
  chk->add_option("--g", ck.g);
  chk->add_flag("--witness", ck.witness, "Use the equality witness as g");
  chk->add_option("--replay", ck.replay, "Instance JSON written by a search");

  auto* swp = app.add_subcommand("sweep", "Run the suites of a configuration file");

  SharpnessArgs sh;
  auto* shp = app.add_subcommand("sharpness", "Minimize the gap over a parametric family");
  add_instance(shp, sh.inst);
  shp->add_option("--family", sh.family);
  shp->add_option("--start", sh.start)->delimiter(',');
  shp->add_option("--budget", sh.budget)->check(CLI::PositiveNumber);

  TransformArgs tr;
  auto* trf = app.add_subcommand("transform", "Build a transformed density on a grid");
  trf->add_option("--f", tr.f)->required();
  trf->add_option("--kind", tr.kind)->required()->check(CLI::IsMember({"escort", "rel_escort", "down", "up", "up_exp"}));
  trf->add_option("--xi", tr.xi);
  trf->add_option("--a", tr.a);
  trf->add_option("--b", tr.b);
  trf->add_option("--h", tr.h);
  trf->add_option("--g", tr.g);
  trf->add_option("--alpha", tr.alpha);
  trf->add_option("--gamma", tr.gamma);
  trf->add_option("--nodes", tr.nodes)->check(CLI::Range(64, 1 << 20));

  auto* ver = app.add_subcommand("verify", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  gl.seed_given = seed_opt->count() > 0;
  if (tol_opt->count() > 0) gl.tol = tol_value;

  try {
    if (*eval) return cmd_eval(gl, ev);
    if (*chk) return cmd_check(gl, ck);
    if (*swp) return cmd_sweep(gl);
    if (*shp) return cmd_sharpness(gl, sh);
    if (*trf) return cmd_transform(gl, tr);
    if (*ver) return cmd_verify(gl);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error: configuration: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace renyi::cli
