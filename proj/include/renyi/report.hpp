#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "renyi/inequalities.hpp"
#include "renyi/verification.hpp"

namespace renyi::report {

using json = nlohmann::json;

inline constexpr const char* kTool = "renyi";
inline constexpr const char* kVersion = "1.0.0";

/// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// JSON has no infinities; they are written as null.
inline json number(double v) { return std::isfinite(v) ? json(v == 0.0 ? 0.0 : v) : json(nullptr); }

inline json extras_json(TheoremId id, const Extras& e) {
  json j = json::object();
  for (const auto& p : used_extras(id, e)) j[p.name] = number(p.value);
  if (id == TheoremId::RelEscort && e.h) j["h"] = e.h->spec();
  return j;
}

/// One checked configuration, or the error that stopped its evaluation.
struct Row {
  TheoremId theorem = TheoremId::RRR;
  std::string f, g;
  double alpha = 0.0, beta = 0.0;
  Extras extras;
  std::optional<CheckReport> check;
  std::string error;
};

inline Row row_of(const CheckReport& r, const Density& f, const Density& g) {
  return {r.theorem, f.spec(), g.spec(), r.params.alpha, r.params.beta, r.extras, r, {}};
}

inline Row row_of(const Instance& in, const CheckReport& r) { return row_of(r, in.f, in.g); }

inline json record_json(const Row& row) {
  json j;
  j["theorem"] = std::string(to_string(row.theorem));
  j["f"] = row.f;
  j["g"] = row.g;
  j["alpha"] = number(row.alpha);
  j["beta"] = number(row.beta);
  if (row.check) {
    const auto& r = *row.check;
    j["gamma"] = number(r.params.gamma);
    j["extras"] = extras_json(row.theorem, row.extras);
    j["lhs"] = number(r.lhs);
    j["rhs"] = number(r.rhs);
    j["gap"] = number(r.gap);
    j["direction"] = r.reversed ? "reversed" : "forward";
    j["quad_error"] = number(r.quad_error);
    j["pass"] = r.pass;
    j["warning"] = r.conditioning_warning;
    if (!r.notes.empty()) j["notes"] = r.notes;
  } else {
    j["extras"] = extras_json(row.theorem, row.extras);
    j["error"] = row.error;
  }
  return j;
}

/// The replayable part of an instance: what check --replay reads back.
inline json instance_json(const Instance& in) {
  json j;
  j["theorem"] = std::string(to_string(in.theorem));
  j["f"] = in.f.spec();
  j["g"] = in.g.spec();
  j["alpha"] = in.alpha;
  j["beta"] = in.beta;
  j["extras"] = {{"xi", in.extras.xi}, {"a", in.extras.a}, {"b", in.extras.b}};
  if (in.extras.h) j["extras"]["h"] = in.extras.h->spec();
  j["index"] = in.index;
  return j;
}

struct Summary {
  std::size_t n = 0, passes = 0, failures = 0, warnings = 0, errors = 0;
  double worst_gap = kInf;

  void add(const Row& row) {
    ++n;
    if (!row.check) {
      ++errors;
      return;
    }
    if (row.check->conditioning_warning) {
      ++warnings;
      return;
    }
    if (row.check->pass) ++passes;
    else ++failures;
    worst_gap = std::min(worst_gap, row.check->gap);
  }

  json to_json() const {
    return {{"n", n},           {"passes", passes}, {"failures", failures},
            {"warnings", warnings}, {"errors", errors}, {"worst_gap", number(worst_gap)}};
  }
};

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json header_json(std::uint64_t seed, bool with_timestamp, const std::string& command) {
  json h = {{"tool", kTool}, {"version", kVersion}, {"command", command}, {"seed", seed}};
  if (with_timestamp) h["timestamp"] = utc_timestamp();
  return h;
}

/// Header line, one line per record, summary line.
inline void write_json_lines(std::ostream& os, const json& header, const std::vector<json>& records,
                             const json& summary) {
  os << json{{"header", header}}.dump() << '\n';
  for (const auto& r : records) os << r.dump() << '\n';
  os << json{{"summary", summary}}.dump() << '\n';
}

namespace detail {

inline std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return format_number(v.get<double>());
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace detail

/// Columns are JSON pointers into each record ("/extras/xi"); the header row
/// uses the pointer path without the leading slash.
inline void write_csv(std::ostream& os, const std::vector<std::string>& columns, const std::vector<json>& records) {
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c].substr(1);
  os << '\n';
  for (const auto& r : records) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const json::json_pointer ptr(columns[c]);
      os << (c ? "," : "") << (r.contains(ptr) ? detail::csv_field(r.at(ptr)) : "");
    }
    os << '\n';
  }
}

inline const std::vector<std::string>& check_columns() {
  static const std::vector<std::string> cols = {
      "/theorem", "/alpha",  "/beta", "/gamma",     "/extras/xi", "/extras/a", "/extras/b", "/extras/h",
      "/f",       "/g",      "/lhs",  "/rhs",       "/gap",       "/direction", "/quad_error", "/pass",
      "/warning", "/error"};
  return cols;
}

}  // namespace renyi::report
