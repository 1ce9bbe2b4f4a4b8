// Runs the verification suite twice and prints one line per criterion.
// Criterion 10 holds when the two reports are byte-identical.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "renyi/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_verify(const std::vector<std::string>& extra, const fs::path& out) {
  std::vector<std::string> args = {"renyi", "--no-timestamp", "--out", out.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  args.emplace_back("verify");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return renyi::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string measures_text(const json& rec) {
  std::string s;
  for (const auto& m : rec.at("measures")) {
    if (!s.empty()) s += "; ";
    s += m.at("label").get<std::string>() + " = ";
    s += m.at("value").is_null() ? "inf" : renyi::report::format_number(m.at("value").get<double>());
    s += " " + m.at("relation").get<std::string>() + " ";
    s += m.at("bound").is_null() ? "inf" : renyi::report::format_number(m.at("bound").get<double>());
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  // Any arguments (e.g. --config, --seed) are forwarded to both runs.
  const std::vector<std::string> extra(argv + 1, argv + argc);
  const fs::path dir = fs::temp_directory_path() / ("renyi-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path first = dir / "first.jsonl", second = dir / "second.jsonl";

  const int c1 = run_verify(extra, first);
  const int c2 = run_verify(extra, second);
  if (c1 > 1 || c2 > 1) {
    std::cerr << "verification run failed with exit code " << std::max(c1, c2) << '\n';
    fs::remove_all(dir);
    return 2;
  }

  int failed = 0;
  std::ifstream in(first);
  std::string line;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    if (!j.contains("criterion")) continue;
    const bool pass = j.at("pass").get<bool>();
    failed += pass ? 0 : 1;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << j.at("criterion").get<int>() << ' '
              << j.at("name").get<std::string>() << ": " << measures_text(j) << '\n';
  }
  const bool same = slurp(first) == slurp(second);
  failed += same ? 0 : 1;
  std::cout << (same ? "[PASS] " : "[FAIL] ") << "10 determinism: two runs with one seed "
            << (same ? "are byte-identical" : "differ") << '\n';
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << "(" << failed << " failing)\n";
  fs::remove_all(dir);
  return failed ? 1 : 0;
}
