// Acceptance criteria 1-10, one PASS/FAIL line each.
// Usage: acceptance [--quick] [--parallel N] [--only ID] [--known-failure ID]...
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "lowner/experiments.hpp"

int main(int argc, char** argv) {
  lowner::CriterionOptions opts;
  std::vector<int> known, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> int {
      if (i + 1 >= argc) {
        std::cerr << "missing value after " << a << '\n';
        std::exit(2);
      }
      return std::stoi(argv[++i]);
    };
    if (a == "--quick") opts.quick = true;
    else if (a == "--parallel") opts.threads = next();
    else if (a == "--known-failure") known.push_back(next());
    else if (a == "--only") only.push_back(next());
    else {
      std::cerr << "unknown argument " << a << '\n';
      return 2;
    }
  }
  int counted = 0;
  for (int id = 1; id <= 10; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const lowner::CriterionResult r = lowner::run_criterion(id, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool is_known = std::find(known.begin(), known.end(), id) != known.end();
    std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << id << " (" << r.name << "): " << r.detail << " ["
              << lowner::format_number(secs) << " s]" << (!r.passed && is_known ? " (known failure)" : "") << std::endl;
    if (!r.passed && !is_known) ++counted;
  }
  return counted == 0 ? 0 : 1;
}
