// One line per acceptance criterion; exit status is non-zero if any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "projkit/acceptance.hpp"

int main(int argc, char** argv) {
  projkit::HarnessOptions opt;
  std::vector<int> which;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-v") verbose = true;
    else which.push_back(std::atoi(argv[i]));
  }
  int failed = 0;
  projkit::run_acceptance(opt, which, [&](const projkit::CriterionResult& r) {
    std::printf("criterion %2d %s  %-36s %8.2f s (budget %g s)%s%s\n", r.index, r.pass() ? "PASS" : "FAIL", r.title.c_str(),
                r.seconds, r.budget, r.report.note.empty() ? "" : "  ", r.report.note.c_str());
    if (!r.pass()) ++failed;
    for (const auto& c : r.report.checks)
      if (verbose || !c.pass)
        std::printf("    %s %s: %.6g <= %.6g + %.3g\n", c.pass ? "ok  " : "FAIL", c.name.c_str(), c.lhs, c.rhs, c.tolerance);
    std::fflush(stdout);
  });
  return failed == 0 ? 0 : 1;
}
