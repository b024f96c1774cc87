// One line per acceptance criterion; exit status 1 if any fails.
#include <iostream>

#include <CLI11.hpp>

#include "coopcut/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"coopcut acceptance criteria"};
  coopcut::AcceptanceOptions opt;
  std::vector<int> only;
  app.add_option("--only", only, "criterion ids to run (default: all)")->delimiter(',');
  app.add_option("--out", opt.out_dir, "directory for benchmark outputs");
  CLI11_PARSE(app, argc, argv);
  auto results = coopcut::run_acceptance(opt, only, &std::cout);
  int failed = 0;
  for (auto& r : results) failed += !r.pass;
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << results.size() - failed << "/" << results.size()
            << std::endl;
  return failed ? 1 : 0;
}
