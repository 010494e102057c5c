#include <CLI11.hpp>

#include <iostream>

#include "optomech/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Runs the acceptance criteria and prints one line per criterion."};
  optomech::AcceptanceOptions opts;
  app.add_option("--seed", opts.seed, "master seed for the stochastic criteria");
  app.add_option("--only", opts.only, "criterion ids to run");
  bool details = false;
  app.add_flag("--details", details, "print per-criterion detail lines");
  CLI11_PARSE(app, argc, argv);

  opts.on_result = [&](const optomech::CriterionResult& r) {
    std::cout << optomech::result_line(r) << std::endl;
    if ((details || !r.passed) && !r.detail.empty()) std::cout << "      " << r.detail << std::endl;
  };
  const auto results = optomech::run_acceptance(opts);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
