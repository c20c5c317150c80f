// Command-line front end: dispatches problem descriptions to the solver
// library and writes profile/report/trajectory artifacts.
#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>
#include <vector>

#include "simprof/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Self-similar profile solver suite"};
  app.require_subcommand(0, 0);

  std::string command;
  std::vector<std::string> problems;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  unsigned jobs = 1;
  unsigned seed = 0;
  bool check_monotonicity = false;

  app.add_option("command", command,
                 "one of: profile-scalar, profile-vector, reduce, lift, evolve, verify, oracle")
      ->required();
  app.add_option("--problem", problems, "problem description file (repeatable for sweeps)")
      ->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--override", overrides, "section.key=value (repeatable)");
  app.add_option("--jobs", jobs, "parallel problems in a sweep (single solves stay sequential)");
  app.add_option("--seed", seed, "random seed recorded in report.json");
  app.add_flag("--check-monotonicity", check_monotonicity,
               "reduce: also check the three-species monotonicity region");

  CLI11_PARSE(app, argc, argv);

  simprof::RunConfig base;
  try {
    base.command = simprof::command_from_string(command);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return simprof::kExitValidation;
  }
  base.overrides = overrides;
  base.seed = seed;
  base.check_monotonicity = check_monotonicity;

  std::vector<simprof::RunConfig> configs;
  for (const std::string& p : problems) {
    simprof::RunConfig c = base;
    c.problem_path = p;
    // sweeps get one subdirectory per problem so artifacts never collide
    c.out_dir = problems.size() == 1
                    ? out_dir
                    : (std::filesystem::path(out_dir) / std::filesystem::path(p).stem()).string();
    configs.push_back(c);
  }

  std::atomic<int> worst{0};
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
      int code = simprof::run(configs[i]);
      int cur = worst.load();
      while (code > cur && !worst.compare_exchange_weak(cur, code)) {
      }
      std::cerr << configs[i].problem_path << ": exit " << code << "\n";
    }
  };
  if (jobs <= 1 || configs.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<unsigned>(jobs, configs.size()); ++t)
      pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return worst.load();
}
