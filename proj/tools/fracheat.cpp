// fracheat: kernels | simulate | compare | validate

#include <exception>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "fracheat/experiments.hpp"

int main(int argc, char** argv) {
  using namespace fracheat;
  CLI::App app{"Distributed-order Cattaneo heat conduction: analytic kernels and finite differences"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool strict = false;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory, overrides output.dir");
    sub->add_flag("--strict-instability", strict, "abort a run at its first unstable step");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* kernels = app.add_subcommand("kernels", "analytic temperature and flux profiles");
  auto* simulate = app.add_subcommand("simulate", "finite-difference runs for the configured schemes");
  auto* compare = app.add_subcommand("compare", "finite differences against the analytic response");
  auto* validate = app.add_subcommand("validate", "branch sign sweep and zero counting of s Phi(s) + xi^2");
  for (auto* s : {kernels, simulate, compare, validate}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_code::ok : exit_code::config;
  }

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (strict) cfg.strict_instability = true;
    RunContext ctx{threads, &std::cerr};

    if (kernels->parsed()) {
      run_kernels(cfg, ctx);
    } else if (simulate->parsed()) {
      run_simulate(cfg, ctx);
    } else if (compare->parsed()) {
      const auto res = run_compare(cfg, ctx);
      for (const auto& r : res.reports) {
        std::cout << r.model << ' ' << r.scheme << ' ' << field_name(r.field) << ':';
        for (double d : r.relative_l2) std::cout << ' ' << csv::number(d);
        std::cout << " | linf " << csv::number(r.linf) << '\n';
      }
    } else {
      const auto s = run_validate(cfg, ctx);
      std::cout << "validation passed, worst margin " << csv::number(s.branch.worst_margin) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const ValidationFailure& e) {
    std::cerr << e.what() << '\n';
    return exit_code::validation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_code::numeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::numeric;
  }
  return exit_code::ok;
}
