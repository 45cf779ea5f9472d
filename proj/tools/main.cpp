// bootsim command-line front end: simulate strategies on the virtual fabric,
// evaluate the closed-form cost models, verify measured-vs-predicted
// agreement, and recommend a strategy under a memory cap.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bootsim/cli.hpp"

namespace {

std::string default_format() {
  if (const char* env = std::getenv("BOOTSIM_FORMAT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "json";
}

}  // namespace

int main(int argc, char** argv) {
  using bootsim::cli::RunSpec;
  using bootsim::cli::Subcommand;

  CLI::App app{"bootsim - parallel bootstrap variance estimation: deterministic simulator,"
               " cost models, and strategy planner"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string strategy_name;
  std::string format_name = default_format();

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--D", spec.config.dataset_size, "dataset size (4-byte sample points)")
        ->capture_default_str();
    sub->add_option("--N", spec.config.num_resamples, "number of bootstrap resamples")
        ->capture_default_str();
    sub->add_option("--P", spec.config.num_processes, "number of virtual processes")
        ->capture_default_str();
    sub->add_option("--seed", spec.config.seed, "global PRNG seed")->capture_default_str();
    sub->add_option("--B", spec.params.bandwidth, "network bandwidth, bytes/second")
        ->capture_default_str();
    sub->add_option("--S", spec.params.compute_speed, "compute speed, sample-points/second")
        ->capture_default_str();
    sub->add_option("--format", format_name,
                    "output format: json, csv, or text (env BOOTSIM_FORMAT)")
        ->capture_default_str();
    sub->add_flag("--deterministic", spec.deterministic,
                  "suppress the timestamp so identical runs emit identical output");
  };

  const auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", spec.data_path,
                    "raw little-endian float32 input file holding exactly D values; "
                    "without it, deterministic standard-normal data is drawn from the seed");
    sub->add_option("--memory-cap", spec.memory_cap, "per-process memory cap in 4-byte floats");
    sub->add_option("--desync-rank", spec.ddrs_desync_rank,
                    "fault injection: pre-advance this rank's DDRS stream")
        ->group("");  // hidden; testing only
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run one strategy on the virtual fabric");
  add_common(simulate);
  add_data(simulate);
  simulate->add_option("--strategy", strategy_name, "fsd, dbsr, dbsa, or ddrs")->required();

  CLI::App* predict = app.add_subcommand("predict", "evaluate the closed-form cost model");
  add_common(predict);
  predict->add_option("--strategy", strategy_name, "fsd, dbsr, dbsa, or ddrs")->required();

  CLI::App* plan = app.add_subcommand("plan", "recommend a strategy under a memory cap");
  add_common(plan);
  plan->add_option("--memory-cap", spec.memory_cap, "per-process memory cap in 4-byte floats")
      ->required();

  CLI::App* verify =
      app.add_subcommand("verify", "run all four strategies and check measured vs predicted");
  add_common(verify);
  add_data(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bootsim::cli::kExitUsage;
  }

  if (simulate->parsed()) {
    spec.subcommand = Subcommand::Simulate;
  } else if (predict->parsed()) {
    spec.subcommand = Subcommand::Predict;
  } else if (plan->parsed()) {
    spec.subcommand = Subcommand::Plan;
  } else {
    spec.subcommand = Subcommand::Verify;
  }

  if (!strategy_name.empty()) {
    spec.strategy = bootsim::strategies::parse_strategy(strategy_name);
    if (!spec.strategy) {
      std::cerr << "error (config): unknown strategy '" << strategy_name
                << "' (expected fsd, dbsr, dbsa, or ddrs)\n";
      return bootsim::cli::kExitUsage;
    }
  }

  const auto format = bootsim::cli::parse_format(format_name);
  if (!format) {
    std::cerr << "error (config): unknown format '" << format_name
              << "' (expected json, csv, or text)\n";
    return bootsim::cli::kExitUsage;
  }
  spec.format = *format;

  const bootsim::cli::CliResult result = bootsim::cli::execute(spec);
  std::cout << result.output;
  std::cerr << result.error;
  return result.exit_code;
}
