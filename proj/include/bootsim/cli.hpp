#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bootsim/core.hpp"
#include "bootsim/strategy_kind.hpp"

namespace bootsim::cli {

enum class Subcommand { Simulate, Predict, Plan, Verify };

enum class OutputFormat { Json, Csv, Text };

std::string_view to_string(Subcommand sub);
std::string_view to_string(OutputFormat format);
std::optional<OutputFormat> parse_format(std::string_view name);

// One resolved invocation. simulate/predict need a strategy; plan needs a
// memory cap; verify always runs all four strategies.
struct RunSpec {
  Subcommand subcommand = Subcommand::Verify;
  std::optional<strategies::StrategyKind> strategy;
  core::ExperimentConfig config{100, 40, 4, 205};
  core::CostParams params{1e8, 1e8};
  std::optional<std::uint64_t> memory_cap;
  std::optional<std::string> data_path;
  OutputFormat format = OutputFormat::Json;
  bool deterministic = false;  // suppress the timestamp field
  int ddrs_desync_rank = -1;   // fault injection for DDRS (testing)
};

// Exit codes surfaced by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitMismatch = 4;

struct CliResult {
  int exit_code = kExitOk;
  std::string output;  // stdout
  std::string error;   // stderr
};

// Runs the spec end to end and renders the report. Never throws; failures are
// mapped to exit codes and rendered structurally (JSON) or as plain text.
CliResult execute(const RunSpec& spec);

// Input data: raw little-endian float32 array of exactly D values, no header,
// widened to double. Size mismatches raise ConfigError.
core::Dataset load_raw_f32(const std::string& path, std::uint64_t expected_size);

// Synthetic standard-normal data drawn from a reserved substream of the seed,
// so experiment streams never overlap the data stream.
core::Dataset synthetic_normal_dataset(std::uint64_t size, std::uint64_t seed);

}  // namespace bootsim::cli
