#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "bootsim/core.hpp"
#include "bootsim/strategy_kind.hpp"

namespace bootsim::costmodel {

// Closed-form cost evaluation for one strategy. Byte counts are exact
// integers; the simulator's ledger must reproduce them exactly.
struct CostBreakdown {
  strategies::StrategyKind kind = strategies::StrategyKind::Fsd;
  std::uint64_t bytes_data_out = 0;      // dataset / sample distribution
  std::uint64_t bytes_results_back = 0;  // means, statistics, or partial sums
  double t_comm = 0.0;                   // (data_out + results_back) / B
  double t_comp = 0.0;                   // modeled sample points / S
  // Alternative reading with the per-sample scan divided across processes;
  // differs from t_comp only for DDRS.
  double t_comp_parallel = 0.0;
  std::uint64_t peak_floats_root = 0;
  std::uint64_t peak_floats_worker = 0;

  std::uint64_t total_bytes() const { return bytes_data_out + bytes_results_back; }
};

// Exact byte, time, and memory predictions for a strategy:
//   FSD   data 4*D*(N/P)*(P-1), results 4*(N/P)*(P-1), comp (N*D + (N/P)*D)/S,
//         root D + N*D floats, worker D
//   DBSR  data 4*D*(P-1), results 4*D*(N/P)*(P-1), comp (N/P)*D/S,
//         D + (N/P)*D floats per process
//   DBSA  data 4*D*(P-1), results 8*(P-1), comp (N/P)*D/S,
//         D + (N/P)*D floats per process
//   DDRS  data 0, results 4*N*(P-1) (sum channel only), comp N*D/S,
//         root D/P + 4 floats, worker D/P + 2
// With P = 1 the root is the only process and the worker figure mirrors it.
// Throws ConfigError on divisibility violations (P | N; P | D for DDRS).
CostBreakdown predict(strategies::StrategyKind kind, const core::ExperimentConfig& cfg,
                      const core::CostParams& params);

struct PlanQuery {
  core::ExperimentConfig config;
  core::CostParams params;
  std::uint64_t memory_cap_floats = 0;  // per-process cap, >= 1
};

struct PlanEntry {
  strategies::StrategyKind kind = strategies::StrategyKind::Fsd;
  std::optional<CostBreakdown> cost;  // empty when the config rules the strategy out
  bool feasible = false;
  std::string note;  // why infeasible; empty otherwise
};

struct PlanResult {
  std::optional<strategies::StrategyKind> chosen;
  std::array<PlanEntry, 4> entries;  // presentation order: FSD, DBSR, DBSA, DDRS
  std::string rationale;
};

// Picks, among strategies whose root and worker peaks fit the cap, the one
// minimizing t_comm + t_comp; ties prefer DBSA, then DDRS, DBSR, FSD. When
// nothing fits, chosen is empty and the rationale lists every requirement
// against the cap.
PlanResult plan(const PlanQuery& query);

}  // namespace bootsim::costmodel
