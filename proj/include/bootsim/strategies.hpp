#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bootsim/core.hpp"
#include "bootsim/costmodel.hpp"
#include "bootsim/simnet.hpp"
#include "bootsim/strategy_kind.hpp"

namespace bootsim::strategies {

// Outcome of one strategy run on the fabric: the estimate, the measured
// ledger, and the matching closed-form prediction. measured_bytes covers the
// data and results channels; DDRS's count-verification traffic is ledgered on
// its own channel and excluded from the modeled volume.
struct StrategyReport {
  StrategyKind kind = StrategyKind::Fsd;
  core::VarianceEstimate estimate;
  std::uint64_t measured_bytes = 0;
  std::vector<std::uint64_t> measured_peak_floats_per_rank;
  std::vector<std::uint64_t> measured_points_per_rank;
  simnet::FabricLedger ledger;
  costmodel::CostBreakdown predicted;
  bool bytes_match = false;  // measured channel bytes equal the prediction exactly
};

// Test hooks for the synchronized-stream strategy.
struct DdrsOptions {
  // Pre-advance this rank's stream before resampling; breaks synchronization
  // so the count invariant must trip.
  int desync_rank = -1;
  std::uint64_t desync_steps = 1;
  // When set, receives each sample's summed partial count (root side).
  std::vector<double>* count_trace = nullptr;
};

// Full Sample Distribution: the root draws all N resamples from one stream
// and ships N/P of them to each worker; workers return their means.
StrategyReport run_fsd(const core::Dataset& data, const core::ExperimentConfig& cfg,
                       const core::CostParams& params,
                       std::optional<std::uint64_t> memory_cap = std::nullopt);

// Data Broadcast & Sample Return: every rank resamples from its own
// substream; workers send full resamples back to the root.
StrategyReport run_dbsr(const core::Dataset& data, const core::ExperimentConfig& cfg,
                        const core::CostParams& params,
                        std::optional<std::uint64_t> memory_cap = std::nullopt);

// Data Broadcast & Statistic Aggregation: same resampling as DBSR, but each
// rank returns only the (m1, m2) pair.
StrategyReport run_dbsa(const core::Dataset& data, const core::ExperimentConfig& cfg,
                        const core::CostParams& params,
                        std::optional<std::uint64_t> memory_cap = std::nullopt);

// Distributed Data & RNG Synchronization: each rank holds a contiguous D/P
// shard, all ranks replay one shared stream, and workers send per-sample
// (partial sum, partial count) pairs. Requires P | D.
StrategyReport run_ddrs(const std::vector<core::Dataset>& shards,
                        const core::ExperimentConfig& cfg, const core::CostParams& params,
                        std::optional<std::uint64_t> memory_cap = std::nullopt,
                        const DdrsOptions& options = {});

// Splits a dataset into P contiguous shards of D/P points each.
std::vector<core::Dataset> split_shards(const core::Dataset& data, std::uint64_t num_processes);

// Dispatch on kind; DDRS runs on contiguous shards of the given dataset.
StrategyReport run_strategy(StrategyKind kind, const core::Dataset& data,
                            const core::ExperimentConfig& cfg, const core::CostParams& params,
                            std::optional<std::uint64_t> memory_cap = std::nullopt,
                            const DdrsOptions& ddrs_options = {});

// Sequential replay of the stream discipline a strategy uses, kept off the
// fabric entirely: FSD replays the root's single substream, DBSR/DBSA replay
// the per-rank substreams in rank order, DDRS replays the one shared stream.
// The variance is taken two-pass, so this is an independent route to the same
// number.
core::VarianceEstimate oracle_estimate(StrategyKind kind, const core::Dataset& data,
                                       const core::ExperimentConfig& cfg);

}  // namespace bootsim::strategies
