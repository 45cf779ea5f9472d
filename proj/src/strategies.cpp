#include "bootsim/strategies.hpp"

#include <string>
#include <utility>

namespace bootsim::strategies {

using core::Dataset;
using core::ExperimentConfig;
using simnet::Channel;
using simnet::ProcContext;
using simnet::Rank;

namespace {

void check_data(const Dataset& data, const ExperimentConfig& cfg) {
  core::validate(cfg);
  if (data.size() != cfg.dataset_size) {
    throw ConfigError("dataset length " + std::to_string(data.size()) +
                      " does not match D=" + std::to_string(cfg.dataset_size));
  }
}

void check_memory_cap(const costmodel::CostBreakdown& predicted,
                      std::optional<std::uint64_t> memory_cap) {
  if (!memory_cap) {
    return;
  }
  const std::uint64_t required =
      std::max(predicted.peak_floats_root, predicted.peak_floats_worker);
  if (required > *memory_cap) {
    throw InfeasibleError(std::string(to_string(predicted.kind)) + " needs " +
                          std::to_string(required) + " floats/process, cap is " +
                          std::to_string(*memory_cap));
  }
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (const double x : xs) {
    acc += x;
  }
  return acc / static_cast<double>(xs.size());
}

std::vector<double> expect_payload(ProcContext& ctx, Rank from, std::size_t size,
                                   const char* what) {
  std::vector<double> payload = ctx.recv(from);
  if (payload.size() != size) {
    throw ProtocolError(std::string(what) + ": expected " + std::to_string(size) +
                        " floats from rank " + std::to_string(from) + ", got " +
                        std::to_string(payload.size()));
  }
  return payload;
}

StrategyReport finish_report(StrategyKind kind, double estimate, simnet::FabricLedger ledger,
                             const costmodel::CostBreakdown& predicted) {
  StrategyReport report;
  report.kind = kind;
  report.estimate = core::VarianceEstimate{estimate};
  report.measured_bytes = ledger.modeled_bytes();
  report.measured_peak_floats_per_rank.reserve(ledger.per_process.size());
  report.measured_points_per_rank.reserve(ledger.per_process.size());
  for (const simnet::PerProcessStats& stats : ledger.per_process) {
    report.measured_peak_floats_per_rank.push_back(stats.peak_floats);
    report.measured_points_per_rank.push_back(stats.points);
  }
  report.predicted = predicted;
  report.bytes_match = ledger.channel_bytes(Channel::Data) == predicted.bytes_data_out &&
                       ledger.channel_bytes(Channel::Results) == predicted.bytes_results_back;
  report.ledger = std::move(ledger);
  return report;
}

}  // namespace

StrategyReport run_fsd(const Dataset& data, const ExperimentConfig& cfg,
                       const core::CostParams& params, std::optional<std::uint64_t> memory_cap) {
  check_data(data, cfg);
  const costmodel::CostBreakdown predicted = costmodel::predict(StrategyKind::Fsd, cfg, params);
  check_memory_cap(predicted, memory_cap);

  const std::uint64_t d = cfg.dataset_size;
  const std::uint64_t n = cfg.num_resamples;
  const std::uint64_t local = cfg.resamples_per_process();
  const int p = static_cast<int>(cfg.num_processes);

  double estimate = 0.0;
  const simnet::RankProgram program = [&](ProcContext& ctx) {
    if (ctx.rank() == 0) {
      ctx.alloc_floats(d);      // original dataset
      ctx.alloc_floats(n * d);  // every resample lives at the root
      prng::RngState stream = prng::rank_substream(cfg.seed, 0);
      std::vector<double> all_means(n, 0.0);
      for (std::uint64_t s = 0; s < n; ++s) {
        std::vector<double> sample;
        sample.reserve(d);
        double acc = 0.0;
        for (std::uint64_t k = 0; k < d; ++k) {
          const double x = data.values[prng::draw_index(stream, d)];
          sample.push_back(x);
          acc += x;
        }
        ctx.add_points(d);
        const Rank owner = static_cast<Rank>(s / local);
        if (owner == 0) {
          all_means[s] = acc / static_cast<double>(d);
        } else {
          ctx.send(owner, std::move(sample), Channel::Data);
        }
      }
      for (Rank r = 1; r < p; ++r) {
        const std::vector<double> means = expect_payload(ctx, r, local, "fsd mean return");
        for (std::uint64_t s = 0; s < local; ++s) {
          all_means[static_cast<std::uint64_t>(r) * local + s] = means[s];
        }
      }
      ctx.free_floats(n * d);
      ctx.free_floats(d);
      estimate = core::variance_from_stats(core::summarize_means(all_means)).value;
    } else {
      std::vector<double> means;
      means.reserve(local);
      for (std::uint64_t s = 0; s < local; ++s) {
        const std::vector<double> sample = expect_payload(ctx, 0, d, "fsd sample");
        ctx.alloc_floats(d);  // one staged resample at a time
        means.push_back(mean_of(sample));
        ctx.free_floats(d);
      }
      ctx.send(0, std::move(means), Channel::Results);
    }
  };

  simnet::FabricLedger ledger = simnet::fabric_run(p, program);
  return finish_report(StrategyKind::Fsd, estimate, std::move(ledger), predicted);
}

StrategyReport run_dbsr(const Dataset& data, const ExperimentConfig& cfg,
                        const core::CostParams& params, std::optional<std::uint64_t> memory_cap) {
  check_data(data, cfg);
  const costmodel::CostBreakdown predicted = costmodel::predict(StrategyKind::Dbsr, cfg, params);
  check_memory_cap(predicted, memory_cap);

  const std::uint64_t d = cfg.dataset_size;
  const std::uint64_t n = cfg.num_resamples;
  const std::uint64_t local = cfg.resamples_per_process();
  const int p = static_cast<int>(cfg.num_processes);

  double estimate = 0.0;
  const simnet::RankProgram program = [&](ProcContext& ctx) {
    if (ctx.rank() == 0) {
      ctx.alloc_floats(d);
      for (Rank r = 1; r < p; ++r) {
        ctx.send(r, data.values, Channel::Data);
      }
      // Root resamples its own share like any other rank.
      ctx.alloc_floats(local * d);
      prng::RngState stream = prng::rank_substream(cfg.seed, 0);
      std::vector<double> all_means(n, 0.0);
      for (std::uint64_t s = 0; s < local; ++s) {
        double acc = 0.0;
        for (std::uint64_t k = 0; k < d; ++k) {
          acc += data.values[prng::draw_index(stream, d)];
        }
        ctx.add_points(d);
        all_means[s] = acc / static_cast<double>(d);
      }
      ctx.free_floats(local * d);
      for (Rank r = 1; r < p; ++r) {
        for (std::uint64_t s = 0; s < local; ++s) {
          const std::vector<double> sample = expect_payload(ctx, r, d, "dbsr sample return");
          ctx.alloc_floats(d);  // one returned resample staged at a time
          all_means[static_cast<std::uint64_t>(r) * local + s] = mean_of(sample);
          ctx.free_floats(d);
        }
      }
      ctx.free_floats(d);
      estimate = core::variance_from_stats(core::summarize_means(all_means)).value;
    } else {
      const std::vector<double> local_data = expect_payload(ctx, 0, d, "dbsr broadcast");
      ctx.alloc_floats(d);
      ctx.alloc_floats(local * d);  // all local resamples held before return
      prng::RngState stream = prng::rank_substream(cfg.seed, ctx.rank());
      for (std::uint64_t s = 0; s < local; ++s) {
        std::vector<double> sample;
        sample.reserve(d);
        for (std::uint64_t k = 0; k < d; ++k) {
          sample.push_back(local_data[prng::draw_index(stream, d)]);
        }
        ctx.add_points(d);
        ctx.send(0, std::move(sample), Channel::Results);
      }
      ctx.free_floats(local * d);
      ctx.free_floats(d);
    }
  };

  simnet::FabricLedger ledger = simnet::fabric_run(p, program);
  return finish_report(StrategyKind::Dbsr, estimate, std::move(ledger), predicted);
}

StrategyReport run_dbsa(const Dataset& data, const ExperimentConfig& cfg,
                        const core::CostParams& params, std::optional<std::uint64_t> memory_cap) {
  check_data(data, cfg);
  const costmodel::CostBreakdown predicted = costmodel::predict(StrategyKind::Dbsa, cfg, params);
  check_memory_cap(predicted, memory_cap);

  const std::uint64_t d = cfg.dataset_size;
  const std::uint64_t local = cfg.resamples_per_process();
  const int p = static_cast<int>(cfg.num_processes);

  double estimate = 0.0;
  const simnet::RankProgram program = [&](ProcContext& ctx) {
    const auto local_stats = [&](const std::vector<double>& values,
                                 ProcContext& c) -> core::SummaryStats {
      std::vector<double> means;
      means.reserve(local);
      prng::RngState stream = prng::rank_substream(cfg.seed, c.rank());
      for (std::uint64_t s = 0; s < local; ++s) {
        double acc = 0.0;
        for (std::uint64_t k = 0; k < d; ++k) {
          acc += values[prng::draw_index(stream, d)];
        }
        c.add_points(d);
        means.push_back(acc / static_cast<double>(d));
      }
      return core::summarize_means(means);
    };

    if (ctx.rank() == 0) {
      ctx.alloc_floats(d);
      for (Rank r = 1; r < p; ++r) {
        ctx.send(r, data.values, Channel::Data);
      }
      ctx.alloc_floats(local * d);
      std::vector<core::SummaryStats> parts;
      parts.reserve(static_cast<std::size_t>(p));
      parts.push_back(local_stats(data.values, ctx));
      ctx.free_floats(local * d);
      for (Rank r = 1; r < p; ++r) {
        const std::vector<double> pair = expect_payload(ctx, r, 2, "dbsa statistic return");
        parts.push_back(core::SummaryStats{pair[0], pair[1], local});
      }
      ctx.free_floats(d);
      estimate = core::variance_from_stats(core::pool_stats(parts)).value;
    } else {
      const std::vector<double> local_data = expect_payload(ctx, 0, d, "dbsa broadcast");
      ctx.alloc_floats(d);
      ctx.alloc_floats(local * d);
      const core::SummaryStats stats = local_stats(local_data, ctx);
      ctx.send(0, {stats.m1, stats.m2}, Channel::Results);
      ctx.free_floats(local * d);
      ctx.free_floats(d);
    }
  };

  simnet::FabricLedger ledger = simnet::fabric_run(p, program);
  return finish_report(StrategyKind::Dbsa, estimate, std::move(ledger), predicted);
}

StrategyReport run_ddrs(const std::vector<Dataset>& shards, const ExperimentConfig& cfg,
                        const core::CostParams& params, std::optional<std::uint64_t> memory_cap,
                        const DdrsOptions& options) {
  core::validate(cfg);
  const costmodel::CostBreakdown predicted =
      costmodel::predict(StrategyKind::Ddrs, cfg, params);  // also checks P | D
  check_memory_cap(predicted, memory_cap);

  const std::uint64_t d = cfg.dataset_size;
  const std::uint64_t n = cfg.num_resamples;
  const int p = static_cast<int>(cfg.num_processes);
  const std::uint64_t shard_size = d / cfg.num_processes;

  if (shards.size() != cfg.num_processes) {
    throw ConfigError("ddrs: expected " + std::to_string(cfg.num_processes) + " shards, got " +
                      std::to_string(shards.size()));
  }
  for (const Dataset& shard : shards) {
    if (shard.size() != shard_size) {
      throw ConfigError("ddrs: every shard must hold D/P = " + std::to_string(shard_size) +
                        " points");
    }
  }

  double estimate = 0.0;
  const simnet::RankProgram program = [&](ProcContext& ctx) {
    const Rank rank = ctx.rank();
    const Dataset& mine = shards[static_cast<std::size_t>(rank)];
    const std::uint64_t lo = static_cast<std::uint64_t>(rank) * shard_size;
    const std::uint64_t hi = lo + shard_size;

    ctx.alloc_floats(shard_size);
    // Scratch: the own (sum, count) pair, plus a staged incoming pair at the root.
    ctx.alloc_floats(rank == 0 ? 4 : 2);

    prng::RngState stream = prng::rng_new(cfg.seed);  // one synchronized stream
    if (options.desync_rank == rank) {
      for (std::uint64_t i = 0; i < options.desync_steps; ++i) {
        prng::draw_u64(stream);
      }
    }

    const auto partial = [&](double& sum, double& count) {
      sum = 0.0;
      count = 0.0;
      for (std::uint64_t k = 0; k < d; ++k) {
        const std::uint64_t idx = prng::draw_index(stream, d);
        if (idx >= lo && idx < hi) {
          sum += mine.values[idx - lo];
          count += 1.0;
        }
      }
      ctx.add_points(d);  // each rank scans all D draws
    };

    if (rank == 0) {
      std::vector<double> means;
      means.reserve(n);
      for (std::uint64_t s = 0; s < n; ++s) {
        double global_sum = 0.0;
        double global_count = 0.0;
        partial(global_sum, global_count);
        for (Rank r = 1; r < p; ++r) {
          const std::vector<double> pair = expect_payload(ctx, r, 2, "ddrs partial");
          global_sum += pair[0];
          global_count += pair[1];
        }
        if (global_count != static_cast<double>(d)) {
          throw SyncFaultError("ddrs: sample " + std::to_string(s) + " counted " +
                               std::to_string(static_cast<std::uint64_t>(global_count)) +
                               " of " + std::to_string(d) +
                               " points; streams are desynchronized");
        }
        if (options.count_trace != nullptr) {
          options.count_trace->push_back(global_count);
        }
        means.push_back(global_sum / static_cast<double>(d));
      }
      ctx.free_floats(shard_size + 4);
      estimate = core::variance_from_stats(core::summarize_means(means)).value;
    } else {
      for (std::uint64_t s = 0; s < n; ++s) {
        double sum = 0.0;
        double count = 0.0;
        partial(sum, count);
        ctx.send(0, {sum, count},
                 {simnet::ChannelShare{Channel::Results, 1},
                  simnet::ChannelShare{Channel::Verification, 1}});
      }
      ctx.free_floats(shard_size + 2);
    }
  };

  simnet::FabricLedger ledger = simnet::fabric_run(p, program);
  return finish_report(StrategyKind::Ddrs, estimate, std::move(ledger), predicted);
}

std::vector<Dataset> split_shards(const Dataset& data, std::uint64_t num_processes) {
  if (num_processes == 0 || data.size() % num_processes != 0) {
    throw ConfigError("split_shards: P must divide the dataset size");
  }
  const std::uint64_t shard_size = data.size() / num_processes;
  std::vector<Dataset> shards;
  shards.reserve(num_processes);
  for (std::uint64_t r = 0; r < num_processes; ++r) {
    const auto begin = data.values.begin() + static_cast<std::ptrdiff_t>(r * shard_size);
    shards.push_back(Dataset{{begin, begin + static_cast<std::ptrdiff_t>(shard_size)}});
  }
  return shards;
}

StrategyReport run_strategy(StrategyKind kind, const Dataset& data, const ExperimentConfig& cfg,
                            const core::CostParams& params,
                            std::optional<std::uint64_t> memory_cap,
                            const DdrsOptions& ddrs_options) {
  switch (kind) {
    case StrategyKind::Fsd:
      return run_fsd(data, cfg, params, memory_cap);
    case StrategyKind::Dbsr:
      return run_dbsr(data, cfg, params, memory_cap);
    case StrategyKind::Dbsa:
      return run_dbsa(data, cfg, params, memory_cap);
    case StrategyKind::Ddrs:
      return run_ddrs(split_shards(data, cfg.num_processes), cfg, params, memory_cap,
                      ddrs_options);
  }
  throw ConfigError("unknown strategy");
}

core::VarianceEstimate oracle_estimate(StrategyKind kind, const Dataset& data,
                                       const ExperimentConfig& cfg) {
  core::validate(cfg);
  if (data.size() != cfg.dataset_size) {
    throw ConfigError("oracle_estimate: dataset length does not match D");
  }
  switch (kind) {
    case StrategyKind::Fsd: {
      prng::RngState stream = prng::rank_substream(cfg.seed, 0);
      const std::vector<double> means = core::resample_means(data, cfg.num_resamples, stream);
      return core::VarianceEstimate{core::population_variance(means)};
    }
    case StrategyKind::Dbsr:
    case StrategyKind::Dbsa: {
      std::vector<double> means;
      means.reserve(cfg.num_resamples);
      for (std::uint64_t r = 0; r < cfg.num_processes; ++r) {
        prng::RngState stream = prng::rank_substream(cfg.seed, r);
        const std::vector<double> part =
            core::resample_means(data, cfg.resamples_per_process(), stream);
        means.insert(means.end(), part.begin(), part.end());
      }
      return core::VarianceEstimate{core::population_variance(means)};
    }
    case StrategyKind::Ddrs:
      return core::sequential_bootstrap_oracle(data, cfg);
  }
  throw ConfigError("unknown strategy");
}

}  // namespace bootsim::strategies
