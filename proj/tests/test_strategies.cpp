#include <doctest.h>

#include <cmath>
#include <vector>

#include "bootsim/strategies.hpp"

using namespace bootsim;
using core::Dataset;
using core::ExperimentConfig;
using simnet::Channel;
using strategies::StrategyKind;
using strategies::StrategyReport;

namespace {

const core::CostParams kParams{1e8, 1e8};

Dataset normal_data(std::uint64_t size, std::uint64_t seed) {
  prng::RngState s = prng::rank_substream(seed, 0x7FFFFFFF);
  return Dataset{prng::standard_normal(s, size)};
}

double rel_diff(double a, double b) {
  const double diff = std::abs(a - b);
  if (diff == 0.0) {
    return 0.0;
  }
  return diff / std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("fsd: desk-scale byte accounting") {
  const ExperimentConfig cfg{10'000, 1'000, 4, 205};
  const StrategyReport report = strategies::run_fsd(normal_data(10'000, 205), cfg, kParams);
  CHECK(report.ledger.channel_bytes(Channel::Data) == 30'000'000);
  CHECK(report.ledger.channel_bytes(Channel::Results) == 3'000);
  CHECK(report.ledger.channel_bytes(Channel::Verification) == 0);
  CHECK(report.bytes_match);
  CHECK(report.measured_peak_floats_per_rank[0] == 10'000 + 10'000'000);
  for (int r = 1; r < 4; ++r) {
    CHECK(report.measured_peak_floats_per_rank[r] == 10'000);
  }
  CHECK(report.measured_points_per_rank[0] == 10'000'000);
  CHECK(report.measured_points_per_rank[1] == 0);
}

TEST_CASE("fsd: single process moves nothing and matches its oracle exactly") {
  const ExperimentConfig cfg{64, 16, 1, 205};
  const Dataset data = normal_data(64, 205);
  const StrategyReport report = strategies::run_fsd(data, cfg, kParams);
  CHECK(report.measured_bytes == 0);
  CHECK(report.bytes_match);
  const double oracle = strategies::oracle_estimate(StrategyKind::Fsd, data, cfg).value;
  CHECK(rel_diff(report.estimate.value, oracle) <= 1e-9);
}

TEST_CASE("fsd: estimate matches the stream-matched oracle across configs") {
  for (const std::uint64_t p : {1ULL, 2ULL, 4ULL}) {
    const ExperimentConfig cfg{100, 40, p, 205};
    const Dataset data = normal_data(100, 205);
    const StrategyReport report = strategies::run_fsd(data, cfg, kParams);
    const double oracle = strategies::oracle_estimate(StrategyKind::Fsd, data, cfg).value;
    CHECK(rel_diff(report.estimate.value, oracle) <= 1e-9);
  }
}

TEST_CASE("dbsr: desk-scale byte accounting") {
  const ExperimentConfig cfg{10'000, 1'000, 4, 205};
  const StrategyReport report = strategies::run_dbsr(normal_data(10'000, 205), cfg, kParams);
  CHECK(report.ledger.channel_bytes(Channel::Data) == 120'000);
  CHECK(report.ledger.channel_bytes(Channel::Results) == 30'000'000);
  CHECK(report.measured_bytes == 30'120'000);
  CHECK(report.bytes_match);
  for (int r = 0; r < 4; ++r) {
    CHECK(report.measured_peak_floats_per_rank[r] == 10'000 + 2'500'000);
    CHECK(report.measured_points_per_rank[r] == 2'500'000);
  }
}

TEST_CASE("dbsr and dbsa agree to 1e-12 and both track their oracle") {
  for (const std::uint64_t p : {1ULL, 2ULL, 4ULL, 5ULL}) {
    const ExperimentConfig cfg{100, 40, p, 205};
    const Dataset data = normal_data(100, 205);
    const StrategyReport dbsr = strategies::run_dbsr(data, cfg, kParams);
    const StrategyReport dbsa = strategies::run_dbsa(data, cfg, kParams);
    CHECK(rel_diff(dbsr.estimate.value, dbsa.estimate.value) <= 1e-12);
    const double oracle = strategies::oracle_estimate(StrategyKind::Dbsr, data, cfg).value;
    CHECK(rel_diff(dbsr.estimate.value, oracle) <= 1e-9);
    CHECK(rel_diff(dbsa.estimate.value, oracle) <= 1e-9);
  }
}

TEST_CASE("dbsa: desk-scale byte accounting") {
  const ExperimentConfig cfg{10'000, 1'000, 4, 205};
  const StrategyReport report = strategies::run_dbsa(normal_data(10'000, 205), cfg, kParams);
  CHECK(report.ledger.channel_bytes(Channel::Data) == 120'000);
  CHECK(report.ledger.channel_bytes(Channel::Results) == 24);
  CHECK(report.measured_bytes == 120'024);
  CHECK(report.bytes_match);
  for (int r = 0; r < 4; ++r) {
    CHECK(report.measured_peak_floats_per_rank[r] == 2'510'000);
    CHECK(report.measured_points_per_rank[r] == 2'500'000);
  }
}

TEST_CASE("dbsr/dbsa: single process moves no bytes") {
  const ExperimentConfig cfg{64, 16, 1, 7};
  const Dataset data = normal_data(64, 7);
  CHECK(strategies::run_dbsr(data, cfg, kParams).measured_bytes == 0);
  CHECK(strategies::run_dbsa(data, cfg, kParams).measured_bytes == 0);
}

TEST_CASE("ddrs: sum and verification channels ledger separately") {
  const ExperimentConfig cfg{100'000, 1'000, 4, 205};
  const auto shards = strategies::split_shards(normal_data(100'000, 205), 4);
  const StrategyReport report = strategies::run_ddrs(shards, cfg, kParams);
  CHECK(report.ledger.channel_bytes(Channel::Data) == 0);
  CHECK(report.ledger.channel_bytes(Channel::Results) == 12'000);  // 4N(P-1)
  CHECK(report.ledger.channel_bytes(Channel::Verification) == 12'000);
  CHECK(report.measured_bytes == 12'000);
  CHECK(report.ledger.total_bytes == 24'000);
  CHECK(report.bytes_match);
}

TEST_CASE("ddrs: memory and computation accounting") {
  const ExperimentConfig cfg{1'000, 40, 4, 205};
  const auto shards = strategies::split_shards(normal_data(1'000, 205), 4);
  const StrategyReport report = strategies::run_ddrs(shards, cfg, kParams);
  CHECK(report.measured_peak_floats_per_rank[0] == 250 + 4);
  for (int r = 1; r < 4; ++r) {
    CHECK(report.measured_peak_floats_per_rank[r] == 250 + 2);
  }
  for (int r = 0; r < 4; ++r) {
    CHECK(report.measured_points_per_rank[r] == 40 * 1'000);  // every rank scans all draws
  }
}

TEST_CASE("ddrs: every sample's partial counts sum to D") {
  const ExperimentConfig cfg{1'000, 50, 5, 205};
  const auto shards = strategies::split_shards(normal_data(1'000, 205), 5);
  std::vector<double> counts;
  strategies::DdrsOptions options;
  options.count_trace = &counts;
  strategies::run_ddrs(shards, cfg, kParams, std::nullopt, options);
  REQUIRE(counts.size() == 50);
  for (const double c : counts) {
    CHECK(c == 1'000.0);
  }
}

TEST_CASE("ddrs: matches the single-stream sequential oracle on the concatenated shards") {
  const ExperimentConfig cfg{1'000, 100, 4, 205};
  const Dataset data = normal_data(1'000, 205);
  const StrategyReport report =
      strategies::run_ddrs(strategies::split_shards(data, 4), cfg, kParams);
  const double oracle = core::sequential_bootstrap_oracle(data, cfg).value;
  CHECK(rel_diff(report.estimate.value, oracle) <= 1e-9);
}

TEST_CASE("ddrs: a desynchronized stream trips the count invariant") {
  const ExperimentConfig cfg{1'000, 20, 4, 205};
  const auto shards = strategies::split_shards(normal_data(1'000, 205), 4);
  strategies::DdrsOptions options;
  options.desync_rank = 2;
  CHECK_THROWS_AS(strategies::run_ddrs(shards, cfg, kParams, std::nullopt, options),
                  SyncFaultError);
}

TEST_CASE("ddrs: desynchronizing the root is also detected") {
  const ExperimentConfig cfg{1'000, 20, 4, 205};
  const auto shards = strategies::split_shards(normal_data(1'000, 205), 4);
  strategies::DdrsOptions options;
  options.desync_rank = 0;
  CHECK_THROWS_AS(strategies::run_ddrs(shards, cfg, kParams, std::nullopt, options),
                  SyncFaultError);
}

TEST_CASE("ddrs: P must divide D") {
  const ExperimentConfig cfg{10, 4, 4, 0};
  CHECK_THROWS_AS(strategies::run_strategy(StrategyKind::Ddrs, normal_data(10, 0), cfg, kParams),
                  ConfigError);
}

TEST_CASE("split_shards produces contiguous slices") {
  const Dataset data{{0.0, 1.0, 2.0, 3.0, 4.0, 5.0}};
  const auto shards = strategies::split_shards(data, 3);
  REQUIRE(shards.size() == 3);
  CHECK(shards[0].values == std::vector<double>{0.0, 1.0});
  CHECK(shards[1].values == std::vector<double>{2.0, 3.0});
  CHECK(shards[2].values == std::vector<double>{4.0, 5.0});
  CHECK_THROWS_AS(strategies::split_shards(data, 4), ConfigError);
}

TEST_CASE("memory caps make runs infeasible up front") {
  const ExperimentConfig cfg{100, 40, 4, 205};
  const Dataset data = normal_data(100, 205);
  CHECK_THROWS_AS(strategies::run_fsd(data, cfg, kParams, 100), InfeasibleError);
  CHECK_THROWS_AS(strategies::run_dbsr(data, cfg, kParams, 100), InfeasibleError);
  CHECK_THROWS_AS(strategies::run_dbsa(data, cfg, kParams, 100), InfeasibleError);
  CHECK_THROWS_AS(
      strategies::run_ddrs(strategies::split_shards(data, 4), cfg, kParams, 10),
      InfeasibleError);
  // A cap that fits runs normally.
  CHECK(strategies::run_dbsa(data, cfg, kParams, 10'000).bytes_match);
}

TEST_CASE("measured bytes equal predictions across a mini grid") {
  for (const std::uint64_t d : {16ULL, 100ULL}) {
    for (const std::uint64_t n : {4ULL, 40ULL, 100ULL}) {
      for (const std::uint64_t p : {1ULL, 2ULL, 4ULL, 5ULL}) {
        if (n % p != 0) {
          continue;
        }
        const ExperimentConfig cfg{d, n, p, 205};
        const Dataset data = normal_data(d, 205);
        for (const StrategyKind kind : strategies::kAllStrategies) {
          if (kind == StrategyKind::Ddrs && d % p != 0) {
            continue;
          }
          const StrategyReport report =
              strategies::run_strategy(kind, data, cfg, kParams);
          CHECK(report.ledger.channel_bytes(Channel::Data) == report.predicted.bytes_data_out);
          CHECK(report.ledger.channel_bytes(Channel::Results) ==
                report.predicted.bytes_results_back);
          CHECK(report.bytes_match);
        }
      }
    }
  }
}

TEST_CASE("strategy runs are bit-reproducible") {
  const ExperimentConfig cfg{100, 40, 4, 205};
  const Dataset data = normal_data(100, 205);
  for (const StrategyKind kind : strategies::kAllStrategies) {
    const StrategyReport a = strategies::run_strategy(kind, data, cfg, kParams);
    const StrategyReport b = strategies::run_strategy(kind, data, cfg, kParams);
    CHECK(a.estimate.value == b.estimate.value);
    CHECK(a.ledger.bytes_by_link == b.ledger.bytes_by_link);
    CHECK(a.measured_peak_floats_per_rank == b.measured_peak_floats_per_rank);
    CHECK(a.measured_points_per_rank == b.measured_points_per_rank);
  }
}

TEST_CASE("constant data gives zero variance through every strategy") {
  const ExperimentConfig cfg{20, 10, 2, 205};
  const Dataset data{std::vector<double>(20, 3.0)};
  for (const StrategyKind kind : strategies::kAllStrategies) {
    const StrategyReport report = strategies::run_strategy(kind, data, cfg, kParams);
    CHECK(report.estimate.value == 0.0);
  }
}
