#include "bootsim/core.hpp"

#include <algorithm>
#include <string>

namespace bootsim::core {

void validate(const ExperimentConfig& cfg) {
  if (cfg.dataset_size == 0) {
    throw ConfigError("dataset size D must be >= 1");
  }
  if (cfg.num_resamples == 0) {
    throw ConfigError("resample count N must be >= 1");
  }
  if (cfg.num_processes == 0) {
    throw ConfigError("process count P must be >= 1");
  }
  if (cfg.num_resamples % cfg.num_processes != 0) {
    throw ConfigError("P must divide N (N=" + std::to_string(cfg.num_resamples) +
                      ", P=" + std::to_string(cfg.num_processes) + ")");
  }
}

void validate(const CostParams& params) {
  if (!(params.bandwidth > 0.0)) {
    throw ConfigError("bandwidth B must be positive");
  }
  if (!(params.compute_speed > 0.0)) {
    throw ConfigError("compute speed S must be positive");
  }
}

SummaryStats summarize_means(std::span<const double> means) {
  if (means.empty()) {
    throw DomainError("summarize_means: empty input");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double m : means) {
    sum += m;
    sum_sq += m * m;
  }
  const double n = static_cast<double>(means.size());
  return SummaryStats{sum / n, sum_sq / n, means.size()};
}

SummaryStats pool_stats(std::span<const SummaryStats> parts) {
  if (parts.empty()) {
    throw AggregationError("pool_stats: no parts");
  }
  const std::uint64_t share = parts.front().count;
  if (share == 0) {
    throw AggregationError("pool_stats: part with zero count");
  }
  double sum_m1 = 0.0;
  double sum_m2 = 0.0;
  std::uint64_t total = 0;
  for (const SummaryStats& part : parts) {
    if (part.count != share) {
      throw AggregationError("pool_stats: unequal part counts (" + std::to_string(share) +
                             " vs " + std::to_string(part.count) +
                             "); unweighted pooling needs equal shares");
    }
    sum_m1 += part.m1;
    sum_m2 += part.m2;
    total += part.count;
  }
  const double p = static_cast<double>(parts.size());
  return SummaryStats{sum_m1 / p, sum_m2 / p, total};
}

VarianceEstimate variance_from_stats(const SummaryStats& stats) {
  if (stats.count == 0) {
    throw DomainError("variance_from_stats: count must be >= 1");
  }
  const double raw = stats.m2 - stats.m1 * stats.m1;
  const double tolerance = 1e-12 * std::max(1.0, stats.m2);
  if (raw < -tolerance) {
    throw DomainError("variance_from_stats: m2 < m1^2 beyond round-off");
  }
  return VarianceEstimate{std::max(0.0, raw)};
}

double population_variance(std::span<const double> xs) {
  if (xs.empty()) {
    throw DomainError("population_variance: empty input");
  }
  double sum = 0.0;
  for (const double x : xs) {
    sum += x;
  }
  const double mean = sum / static_cast<double>(xs.size());
  double acc = 0.0;
  for (const double x : xs) {
    const double d = x - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(xs.size());
}

std::vector<double> resample_means(const Dataset& data, std::uint64_t num_samples,
                                   prng::RngState& stream) {
  const std::uint64_t d = data.size();
  if (d == 0) {
    throw ConfigError("resample_means: empty dataset");
  }
  std::vector<double> means;
  means.reserve(num_samples);
  for (std::uint64_t s = 0; s < num_samples; ++s) {
    double acc = 0.0;
    for (std::uint64_t k = 0; k < d; ++k) {
      acc += data.values[prng::draw_index(stream, d)];
    }
    means.push_back(acc / static_cast<double>(d));
  }
  return means;
}

VarianceEstimate sequential_bootstrap_oracle(const Dataset& data, const ExperimentConfig& cfg) {
  if (cfg.dataset_size == 0 || cfg.num_resamples == 0) {
    throw ConfigError("sequential_bootstrap_oracle: D and N must be >= 1");
  }
  if (data.size() != cfg.dataset_size) {
    throw ConfigError("sequential_bootstrap_oracle: dataset length does not match D");
  }
  prng::RngState stream = prng::rng_new(cfg.seed);
  const std::vector<double> means = resample_means(data, cfg.num_resamples, stream);
  return VarianceEstimate{population_variance(means)};
}

}  // namespace bootsim::core
