#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bootsim/errors.hpp"
#include "bootsim/prng.hpp"

namespace bootsim::core {

// One bootstrap experiment. P must divide N so every process gets an equal
// share of resamples; DDRS additionally requires P to divide D (checked where
// that strategy is entered).
struct ExperimentConfig {
  std::uint64_t dataset_size = 0;   // D, count of 4-byte sample points
  std::uint64_t num_resamples = 0;  // N
  std::uint64_t num_processes = 1;  // P
  std::uint64_t seed = 0;

  std::uint64_t resamples_per_process() const { return num_resamples / num_processes; }
};

// Throws ConfigError unless D >= 1, N >= 1, P >= 1 and P divides N.
void validate(const ExperimentConfig& cfg);

// Analytic model parameters: bandwidth in bytes/second, compute speed in
// sample-points/second.
struct CostParams {
  double bandwidth = 0.0;
  double compute_speed = 0.0;
};

void validate(const CostParams& params);

// Sample points held as doubles internally; accounted on the wire and in
// memory at 4 bytes apiece.
struct Dataset {
  std::vector<double> values;

  static constexpr std::uint64_t kAccountedBytesPerValue = 4;

  std::uint64_t size() const { return values.size(); }
  std::uint64_t accounted_bytes() const { return kAccountedBytesPerValue * values.size(); }
};

// Sufficient statistics for the variance of a set of sample means:
// mean of the means and mean of their squares. m2 >= m1^2 up to round-off.
struct SummaryStats {
  double m1 = 0.0;
  double m2 = 0.0;
  std::uint64_t count = 0;
};

struct VarianceEstimate {
  double value = 0.0;
};

// m1/m2/count over a non-empty sequence, summed left to right in sequence
// order. The fixed order makes cross-route comparisons reproducible.
SummaryStats summarize_means(std::span<const double> means);

// Unweighted mean of per-part statistics. Valid only for equal shares, so
// unequal counts raise AggregationError instead of silently biasing.
SummaryStats pool_stats(std::span<const SummaryStats> parts);

// max(0, m2 - m1^2), population convention. Negative round-off is clamped at
// zero; a deficit beyond 1e-12 * max(1, m2) means the stats are not from any
// real means sequence and raises DomainError.
VarianceEstimate variance_from_stats(const SummaryStats& stats);

// Two-pass population variance (divisor n), summed left to right. This is the
// reference route; the strategies recover the same value through m2 - m1^2.
double population_variance(std::span<const double> xs);

// Draws num_samples bootstrap resamples of size data.size() from one stream,
// row-major (sample 0 fully before sample 1), and returns their means.
std::vector<double> resample_means(const Dataset& data, std::uint64_t num_samples,
                                   prng::RngState& stream);

// Single-process reference walk: N resamples from one canonical stream seeded
// with cfg.seed, population variance of the N means.
VarianceEstimate sequential_bootstrap_oracle(const Dataset& data, const ExperimentConfig& cfg);

}  // namespace bootsim::core
