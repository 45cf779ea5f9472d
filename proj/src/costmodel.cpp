#include "bootsim/costmodel.hpp"

#include <algorithm>
#include <sstream>

namespace bootsim::costmodel {

using strategies::StrategyKind;

CostBreakdown predict(StrategyKind kind, const core::ExperimentConfig& cfg,
                      const core::CostParams& params) {
  core::validate(cfg);
  core::validate(params);

  const std::uint64_t d = cfg.dataset_size;
  const std::uint64_t n = cfg.num_resamples;
  const std::uint64_t p = cfg.num_processes;
  const std::uint64_t local = cfg.resamples_per_process();

  CostBreakdown out;
  out.kind = kind;
  std::uint64_t comp_points = 0;

  switch (kind) {
    case StrategyKind::Fsd:
      out.bytes_data_out = 4 * d * local * (p - 1);
      out.bytes_results_back = 4 * local * (p - 1);
      comp_points = n * d + local * d;  // serial generation, then the mean pass
      out.peak_floats_root = d + n * d;
      out.peak_floats_worker = (p == 1) ? out.peak_floats_root : d;
      break;
    case StrategyKind::Dbsr:
      out.bytes_data_out = 4 * d * (p - 1);
      out.bytes_results_back = 4 * d * local * (p - 1);
      comp_points = local * d;
      out.peak_floats_root = d + local * d;
      out.peak_floats_worker = out.peak_floats_root;
      break;
    case StrategyKind::Dbsa:
      out.bytes_data_out = 4 * d * (p - 1);
      out.bytes_results_back = 8 * (p - 1);
      comp_points = local * d;
      out.peak_floats_root = d + local * d;
      out.peak_floats_worker = out.peak_floats_root;
      break;
    case StrategyKind::Ddrs:
      if (d % p != 0) {
        throw ConfigError("ddrs requires P to divide D (D=" + std::to_string(d) +
                          ", P=" + std::to_string(p) + ")");
      }
      out.bytes_data_out = 0;
      out.bytes_results_back = 4 * n * (p - 1);  // one partial sum per sample per worker
      comp_points = n * d;                       // every rank scans every draw
      out.peak_floats_root = d / p + 4;
      out.peak_floats_worker = (p == 1) ? out.peak_floats_root : d / p + 2;
      break;
  }

  out.t_comm = static_cast<double>(out.total_bytes()) / params.bandwidth;
  out.t_comp = static_cast<double>(comp_points) / params.compute_speed;
  out.t_comp_parallel = (kind == StrategyKind::Ddrs)
                            ? static_cast<double>(n * d) /
                                  (static_cast<double>(p) * params.compute_speed)
                            : out.t_comp;
  return out;
}

PlanResult plan(const PlanQuery& query) {
  core::validate(query.config);
  core::validate(query.params);
  if (query.memory_cap_floats == 0) {
    throw ConfigError("plan: memory cap must be >= 1 float");
  }

  PlanResult result;
  for (std::size_t i = 0; i < strategies::kAllStrategies.size(); ++i) {
    const StrategyKind kind = strategies::kAllStrategies[i];
    PlanEntry& entry = result.entries[i];
    entry.kind = kind;
    try {
      const CostBreakdown cost = predict(kind, query.config, query.params);
      const std::uint64_t required = std::max(cost.peak_floats_root, cost.peak_floats_worker);
      entry.cost = cost;
      entry.feasible = required <= query.memory_cap_floats;
      if (!entry.feasible) {
        entry.note = "needs " + std::to_string(required) + " floats/process, cap is " +
                     std::to_string(query.memory_cap_floats);
      }
    } catch (const ConfigError& err) {
      entry.feasible = false;
      entry.note = err.what();
    }
  }

  // Preference order used for ties: DBSA, DDRS, DBSR, FSD.
  constexpr std::array<StrategyKind, 4> kPreference = {StrategyKind::Dbsa, StrategyKind::Ddrs,
                                                       StrategyKind::Dbsr, StrategyKind::Fsd};
  std::optional<StrategyKind> best;
  double best_objective = 0.0;
  for (const StrategyKind kind : kPreference) {
    const PlanEntry& entry = result.entries[static_cast<std::size_t>(kind)];
    if (!entry.feasible) {
      continue;
    }
    const double objective = entry.cost->t_comm + entry.cost->t_comp;
    if (!best || objective < best_objective) {
      best = kind;
      best_objective = objective;
    }
  }
  result.chosen = best;

  std::ostringstream why;
  if (best) {
    why << to_string(*best) << " minimizes the objective t_comm + t_comp (" << best_objective
        << " s) among strategies fitting " << query.memory_cap_floats
        << " floats/process; ties prefer dbsa, ddrs, dbsr, fsd";
  } else {
    why << "no strategy fits the cap of " << query.memory_cap_floats << " floats/process:";
    for (const PlanEntry& entry : result.entries) {
      why << " " << to_string(entry.kind) << " (" << entry.note << ");";
    }
  }
  result.rationale = why.str();
  return result;
}

}  // namespace bootsim::costmodel
