#include "bootsim/cli.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "bootsim/costmodel.hpp"
#include "bootsim/strategies.hpp"

namespace bootsim::cli {

using json = nlohmann::ordered_json;
using strategies::StrategyKind;
using strategies::StrategyReport;

namespace {

constexpr double kOracleRelTol = 1e-9;
constexpr double kDbsaVsDbsrRelTol = 1e-12;

// Reserved substream id for synthetic data, far above any realistic rank.
constexpr std::uint64_t kSyntheticDataStreamTag = 0x7FFFFFFF;

double relative_error(double a, double b) {
  const double diff = std::abs(a - b);
  if (diff == 0.0) {
    return 0.0;
  }
  return diff / std::max(std::abs(a), std::abs(b));
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json spec_json(const RunSpec& spec) {
  json j;
  j["subcommand"] = to_string(spec.subcommand);
  if (spec.strategy) {
    j["strategy"] = to_string(*spec.strategy);
  } else {
    j["strategy"] = nullptr;
  }
  j["D"] = spec.config.dataset_size;
  j["N"] = spec.config.num_resamples;
  j["P"] = spec.config.num_processes;
  j["seed"] = spec.config.seed;
  j["B"] = spec.params.bandwidth;
  j["S"] = spec.params.compute_speed;
  if (spec.memory_cap) {
    j["memory_cap"] = *spec.memory_cap;
  } else {
    j["memory_cap"] = nullptr;
  }
  if (spec.data_path) {
    j["data_path"] = *spec.data_path;
  } else {
    j["data_path"] = nullptr;
  }
  j["format"] = to_string(spec.format);
  j["deterministic"] = spec.deterministic;
  return j;
}

json measured_json(const StrategyReport& report) {
  json channels;
  channels["data"] = report.ledger.channel_bytes(simnet::Channel::Data);
  channels["results"] = report.ledger.channel_bytes(simnet::Channel::Results);
  channels["verification"] = report.ledger.channel_bytes(simnet::Channel::Verification);
  json j;
  j["bytes_by_channel"] = channels;
  j["bytes_modeled"] = report.measured_bytes;
  j["bytes_total"] = report.ledger.total_bytes;
  j["peak_floats_per_rank"] = report.measured_peak_floats_per_rank;
  j["points_per_rank"] = report.measured_points_per_rank;
  return j;
}

json predicted_json(const costmodel::CostBreakdown& cost) {
  json j;
  j["strategy"] = to_string(cost.kind);
  j["bytes_data_out"] = cost.bytes_data_out;
  j["bytes_results_back"] = cost.bytes_results_back;
  j["bytes_total"] = cost.total_bytes();
  j["t_comm"] = cost.t_comm;
  j["t_comp"] = cost.t_comp;
  j["t_comp_parallel"] = cost.t_comp_parallel;
  j["peak_floats_root"] = cost.peak_floats_root;
  j["peak_floats_worker"] = cost.peak_floats_worker;
  return j;
}

json oracle_json(double oracle, double rel_err) {
  json j;
  j["estimate"] = oracle;
  j["rel_err"] = rel_err;
  return j;
}

void append_timestamp(json& j, const RunSpec& spec) {
  if (!spec.deterministic) {
    j["generated_at"] = iso_utc_now();
  }
}

core::Dataset make_dataset(const RunSpec& spec) {
  if (spec.data_path) {
    return load_raw_f32(*spec.data_path, spec.config.dataset_size);
  }
  return synthetic_normal_dataset(spec.config.dataset_size, spec.config.seed);
}

CliResult fail(const RunSpec& spec, int code, const std::string& kind, const std::string& msg) {
  CliResult result;
  result.exit_code = code;
  if (spec.format == OutputFormat::Json) {
    json j;
    j["error"] = json{{"kind", kind}, {"message", msg}};
    result.output = j.dump(2) + "\n";
  }
  result.error = "error (" + kind + "): " + msg + "\n";
  return result;
}

// --- verify rows ---

struct StrategyRow {
  StrategyKind kind = StrategyKind::Fsd;
  std::string status;  // ok | infeasible | skipped | sync_fault
  std::string note;
  std::optional<StrategyReport> report;
  double oracle = 0.0;
  double rel_err = 0.0;

  bool passed(bool cap_supplied) const {
    if (status == "ok") {
      return report->bytes_match && rel_err <= kOracleRelTol;
    }
    return (status == "infeasible" && cap_supplied) || status == "skipped";
  }
};

StrategyRow run_row(StrategyKind kind, const core::Dataset& data, const RunSpec& spec) {
  StrategyRow row;
  row.kind = kind;
  strategies::DdrsOptions options;
  if (kind == StrategyKind::Ddrs) {
    options.desync_rank = spec.ddrs_desync_rank;
  }
  try {
    row.report = strategies::run_strategy(kind, data, spec.config, spec.params, spec.memory_cap,
                                          options);
    row.oracle = strategies::oracle_estimate(kind, data, spec.config).value;
    row.rel_err = relative_error(row.report->estimate.value, row.oracle);
    row.status = "ok";
  } catch (const InfeasibleError& err) {
    row.status = "infeasible";
    row.note = err.what();
  } catch (const ConfigError& err) {
    row.status = "skipped";
    row.note = err.what();
  } catch (const SyncFaultError& err) {
    row.status = "sync_fault";
    row.note = err.what();
  }
  return row;
}

json row_json(const StrategyRow& row) {
  json j;
  j["strategy"] = to_string(row.kind);
  j["status"] = row.status;
  if (row.status == "ok") {
    j["estimate"] = row.report->estimate.value;
    j["measured"] = measured_json(*row.report);
    j["predicted"] = predicted_json(row.report->predicted);
    j["match"] = row.report->bytes_match;
    j["oracle"] = oracle_json(row.oracle, row.rel_err);
  } else {
    j["note"] = row.note;
  }
  return j;
}

const char* kRowCsvHeader =
    "strategy,status,D,N,P,seed,estimate,oracle_estimate,rel_err,bytes_data,bytes_results,"
    "bytes_verification,pred_bytes_data,pred_bytes_results,bytes_match\n";

std::string row_csv(const StrategyRow& row, const RunSpec& spec) {
  std::ostringstream out;
  out << to_string(row.kind) << ',' << row.status << ',' << spec.config.dataset_size << ','
      << spec.config.num_resamples << ',' << spec.config.num_processes << ','
      << spec.config.seed << ',';
  if (row.status == "ok") {
    const StrategyReport& r = *row.report;
    out << fmt_double(r.estimate.value) << ',' << fmt_double(row.oracle) << ','
        << fmt_double(row.rel_err) << ',' << r.ledger.channel_bytes(simnet::Channel::Data) << ','
        << r.ledger.channel_bytes(simnet::Channel::Results) << ','
        << r.ledger.channel_bytes(simnet::Channel::Verification) << ','
        << r.predicted.bytes_data_out << ',' << r.predicted.bytes_results_back << ','
        << (r.bytes_match ? "true" : "false");
  } else {
    out << ",,,,,,,," << csv_quote(row.note);
  }
  out << '\n';
  return out.str();
}

std::string row_text(const StrategyRow& row) {
  std::ostringstream out;
  out << std::left << std::setw(6) << to_string(row.kind);
  if (row.status == "ok") {
    const StrategyReport& r = *row.report;
    out << " bytes " << std::setw(12) << r.measured_bytes << " predicted " << std::setw(12)
        << r.predicted.total_bytes() << (r.bytes_match ? " match " : " MISMATCH ") << " estimate "
        << fmt_double(r.estimate.value) << "  oracle " << fmt_double(row.oracle) << "  rel_err "
        << fmt_double(row.rel_err);
  } else {
    out << " " << row.status << ": " << row.note;
  }
  out << '\n';
  return out.str();
}

// --- subcommands ---

CliResult do_simulate(const RunSpec& spec) {
  if (!spec.strategy) {
    return fail(spec, kExitUsage, "config", "simulate requires --strategy");
  }
  const core::Dataset data = make_dataset(spec);
  strategies::DdrsOptions options;
  if (*spec.strategy == StrategyKind::Ddrs) {
    options.desync_rank = spec.ddrs_desync_rank;
  }
  const StrategyReport report = strategies::run_strategy(*spec.strategy, data, spec.config,
                                                         spec.params, spec.memory_cap, options);
  const double oracle = strategies::oracle_estimate(*spec.strategy, data, spec.config).value;
  const double rel_err = relative_error(report.estimate.value, oracle);

  CliResult result;
  switch (spec.format) {
    case OutputFormat::Json: {
      json j;
      j["spec"] = spec_json(spec);
      j["estimate"] = report.estimate.value;
      j["measured"] = measured_json(report);
      j["predicted"] = predicted_json(report.predicted);
      j["match"] = report.bytes_match;
      j["oracle"] = oracle_json(oracle, rel_err);
      append_timestamp(j, spec);
      result.output = j.dump(2) + "\n";
      break;
    }
    case OutputFormat::Csv: {
      StrategyRow row;
      row.kind = *spec.strategy;
      row.status = "ok";
      row.report = report;
      row.oracle = oracle;
      row.rel_err = rel_err;
      result.output = std::string(kRowCsvHeader) + row_csv(row, spec);
      break;
    }
    case OutputFormat::Text: {
      std::ostringstream out;
      out << to_string(*spec.strategy) << " on D=" << spec.config.dataset_size
          << " N=" << spec.config.num_resamples << " P=" << spec.config.num_processes
          << " seed=" << spec.config.seed << '\n'
          << "  estimate        " << fmt_double(report.estimate.value) << '\n'
          << "  oracle          " << fmt_double(oracle) << " (rel_err " << fmt_double(rel_err)
          << ")\n"
          << "  measured bytes  " << report.measured_bytes << " (data "
          << report.ledger.channel_bytes(simnet::Channel::Data) << ", results "
          << report.ledger.channel_bytes(simnet::Channel::Results) << ", verification "
          << report.ledger.channel_bytes(simnet::Channel::Verification) << ")\n"
          << "  predicted bytes " << report.predicted.total_bytes()
          << (report.bytes_match ? " (exact match)" : " (MISMATCH)") << '\n';
      result.output = out.str();
      break;
    }
  }
  return result;
}

CliResult do_predict(const RunSpec& spec) {
  if (!spec.strategy) {
    return fail(spec, kExitUsage, "config", "predict requires --strategy");
  }
  const costmodel::CostBreakdown cost =
      costmodel::predict(*spec.strategy, spec.config, spec.params);

  CliResult result;
  switch (spec.format) {
    case OutputFormat::Json: {
      json j;
      j["spec"] = spec_json(spec);
      j["predicted"] = predicted_json(cost);
      append_timestamp(j, spec);
      result.output = j.dump(2) + "\n";
      break;
    }
    case OutputFormat::Csv: {
      std::ostringstream out;
      out << "strategy,D,N,P,bytes_data_out,bytes_results_back,bytes_total,t_comm,t_comp,"
             "t_comp_parallel,peak_floats_root,peak_floats_worker\n"
          << to_string(cost.kind) << ',' << spec.config.dataset_size << ','
          << spec.config.num_resamples << ',' << spec.config.num_processes << ','
          << cost.bytes_data_out << ',' << cost.bytes_results_back << ',' << cost.total_bytes()
          << ',' << fmt_double(cost.t_comm) << ',' << fmt_double(cost.t_comp) << ','
          << fmt_double(cost.t_comp_parallel) << ',' << cost.peak_floats_root << ','
          << cost.peak_floats_worker << '\n';
      result.output = out.str();
      break;
    }
    case OutputFormat::Text: {
      std::ostringstream out;
      out << to_string(cost.kind) << " prediction for D=" << spec.config.dataset_size
          << " N=" << spec.config.num_resamples << " P=" << spec.config.num_processes << '\n'
          << "  bytes data out     " << cost.bytes_data_out << '\n'
          << "  bytes results back " << cost.bytes_results_back << '\n'
          << "  t_comm             " << fmt_double(cost.t_comm) << " s\n"
          << "  t_comp             " << fmt_double(cost.t_comp) << " s (parallel reading "
          << fmt_double(cost.t_comp_parallel) << " s)\n"
          << "  peak floats        root " << cost.peak_floats_root << ", worker "
          << cost.peak_floats_worker << '\n';
      result.output = out.str();
      break;
    }
  }
  return result;
}

CliResult do_plan(const RunSpec& spec) {
  if (!spec.memory_cap) {
    return fail(spec, kExitUsage, "config", "plan requires --memory-cap");
  }
  const costmodel::PlanResult plan =
      costmodel::plan({spec.config, spec.params, *spec.memory_cap});

  CliResult result;
  result.exit_code = plan.chosen ? kExitOk : kExitInfeasible;
  switch (spec.format) {
    case OutputFormat::Json: {
      json j;
      j["spec"] = spec_json(spec);
      if (plan.chosen) {
        j["chosen"] = to_string(*plan.chosen);
      } else {
        j["chosen"] = nullptr;
      }
      j["rationale"] = plan.rationale;
      json entries = json::array();
      for (const costmodel::PlanEntry& entry : plan.entries) {
        json e;
        e["strategy"] = to_string(entry.kind);
        e["feasible"] = entry.feasible;
        if (entry.cost) {
          e["cost"] = predicted_json(*entry.cost);
        } else {
          e["cost"] = nullptr;
        }
        if (!entry.note.empty()) {
          e["note"] = entry.note;
        }
        entries.push_back(std::move(e));
      }
      j["strategies"] = std::move(entries);
      append_timestamp(j, spec);
      result.output = j.dump(2) + "\n";
      break;
    }
    case OutputFormat::Csv: {
      std::ostringstream out;
      out << "strategy,feasible,chosen,bytes_data_out,bytes_results_back,t_comm,t_comp,"
             "peak_floats_root,peak_floats_worker,note\n";
      for (const costmodel::PlanEntry& entry : plan.entries) {
        out << to_string(entry.kind) << ',' << (entry.feasible ? "true" : "false") << ','
            << (plan.chosen && *plan.chosen == entry.kind ? "true" : "false") << ',';
        if (entry.cost) {
          out << entry.cost->bytes_data_out << ',' << entry.cost->bytes_results_back << ','
              << fmt_double(entry.cost->t_comm) << ',' << fmt_double(entry.cost->t_comp) << ','
              << entry.cost->peak_floats_root << ',' << entry.cost->peak_floats_worker;
        } else {
          out << ",,,,,";
        }
        out << ',' << csv_quote(entry.note) << '\n';
      }
      result.output = out.str();
      break;
    }
    case OutputFormat::Text: {
      std::ostringstream out;
      out << "plan for D=" << spec.config.dataset_size << " N=" << spec.config.num_resamples
          << " P=" << spec.config.num_processes << " cap=" << *spec.memory_cap << " floats\n"
          << "  chosen: " << (plan.chosen ? to_string(*plan.chosen) : "none") << '\n'
          << "  rationale: " << plan.rationale << '\n';
      for (const costmodel::PlanEntry& entry : plan.entries) {
        out << "  " << std::left << std::setw(6) << to_string(entry.kind)
            << (entry.feasible ? " feasible  " : " infeasible");
        if (entry.cost) {
          out << " bytes " << entry.cost->total_bytes() << " t_comm "
              << fmt_double(entry.cost->t_comm) << " t_comp " << fmt_double(entry.cost->t_comp);
        }
        if (!entry.note.empty()) {
          out << "  (" << entry.note << ")";
        }
        out << '\n';
      }
      result.output = out.str();
      break;
    }
  }
  return result;
}

CliResult do_verify(const RunSpec& spec) {
  const core::Dataset data = make_dataset(spec);

  // Independent fabrics; safe to run concurrently. Rows merge in strategy order.
  std::vector<std::future<StrategyRow>> futures;
  futures.reserve(strategies::kAllStrategies.size());
  for (const StrategyKind kind : strategies::kAllStrategies) {
    futures.push_back(std::async(std::launch::async,
                                 [kind, &data, &spec] { return run_row(kind, data, spec); }));
  }
  std::vector<StrategyRow> rows;
  rows.reserve(futures.size());
  for (auto& future : futures) {
    rows.push_back(future.get());
  }

  bool all_ok = true;
  for (const StrategyRow& row : rows) {
    all_ok = all_ok && row.passed(spec.memory_cap.has_value());
  }

  const StrategyRow& dbsr = rows[1];
  const StrategyRow& dbsa = rows[2];
  std::optional<double> cross_rel;
  if (dbsr.status == "ok" && dbsa.status == "ok") {
    cross_rel = relative_error(dbsa.report->estimate.value, dbsr.report->estimate.value);
    all_ok = all_ok && *cross_rel <= kDbsaVsDbsrRelTol;
  }

  CliResult result;
  result.exit_code = all_ok ? kExitOk : kExitMismatch;
  switch (spec.format) {
    case OutputFormat::Json: {
      json j;
      j["spec"] = spec_json(spec);
      json results = json::array();
      for (const StrategyRow& row : rows) {
        results.push_back(row_json(row));
      }
      j["results"] = std::move(results);
      if (cross_rel) {
        json cross;
        cross["dbsa_vs_dbsr_rel_err"] = *cross_rel;
        cross["tolerance"] = kDbsaVsDbsrRelTol;
        cross["ok"] = *cross_rel <= kDbsaVsDbsrRelTol;
        j["cross_checks"] = std::move(cross);
      } else {
        j["cross_checks"] = nullptr;
      }
      j["all_ok"] = all_ok;
      append_timestamp(j, spec);
      result.output = j.dump(2) + "\n";
      break;
    }
    case OutputFormat::Csv: {
      std::ostringstream out;
      out << kRowCsvHeader;
      for (const StrategyRow& row : rows) {
        out << row_csv(row, spec);
      }
      result.output = out.str();
      break;
    }
    case OutputFormat::Text: {
      std::ostringstream out;
      out << "verify D=" << spec.config.dataset_size << " N=" << spec.config.num_resamples
          << " P=" << spec.config.num_processes << " seed=" << spec.config.seed << '\n';
      for (const StrategyRow& row : rows) {
        out << "  " << row_text(row);
      }
      if (cross_rel) {
        out << "  dbsa vs dbsr rel_err " << fmt_double(*cross_rel) << " (tolerance "
            << fmt_double(kDbsaVsDbsrRelTol) << ")\n";
      }
      out << (all_ok ? "all checks passed\n" : "CHECKS FAILED\n");
      result.output = out.str();
      break;
    }
  }
  return result;
}

}  // namespace

std::string_view to_string(Subcommand sub) {
  switch (sub) {
    case Subcommand::Simulate:
      return "simulate";
    case Subcommand::Predict:
      return "predict";
    case Subcommand::Plan:
      return "plan";
    case Subcommand::Verify:
      return "verify";
  }
  return "unknown";
}

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::Json:
      return "json";
    case OutputFormat::Csv:
      return "csv";
    case OutputFormat::Text:
      return "text";
  }
  return "unknown";
}

std::optional<OutputFormat> parse_format(std::string_view name) {
  if (name == "json") {
    return OutputFormat::Json;
  }
  if (name == "csv") {
    return OutputFormat::Csv;
  }
  if (name == "text") {
    return OutputFormat::Text;
  }
  return std::nullopt;
}

core::Dataset load_raw_f32(const std::string& path, std::uint64_t expected_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open data file: " + path);
  }
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != 4 * expected_size) {
    throw ConfigError("data file " + path + " holds " + std::to_string(bytes.size()) +
                      " bytes, expected 4*D = " + std::to_string(4 * expected_size));
  }
  core::Dataset data;
  data.values.reserve(expected_size);
  for (std::uint64_t i = 0; i < expected_size; ++i) {
    const auto* b = reinterpret_cast<const unsigned char*>(bytes.data() + 4 * i);
    const std::uint32_t word = static_cast<std::uint32_t>(b[0]) |
                               (static_cast<std::uint32_t>(b[1]) << 8) |
                               (static_cast<std::uint32_t>(b[2]) << 16) |
                               (static_cast<std::uint32_t>(b[3]) << 24);
    data.values.push_back(static_cast<double>(std::bit_cast<float>(word)));
  }
  return data;
}

core::Dataset synthetic_normal_dataset(std::uint64_t size, std::uint64_t seed) {
  prng::RngState stream = prng::rank_substream(seed, kSyntheticDataStreamTag);
  return core::Dataset{prng::standard_normal(stream, size)};
}

CliResult execute(const RunSpec& spec) {
  try {
    switch (spec.subcommand) {
      case Subcommand::Simulate:
        return do_simulate(spec);
      case Subcommand::Predict:
        return do_predict(spec);
      case Subcommand::Plan:
        return do_plan(spec);
      case Subcommand::Verify:
        return do_verify(spec);
    }
    return fail(spec, kExitUsage, "config", "unknown subcommand");
  } catch (const InfeasibleError& err) {
    return fail(spec, kExitInfeasible, "infeasible", err.what());
  } catch (const SyncFaultError& err) {
    return fail(spec, kExitMismatch, "sync_fault", err.what());
  } catch (const ConfigError& err) {
    return fail(spec, kExitUsage, "config", err.what());
  } catch (const DomainError& err) {
    return fail(spec, kExitUsage, "domain", err.what());
  } catch (const AggregationError& err) {
    return fail(spec, kExitUsage, "aggregation", err.what());
  } catch (const std::exception& err) {
    return fail(spec, 1, "internal", err.what());
  }
}

}  // namespace bootsim::cli
