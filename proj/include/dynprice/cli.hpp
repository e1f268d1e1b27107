#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "dynprice/config.hpp"
#include "dynprice/csv.hpp"
#include "dynprice/orchestrator.hpp"

namespace dynprice::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConstraintViolated = 2;

inline constexpr const char* kScenarioFile = "scenario.csv";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kLedgerFile = "ledger.csv";
inline constexpr const char* kTrajectoryFile = "trajectory.csv";
inline constexpr const char* kSweepFile = "sweep.csv";

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

} // namespace detail

/// Writes the (generated or loaded) scenario CSV.
inline int cmd_generate(const CliConfig& cfg, std::ostream& log) {
  const auto scenario = load_scenario(cfg);
  const auto path = cfg.output_dir / kScenarioFile;
  auto out = detail::open_output(path);
  save_csv(scenario, out);
  detail::finish(out, path);
  log << "wrote " << scenario.hours() << " rows to " << path.string() << '\n';
  return kExitOk;
}

inline std::string report_text(const EvaluationReport& r) { return r.to_json().dump(2) + "\n"; }

/// Runs the configured policy; writes report, ledger and trajectory. Returns
/// 2 when either constraint is violated.
inline int cmd_run(const CliConfig& cfg, std::ostream& log) {
  const auto scenario = load_scenario(cfg);
  const auto result = run(cfg.run, scenario);

  const auto report_path = cfg.output_dir / kReportFile;
  auto report = detail::open_output(report_path);
  report << report_text(result.report);
  detail::finish(report, report_path);

  const auto ledger_path = cfg.output_dir / kLedgerFile;
  auto ledger = detail::open_output(ledger_path);
  result.ledger.write_csv(ledger);
  detail::finish(ledger, ledger_path);

  const auto traj_path = cfg.output_dir / kTrajectoryFile;
  auto traj = detail::open_output(traj_path);
  result.write_trajectory_csv(traj, scenario);
  detail::finish(traj, traj_path);

  const auto& r = result.report;
  log << "S=" << r.indicator_s << " B=" << r.indicator_b << " R=" << r.indicator_r
      << " consumer_ok=" << (r.consumer_ok ? "true" : "false")
      << " producer_ok=" << (r.producer_ok ? "true" : "false") << '\n';
  return r.consumer_ok && r.producer_ok ? kExitOk : kExitConstraintViolated;
}

struct SweepRow {
  double value = 0.0;
  EvaluationReport report;
};

/// One run per value of a numeric config key. Rows are independent and run
/// concurrently.
inline std::vector<SweepRow> sweep(const ConfigDocument& doc, const std::string& axis,
                                   const std::vector<double>& values) {
  const auto* spec = find_key(axis);
  if (spec == nullptr || (spec->type != KeyType::number && spec->type != KeyType::integer)) {
    throw ConfigError("unknown sweep axis '" + axis + "' (expects a numeric config key)");
  }
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<std::future<SweepRow>> jobs;
  for (double v : values) {
    ConfigDocument row_doc = doc;
    row_doc.set_number(axis, v);
    const auto cfg = bind_config(row_doc);  // validate eagerly, on the caller's thread
    jobs.push_back(std::async(std::launch::async, [cfg, v] {
      const auto scenario = load_scenario(cfg);
      return SweepRow{v, run(cfg.run, scenario).report};
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows) {
  out << axis << ",indicator_s_pct,indicator_b_pct,indicator_r_pct,consumer_ok,producer_ok\n";
  for (const auto& r : rows) {
    out << csv::format_double(r.value) << ',' << csv::format_double(r.report.indicator_s) << ','
        << csv::format_double(r.report.indicator_b) << ',' << csv::format_double(r.report.indicator_r) << ','
        << (r.report.consumer_ok ? "true" : "false") << ',' << (r.report.producer_ok ? "true" : "false") << '\n';
  }
}

inline int cmd_sweep(const ConfigDocument& doc, const std::filesystem::path& output_dir, const std::string& axis,
                     const std::vector<double>& values, std::ostream& log) {
  const auto rows = sweep(doc, axis, values);
  const auto path = output_dir / kSweepFile;
  auto out = detail::open_output(path);
  write_sweep_csv(out, axis, rows);
  detail::finish(out, path);
  log << "wrote " << rows.size() << " rows to " << path.string() << '\n';
  return kExitOk;
}

} // namespace dynprice::cli
