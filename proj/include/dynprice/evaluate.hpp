#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynprice/error.hpp"
#include "dynprice/scenario.hpp"
#include "dynprice/settlement.hpp"

namespace dynprice {

/// Tariff paid without dynamic pricing: alpha * lambda_t + beta.
struct BaselineTariff {
  double alpha = 0.0;
  double beta = 50.0;  // EUR/MWh

  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
      throw ConfigError("tariff alpha and beta must be finite");
    }
  }

  double at(double dayahead_price) const { return alpha * dayahead_price + beta; }

  std::vector<double> apply(std::span<const double> dayahead) const {
    std::vector<double> out(dayahead.size());
    for (std::size_t i = 0; i < dayahead.size(); ++i) out[i] = at(dayahead[i]);
    return out;
  }
};

/// Deviation, bill and revenue of one world (with or without dynamic pricing).
struct WorldTotals {
  std::int64_t hours = 0;
  double deviation = 0.0;  // kWh
  double bill = 0.0;       // EUR
  double revenue = 0.0;    // EUR
  double energy = 0.0;     // total consumption, kWh
};

struct BaselineResult {
  WorldTotals totals;
  std::vector<double> tariff;  // realised baseline tariff per hour
  SettlementLedger ledger;
};

/// The world without dynamic pricing: consumers keep c̄ and pay the baseline
/// tariff; the retailer still trades its forecast mismatch c^F - p^F on the
/// day-ahead market.
inline BaselineResult baseline_run(const Scenario& scenario, const BaselineTariff& tariff, const CostModel& cost,
                                   std::span<const double> consumption_forecast,
                                   std::span<const double> production_forecast,
                                   ImbalanceAccounting accounting = ImbalanceAccounting::verbatim) {
  scenario.validate();
  tariff.validate();
  cost.validate();
  BaselineResult b;
  b.tariff = tariff.apply(scenario.dayahead_price.values);
  const auto& cbar = scenario.baseline_consumption.values;
  b.ledger = revenue({scenario.start().t, scenario.production.values, cbar, consumption_forecast, production_forecast,
                      b.tariff, scenario.dayahead_price.values, scenario.imbalance_price.values},
                     accounting);
  b.totals.hours = scenario.hours();
  b.totals.deviation = deviation(scenario.production.values, cbar);
  b.totals.bill = bill(cbar, b.tariff);
  b.totals.revenue = b.ledger.revenue;
  for (double c : cbar) b.totals.energy += c;
  return b;
}

namespace flag {
inline constexpr const char* kSDenominatorZero = "S:denominator_zero";
inline constexpr const char* kBDenominatorNonpositive = "B:denominator_nonpositive";
inline constexpr const char* kRDenominatorNonpositive = "R:denominator_nonpositive";
} // namespace flag

/// Indicators S, B, R in percent. When a denominator is degenerate the
/// matching indicator holds the signed absolute gain instead (kWh or EUR) and
/// a flag names it.
struct EvaluationReport {
  double deviation = 0.0;
  double deviation_baseline = 0.0;
  double bill = 0.0;
  double bill_baseline = 0.0;
  double revenue = 0.0;
  double revenue_baseline = 0.0;
  double indicator_s = 0.0;
  double indicator_b = 0.0;
  double indicator_r = 0.0;
  bool consumer_ok = false;
  bool producer_ok = false;
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["deviation_kwh"] = deviation;
    j["deviation_baseline_kwh"] = deviation_baseline;
    j["bill_eur"] = bill;
    j["bill_baseline_eur"] = bill_baseline;
    j["revenue_eur"] = revenue;
    j["revenue_baseline_eur"] = revenue_baseline;
    j["indicator_s_pct"] = indicator_s;
    j["indicator_b_pct"] = indicator_b;
    j["indicator_r_pct"] = indicator_r;
    j["consumer_ok"] = consumer_ok;
    j["producer_ok"] = producer_ok;
    j["flags"] = flags;
    return j;
  }
};

inline EvaluationReport indicators(const WorldTotals& run, const WorldTotals& baseline, const CostModel& cost) {
  if (run.hours != baseline.hours) {
    throw Error("indicators: run and baseline horizons differ (" + std::to_string(run.hours) + " vs " +
                std::to_string(baseline.hours) + ")");
  }
  EvaluationReport r;
  r.deviation = run.deviation;
  r.deviation_baseline = baseline.deviation;
  r.bill = run.bill;
  r.bill_baseline = baseline.bill;
  r.revenue = run.revenue;
  r.revenue_baseline = baseline.revenue;

  if (baseline.deviation > 0.0) {
    r.indicator_s = 100.0 * (baseline.deviation - run.deviation) / baseline.deviation;
  } else {
    r.indicator_s = baseline.deviation - run.deviation;
    r.flags.emplace_back(flag::kSDenominatorZero);
  }
  if (baseline.bill > 0.0) {
    r.indicator_b = 100.0 * (baseline.bill - run.bill) / baseline.bill;
  } else {
    r.indicator_b = baseline.bill - run.bill;
    r.flags.emplace_back(flag::kBDenominatorNonpositive);
  }
  if (baseline.revenue > 0.0) {
    r.indicator_r = 100.0 * (run.revenue - baseline.revenue) / baseline.revenue;
  } else {
    r.indicator_r = run.revenue - baseline.revenue;
    r.flags.emplace_back(flag::kRDenominatorNonpositive);
  }
  const auto status = check_constraints(run.bill, baseline.bill, run.revenue, cost, run.hours, run.energy);
  r.consumer_ok = status.consumer_ok;
  r.producer_ok = status.producer_ok;
  return r;
}

} // namespace dynprice
