#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dynprice/csv.hpp"
#include "dynprice/demand.hpp"
#include "dynprice/error.hpp"
#include "dynprice/evaluate.hpp"
#include "dynprice/forecast.hpp"
#include "dynprice/policy.hpp"
#include "dynprice/scenario.hpp"
#include "dynprice/settlement.hpp"
#include "dynprice/timeline.hpp"

namespace dynprice {

struct RunConfig {
  ForecasterSet forecasters;
  DemandResponseModel model;                       // used for prediction
  std::optional<DemandResponseModel> truth_model;  // realised response; defaults to `model`
  PolicyConfig policy;
  BaselineTariff tariff;
  CostModel cost;
  ImbalanceAccounting accounting = ImbalanceAccounting::verbatim;

  const DemandResponseModel& realised_model() const { return truth_model ? *truth_model : model; }

  void validate() const {
    for (auto k : {SeriesKind::production, SeriesKind::consumption, SeriesKind::price}) {
      forecasters.of(k).validate();
    }
    // Reference prices are set per day from the tariff; check the rest here.
    model.with_reference(1.0).validate();
    if (truth_model) truth_model->with_reference(1.0).validate();
    policy.validate();
    tariff.validate();
    cost.validate();
  }
};

struct DayRecord {
  DecisionEvent event;
  PriceSignal signal;
  PredictedObjective predicted;
  bool predicted_clipped = false;
  bool realised_clipped = false;
};

struct RunResult {
  std::vector<DayRecord> days;
  HourlySeries prices;                 // y
  HourlySeries expected_tariff;        // tariff on forecast prices, seen by the policy
  HourlySeries tariff;                 // realised baseline tariff
  HourlySeries production_forecast;    // p^F
  HourlySeries consumption_forecast;   // c^F
  HourlySeries price_forecast;         // lambda^F
  HourlySeries predicted_consumption;  // c'
  HourlySeries consumption;            // c, realised
  SettlementLedger ledger;
  BaselineResult baseline;
  WorldTotals totals;
  EvaluationReport report;

  /// Per-hour trajectory: t, p, c̄, c, c', y, tariff, lambda, i.
  void write_trajectory_csv(std::ostream& out, const Scenario& s) const {
    out << "t,production_kwh,baseline_consumption_kwh,consumption_kwh,predicted_consumption_kwh,"
           "price_eur_mwh,baseline_tariff_eur_mwh,dayahead_price_eur_mwh,imbalance_price_eur_mwh\n";
    for (std::size_t k = 0; k < prices.values.size(); ++k) {
      out << (prices.start.t + static_cast<std::int64_t>(k)) << ',' << csv::format_double(s.production.values[k])
          << ',' << csv::format_double(s.baseline_consumption.values[k]) << ','
          << csv::format_double(consumption.values[k]) << ',' << csv::format_double(predicted_consumption.values[k])
          << ',' << csv::format_double(prices.values[k]) << ',' << csv::format_double(tariff.values[k]) << ','
          << csv::format_double(s.dayahead_price.values[k]) << ','
          << csv::format_double(s.imbalance_price.values[k]) << '\n';
    }
  }
};

/// Runs the day-ahead loop over the whole scenario: for every decision event
/// forecast the delivery day, price it, predict and realise the demand
/// response; then settle and compare with the world without dynamic pricing.
inline RunResult run(const RunConfig& config, const Scenario& scenario) {
  config.validate();
  scenario.validate();
  if (scenario.start().t != 0) {
    throw Error("run: scenario must start at t=0, got t=" + std::to_string(scenario.start().t));
  }
  const Horizon horizon = scenario.horizon();
  const auto n = static_cast<std::size_t>(horizon.hours());

  std::vector<double> y(n), tariff_f(n), pf(n), cf(n), lf(n), c_pred(n), c_real(n);
  const auto tariff_real = config.tariff.apply(scenario.dayahead_price.values);

  RunResult result;
  std::vector<PriceSignal> history;
  for (const auto& event : decision_schedule(horizon)) {
    const auto window = event.delivery_window();
    const auto day = window.first.day_index();
    const auto offset = static_cast<std::size_t>(window.first.t);
    try {
      PolicyInput in;
      in.forecasts = forecast_all(scenario, event, config.forecasters);
      in.price_history = history;
      in.calendar.assign(scenario.calendar.begin() + static_cast<long>(offset),
                         scenario.calendar.begin() + static_cast<long>(offset + kHoursPerDay));
      in.baseline_tariff = config.tariff.apply(ForecastSet::means(in.forecasts.price));
      in.model = config.model.with_reference(in.baseline_tariff);
      in.cost = config.cost;

      DayRecord rec;
      rec.event = event;
      rec.signal = decide(config.policy, in);
      rec.predicted = predicted_objective(in, rec.signal);

      const auto cf_day = ForecastSet::means(in.forecasts.consumption);
      const auto predicted = respond(in.model, cf_day, rec.signal, in.calendar);
      const auto realised_model =
          config.realised_model().with_reference(std::span<const double>(tariff_real).subspan(offset, kHoursPerDay));
      const auto realised =
          respond(realised_model, scenario.baseline_consumption.slice(window), rec.signal, in.calendar);
      rec.predicted_clipped = predicted.clipped;
      rec.realised_clipped = realised.clipped;

      for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        y[offset + h] = rec.signal.prices[h];
        tariff_f[offset + h] = in.baseline_tariff[h];
        pf[offset + h] = in.forecasts.production[h].mean;
        cf[offset + h] = cf_day[h];
        lf[offset + h] = in.forecasts.price[h].mean;
        c_pred[offset + h] = predicted.load[h];
        c_real[offset + h] = realised.load[h];
      }
      history.push_back(rec.signal);
      result.days.push_back(std::move(rec));
    } catch (const Error& e) {
      throw Error("day " + std::to_string(day) + " (decided at t=" + std::to_string(event.decision_time.t) +
                  "): " + e.what());
    }
  }

  const TimeStep start{0};
  result.ledger = revenue({0, scenario.production.values, c_real, c_pred, pf, y, scenario.dayahead_price.values,
                           scenario.imbalance_price.values},
                          config.accounting);
  result.totals.hours = horizon.hours();
  result.totals.deviation = deviation(scenario.production.values, c_real);
  result.totals.bill = bill(c_real, y);
  result.totals.revenue = result.ledger.revenue;
  for (double c : c_real) result.totals.energy += c;

  result.baseline = baseline_run(scenario, config.tariff, config.cost, cf, pf, config.accounting);
  result.report = indicators(result.totals, result.baseline.totals, config.cost);

  result.prices = HourlySeries(start, std::move(y), Unit::eur_per_mwh);
  result.expected_tariff = HourlySeries(start, std::move(tariff_f), Unit::eur_per_mwh);
  result.tariff = HourlySeries(start, tariff_real, Unit::eur_per_mwh);
  result.production_forecast = HourlySeries(start, std::move(pf), Unit::kwh_per_h);
  result.consumption_forecast = HourlySeries(start, std::move(cf), Unit::kwh_per_h);
  result.price_forecast = HourlySeries(start, std::move(lf), Unit::eur_per_mwh);
  result.predicted_consumption = HourlySeries(start, std::move(c_pred), Unit::kwh_per_h);
  result.consumption = HourlySeries(start, std::move(c_real), Unit::kwh_per_h);
  return result;
}

} // namespace dynprice
