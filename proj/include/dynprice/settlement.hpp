#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dynprice/csv.hpp"
#include "dynprice/error.hpp"
#include "dynprice/scenario.hpp"

namespace dynprice {

// kWh x EUR/MWh -> EUR
inline constexpr double kEurPerKwhTimesEurPerMwh = 1e-3;

struct CostModel {
  double fixed_cost_per_hour = 0.0;  // F_C, EUR/h
  double marginal_cost = 0.0;        // M_C, EUR/MWh

  void validate() const {
    if (!(fixed_cost_per_hour >= 0.0) || !std::isfinite(fixed_cost_per_hour)) {
      throw ConfigError("cost_model.fixed_cost_per_hour must be finite and >= 0");
    }
    if (!(marginal_cost >= 0.0) || !std::isfinite(marginal_cost)) {
      throw ConfigError("cost_model.marginal_cost must be finite and >= 0");
    }
  }

  /// Costs the revenue must cover over `hours` hours serving `energy_kwh`.
  double total_cost(std::int64_t hours, double energy_kwh) const {
    return fixed_cost_per_hour * static_cast<double>(hours) +
           marginal_cost * energy_kwh * kEurPerKwhTimesEurPerMwh;
  }
};

/// How the imbalance volume is priced.
///  - verbatim: the realised mismatch c_t - p_t is settled at i_t, on top of
///    the day-ahead trade of the predicted mismatch.
///  - residual: only what the day-ahead trade did not cover,
///    (c_t - p_t) - (c'_t - p^F_t), is settled at i_t.
enum class ImbalanceAccounting { verbatim, residual };

inline const char* to_string(ImbalanceAccounting a) {
  return a == ImbalanceAccounting::verbatim ? "verbatim" : "residual";
}

namespace detail {

inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(std::string(what) + ": misaligned series (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

inline void require_aligned(const HourlySeries& a, const HourlySeries& b, const char* what) {
  if (!a.aligned_with(b)) {
    throw Error(std::string(what) + ": misaligned series");
  }
}

} // namespace detail

/// Sum of |p_t - c_t| in kWh.
inline double deviation(std::span<const double> production, std::span<const double> consumption) {
  detail::require_same_length(production.size(), consumption.size(), "deviation");
  double total = 0.0;
  for (std::size_t i = 0; i < production.size(); ++i) {
    total += std::abs(production[i] - consumption[i]);
  }
  return total;
}

inline double deviation(const HourlySeries& production, const HourlySeries& consumption) {
  detail::require_aligned(production, consumption, "deviation");
  return deviation(production.values, consumption.values);
}

/// Consumer bill sum c_t * y_t in EUR.
inline double bill(std::span<const double> consumption, std::span<const double> prices) {
  detail::require_same_length(consumption.size(), prices.size(), "bill");
  double total = 0.0;
  for (std::size_t i = 0; i < consumption.size(); ++i) {
    total += consumption[i] * prices[i] * kEurPerKwhTimesEurPerMwh;
  }
  return total;
}

inline double bill(const HourlySeries& consumption, const HourlySeries& prices) {
  detail::require_aligned(consumption, prices, "bill");
  return bill(consumption.values, prices.values);
}

struct LedgerRow {
  std::int64_t t = 0;
  double consumer_payment = 0.0;     // c_t y_t
  double dayahead_cashflow = 0.0;    // -(c'_t - p^F_t) lambda_t
  double imbalance_cashflow = 0.0;   // per the configured accounting
  friend bool operator==(const LedgerRow&, const LedgerRow&) = default;
};

struct SettlementLedger {
  ImbalanceAccounting accounting = ImbalanceAccounting::verbatim;
  std::vector<LedgerRow> rows;
  double revenue = 0.0;  // R_T, EUR

  double column_sum() const {
    double s = 0.0;
    for (const auto& r : rows) {
      s += r.consumer_payment + r.dayahead_cashflow + r.imbalance_cashflow;
    }
    return s;
  }
  double imbalance_total() const {
    double s = 0.0;
    for (const auto& r : rows) s += r.imbalance_cashflow;
    return s;
  }

  void write_csv(std::ostream& out) const {
    out << "t,consumer_payment,dayahead_cashflow,imbalance_cashflow\n";
    for (const auto& r : rows) {
      out << r.t << ',' << csv::format_double(r.consumer_payment) << ','
          << csv::format_double(r.dayahead_cashflow) << ',' << csv::format_double(r.imbalance_cashflow) << '\n';
    }
  }
  friend bool operator==(const SettlementLedger&, const SettlementLedger&) = default;
};

/// Inputs of the revenue computation, all aligned on the same hours.
struct SettlementInputs {
  std::int64_t start = 0;
  std::span<const double> production;            // p_t, realised
  std::span<const double> consumption;           // c_t, realised
  std::span<const double> predicted_consumption; // c'_t (or c^F_t without dynamic pricing)
  std::span<const double> production_forecast;   // p^F_t
  std::span<const double> consumer_price;        // y_t (or the baseline tariff)
  std::span<const double> dayahead_price;        // lambda_t, realised
  std::span<const double> imbalance_price;       // i_t, realised
};

/// Producer/retailer revenue: consumer payments, the day-ahead trade of the
/// predicted mismatch and the imbalance settlement, per hour and in total.
inline SettlementLedger revenue(const SettlementInputs& in,
                                ImbalanceAccounting accounting = ImbalanceAccounting::verbatim) {
  const auto n = in.production.size();
  detail::require_same_length(n, in.consumption.size(), "revenue");
  detail::require_same_length(n, in.predicted_consumption.size(), "revenue");
  detail::require_same_length(n, in.production_forecast.size(), "revenue");
  detail::require_same_length(n, in.consumer_price.size(), "revenue");
  detail::require_same_length(n, in.dayahead_price.size(), "revenue");
  detail::require_same_length(n, in.imbalance_price.size(), "revenue");

  SettlementLedger ledger;
  ledger.accounting = accounting;
  ledger.rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double traded = in.predicted_consumption[k] - in.production_forecast[k];
    const double realised = in.consumption[k] - in.production[k];
    const double imbalance_volume =
        accounting == ImbalanceAccounting::verbatim ? realised : realised - traded;
    LedgerRow row;
    row.t = in.start + static_cast<std::int64_t>(k);
    row.consumer_payment = in.consumption[k] * in.consumer_price[k] * kEurPerKwhTimesEurPerMwh;
    row.dayahead_cashflow = -traded * in.dayahead_price[k] * kEurPerKwhTimesEurPerMwh;
    row.imbalance_cashflow = -imbalance_volume * in.imbalance_price[k] * kEurPerKwhTimesEurPerMwh;
    ledger.revenue += row.consumer_payment + row.dayahead_cashflow + row.imbalance_cashflow;
    ledger.rows.push_back(row);
  }
  return ledger;
}

struct ConstraintStatus {
  bool consumer_ok = false;
  bool producer_ok = false;
  friend bool operator==(const ConstraintStatus&, const ConstraintStatus&) = default;
};

/// Consumer: bill <= bill without dynamic pricing. Producer: revenue covers
/// fixed costs over the horizon plus marginal costs of the energy served.
inline ConstraintStatus check_constraints(double bill_eur, double baseline_bill_eur, double revenue_eur,
                                          const CostModel& cost, std::int64_t hours, double energy_kwh = 0.0) {
  return {bill_eur <= baseline_bill_eur, revenue_eur >= cost.total_cost(hours, energy_kwh)};
}

} // namespace dynprice
