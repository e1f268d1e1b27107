#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dynprice/error.hpp"
#include "dynprice/timeline.hpp"

namespace dynprice {

/// Hourly consumer prices (EUR/MWh) announced for one delivery day.
struct PriceSignal {
  TimeStep day_start;
  std::vector<double> prices;

  void validate(double y_min, double y_max) const {
    if (prices.size() != kHoursPerDay) {
      throw Error("price signal must hold 24 prices");
    }
    for (std::size_t h = 0; h < prices.size(); ++h) {
      if (!std::isfinite(prices[h]) || prices[h] < y_min || prices[h] > y_max) {
        throw Error("price signal hour " + std::to_string(h) + " outside [y_min, y_max] or non-finite");
      }
    }
  }
  friend bool operator==(const PriceSignal&, const PriceSignal&) = default;
};

/// Demand response: own-price elasticity per hour of day followed by a
/// redistribution of a fraction `rho` of the induced change to neighbouring
/// hours through a shift kernel.
///
/// kernel holds the weights w_delta for delta = -k..-1, 1..k, in that order.
struct DemandResponseModel {
  std::array<double, kHoursPerDay> elasticity{};        // per hour of day, <= 0
  int window = 1;                                       // k
  std::vector<double> kernel{0.5, 0.5};
  double rho = 1.0;
  std::array<double, kHoursPerDay> reference_tariff{};  // r per hour of day, EUR/MWh

  static constexpr double kKernelTolerance = 1e-12;

  std::size_t kernel_index(int delta) const noexcept {
    return static_cast<std::size_t>(delta < 0 ? delta + window : delta + window - 1);
  }
  double kernel_weight(int delta) const { return kernel.at(kernel_index(delta)); }

  void validate() const {
    for (std::size_t h = 0; h < elasticity.size(); ++h) {
      if (!std::isfinite(elasticity[h]) || elasticity[h] > 0.0) {
        throw ConfigError("elasticity at hour " + std::to_string(h) + " must be finite and <= 0");
      }
      if (!std::isfinite(reference_tariff[h]) || !(reference_tariff[h] > 0.0)) {
        throw ConfigError("reference price at hour " + std::to_string(h) + " must be > 0");
      }
    }
    if (window < 1) {
      throw ConfigError("shift window k must be >= 1");
    }
    if (kernel.size() != static_cast<std::size_t>(2 * window)) {
      throw ConfigError("shift kernel must have 2k weights");
    }
    double sum = 0.0;
    for (double w : kernel) {
      if (!std::isfinite(w) || w < 0.0) {
        throw ConfigError("shift kernel weights must be finite and >= 0");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > kKernelTolerance) {
      throw ConfigError("shift kernel weights must sum to 1");
    }
    if (!(rho >= 0.0 && rho <= 1.0)) {
      throw ConfigError("recovery fraction rho must be in [0,1]");
    }
  }

  DemandResponseModel with_reference(std::span<const double> tariff_by_hour) const {
    if (tariff_by_hour.size() != kHoursPerDay) {
      throw Error("reference tariff must have 24 values");
    }
    DemandResponseModel m = *this;
    std::copy(tariff_by_hour.begin(), tariff_by_hour.end(), m.reference_tariff.begin());
    return m;
  }

  DemandResponseModel with_reference(double flat) const {
    DemandResponseModel m = *this;
    m.reference_tariff.fill(flat);
    return m;
  }

  /// Uniform kernel 1/(2k) on every offset.
  static std::vector<double> uniform_kernel(int k) {
    return std::vector<double>(static_cast<std::size_t>(2 * k), 1.0 / (2.0 * k));
  }
};

struct RespondedLoad {
  std::vector<double> load;  // c', kWh/h
  bool clipped = false;      // some hour went negative and was set to 0
};

/// Applies the model to an arbitrary contiguous run of hours (normally one
/// delivery day). `hours` gives the hour of day of each entry; shifting never
/// crosses the ends of the run, and each source hour's kernel is renormalised
/// over its in-run targets. Sources with no in-run target lose their shifted
/// share.
inline RespondedLoad respond_window(const DemandResponseModel& model, std::span<const double> forecast_load,
                                    std::span<const double> prices, std::span<const int> hours) {
  const std::size_t n = forecast_load.size();
  if (prices.size() != n || hours.size() != n) {
    throw Error("respond: load, price and calendar lengths differ");
  }
  std::vector<double> own(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (!(forecast_load[s] >= 0.0)) {
      throw Error("respond: forecast consumption must be >= 0 (hour " + std::to_string(s) + ")");
    }
    const auto h = static_cast<std::size_t>(hours[s]);
    const double r = model.reference_tariff.at(h);
    if (!(r > 0.0)) {
      throw Error("respond: reference price must be > 0 (hour of day " + std::to_string(h) + ")");
    }
    own[s] = forecast_load[s] * model.elasticity[h] * (prices[s] - r) / r;
  }

  std::vector<double> shifted(n, 0.0);
  if (model.rho > 0.0) {
    const auto sn = static_cast<long>(n);
    for (long s = 0; s < sn; ++s) {
      if (own[static_cast<std::size_t>(s)] == 0.0) {
        continue;
      }
      double norm = 0.0;
      for (int d = -model.window; d <= model.window; ++d) {
        if (d != 0 && s + d >= 0 && s + d < sn) norm += model.kernel_weight(d);
      }
      if (norm <= 0.0) {
        continue;
      }
      const double moved = model.rho * own[static_cast<std::size_t>(s)] / norm;
      for (int d = -model.window; d <= model.window; ++d) {
        if (d != 0 && s + d >= 0 && s + d < sn) {
          shifted[static_cast<std::size_t>(s + d)] -= model.kernel_weight(d) * moved;
        }
      }
    }
  }

  RespondedLoad out;
  out.load.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    double v = forecast_load[t] + own[t] + shifted[t];
    if (v < 0.0) {
      v = 0.0;
      out.clipped = true;
    }
    out.load[t] = v;
  }
  return out;
}

inline std::vector<int> hours_of(std::span<const CalendarFeatures> calendar) {
  std::vector<int> h;
  h.reserve(calendar.size());
  for (const auto& c : calendar) h.push_back(c.hour_of_day);
  return h;
}

/// Responded consumption c' for one delivery day.
inline RespondedLoad respond(const DemandResponseModel& model, std::span<const double> forecast_load,
                             const PriceSignal& signal, std::span<const CalendarFeatures> calendar) {
  model.validate();
  if (forecast_load.size() != kHoursPerDay || signal.prices.size() != kHoursPerDay ||
      calendar.size() != kHoursPerDay) {
    throw Error("respond: a delivery day has 24 hours");
  }
  const auto hours = hours_of(calendar);
  return respond_window(model, forecast_load, signal.prices, hours);
}

/// Net consumption response to a uniform relative price move: every price is
/// raised by `relative_step` times its reference price and the relative change
/// of total consumption is divided by `relative_step`.
inline double aggregate_elasticity(const DemandResponseModel& model, std::span<const double> forecast_load,
                                   const PriceSignal& signal, std::span<const CalendarFeatures> calendar,
                                   double relative_step = 0.01) {
  if (relative_step == 0.0 || !std::isfinite(relative_step)) {
    throw Error("aggregate_elasticity: perturbation must be non-zero");
  }
  const double total = std::accumulate(forecast_load.begin(), forecast_load.end(), 0.0);
  if (!(total > 0.0)) {
    throw Error("aggregate_elasticity: forecast consumption sums to zero");
  }
  PriceSignal bumped = signal;
  for (std::size_t i = 0; i < bumped.prices.size(); ++i) {
    const auto h = static_cast<std::size_t>(calendar[i].hour_of_day);
    bumped.prices[i] += relative_step * model.reference_tariff[h];
  }
  const auto base = respond(model, forecast_load, signal, calendar);
  const auto moved = respond(model, forecast_load, bumped, calendar);
  double delta = 0.0;
  for (std::size_t i = 0; i < base.load.size(); ++i) {
    delta += moved.load[i] - base.load[i];
  }
  return (delta / total) / relative_step;
}

} // namespace dynprice
