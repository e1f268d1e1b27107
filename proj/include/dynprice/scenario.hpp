#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dynprice/error.hpp"
#include "dynprice/rng.hpp"
#include "dynprice/timeline.hpp"

namespace dynprice {

enum class Unit { kwh_per_h, eur_per_mwh, dimensionless };

/// Real-valued quantity indexed by global hour.
struct HourlySeries {
  TimeStep start;
  std::vector<double> values;
  Unit unit = Unit::dimensionless;

  HourlySeries() = default;
  HourlySeries(TimeStep s, std::vector<double> v, Unit u)
      : start(s), values(std::move(v)), unit(u) {}

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(values.size()); }
  TimeStep end() const noexcept { return start + size(); }
  bool covers(TimeStep s) const noexcept { return start <= s && s < end(); }
  bool covers(const DeliveryWindow& w) const noexcept { return covers(w.first) && covers(w.last); }

  double at(TimeStep s) const {
    if (!covers(s)) {
      throw Error("series index t=" + std::to_string(s.t) + " outside [" +
                  std::to_string(start.t) + ", " + std::to_string(end().t - 1) + "]");
    }
    return values[static_cast<std::size_t>(s.t - start.t)];
  }

  /// Values over a window (must be covered).
  std::span<const double> slice(const DeliveryWindow& w) const {
    if (!covers(w)) {
      throw Error("window [" + std::to_string(w.first.t) + ", " + std::to_string(w.last.t) +
                  "] outside series");
    }
    return std::span<const double>(values).subspan(static_cast<std::size_t>(w.first.t - start.t),
                                                    static_cast<std::size_t>(w.size()));
  }

  bool aligned_with(const HourlySeries& o) const noexcept {
    return start == o.start && values.size() == o.values.size();
  }

  friend bool operator==(const HourlySeries&, const HourlySeries&) = default;
};

/// Ground-truth realisations over the horizon plus calendar and optional
/// exogenous feature columns. Treat as immutable once validated.
struct Scenario {
  HourlySeries production;            // p_t, kWh/h
  HourlySeries baseline_consumption;  // c̄_t, kWh/h
  HourlySeries dayahead_price;        // λ_t, EUR/MWh
  HourlySeries imbalance_price;       // i_t, EUR/MWh
  std::vector<CalendarFeatures> calendar;
  std::map<std::string, HourlySeries> features;

  TimeStep start() const noexcept { return production.start; }
  std::int64_t hours() const noexcept { return production.size(); }
  Horizon horizon() const { return Horizon(hours()); }

  const CalendarFeatures& calendar_at(TimeStep s) const {
    if (!production.covers(s)) {
      throw Error("calendar index t=" + std::to_string(s.t) + " outside scenario");
    }
    return calendar[static_cast<std::size_t>(s.t - start().t)];
  }

  void validate() const {
    const auto n = production.size();
    if (n <= 0) {
      throw Error("scenario is empty");
    }
    Horizon{n};
    auto check_aligned = [&](const HourlySeries& s, const std::string& name) {
      if (!s.aligned_with(production)) {
        throw Error("scenario series '" + name + "' is not aligned with production");
      }
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!std::isfinite(s.values[i])) {
          throw Error("scenario series '" + name + "' has a non-finite value at t=" +
                      std::to_string(s.start.t + static_cast<std::int64_t>(i)));
        }
      }
    };
    check_aligned(baseline_consumption, "baseline_consumption");
    check_aligned(dayahead_price, "dayahead_price");
    check_aligned(imbalance_price, "imbalance_price");
    check_aligned(production, "production");
    for (const auto& [name, s] : features) {
      check_aligned(s, "feature:" + name);
    }
    auto check_nonneg = [](const HourlySeries& s, const std::string& name) {
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.values[i] < 0.0) {
          throw Error("scenario series '" + name + "' is negative at t=" +
                      std::to_string(s.start.t + static_cast<std::int64_t>(i)));
        }
      }
    };
    check_nonneg(production, "production");
    check_nonneg(baseline_consumption, "baseline_consumption");
    if (static_cast<std::int64_t>(calendar.size()) != n) {
      throw Error("scenario calendar length does not match horizon");
    }
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parameters of the synthetic scenario generator. Power in kWh/h, prices in
/// EUR/MWh. The defaults describe the bundled solar-heavy portfolio.
struct GeneratorConfig {
  std::uint64_t seed = 7;

  double solar_capacity = 1400.0;
  int sunrise_hour = 6;
  int sunset_hour = 20;
  double solar_cloudiness = 0.3;  // daily clearness drawn from [1 - cloudiness, 1]

  double wind_capacity = 250.0;
  double wind_mean_fraction = 0.35;
  double wind_std_fraction = 0.2;
  double wind_autocorrelation = 0.9;

  double consumption_base = 350.0;
  double consumption_peak_amplitude = 350.0;
  int morning_peak_hour = 8;
  int evening_peak_hour = 19;
  double weekend_factor = 1.1;
  double consumption_noise_std = 15.0;

  double price_base = 60.0;
  double price_slope = 0.04;  // EUR/MWh per kWh/h of residual load
  double price_noise_std = 4.0;
  double imbalance_spread = 25.0;

  CalendarConfig calendar;

  void validate() const {
    auto nonneg = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("generator.") + name + " must be finite and >= 0");
      }
    };
    nonneg(solar_capacity, "solar_capacity");
    nonneg(wind_capacity, "wind_capacity");
    nonneg(solar_cloudiness, "solar_cloudiness");
    nonneg(wind_std_fraction, "wind_std_fraction");
    nonneg(consumption_base, "consumption_base");
    nonneg(consumption_peak_amplitude, "consumption_peak_amplitude");
    nonneg(consumption_noise_std, "consumption_noise_std");
    nonneg(price_noise_std, "price_noise_std");
    nonneg(imbalance_spread, "imbalance_spread");
    nonneg(weekend_factor, "weekend_factor");
    nonneg(wind_mean_fraction, "wind_mean_fraction");
    if (solar_cloudiness > 1.0) {
      throw ConfigError("generator.solar_cloudiness must be <= 1");
    }
    if (wind_autocorrelation < 0.0 || wind_autocorrelation >= 1.0) {
      throw ConfigError("generator.wind_autocorrelation must be in [0,1)");
    }
    if (sunrise_hour < 0 || sunset_hour > 24 || sunrise_hour >= sunset_hour) {
      throw ConfigError("generator daylight window must satisfy 0 <= sunrise < sunset <= 24");
    }
    calendar.validate();
  }
};

namespace detail {

inline double solar_shape(int hour, int sunrise, int sunset) {
  if (hour <= sunrise || hour >= sunset) {
    return 0.0;
  }
  return std::sin(std::numbers::pi * (hour - sunrise) / static_cast<double>(sunset - sunrise));
}

// Double-peak daily load shape, max ~1 at the evening peak.
inline double load_shape(int hour, int morning, int evening) {
  auto bump = [](double h, double centre, double width) {
    return std::exp(-0.5 * (h - centre) * (h - centre) / (width * width));
  };
  return 0.6 * bump(hour, morning, 1.5) + 1.0 * bump(hour, evening, 2.0);
}

} // namespace detail

/// Synthetic scenario: solar bell + AR(1) wind production, double-peak
/// consumption, residual-driven day-ahead price and a penalising imbalance
/// price. Deterministic for a fixed seed.
inline Scenario generate(const GeneratorConfig& cfg, const Horizon& horizon) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(horizon.hours());
  const TimeStep start{0};

  // Independent streams per series.
  auto solar_rng = make_rng(cfg.seed, {1});
  auto wind_rng = make_rng(cfg.seed, {2});
  auto load_rng = make_rng(cfg.seed, {3});
  auto price_rng = make_rng(cfg.seed, {4});
  // One distribution per stream: normal_distribution caches its second draw.
  std::normal_distribution<double> wind_normal(0.0, 1.0);
  std::normal_distribution<double> load_normal(0.0, 1.0);
  std::normal_distribution<double> price_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Scenario s;
  s.calendar = cfg.calendar.features(start, horizon.hours());
  std::vector<double> prod(n), load(n), price(n), imb(n);

  double wind_state = 0.0;
  const double innovation = std::sqrt(1.0 - cfg.wind_autocorrelation * cfg.wind_autocorrelation);
  double clearness = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const TimeStep ts = start + static_cast<std::int64_t>(i);
    const int h = ts.hour_of_day();
    if (h == 0) {
      clearness = 1.0 - cfg.solar_cloudiness * unit(solar_rng);
    }
    const double solar = std::clamp(
        cfg.solar_capacity * clearness * detail::solar_shape(h, cfg.sunrise_hour, cfg.sunset_hour),
        0.0, cfg.solar_capacity);

    wind_state = cfg.wind_autocorrelation * wind_state + innovation * wind_normal(wind_rng);
    const double wind = cfg.wind_capacity *
                        std::clamp(cfg.wind_mean_fraction + cfg.wind_std_fraction * wind_state, 0.0, 1.0);
    prod[i] = solar + wind;

    const auto& cal = s.calendar[i];
    const double day_factor = (cal.is_weekend || cal.is_holiday) ? cfg.weekend_factor : 1.0;
    const double shape = detail::load_shape(h, cfg.morning_peak_hour, cfg.evening_peak_hour);
    const double noise = cfg.consumption_noise_std * load_normal(load_rng);
    load[i] = std::max(0.0, day_factor * (cfg.consumption_base + cfg.consumption_peak_amplitude * shape) + noise);

    const double residual = load[i] - prod[i];
    price[i] = cfg.price_base + cfg.price_slope * residual + cfg.price_noise_std * price_normal(price_rng);
    // Short system (residual >= 0) pays more, long system receives less.
    imb[i] = price[i] + (residual >= 0.0 ? cfg.imbalance_spread : -cfg.imbalance_spread);
  }

  s.production = HourlySeries(start, std::move(prod), Unit::kwh_per_h);
  s.baseline_consumption = HourlySeries(start, std::move(load), Unit::kwh_per_h);
  s.dayahead_price = HourlySeries(start, std::move(price), Unit::eur_per_mwh);
  s.imbalance_price = HourlySeries(start, std::move(imb), Unit::eur_per_mwh);
  s.validate();
  return s;
}

} // namespace dynprice
