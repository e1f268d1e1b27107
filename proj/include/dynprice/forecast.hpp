#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dynprice/error.hpp"
#include "dynprice/rng.hpp"
#include "dynprice/scenario.hpp"
#include "dynprice/timeline.hpp"

namespace dynprice {

enum class SeriesKind { production = 0, consumption = 1, price = 2 };

inline const char* to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::production: return "production";
    case SeriesKind::consumption: return "consumption";
    case SeriesKind::price: return "price";
  }
  return "?";
}

inline SeriesKind series_kind_from_string(const std::string& s) {
  if (s == "production") return SeriesKind::production;
  if (s == "consumption") return SeriesKind::consumption;
  if (s == "price") return SeriesKind::price;
  throw Error("unknown forecast kind '" + s + "'");
}

/// Production and consumption cannot go negative; price can.
constexpr bool is_non_negative(SeriesKind k) noexcept { return k != SeriesKind::price; }

/// Gaussian predictive distribution for one delivery hour.
struct Forecast {
  TimeStep delivery;
  double mean = 0.0;
  double std = 0.0;
  friend bool operator==(const Forecast&, const Forecast&) = default;
};

enum class ForecasterKind { noisy_oracle, persistence };

struct ForecasterConfig {
  ForecasterKind kind = ForecasterKind::noisy_oracle;
  // Noise level of the noisy oracle: relative for production/consumption,
  // absolute (EUR/MWh) for price.
  double gamma = 0.0;
  double persistence_std = 0.0;
  std::uint64_t seed = 0;
  // Hour-of-day profile used by persistence when no observation is available.
  std::vector<double> default_profile;

  void validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
      throw ConfigError("forecaster gamma must be finite and >= 0");
    }
    if (!(persistence_std >= 0.0) || !std::isfinite(persistence_std)) {
      throw ConfigError("forecaster persistence_std must be finite and >= 0");
    }
    if (!default_profile.empty() && default_profile.size() != kHoursPerDay) {
      throw ConfigError("forecaster default_profile must have 24 values");
    }
  }
};

/// Day-ahead forecasts issued at one decision time for its delivery day.
struct ForecastSet {
  TimeStep issued_at;
  std::vector<Forecast> production;
  std::vector<Forecast> consumption;
  std::vector<Forecast> price;

  const std::vector<Forecast>& of(SeriesKind k) const {
    switch (k) {
      case SeriesKind::production: return production;
      case SeriesKind::consumption: return consumption;
      case SeriesKind::price: return price;
    }
    throw Error("unknown forecast kind");
  }

  std::size_t hours() const noexcept { return production.size(); }

  static std::vector<double> means(const std::vector<Forecast>& fs) {
    std::vector<double> out;
    out.reserve(fs.size());
    for (const auto& f : fs) out.push_back(f.mean);
    return out;
  }

  void validate() const {
    const DecisionEvent ev{issued_at};
    ev.validate();
    const auto window = ev.delivery_window();
    for (auto k : {SeriesKind::production, SeriesKind::consumption, SeriesKind::price}) {
      const auto& fs = of(k);
      if (fs.size() != static_cast<std::size_t>(window.size())) {
        throw Error(std::string("forecast set: ") + to_string(k) + " must cover the 24 delivery hours");
      }
      for (std::size_t i = 0; i < fs.size(); ++i) {
        if (fs[i].delivery != window.first + static_cast<std::int64_t>(i)) {
          throw Error(std::string("forecast set: ") + to_string(k) + " deliveries not sorted over the window");
        }
        if (!(fs[i].std >= 0.0)) {
          throw Error("forecast set: negative standard deviation");
        }
      }
    }
  }
};

namespace detail {

inline double oracle_draw(const ForecasterConfig& cfg, SeriesKind kind, TimeStep tau, TimeStep t) {
  auto rng = make_rng(cfg.seed, {static_cast<std::int64_t>(kind), tau.t, t.t});
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

inline const HourlySeries& truth_of(const Scenario& s, SeriesKind kind) {
  switch (kind) {
    case SeriesKind::production: return s.production;
    case SeriesKind::consumption: return s.baseline_consumption;
    case SeriesKind::price: return s.dayahead_price;
  }
  throw Error("unknown forecast kind");
}

} // namespace detail

/// 24 hourly forecasts of one series for the delivery day of `event`.
///
/// noisy_oracle perturbs the realised value (sealed access to the truth) with
/// a normal draw from a stream keyed on (seed, kind, tau, t). persistence
/// repeats the latest same-hour observation available at tau (t-24, or t-48
/// when t-24 lies after tau) and falls back to `default_profile`.
inline std::vector<Forecast> forecast(SeriesKind kind, const Scenario& scenario, const DecisionEvent& event,
                                      const ForecasterConfig& cfg) {
  event.validate();
  cfg.validate();
  const auto window = event.delivery_window();
  const auto& truth = detail::truth_of(scenario, kind);
  if (!truth.covers(window)) {
    throw Error("forecast window [" + std::to_string(window.first.t) + ", " + std::to_string(window.last.t) +
                "] outside scenario");
  }
  const auto tau = event.decision_time;
  std::vector<Forecast> out;
  out.reserve(static_cast<std::size_t>(window.size()));
  for (auto t = window.first; t <= window.last; t = t + 1) {
    Forecast f{t, 0.0, 0.0};
    if (cfg.kind == ForecasterKind::noisy_oracle) {
      const double v = truth.at(t);
      const double z = cfg.gamma == 0.0 ? 0.0 : detail::oracle_draw(cfg, kind, tau, t);
      if (is_non_negative(kind)) {
        f.mean = v * (1.0 + cfg.gamma * z);
        f.std = cfg.gamma * std::abs(v);
      } else {
        f.mean = v + cfg.gamma * z;
        f.std = cfg.gamma;
      }
    } else {
      TimeStep source = t - kHoursPerDay;
      if (source > tau) {
        source = source - kHoursPerDay;
      }
      if (truth.covers(source)) {
        f.mean = truth.at(source);
      } else if (!cfg.default_profile.empty()) {
        f.mean = cfg.default_profile[static_cast<std::size_t>(t.hour_of_day())];
      } else {
        throw Error(std::string("persistence forecaster for ") + to_string(kind) + " has no observation for t=" +
                    std::to_string(t.t) + " and no default_profile");
      }
      f.std = cfg.persistence_std;
    }
    if (is_non_negative(kind)) {
      f.mean = std::max(0.0, f.mean);
    }
    out.push_back(f);
  }
  return out;
}

struct ForecasterSet {
  ForecasterConfig production;
  ForecasterConfig consumption;
  ForecasterConfig price;

  const ForecasterConfig& of(SeriesKind k) const {
    switch (k) {
      case SeriesKind::production: return production;
      case SeriesKind::consumption: return consumption;
      case SeriesKind::price: return price;
    }
    throw Error("unknown forecast kind");
  }
};

inline ForecastSet forecast_all(const Scenario& scenario, const DecisionEvent& event, const ForecasterSet& cfg) {
  ForecastSet fs;
  fs.issued_at = event.decision_time;
  fs.production = forecast(SeriesKind::production, scenario, event, cfg.production);
  fs.consumption = forecast(SeriesKind::consumption, scenario, event, cfg.consumption);
  fs.price = forecast(SeriesKind::price, scenario, event, cfg.price);
  return fs;
}

/// One joint draw of the three forecast series over the delivery day.
struct ForecastTrajectory {
  std::vector<double> production;
  std::vector<double> consumption;
  std::vector<double> price;
  friend bool operator==(const ForecastTrajectory&, const ForecastTrajectory&) = default;
};

/// Draws `n` trajectories from the per-hour Normal(mean, std) forecasts,
/// clipping production and consumption at 0. Trajectory i uses its own
/// stream keyed on (seed, i).
inline std::vector<ForecastTrajectory> sample(const ForecastSet& fs, std::int64_t n, std::uint64_t seed) {
  if (n < 1) {
    throw Error("sample: n must be >= 1");
  }
  std::vector<ForecastTrajectory> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    auto rng = make_rng(seed, {i});
    std::normal_distribution<double> normal(0.0, 1.0);
    ForecastTrajectory tr;
    auto draw = [&](const std::vector<Forecast>& fcs, bool clip, std::vector<double>& dst) {
      dst.reserve(fcs.size());
      for (const auto& f : fcs) {
        double v = f.mean + f.std * normal(rng);
        if (clip) v = std::max(0.0, v);
        dst.push_back(v);
      }
    };
    draw(fs.production, true, tr.production);
    draw(fs.consumption, true, tr.consumption);
    draw(fs.price, false, tr.price);
    out.push_back(std::move(tr));
  }
  return out;
}

} // namespace dynprice
