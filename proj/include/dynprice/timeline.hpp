#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dynprice/error.hpp"

namespace dynprice {

inline constexpr int kHoursPerDay = 24;

// Decisions are taken at hour 12 of the day before delivery.
inline constexpr int kDecisionHour = 12;
inline constexpr int kMinLag = 12;
inline constexpr int kMaxLag = 35;

/// Global hour index. t = 0 is 00:00 of day 0; negative values are allowed
/// (the first decision happens at t = -12).
struct TimeStep {
  std::int64_t t = 0;

  constexpr int hour_of_day() const noexcept {
    return static_cast<int>(((t % kHoursPerDay) + kHoursPerDay) % kHoursPerDay);
  }
  constexpr std::int64_t day_index() const noexcept {
    // floor division
    return t >= 0 ? t / kHoursPerDay : -((-t + kHoursPerDay - 1) / kHoursPerDay);
  }

  friend constexpr auto operator<=>(TimeStep, TimeStep) = default;
  friend constexpr TimeStep operator+(TimeStep a, std::int64_t h) { return {a.t + h}; }
  friend constexpr TimeStep operator-(TimeStep a, std::int64_t h) { return {a.t - h}; }
  friend constexpr std::int64_t operator-(TimeStep a, TimeStep b) { return a.t - b.t; }
};

/// Hours [first, last] inclusive.
struct DeliveryWindow {
  TimeStep first;
  TimeStep last;

  constexpr std::int64_t size() const noexcept { return last.t - first.t + 1; }
  constexpr bool contains(TimeStep s) const noexcept { return first <= s && s <= last; }
  friend constexpr bool operator==(const DeliveryWindow&, const DeliveryWindow&) = default;
};

/// A pricing decision taken at `decision_time` for the following calendar day.
/// Plain aggregate so that malformed events can be expressed and rejected by
/// consumers; use `is_valid()` or `validate()` before trusting one.
struct DecisionEvent {
  TimeStep decision_time;

  constexpr DeliveryWindow delivery_window() const noexcept {
    return {decision_time + kMinLag, decision_time + kMaxLag};
  }
  constexpr bool is_valid() const noexcept {
    return decision_time.hour_of_day() == kDecisionHour;
  }
  void validate() const {
    if (!is_valid()) {
      throw Error("decision event at t=" + std::to_string(decision_time.t) +
                  " is not a decision time: (tau+12) % 24 must be 0");
    }
  }
  friend constexpr bool operator==(const DecisionEvent&, const DecisionEvent&) = default;
};

class Horizon {
public:
  explicit Horizon(std::int64_t hours) : hours_(hours) {
    if (hours <= 0) {
      throw Error("horizon must be positive, got " + std::to_string(hours));
    }
    if (hours % kHoursPerDay != 0) {
      throw Error("horizon not multiple of 24: T=" + std::to_string(hours));
    }
  }

  std::int64_t hours() const noexcept { return hours_; }
  std::int64_t days() const noexcept { return hours_ / kHoursPerDay; }
  friend bool operator==(const Horizon&, const Horizon&) = default;

private:
  std::int64_t hours_;
};

enum class Season { winter, spring, summer, autumn };

inline const char* to_string(Season s) {
  switch (s) {
    case Season::winter: return "winter";
    case Season::spring: return "spring";
    case Season::summer: return "summer";
    case Season::autumn: return "autumn";
  }
  return "?";
}

struct CalendarFeatures {
  int hour_of_day = 0;
  bool is_weekend = false;
  bool is_holiday = false;
  Season season = Season::winter;
  friend bool operator==(const CalendarFeatures&, const CalendarFeatures&) = default;
};

/// Maps day indices onto weekdays, holidays and seasons.
struct CalendarConfig {
  int start_weekday = 0;       // weekday of day 0, 0 = Monday
  int start_day_of_year = 0;   // day-of-year of day 0, 0 = January 1st
  std::set<std::int64_t> holidays;  // day indices

  void validate() const {
    if (start_weekday < 0 || start_weekday > 6) {
      throw ConfigError("calendar.start_weekday must be in [0,6]");
    }
    if (start_day_of_year < 0 || start_day_of_year > 364) {
      throw ConfigError("calendar.start_day_of_year must be in [0,364]");
    }
  }

  CalendarFeatures features(TimeStep s) const {
    const auto day = s.day_index();
    CalendarFeatures f;
    f.hour_of_day = s.hour_of_day();
    const auto weekday = (((day + start_weekday) % 7) + 7) % 7;
    f.is_weekend = weekday >= 5;
    f.is_holiday = holidays.contains(day);
    // Non-leap 365-day year; meteorological seasons.
    const auto doy = (((day + start_day_of_year) % 365) + 365) % 365;
    if (doy < 59 || doy >= 334) {
      f.season = Season::winter;
    } else if (doy < 151) {
      f.season = Season::spring;
    } else if (doy < 243) {
      f.season = Season::summer;
    } else {
      f.season = Season::autumn;
    }
    return f;
  }

  std::vector<CalendarFeatures> features(TimeStep start, std::int64_t count) const {
    std::vector<CalendarFeatures> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
      out.push_back(features(start + i));
    }
    return out;
  }
};

/// When the price for delivery hour `s` is decided: s - (12 + s % 24).
constexpr TimeStep decision_time_for(TimeStep s) noexcept {
  return s - (kDecisionHour + s.hour_of_day());
}

/// Decision events of the day-ahead loop, one per delivery day, for tau =
/// -12, 12, ..., T-36.
inline std::vector<DecisionEvent> decision_schedule(const Horizon& horizon) {
  std::vector<DecisionEvent> events;
  events.reserve(static_cast<std::size_t>(horizon.days()));
  for (std::int64_t tau = -kDecisionHour; tau <= horizon.hours() - kDecisionHour; ++tau) {
    DecisionEvent ev{TimeStep{tau}};
    if (!ev.is_valid()) {
      continue;
    }
    // The final loop iteration (tau = T-12) would decide hours past the horizon.
    if (ev.delivery_window().last.t > horizon.hours() - 1) {
      continue;
    }
    events.push_back(ev);
  }
  return events;
}

} // namespace dynprice
