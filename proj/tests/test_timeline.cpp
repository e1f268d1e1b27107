#include <random>
#include <set>

#include <gtest/gtest.h>

#include "dynprice/timeline.hpp"

using namespace dynprice;

TEST(TimeStep, HourAndDayUseFloorSemantics) {
  EXPECT_EQ(TimeStep{0}.hour_of_day(), 0);
  EXPECT_EQ(TimeStep{25}.hour_of_day(), 1);
  EXPECT_EQ(TimeStep{-1}.hour_of_day(), 23);
  EXPECT_EQ(TimeStep{-12}.hour_of_day(), 12);
  EXPECT_EQ(TimeStep{-1}.day_index(), -1);
  EXPECT_EQ(TimeStep{-24}.day_index(), -1);
  EXPECT_EQ(TimeStep{-25}.day_index(), -2);
  EXPECT_EQ(TimeStep{47}.day_index(), 1);
}

TEST(DecisionTime, Examples) {
  EXPECT_EQ(decision_time_for(TimeStep{0}).t, -12);
  EXPECT_EQ(decision_time_for(TimeStep{23}).t, -12);
  EXPECT_EQ(decision_time_for(TimeStep{24}).t, 12);
}

TEST(DecisionTime, SameTauForAllHoursOfADay) {
  for (std::int64_t day = -3; day < 10; ++day) {
    const auto tau = decision_time_for(TimeStep{day * 24});
    for (int h = 0; h < 24; ++h) {
      EXPECT_EQ(decision_time_for(TimeStep{day * 24 + h}), tau);
    }
  }
}

TEST(DecisionTime, LagWithinDayAheadRange) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> pick(-100000, 1000000);
  for (int i = 0; i < 20000; ++i) {
    const TimeStep t{pick(rng)};
    const auto tau = decision_time_for(t);
    EXPECT_GE(t - tau, kMinLag);
    EXPECT_LE(t - tau, kMaxLag);
    EXPECT_TRUE(DecisionEvent{tau}.is_valid());
    EXPECT_TRUE(DecisionEvent{tau}.delivery_window().contains(t));
  }
}

TEST(Horizon, RejectsNonMultiplesOfADay) {
  EXPECT_THROW(Horizon(25), Error);
  EXPECT_THROW(Horizon(0), Error);
  EXPECT_THROW(Horizon(-24), Error);
  EXPECT_EQ(Horizon(48).days(), 2);
}

TEST(Schedule, SingleDay) {
  const auto ev = decision_schedule(Horizon(24));
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].decision_time.t, -12);
  EXPECT_EQ(ev[0].delivery_window(), (DeliveryWindow{TimeStep{0}, TimeStep{23}}));
}

TEST(Schedule, TwoDays) {
  const auto ev = decision_schedule(Horizon(48));
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].decision_time.t, -12);
  EXPECT_EQ(ev[1].decision_time.t, 12);
}

TEST(Schedule, WindowsPartitionTheHorizon) {
  for (std::int64_t days = 1; days <= 15; ++days) {
    const Horizon h(days * 24);
    const auto ev = decision_schedule(h);
    ASSERT_EQ(static_cast<std::int64_t>(ev.size()), days);
    std::multiset<std::int64_t> covered;
    for (const auto& e : ev) {
      EXPECT_TRUE(e.is_valid());
      const auto w = e.delivery_window();
      EXPECT_EQ(w.size(), 24);
      EXPECT_EQ(w.first.hour_of_day(), 0);
      EXPECT_EQ(w.first.day_index(), e.decision_time.day_index() + 1);
      for (auto t = w.first; t <= w.last; t = t + 1) covered.insert(t.t);
    }
    ASSERT_EQ(static_cast<std::int64_t>(covered.size()), h.hours());
    std::int64_t expect = 0;
    for (auto t : covered) EXPECT_EQ(t, expect++);
    EXPECT_EQ(ev.back().decision_time.t, h.hours() - 36);
  }
}

TEST(DecisionEvent, ValidationRejectsOffScheduleTimes) {
  EXPECT_NO_THROW(DecisionEvent{TimeStep{12}}.validate());
  EXPECT_THROW(DecisionEvent{TimeStep{13}}.validate(), Error);
  EXPECT_THROW(DecisionEvent{TimeStep{0}}.validate(), Error);
}

TEST(Calendar, WeekdaysHolidaysSeasons) {
  CalendarConfig cal;  // day 0 is a Monday, January 1st
  EXPECT_FALSE(cal.features(TimeStep{0}).is_weekend);
  EXPECT_TRUE(cal.features(TimeStep{5 * 24}).is_weekend);
  EXPECT_TRUE(cal.features(TimeStep{6 * 24 + 23}).is_weekend);
  EXPECT_FALSE(cal.features(TimeStep{7 * 24}).is_weekend);
  EXPECT_EQ(cal.features(TimeStep{0}).season, Season::winter);
  EXPECT_EQ(cal.features(TimeStep{100 * 24}).season, Season::spring);
  EXPECT_EQ(cal.features(TimeStep{200 * 24}).season, Season::summer);
  EXPECT_EQ(cal.features(TimeStep{300 * 24}).season, Season::autumn);
  EXPECT_EQ(cal.features(TimeStep{30}).hour_of_day, 6);

  cal.start_weekday = 5;  // Saturday
  cal.holidays = {2};
  EXPECT_TRUE(cal.features(TimeStep{0}).is_weekend);
  EXPECT_FALSE(cal.features(TimeStep{48}).is_weekend);
  EXPECT_TRUE(cal.features(TimeStep{48}).is_holiday);
  EXPECT_FALSE(cal.features(TimeStep{72}).is_holiday);

  cal.start_weekday = 9;
  EXPECT_THROW(cal.validate(), ConfigError);
}
