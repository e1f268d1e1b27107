#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "dynprice/csv.hpp"
#include "dynprice/scenario.hpp"

using namespace dynprice;

TEST(Generate, ZeroCapacityMeansNoProduction) {
  GeneratorConfig cfg;
  cfg.solar_capacity = 0.0;
  cfg.wind_capacity = 0.0;
  const auto s = generate(cfg, Horizon(72));
  for (double p : s.production.values) EXPECT_EQ(p, 0.0);
}

TEST(Generate, DeterministicForSeed) {
  GeneratorConfig cfg;
  cfg.seed = 1234;
  EXPECT_EQ(generate(cfg, Horizon(96)), generate(cfg, Horizon(96)));
  auto other = cfg;
  other.seed = 1235;
  EXPECT_NE(generate(cfg, Horizon(96)).baseline_consumption, generate(other, Horizon(96)).baseline_consumption);
}

TEST(Generate, DegeneratePriceIsConstant) {
  GeneratorConfig cfg;
  cfg.price_noise_std = 0.0;
  cfg.price_slope = 0.0;
  const auto s = generate(cfg, Horizon(48));
  for (double l : s.dayahead_price.values) EXPECT_EQ(l, cfg.price_base);
}

TEST(Generate, ImbalancePricePenalisesTheResidual) {
  GeneratorConfig cfg;
  const auto s = generate(cfg, Horizon(168));
  for (std::size_t i = 0; i < s.production.values.size(); ++i) {
    const double residual = s.baseline_consumption.values[i] - s.production.values[i];
    const double expect = s.dayahead_price.values[i] + (residual >= 0 ? cfg.imbalance_spread : -cfg.imbalance_spread);
    EXPECT_DOUBLE_EQ(s.imbalance_price.values[i], expect);
  }
}

TEST(Generate, SolarIsZeroOutsideDaylight) {
  GeneratorConfig with_solar;
  with_solar.seed = 99;
  GeneratorConfig wind_only = with_solar;
  wind_only.solar_capacity = 0.0;
  const auto a = generate(with_solar, Horizon(120));
  const auto b = generate(wind_only, Horizon(120));
  for (std::size_t i = 0; i < a.production.values.size(); ++i) {
    const int h = static_cast<int>(i % 24);
    if (h <= with_solar.sunrise_hour || h >= with_solar.sunset_hour) {
      EXPECT_EQ(a.production.values[i], b.production.values[i]) << "hour " << i;
    } else {
      EXPECT_GE(a.production.values[i], b.production.values[i]);
    }
  }
}

TEST(Generate, RejectsBadConfig) {
  GeneratorConfig cfg;
  cfg.solar_capacity = -1.0;
  EXPECT_THROW(generate(cfg, Horizon(24)), ConfigError);
  EXPECT_THROW(generate(GeneratorConfig{}, Horizon(0)), Error);
}

TEST(Generate, InvariantsHoldForRandomConfigs) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    GeneratorConfig cfg;
    cfg.seed = rng();
    cfg.solar_capacity = 3000.0 * u(rng);
    cfg.wind_capacity = 3000.0 * u(rng);
    cfg.solar_cloudiness = u(rng);
    cfg.wind_std_fraction = 2.0 * u(rng);
    cfg.wind_autocorrelation = 0.99 * u(rng);
    cfg.consumption_base = 1000.0 * u(rng);
    cfg.consumption_peak_amplitude = 1000.0 * u(rng);
    cfg.consumption_noise_std = 500.0 * u(rng);
    cfg.price_slope = u(rng);
    cfg.price_noise_std = 50.0 * u(rng);
    const auto days = 1 + static_cast<int>(u(rng) * 10);
    const auto s = generate(cfg, Horizon(24 * days));
    ASSERT_NO_THROW(s.validate());
    EXPECT_EQ(s.hours(), 24 * days);
    for (std::size_t i = 0; i < s.production.values.size(); ++i) {
      EXPECT_GE(s.production.values[i], 0.0);
      EXPECT_LE(s.production.values[i], cfg.solar_capacity + cfg.wind_capacity);
      EXPECT_GE(s.baseline_consumption.values[i], 0.0);
    }
  }
}

namespace {

std::string header() {
  return "t,production_kwh,baseline_consumption_kwh,dayahead_price_eur_mwh,imbalance_price_eur_mwh\n";
}

std::string rows(int n, int negative_row = -1) {
  std::ostringstream out;
  for (int i = 0; i < n; ++i) {
    out << i << ',' << (i + 1 == negative_row ? -1.0 : 10.0 + i) << ",5.5,40,60\n";
  }
  return out.str();
}

} // namespace

TEST(Csv, RoundTripIsExact) {
  auto s = generate(GeneratorConfig{}, Horizon(48));
  std::vector<double> temp(48);
  for (std::size_t i = 0; i < temp.size(); ++i) temp[i] = 0.1 * static_cast<double>(i) - 1.0 / 3.0;
  s.features.emplace("temperature", HourlySeries(TimeStep{0}, temp, Unit::dimensionless));
  std::stringstream buf;
  save_csv(s, buf);
  const auto back = load_csv(buf);
  EXPECT_EQ(back, s);
}

TEST(Csv, RowCountMustBeWholeDays) {
  std::istringstream in(header() + rows(25));
  try {
    load_csv(in);
    FAIL() << "expected CsvError";
  } catch (const CsvError& e) {
    EXPECT_EQ(e.kind(), CsvError::Kind::bad_row_count);
    EXPECT_NE(std::string(e.what()).find("horizon not multiple of 24"), std::string::npos);
  }
}

TEST(Csv, NegativeProductionNamesTheRow) {
  std::istringstream in(header() + rows(24, 3));
  try {
    load_csv(in);
    FAIL() << "expected CsvError";
  } catch (const CsvError& e) {
    EXPECT_EQ(e.kind(), CsvError::Kind::negative_value);
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), "production_kwh");
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(Csv, MissingColumnAndNaNAreDistinct) {
  {
    std::istringstream in("t,production_kwh,baseline_consumption_kwh,dayahead_price_eur_mwh\n0,1,1,1\n");
    try {
      load_csv(in);
      FAIL();
    } catch (const CsvError& e) {
      EXPECT_EQ(e.kind(), CsvError::Kind::missing_column);
      EXPECT_EQ(e.column(), "imbalance_price_eur_mwh");
    }
  }
  {
    std::string body = rows(24);
    body.replace(body.find(",40,"), 4, ",nan,");
    std::istringstream in(header() + body);
    try {
      load_csv(in);
      FAIL();
    } catch (const CsvError& e) {
      EXPECT_EQ(e.kind(), CsvError::Kind::non_finite);
      EXPECT_EQ(e.column(), "dayahead_price_eur_mwh");
      EXPECT_EQ(e.row(), 1u);
    }
  }
  {
    std::istringstream in(header() + "0,1,1,1,1\n2,1,1,1,1\n");
    try {
      load_csv(in);
      FAIL();
    } catch (const CsvError& e) {
      EXPECT_EQ(e.kind(), CsvError::Kind::non_consecutive);
    }
  }
}

TEST(Csv, FeatureColumnsAndCrlf) {
  std::ostringstream text;
  text << "t,production_kwh,baseline_consumption_kwh,dayahead_price_eur_mwh,imbalance_price_eur_mwh,feature:wind_fc\r\n";
  for (int i = 0; i < 24; ++i) text << i << ",1,2,3,4," << i * 0.5 << "\r\n";
  std::istringstream in(text.str());
  const auto s = load_csv(in);
  ASSERT_TRUE(s.features.contains("wind_fc"));
  EXPECT_EQ(s.features.at("wind_fc").values[3], 1.5);
  EXPECT_EQ(s.calendar.size(), 24u);
}
