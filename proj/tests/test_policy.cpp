#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dynprice/policy.hpp"

using namespace dynprice;

namespace {

// Independent brute force: responded load written target-by-target, then the
// penalised objective, then enumeration with feasibility-first ranking.
struct OracleValue {
  double penalized = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

std::vector<double> oracle_response(const PricingProblem& p, const std::vector<double>& y) {
  const int n = static_cast<int>(p.size());
  const int k = p.model.window;
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const auto h = static_cast<std::size_t>(p.hours[static_cast<std::size_t>(s)]);
    const double r = p.model.reference_tariff[h];
    d[static_cast<std::size_t>(s)] = p.consumption[static_cast<std::size_t>(s)] * p.model.elasticity[h] *
                                     (y[static_cast<std::size_t>(s)] - r) / r;
  }
  auto w = [&](int delta) { return p.model.kernel[static_cast<std::size_t>(delta < 0 ? delta + k : delta + k - 1)]; };
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    double inflow = 0.0;
    for (int delta = -k; delta <= k; ++delta) {
      const int s = t - delta;
      if (delta == 0 || s < 0 || s >= n) continue;
      double norm = 0.0;
      for (int e = -k; e <= k; ++e) {
        if (e != 0 && s + e >= 0 && s + e < n) norm += w(e);
      }
      inflow += w(delta) / norm * d[static_cast<std::size_t>(s)];
    }
    out[static_cast<std::size_t>(t)] =
        std::max(0.0, p.consumption[static_cast<std::size_t>(t)] + d[static_cast<std::size_t>(t)] - p.model.rho * inflow);
  }
  return out;
}

OracleValue oracle_value(const PricingProblem& p, const std::vector<double>& y, double penalty) {
  const auto c = oracle_response(p, y);
  double dev = 0.0, bill = 0.0, limit = 0.0, rev = 0.0, energy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    dev += std::abs(p.production[i] - c[i]);
    bill += c[i] * y[i] / 1000.0;
    limit += p.consumption[i] * p.tariff[i] / 1000.0;
    rev += (c[i] * y[i] - (c[i] - p.production[i]) * p.dayahead[i]) / 1000.0;
    energy += c[i];
  }
  const double need = p.cost.fixed_cost_per_hour * static_cast<double>(y.size()) + p.cost.marginal_cost * energy / 1000.0;
  const bool feasible = bill <= limit && rev >= need;
  const double violation = feasible ? 0.0 : std::max(0.0, bill - limit) + std::max(0.0, need - rev);
  return {dev + penalty * violation, feasible};
}

OracleValue oracle_best(const PricingProblem& p, const std::vector<double>& levels, double penalty) {
  const std::size_t n = p.size();
  std::vector<std::size_t> idx(n, 0);
  OracleValue best;
  bool have = false;
  while (true) {
    std::vector<double> y(n);
    for (std::size_t h = 0; h < n; ++h) y[h] = levels[idx[h]];
    const auto v = oracle_value(p, y, penalty);
    if (!have || (v.feasible && !best.feasible) || (v.feasible == best.feasible && v.penalized < best.penalized)) {
      best = v;
      have = true;
    }
    std::size_t h = 0;
    while (h < n && ++idx[h] == levels.size()) idx[h++] = 0;
    if (h == n) break;
  }
  return best;
}

PricingProblem random_problem(std::mt19937_64& rng, std::size_t hours) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PricingProblem p;
  for (std::size_t i = 0; i < hours; ++i) {
    p.production.push_back(200.0 * u(rng));
    p.consumption.push_back(50.0 + 150.0 * u(rng));
    p.dayahead.push_back(20.0 + 60.0 * u(rng));
    p.tariff.push_back(50.0);
    p.hours.push_back(static_cast<int>(i));
  }
  for (auto& e : p.model.elasticity) e = -u(rng);
  p.model.window = 1;
  p.model.kernel = {0.5, 0.5};
  p.model.rho = u(rng);
  p.model.reference_tariff.fill(50.0);
  p.cost.fixed_cost_per_hour = 2.0 * u(rng);
  return p;
}

// One delivery day priced at tau = 12 with constant forecasts.
PolicyInput day_input(double prod, double cons, double price, double eps) {
  PolicyInput in;
  in.forecasts.issued_at = TimeStep{12};
  for (int h = 0; h < 24; ++h) {
    const TimeStep t{24 + h};
    in.forecasts.production.push_back({t, prod, 0.0});
    in.forecasts.consumption.push_back({t, cons, 0.0});
    in.forecasts.price.push_back({t, price, 0.0});
  }
  in.model.elasticity.fill(eps);
  in.model.reference_tariff.fill(50.0);
  in.calendar = CalendarConfig{}.features(TimeStep{24}, 24);
  in.baseline_tariff.assign(24, 50.0);
  return in;
}

} // namespace

TEST(Decide, FlatPolicyIsConstant) {
  PolicyConfig cfg;
  cfg.kind = PolicyKind::flat;
  cfg.beta = 50.0;
  const auto sig = decide(cfg, day_input(100, 200, 40, -0.3));
  EXPECT_EQ(sig.day_start.t, 24);
  EXPECT_EQ(sig.prices, std::vector<double>(24, 50.0));
}

TEST(Decide, IndexedPolicyFollowsForecastPrice) {
  PolicyConfig cfg;
  cfg.kind = PolicyKind::indexed;
  cfg.alpha = 0.5;
  cfg.beta = 10.0;
  const auto sig = decide(cfg, day_input(100, 200, 40, -0.3));
  for (double y : sig.prices) EXPECT_DOUBLE_EQ(y, 30.0);
}

TEST(Decide, ZeroElasticityMatchesFlatAndStaysAtTariff) {
  const auto in = day_input(100, 200, 40, 0.0);
  PolicyConfig opt;
  PolicyConfig flat;
  flat.kind = PolicyKind::flat;
  const auto a = decide(opt, in);
  const auto b = decide(flat, in);
  EXPECT_EQ(predicted_objective(in, a).deviation, predicted_objective(in, b).deviation);
  // 25 levels over [0, 150]: 50 is on the grid.
  for (double y : a.prices) EXPECT_DOUBLE_EQ(y, 50.0);
}

TEST(Decide, AlreadySynchronisedHasZeroDeviation) {
  const auto in = day_input(150, 150, 40, -0.5);
  PolicyConfig cfg;
  cfg.kind = PolicyKind::flat;
  EXPECT_EQ(predicted_objective(in, decide(cfg, in)).deviation, 0.0);
}

TEST(Decide, PricesWithinBoundsAndDeterministic) {
  auto in = day_input(100, 200, 40, -0.4);
  for (int h = 0; h < 24; ++h) in.forecasts.production[static_cast<std::size_t>(h)].mean = h < 12 ? 50.0 : 300.0;
  PolicyConfig cfg;
  cfg.y_min = 10.0;
  cfg.y_max = 90.0;
  cfg.seed = 17;
  const auto a = decide(cfg, in);
  EXPECT_EQ(a, decide(cfg, in));
  for (double y : a.prices) {
    EXPECT_GE(y, 10.0);
    EXPECT_LE(y, 90.0);
  }
}

TEST(Decide, Errors) {
  const auto in = day_input(100, 200, 40, -0.4);
  PolicyConfig cfg;
  cfg.y_min = 80.0;
  cfg.y_max = 20.0;
  EXPECT_THROW(decide(cfg, in), ConfigError);
  cfg = PolicyConfig{};
  cfg.kind = PolicyKind::oracle;
  EXPECT_THROW(decide(cfg, in), Error);
  cfg = PolicyConfig{};
  cfg.grid_levels = 1;
  EXPECT_THROW(decide(cfg, in), ConfigError);
  cfg = PolicyConfig{};
  cfg.chance_level = 0.0;
  EXPECT_THROW(decide(cfg, in), ConfigError);
  EXPECT_THROW(policy_kind_from_string("greedy"), ConfigError);
}

TEST(CoordinateDescent, TwoHourToyMatchesHandSolution) {
  PricingProblem p;
  p.production = {100.0, 0.0};
  p.consumption = {0.0, 100.0};
  p.dayahead = {0.0, 0.0};
  p.tariff = {50.0, 50.0};
  p.hours = {0, 1};
  p.model.elasticity.fill(-1.0);
  p.model.reference_tariff.fill(50.0);
  const PricingObjective objective({p}, 100.0);
  const PriceGrid grid(0.0, 100.0, 5);
  const auto cd = coordinate_descent(objective, grid, 50, 8, 1);
  const auto ex = exhaustive_search(objective, grid);
  // Price hour 1 at the cap to push its load into hour 0; hour 0 stays at the
  // tariff, the highest price the bill limit allows.
  EXPECT_EQ(ex.prices, (std::vector<double>{50.0, 100.0}));
  EXPECT_EQ(ex.value.deviation, 0.0);
  EXPECT_TRUE(ex.value.feasible);
  EXPECT_NEAR(cd.value.penalized, ex.value.penalized, 1e-9);
  EXPECT_NEAR(oracle_best(p, grid.levels, 100.0).penalized, ex.value.penalized, 1e-9);
}

TEST(CoordinateDescent, MatchesIndependentOracleOnToyInstances) {
  std::mt19937_64 rng(555);
  int exact = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const auto p = random_problem(rng, 2 + static_cast<std::size_t>(trial % 3));
    const PricingObjective objective({p}, 100.0);
    const PriceGrid grid(0.0, 150.0, 5);
    const auto cd = coordinate_descent(objective, grid, 50, 8, static_cast<std::uint64_t>(trial));
    const auto ex = exhaustive_search(objective, grid);
    const auto oracle = oracle_best(p, grid.levels, 100.0);
    EXPECT_NEAR(ex.value.penalized, oracle.penalized, 1e-9 * (1.0 + oracle.penalized));
    EXPECT_EQ(ex.value.feasible, oracle.feasible);
    if (std::abs(cd.value.penalized - oracle.penalized) <= 1e-9) ++exact;
    EXPECT_FALSE(oracle.feasible && !cd.value.feasible);
  }
  EXPECT_GE(exact, 95 * trials / 100);
}

TEST(CoordinateDescent, SweepHistoryNeverWorsens) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_problem(rng, 6);
    const PricingObjective objective({p}, 100.0);
    const auto r = coordinate_descent(objective, PriceGrid(0.0, 150.0, 11), 20, 4, 3);
    ASSERT_FALSE(r.sweep_history.empty());
    EXPECT_LE(r.sweeps, 20);
    for (std::size_t i = 1; i < r.sweep_history.size(); ++i) {
      const auto& prev = r.sweep_history[i - 1];
      const auto& cur = r.sweep_history[i];
      EXPECT_FALSE(prev.feasible && !cur.feasible);
      if (prev.feasible == cur.feasible) {
        EXPECT_LE(cur.penalized, prev.penalized);
      }
    }
  }
}

TEST(CoordinateDescent, NoWorseThanBaselineStarts) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    auto in = day_input(0, 0, 0, -0.5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int h = 0; h < 24; ++h) {
      in.forecasts.production[static_cast<std::size_t>(h)].mean = 300.0 * u(rng);
      in.forecasts.consumption[static_cast<std::size_t>(h)].mean = 100.0 + 100.0 * u(rng);
      in.forecasts.price[static_cast<std::size_t>(h)].mean = 40.0;
    }
    PolicyConfig cfg;
    cfg.alpha = 0.5;
    cfg.beta = 30.0;  // indexed = 50, flat = 30: both on the 25-level [0, 150] grid
    cfg.restarts = 2;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto objective = point_objective(cfg, in);
    const auto opt = objective(decide(cfg, in).prices);
    auto flat_cfg = cfg;
    flat_cfg.kind = PolicyKind::flat;
    auto idx_cfg = cfg;
    idx_cfg.kind = PolicyKind::indexed;
    const auto flat = objective(decide(flat_cfg, in).prices);
    const auto indexed = objective(decide(idx_cfg, in).prices);
    if (opt.feasible == flat.feasible) {
      EXPECT_LE(opt.penalized, flat.penalized);
    }
    if (opt.feasible == indexed.feasible) {
      EXPECT_LE(opt.penalized, indexed.penalized);
    }
    EXPECT_TRUE(opt.feasible || (!flat.feasible && !indexed.feasible));
  }
}

TEST(Robust, SingleNoiselessSampleEqualsOptimizer) {
  auto in = day_input(0, 150, 40, -0.5);
  for (int h = 0; h < 24; ++h) in.forecasts.production[static_cast<std::size_t>(h)].mean = h >= 8 && h < 18 ? 300.0 : 20.0;
  PolicyConfig opt;
  opt.seed = 4;
  auto robust = opt;
  robust.kind = PolicyKind::robust;
  robust.mc_samples = 1;
  EXPECT_EQ(decide(robust, in), decide(opt, in));
}

TEST(Robust, ChanceLevelUsesEmpiricalQuantile) {
  // Two samples: one feasible, one not. q = 0.5 accepts, q = 1 does not.
  PricingProblem ok;
  ok.production = {100.0};
  ok.consumption = {100.0};
  ok.dayahead = {0.0};
  ok.tariff = {50.0};
  ok.hours = {0};
  ok.model.reference_tariff.fill(50.0);
  auto bad = ok;
  bad.cost.fixed_cost_per_hour = 1000.0;
  const std::vector<double> y{50.0};
  EXPECT_TRUE(PricingObjective({ok, bad}, 1.0, 0.5)(y).feasible);
  const auto strict = PricingObjective({ok, bad}, 1.0, 1.0)(y);
  EXPECT_FALSE(strict.feasible);
  EXPECT_NEAR(strict.violation, 1000.0 - 5.0, 1e-9);
}

TEST(Oracle, RejectsLongHorizons) {
  std::mt19937_64 rng(1);
  const PricingObjective objective({random_problem(rng, 7)}, 1.0);
  EXPECT_THROW(exhaustive_search(objective, PriceGrid(0.0, 10.0, 2)), Error);
}

TEST(PriceGrid, LevelsAndNearest) {
  const PriceGrid g(0.0, 100.0, 5);
  EXPECT_EQ(g.levels, (std::vector<double>{0, 25, 50, 75, 100}));
  EXPECT_EQ(g.nearest(49.0), 2u);
  EXPECT_EQ(g.nearest(12.5), 0u);
  EXPECT_THROW(PriceGrid(1.0, 1.0, 5), Error);
}
