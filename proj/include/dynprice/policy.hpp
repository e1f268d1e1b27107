#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dynprice/demand.hpp"
#include "dynprice/error.hpp"
#include "dynprice/forecast.hpp"
#include "dynprice/rng.hpp"
#include "dynprice/settlement.hpp"
#include "dynprice/timeline.hpp"

namespace dynprice {

enum class PolicyKind { flat, indexed, optimizer, oracle, robust };

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::flat: return "flat";
    case PolicyKind::indexed: return "indexed";
    case PolicyKind::optimizer: return "optimizer";
    case PolicyKind::oracle: return "oracle";
    case PolicyKind::robust: return "robust";
  }
  return "?";
}

inline PolicyKind policy_kind_from_string(const std::string& s) {
  for (auto k : {PolicyKind::flat, PolicyKind::indexed, PolicyKind::optimizer, PolicyKind::oracle,
                 PolicyKind::robust}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown policy kind '" + s + "'");
}

struct PolicyConfig {
  PolicyKind kind = PolicyKind::optimizer;
  // Price bounds in EUR/MWh; unset means [0, 3 * max expected tariff].
  std::optional<double> y_min;
  std::optional<double> y_max;
  int grid_levels = 25;
  int max_sweeps = 50;
  int restarts = 8;
  double penalty_weight = 100.0;  // per EUR of constraint violation, in kWh
  int mc_samples = 32;
  double chance_level = 0.9;      // q
  std::uint64_t seed = 0;
  // flat: y = beta; indexed: y = alpha * lambda^F + beta.
  double alpha = 0.0;
  double beta = 50.0;

  static constexpr int kOracleMaxHours = 6;

  void validate() const {
    if (grid_levels < 2) throw ConfigError("policy.grid_levels must be >= 2");
    if (max_sweeps < 1) throw ConfigError("policy.max_sweeps must be >= 1");
    if (restarts < 0) throw ConfigError("policy.restarts must be >= 0");
    if (!(penalty_weight >= 0.0) || !std::isfinite(penalty_weight)) {
      throw ConfigError("policy.penalty_weight must be finite and >= 0");
    }
    if (mc_samples < 1) throw ConfigError("policy.mc_samples must be >= 1");
    if (!(chance_level > 0.0 && chance_level <= 1.0)) {
      throw ConfigError("policy.chance_level must be in (0,1]");
    }
    if (y_min && y_max && !(*y_min < *y_max)) {
      throw ConfigError("policy price bounds infeasible: y_min must be < y_max");
    }
  }
};

/// Everything the policy may look at when pricing one delivery day. The
/// scenario itself is never part of it.
struct PolicyInput {
  ForecastSet forecasts;
  std::vector<PriceSignal> price_history;
  DemandResponseModel model;               // reference tariff already set for the day
  std::vector<CalendarFeatures> calendar;  // delivery hours
  std::vector<double> baseline_tariff;     // expected tariff per delivery hour, EUR/MWh
  CostModel cost;
};

/// A pricing problem over H consecutive hours, evaluated on point forecasts.
/// Several problems sharing tariff/hours/model are combined by the robust
/// objective (one per forecast sample).
struct PricingProblem {
  std::vector<double> production;   // p^F
  std::vector<double> consumption;  // c^F before response
  std::vector<double> dayahead;     // lambda^F
  std::vector<double> tariff;       // expected tariff, bill reference and tie-break target
  std::vector<int> hours;           // hour of day
  DemandResponseModel model;
  CostModel cost;

  std::size_t size() const noexcept { return tariff.size(); }

  void validate() const {
    const auto n = size();
    if (n == 0) throw Error("pricing problem is empty");
    if (production.size() != n || consumption.size() != n || dayahead.size() != n || hours.size() != n) {
      throw Error("pricing problem series are misaligned");
    }
    model.validate();
    cost.validate();
  }
};

struct PredictedObjective {
  double deviation = 0.0;         // D^, kWh
  double bill = 0.0;              // B^, EUR
  double revenue = 0.0;           // R^ without imbalance, EUR
  double bill_limit = 0.0;        // sum c^F * tariff, EUR
  double required_revenue = 0.0;  // costs to cover, EUR
  bool feasible = false;

  double violation() const {
    return std::max(0.0, bill - bill_limit) + std::max(0.0, required_revenue - revenue);
  }
};

inline PredictedObjective evaluate_problem(const PricingProblem& p, std::span<const double> prices) {
  const auto responded = respond_window(p.model, p.consumption, prices, p.hours);
  PredictedObjective o;
  double energy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double c = responded.load[i];
    o.deviation += std::abs(p.production[i] - c);
    o.bill += c * prices[i] * kEurPerKwhTimesEurPerMwh;
    o.bill_limit += p.consumption[i] * p.tariff[i] * kEurPerKwhTimesEurPerMwh;
    o.revenue += (c * prices[i] - (c - p.production[i]) * p.dayahead[i]) * kEurPerKwhTimesEurPerMwh;
    energy += c;
  }
  o.required_revenue = p.cost.total_cost(static_cast<std::int64_t>(p.size()), energy);
  o.feasible = o.bill <= o.bill_limit && o.revenue >= o.required_revenue;
  return o;
}

/// Penalised objective over one or more forecast realisations: mean predicted
/// deviation plus penalty_weight times the q-quantile of the per-sample
/// constraint violations. A point is feasible when that quantile is zero,
/// i.e. constraints hold in at least a fraction q of the samples.
class PricingObjective {
public:
  PricingObjective(std::vector<PricingProblem> samples, double penalty_weight, double chance_level = 1.0)
      : samples_(std::move(samples)), penalty_weight_(penalty_weight), chance_level_(chance_level) {
    if (samples_.empty()) throw Error("pricing objective needs at least one sample");
    for (const auto& s : samples_) {
      s.validate();
      if (s.size() != samples_.front().size()) throw Error("pricing objective samples differ in length");
    }
    const auto n = samples_.size();
    quantile_rank_ = static_cast<std::size_t>(std::ceil(chance_level_ * static_cast<double>(n) - 1e-9));
    quantile_rank_ = std::clamp<std::size_t>(quantile_rank_, 1, n);
  }

  struct Value {
    double penalized = 0.0;
    double deviation = 0.0;
    double violation = 0.0;
    bool feasible = false;
  };

  Value operator()(std::span<const double> prices) const {
    Value v;
    std::vector<double> violations;
    violations.reserve(samples_.size());
    for (const auto& s : samples_) {
      const auto o = evaluate_problem(s, prices);
      v.deviation += o.deviation;
      violations.push_back(o.feasible ? 0.0 : std::max(o.violation(), std::numeric_limits<double>::min()));
    }
    v.deviation /= static_cast<double>(samples_.size());
    std::nth_element(violations.begin(), violations.begin() + static_cast<long>(quantile_rank_ - 1),
                     violations.end());
    v.violation = violations[quantile_rank_ - 1];
    v.feasible = v.violation == 0.0;
    v.penalized = v.deviation + penalty_weight_ * v.violation;
    return v;
  }

  std::size_t hours() const noexcept { return samples_.front().size(); }
  const std::vector<double>& tariff() const noexcept { return samples_.front().tariff; }

private:
  std::vector<PricingProblem> samples_;
  double penalty_weight_;
  double chance_level_;
  std::size_t quantile_rank_ = 1;
};

struct PriceGrid {
  std::vector<double> levels;

  PriceGrid(double y_min, double y_max, int count) {
    if (!(y_min < y_max)) throw Error("price bounds infeasible: y_min must be < y_max");
    if (count < 2) throw Error("price grid needs at least 2 levels");
    levels.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      levels[static_cast<std::size_t>(i)] =
          i == count - 1 ? y_max : y_min + (y_max - y_min) * static_cast<double>(i) / (count - 1);
    }
  }

  std::size_t size() const noexcept { return levels.size(); }

  /// Closest level, lower one on ties.
  std::size_t nearest(double y) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < levels.size(); ++i) {
      if (std::abs(levels[i] - y) < std::abs(levels[best] - y)) best = i;
    }
    return best;
  }
};

struct SearchResult {
  std::vector<double> prices;
  PricingObjective::Value value;
  std::vector<PricingObjective::Value> sweep_history;  // after each sweep, best start
  int sweeps = 0;
  std::size_t start_index = 0;
};

namespace detail {

inline double tariff_distance(const std::vector<double>& prices, const std::vector<double>& tariff) {
  double d = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) d += std::abs(prices[i] - tariff[i]);
  return d;
}

// Feasibility first, then penalised value.
inline bool ranks_before(const PricingObjective::Value& a, const PricingObjective::Value& b) {
  if (a.feasible != b.feasible) return a.feasible;
  return a.penalized < b.penalized;
}

// As ranks_before, ties broken by closeness to the tariff.
inline bool better_candidate(const PricingObjective::Value& a, double dist_a, const PricingObjective::Value& b,
                             double dist_b) {
  if (ranks_before(a, b)) return true;
  if (ranks_before(b, a)) return false;
  return dist_a < dist_b;
}

} // namespace detail

inline constexpr std::size_t kPolishedCandidates = 3;
inline constexpr std::size_t kPairRadius = 4;  // grid levels either side in pair moves

/// Cyclic coordinate descent over a per-hour price grid. Each step sets one
/// hour to its best grid level with the others fixed, ranked feasible first,
/// then by penalised value, then by closeness to the tariff. A start stops
/// after a sweep without change or after `max_sweeps`. The best few distinct
/// end points are then polished with joint moves of adjacent hour pairs (up to
/// kPairRadius levels each) whenever single-hour sweeps stall, within the same
/// sweep budget. Starts: tariff, then `extra_starts`, then `restarts`
/// random grid points drawn from `seed`.
inline SearchResult coordinate_descent(const PricingObjective& objective, const PriceGrid& grid, int max_sweeps,
                                       int restarts, std::uint64_t seed,
                                       const std::vector<std::vector<double>>& extra_starts = {}) {
  const auto n = objective.hours();
  const auto& tariff = objective.tariff();

  std::vector<std::vector<std::size_t>> starts;
  {
    std::vector<std::size_t> s(n);
    for (std::size_t h = 0; h < n; ++h) s[h] = grid.nearest(tariff[h]);
    starts.push_back(std::move(s));
  }
  for (const auto& e : extra_starts) {
    if (e.size() != n) throw Error("coordinate descent start has wrong length");
    std::vector<std::size_t> s(n);
    for (std::size_t h = 0; h < n; ++h) s[h] = grid.nearest(e[h]);
    starts.push_back(std::move(s));
  }
  for (int r = 0; r < restarts; ++r) {
    auto rng = make_rng(seed, {r});
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    std::vector<std::size_t> s(n);
    for (auto& v : s) v = pick(rng);
    starts.push_back(std::move(s));
  }

  // Descends from `idx` in place; returns the value reached, appending one
  // entry per sweep to `history`.
  std::vector<double> prices(n);
  auto descend = [&](std::vector<std::size_t>& idx, bool pairs, std::vector<PricingObjective::Value>& history,
                     int& sweeps) {
    for (std::size_t h = 0; h < n; ++h) prices[h] = grid.levels[idx[h]];
    auto current = objective(prices);
    while (sweeps < max_sweeps) {
      ++sweeps;
      bool changed = false;
      for (std::size_t h = 0; h < n; ++h) {
        std::size_t arg = idx[h];
        auto arg_value = current;
        double arg_dist = std::abs(grid.levels[arg] - tariff[h]);
        for (std::size_t l = 0; l < grid.size(); ++l) {
          if (l == idx[h]) continue;
          prices[h] = grid.levels[l];
          const auto v = objective(prices);
          const double dist = std::abs(grid.levels[l] - tariff[h]);
          if (detail::better_candidate(v, dist, arg_value, arg_dist)) {
            arg = l;
            arg_value = v;
            arg_dist = dist;
          }
        }
        prices[h] = grid.levels[arg];
        if (arg != idx[h]) {
          idx[h] = arg;
          current = arg_value;
          changed = true;
        }
      }
      if (!changed && pairs) {
        for (std::size_t h = 0; h + 1 < n; ++h) {
          std::size_t best_a = idx[h], best_b = idx[h + 1];
          auto best_v = current;
          const auto lo = [&](std::size_t i) { return i > kPairRadius ? i - kPairRadius : 0; };
          const auto hi = [&](std::size_t i) { return std::min(grid.size() - 1, i + kPairRadius); };
          for (std::size_t a = lo(idx[h]); a <= hi(idx[h]); ++a) {
            if (a == idx[h]) continue;
            for (std::size_t b = lo(idx[h + 1]); b <= hi(idx[h + 1]); ++b) {
              if (b == idx[h + 1]) continue;
              prices[h] = grid.levels[a];
              prices[h + 1] = grid.levels[b];
              const auto v = objective(prices);
              if (detail::ranks_before(v, best_v)) {
                best_a = a;
                best_b = b;
                best_v = v;
              }
            }
          }
          prices[h] = grid.levels[best_a];
          prices[h + 1] = grid.levels[best_b];
          if (best_a != idx[h]) {
            idx[h] = best_a;
            idx[h + 1] = best_b;
            current = best_v;
            changed = true;
          }
        }
      }
      history.push_back(current);
      if (!changed) break;
    }
    return current;
  };

  struct Candidate {
    std::vector<std::size_t> idx;
    std::vector<double> prices;
    PricingObjective::Value value;
    std::vector<PricingObjective::Value> history;
    int sweeps = 0;
    std::size_t start = 0;
    double dist = 0.0;
  };
  auto better = [](const Candidate& a, const Candidate& b) {
    return detail::better_candidate(a.value, a.dist, b.value, b.dist);
  };
  std::vector<Candidate> found;
  for (std::size_t si = 0; si < starts.size(); ++si) {
    Candidate c;
    c.idx = starts[si];
    c.start = si;
    c.value = descend(c.idx, false, c.history, c.sweeps);
    c.prices = prices;
    c.dist = detail::tariff_distance(prices, tariff);
    if (std::none_of(found.begin(), found.end(), [&](const Candidate& f) { return f.idx == c.idx; })) {
      found.push_back(std::move(c));
    }
  }
  // Polish the best distinct local minima with adjacent-pair moves, within
  // each one's remaining sweep budget.
  std::stable_sort(found.begin(), found.end(), better);
  if (n > 1) {
    for (std::size_t i = 0; i < std::min(found.size(), kPolishedCandidates); ++i) {
      auto& c = found[i];
      if (c.sweeps >= max_sweeps) continue;
      c.value = descend(c.idx, true, c.history, c.sweeps);
      c.prices = prices;
      c.dist = detail::tariff_distance(prices, tariff);
    }
    std::stable_sort(found.begin(), found.end(), better);
  }
  auto& top = found.front();
  SearchResult best;
  best.prices = std::move(top.prices);
  best.value = top.value;
  best.sweep_history = std::move(top.history);
  best.sweeps = top.sweeps;
  best.start_index = top.start;
  return best;
}

/// Exhaustive search over all grid combinations. Reduced horizons only.
inline SearchResult exhaustive_search(const PricingObjective& objective, const PriceGrid& grid) {
  const auto n = objective.hours();
  if (n > static_cast<std::size_t>(PolicyConfig::kOracleMaxHours)) {
    throw Error("oracle search is limited to " + std::to_string(PolicyConfig::kOracleMaxHours) + " hours, got " +
                std::to_string(n));
  }
  const auto& tariff = objective.tariff();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> prices(n, grid.levels[0]);
  SearchResult best;
  double best_dist = std::numeric_limits<double>::infinity();
  bool have_best = false;
  while (true) {
    for (std::size_t h = 0; h < n; ++h) prices[h] = grid.levels[idx[h]];
    const auto v = objective(prices);
    const double dist = detail::tariff_distance(prices, tariff);
    if (!have_best || detail::better_candidate(v, dist, best.value, best_dist)) {
      best.prices = prices;
      best.value = v;
      best_dist = dist;
      have_best = true;
    }
    std::size_t h = 0;
    while (h < n && ++idx[h] == grid.size()) {
      idx[h] = 0;
      ++h;
    }
    if (h == n) break;
  }
  return best;
}

namespace detail {

inline PricingProblem problem_from(const PolicyInput& in) {
  in.forecasts.validate();
  const auto n = in.forecasts.hours();
  if (in.calendar.size() != n || in.baseline_tariff.size() != n) {
    throw Error("policy input: calendar and tariff must cover the delivery day");
  }
  PricingProblem p;
  p.production = ForecastSet::means(in.forecasts.production);
  p.consumption = ForecastSet::means(in.forecasts.consumption);
  p.dayahead = ForecastSet::means(in.forecasts.price);
  p.tariff = in.baseline_tariff;
  p.hours = hours_of(in.calendar);
  p.model = in.model;
  p.cost = in.cost;
  return p;
}

inline std::pair<double, double> bounds_for(const PolicyConfig& cfg, const std::vector<double>& tariff) {
  const double top = tariff.empty() ? 0.0 : *std::max_element(tariff.begin(), tariff.end());
  const double lo = cfg.y_min.value_or(0.0);
  const double hi = cfg.y_max.value_or(3.0 * top);
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error("policy price bounds infeasible: [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return {lo, hi};
}

inline std::vector<double> indexed_prices(const PolicyConfig& cfg, const std::vector<double>& dayahead) {
  std::vector<double> out(dayahead.size());
  for (std::size_t i = 0; i < dayahead.size(); ++i) out[i] = cfg.alpha * dayahead[i] + cfg.beta;
  return out;
}

} // namespace detail

/// Deterministic point-forecast objective for a policy input.
inline PricingObjective point_objective(const PolicyConfig& cfg, const PolicyInput& in) {
  return PricingObjective({detail::problem_from(in)}, cfg.penalty_weight, 1.0);
}

/// Monte-Carlo objective: one problem per sampled forecast trajectory.
inline PricingObjective sampled_objective(const PolicyConfig& cfg, const PolicyInput& in) {
  const auto base = detail::problem_from(in);
  const auto draws = sample(in.forecasts, cfg.mc_samples, derive_seed(cfg.seed, {0x5a4d, in.forecasts.issued_at.t}));
  std::vector<PricingProblem> problems;
  problems.reserve(draws.size());
  for (const auto& d : draws) {
    PricingProblem p = base;
    p.production = d.production;
    p.consumption = d.consumption;
    p.dayahead = d.price;
    problems.push_back(std::move(p));
  }
  return PricingObjective(std::move(problems), cfg.penalty_weight, cfg.chance_level);
}

/// Predicted deviation, bill and revenue of a signal on the forecast means.
/// The imbalance term is omitted: nothing about it is known at decision time.
inline PredictedObjective predicted_objective(const PolicyInput& in, const PriceSignal& signal) {
  const auto p = detail::problem_from(in);
  if (signal.prices.size() != p.size()) throw Error("predicted_objective: signal does not cover the day");
  return evaluate_problem(p, signal.prices);
}

/// Prices one delivery day.
inline PriceSignal decide(const PolicyConfig& cfg, const PolicyInput& in) {
  cfg.validate();
  in.forecasts.validate();
  const auto [lo, hi] = detail::bounds_for(cfg, in.baseline_tariff);
  const TimeStep day_start = DecisionEvent{in.forecasts.issued_at}.delivery_window().first;
  PriceSignal signal{day_start, {}};
  auto clamp_all = [&](std::vector<double> v) {
    for (auto& y : v) y = std::clamp(y, lo, hi);
    return v;
  };
  const auto lambda_f = ForecastSet::means(in.forecasts.price);

  switch (cfg.kind) {
    case PolicyKind::flat:
      signal.prices = clamp_all(std::vector<double>(in.forecasts.hours(), cfg.beta));
      break;
    case PolicyKind::indexed:
      signal.prices = clamp_all(detail::indexed_prices(cfg, lambda_f));
      break;
    case PolicyKind::optimizer:
    case PolicyKind::robust:
    case PolicyKind::oracle: {
      const PriceGrid grid(lo, hi, cfg.grid_levels);
      const auto objective =
          cfg.kind == PolicyKind::robust ? sampled_objective(cfg, in) : point_objective(cfg, in);
      if (cfg.kind == PolicyKind::oracle) {
        signal.prices = exhaustive_search(objective, grid).prices;
        break;
      }
      const std::vector<std::vector<double>> baselines{
          std::vector<double>(in.forecasts.hours(), cfg.beta), detail::indexed_prices(cfg, lambda_f)};
      signal.prices = coordinate_descent(objective, grid, cfg.max_sweeps, cfg.restarts, cfg.seed, baselines).prices;
      break;
    }
  }
  return signal;
}

} // namespace dynprice
