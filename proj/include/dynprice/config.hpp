#pragma once

// Run configuration files.
//
// Grammar (a small TOML subset):
//
//   # comment
//   key = value                 top-level keys
//   [section] / [section.sub]   following keys belong to "section.key"
//   value := number | true | false | "string" | [number, number, ...]
//
// Every key must appear in the schema below; unknown keys are rejected.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dynprice/csv.hpp"
#include "dynprice/error.hpp"
#include "dynprice/orchestrator.hpp"
#include "dynprice/rng.hpp"

namespace dynprice {

using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;

enum class KeyType { number, integer, boolean, string, list };

struct KeySpec {
  std::string_view key;
  KeyType type;
};

// clang-format off
inline constexpr KeySpec kConfigSchema[] = {
  {"horizon", KeyType::integer},
  {"seed", KeyType::integer},
  {"output_dir", KeyType::string},
  {"csv_path", KeyType::string},

  {"calendar.start_weekday", KeyType::integer},
  {"calendar.start_day_of_year", KeyType::integer},
  {"calendar.holidays", KeyType::list},

  {"scenario.solar_capacity", KeyType::number},
  {"scenario.sunrise_hour", KeyType::integer},
  {"scenario.sunset_hour", KeyType::integer},
  {"scenario.solar_cloudiness", KeyType::number},
  {"scenario.wind_capacity", KeyType::number},
  {"scenario.wind_mean_fraction", KeyType::number},
  {"scenario.wind_std_fraction", KeyType::number},
  {"scenario.wind_autocorrelation", KeyType::number},
  {"scenario.consumption_base", KeyType::number},
  {"scenario.consumption_peak_amplitude", KeyType::number},
  {"scenario.morning_peak_hour", KeyType::integer},
  {"scenario.evening_peak_hour", KeyType::integer},
  {"scenario.weekend_factor", KeyType::number},
  {"scenario.consumption_noise_std", KeyType::number},
  {"scenario.price_base", KeyType::number},
  {"scenario.price_slope", KeyType::number},
  {"scenario.price_noise_std", KeyType::number},
  {"scenario.imbalance_spread", KeyType::number},

  // [forecasters] applies to all three series; per-series sections override.
  {"forecasters.kind", KeyType::string},
  {"forecasters.gamma", KeyType::number},
  {"forecasters.persistence_std", KeyType::number},
  {"forecasters.seed", KeyType::integer},
  {"forecasters.production.kind", KeyType::string},
  {"forecasters.production.gamma", KeyType::number},
  {"forecasters.production.persistence_std", KeyType::number},
  {"forecasters.production.seed", KeyType::integer},
  {"forecasters.production.default_profile", KeyType::list},
  {"forecasters.consumption.kind", KeyType::string},
  {"forecasters.consumption.gamma", KeyType::number},
  {"forecasters.consumption.persistence_std", KeyType::number},
  {"forecasters.consumption.seed", KeyType::integer},
  {"forecasters.consumption.default_profile", KeyType::list},
  {"forecasters.price.kind", KeyType::string},
  {"forecasters.price.gamma", KeyType::number},
  {"forecasters.price.persistence_std", KeyType::number},
  {"forecasters.price.seed", KeyType::integer},
  {"forecasters.price.default_profile", KeyType::list},

  {"demand_model.elasticity", KeyType::list},
  {"demand_model.elasticity_scale", KeyType::number},
  {"demand_model.kernel_k", KeyType::integer},
  {"demand_model.kernel_weights", KeyType::list},
  {"demand_model.rho", KeyType::number},
  {"demand_model_truth.elasticity", KeyType::list},
  {"demand_model_truth.elasticity_scale", KeyType::number},
  {"demand_model_truth.kernel_k", KeyType::integer},
  {"demand_model_truth.kernel_weights", KeyType::list},
  {"demand_model_truth.rho", KeyType::number},

  {"policy.kind", KeyType::string},
  {"policy.y_min", KeyType::number},
  {"policy.y_max", KeyType::number},
  {"policy.grid_levels", KeyType::integer},
  {"policy.max_sweeps", KeyType::integer},
  {"policy.restarts", KeyType::integer},
  {"policy.penalty_weight", KeyType::number},
  {"policy.mc_samples", KeyType::integer},
  {"policy.chance_level", KeyType::number},
  {"policy.alpha", KeyType::number},
  {"policy.beta", KeyType::number},
  {"policy.seed", KeyType::integer},

  {"tariff.alpha", KeyType::number},
  {"tariff.beta", KeyType::number},

  {"cost_model.fixed_cost_per_hour", KeyType::number},
  {"cost_model.marginal_cost", KeyType::number},

  {"settlement.imbalance_accounting", KeyType::string},
};
// clang-format on

inline const KeySpec* find_key(std::string_view key) {
  for (const auto& s : kConfigSchema) {
    if (s.key == key) return &s;
  }
  return nullptr;
}

/// Parsed key/value pairs, keys fully qualified ("section.key").
class ConfigDocument {
public:
  static ConfigDocument parse(std::string_view text) {
    ConfigDocument doc;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string_view line = strip_comment(raw);
      line = csv::trim(line);
      if (line.empty()) continue;
      auto fail = [&](const std::string& msg) {
        throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
      };
      if (line.front() == '[') {
        if (line.back() != ']') fail("unterminated section header");
        section = std::string(csv::trim(line.substr(1, line.size() - 2)));
        if (section.empty()) fail("empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail("expected 'key = value'");
      const auto name = csv::trim(line.substr(0, eq));
      const auto value = csv::trim(line.substr(eq + 1));
      if (name.empty()) fail("missing key");
      const std::string key = section.empty() ? std::string(name) : section + "." + std::string(name);
      const auto* spec = find_key(key);
      if (spec == nullptr) fail("unknown key '" + key + "'");
      if (doc.values_.contains(key)) fail("duplicate key '" + key + "'");
      try {
        doc.values_[key] = parse_value(value, *spec);
      } catch (const ConfigError& e) {
        fail(e.what());
      }
    }
    return doc;
  }

  static ConfigDocument load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    auto doc = parse(ss.str());
    doc.base_dir_ = path.parent_path();
    return doc;
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  /// Sets a numeric leaf (used by sweeps and --seed).
  void set_number(const std::string& key, double v) {
    const auto* spec = find_key(key);
    if (spec == nullptr) throw ConfigError("unknown key '" + key + "'");
    if (spec->type != KeyType::number && spec->type != KeyType::integer) {
      throw ConfigError("key '" + key + "' is not numeric");
    }
    if (spec->type == KeyType::integer && v != std::floor(v)) {
      throw ConfigError("key '" + key + "' expects an integer");
    }
    values_[key] = v;
  }

  void set_string(const std::string& key, std::string v) {
    const auto* spec = find_key(key);
    if (spec == nullptr) throw ConfigError("unknown key '" + key + "'");
    if (spec->type != KeyType::string) throw ConfigError("key '" + key + "' is not a string");
    values_[key] = std::move(v);
  }

  std::optional<double> number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return std::get<double>(it->second);
  }
  std::optional<std::string> string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return std::get<std::string>(it->second);
  }
  std::optional<std::vector<double>> list(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return std::get<std::vector<double>>(it->second);
  }
  const std::filesystem::path& base_dir() const noexcept { return base_dir_; }

private:
  static std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
  }

  static double parse_number(std::string_view s) {
    s = csv::trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ConfigError("invalid number '" + std::string(s) + "'");
    }
    return v;
  }

  static ConfigValue parse_value(std::string_view v, const KeySpec& spec) {
    switch (spec.type) {
      case KeyType::number:
        return parse_number(v);
      case KeyType::integer: {
        const double d = parse_number(v);
        if (d != std::floor(d)) throw ConfigError("'" + std::string(spec.key) + "' expects an integer");
        return d;
      }
      case KeyType::boolean:
        if (v == "true") return true;
        if (v == "false") return false;
        throw ConfigError("'" + std::string(spec.key) + "' expects true or false");
      case KeyType::string:
        if (v.size() < 2 || v.front() != '"' || v.back() != '"') {
          throw ConfigError("'" + std::string(spec.key) + "' expects a quoted string");
        }
        return std::string(v.substr(1, v.size() - 2));
      case KeyType::list: {
        if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
          throw ConfigError("'" + std::string(spec.key) + "' expects a list [a, b, ...]");
        }
        std::vector<double> out;
        const auto body = csv::trim(v.substr(1, v.size() - 2));
        if (!body.empty()) {
          for (auto item : csv::split(body)) out.push_back(parse_number(item));
        }
        return out;
      }
    }
    throw ConfigError("unsupported value");
  }

  std::map<std::string, ConfigValue> values_;
  std::filesystem::path base_dir_;
};

/// Everything the CLI needs for one run.
struct CliConfig {
  std::int64_t horizon = 168;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> csv_path;
  GeneratorConfig generator;
  RunConfig run;
};

namespace detail {

inline ForecasterKind forecaster_kind_from_string(const std::string& s) {
  if (s == "noisy_oracle") return ForecasterKind::noisy_oracle;
  if (s == "persistence") return ForecasterKind::persistence;
  throw ConfigError("unknown forecaster kind '" + s + "' (noisy_oracle | persistence)");
}

inline DemandResponseModel bind_demand(const ConfigDocument& doc, const std::string& sec,
                                       const DemandResponseModel& base, double& scale) {
  DemandResponseModel m = base;
  if (auto v = doc.list(sec + ".elasticity")) {
    if (v->size() != kHoursPerDay) throw ConfigError(sec + ".elasticity must have 24 values");
    std::copy(v->begin(), v->end(), m.elasticity.begin());
  }
  if (auto v = doc.number(sec + ".elasticity_scale")) scale = *v;
  if (auto v = doc.number(sec + ".kernel_k")) {
    m.window = static_cast<int>(*v);
    if (m.window < 1) throw ConfigError(sec + ".kernel_k must be >= 1");
    m.kernel = DemandResponseModel::uniform_kernel(m.window);
  }
  if (auto v = doc.list(sec + ".kernel_weights")) m.kernel = *v;
  if (auto v = doc.number(sec + ".rho")) m.rho = *v;
  return m;
}

inline DemandResponseModel scaled(DemandResponseModel m, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ConfigError("elasticity_scale must be finite and >= 0");
  for (auto& e : m.elasticity) e *= scale;
  return m;
}

} // namespace detail

/// Defaults describe the bundled scenario: a solar-heavy portfolio with a
/// double-peak consumption profile, unit-shaped elasticity scaled by 0.3 and
/// pure load shifting (rho = 1).
inline CliConfig bind_config(const ConfigDocument& doc) {
  CliConfig cfg;
  if (auto v = doc.number("horizon")) cfg.horizon = static_cast<std::int64_t>(*v);
  Horizon{cfg.horizon};
  if (auto v = doc.number("seed")) {
    if (*v < 0) throw ConfigError("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = doc.string("output_dir")) cfg.output_dir = *v;
  if (auto v = doc.string("csv_path")) {
    std::filesystem::path p = *v;
    if (p.is_relative() && !doc.base_dir().empty()) p = doc.base_dir() / p;
    if (!std::filesystem::exists(p)) throw ConfigError("csv_path '" + p.string() + "' does not exist");
    cfg.csv_path = p;
  }

  auto& cal = cfg.generator.calendar;
  if (auto v = doc.number("calendar.start_weekday")) cal.start_weekday = static_cast<int>(*v);
  if (auto v = doc.number("calendar.start_day_of_year")) cal.start_day_of_year = static_cast<int>(*v);
  if (auto v = doc.list("calendar.holidays")) {
    for (double d : *v) cal.holidays.insert(static_cast<std::int64_t>(d));
  }
  cal.validate();

  auto& g = cfg.generator;
  g.seed = derive_seed(cfg.seed, {1});
  auto num = [&](const char* key, double& dst) {
    if (auto v = doc.number(std::string("scenario.") + key)) dst = *v;
  };
  auto integer = [&](const char* key, int& dst) {
    if (auto v = doc.number(std::string("scenario.") + key)) dst = static_cast<int>(*v);
  };
  num("solar_capacity", g.solar_capacity);
  integer("sunrise_hour", g.sunrise_hour);
  integer("sunset_hour", g.sunset_hour);
  num("solar_cloudiness", g.solar_cloudiness);
  num("wind_capacity", g.wind_capacity);
  num("wind_mean_fraction", g.wind_mean_fraction);
  num("wind_std_fraction", g.wind_std_fraction);
  num("wind_autocorrelation", g.wind_autocorrelation);
  num("consumption_base", g.consumption_base);
  num("consumption_peak_amplitude", g.consumption_peak_amplitude);
  integer("morning_peak_hour", g.morning_peak_hour);
  integer("evening_peak_hour", g.evening_peak_hour);
  num("weekend_factor", g.weekend_factor);
  num("consumption_noise_std", g.consumption_noise_std);
  num("price_base", g.price_base);
  num("price_slope", g.price_slope);
  num("price_noise_std", g.price_noise_std);
  num("imbalance_spread", g.imbalance_spread);
  g.validate();

  auto& rc = cfg.run;
  // forecasters
  for (auto kind : {SeriesKind::production, SeriesKind::consumption, SeriesKind::price}) {
    ForecasterConfig f;
    f.gamma = 0.05;
    f.seed = derive_seed(cfg.seed, {2, static_cast<std::int64_t>(kind)});
    const std::string sec = std::string("forecasters.") + to_string(kind);
    for (const std::string& prefix : {std::string("forecasters"), sec}) {
      if (auto v = doc.string(prefix + ".kind")) f.kind = detail::forecaster_kind_from_string(*v);
      if (auto v = doc.number(prefix + ".gamma")) f.gamma = *v;
      if (auto v = doc.number(prefix + ".persistence_std")) f.persistence_std = *v;
      if (auto v = doc.number(prefix + ".seed")) f.seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = doc.list(sec + ".default_profile")) f.default_profile = *v;
    f.validate();
    (kind == SeriesKind::production    ? rc.forecasters.production
     : kind == SeriesKind::consumption ? rc.forecasters.consumption
                                       : rc.forecasters.price) = f;
  }

  // demand model
  DemandResponseModel base;
  base.elasticity.fill(-1.0);
  base.window = 2;
  base.kernel = DemandResponseModel::uniform_kernel(2);
  base.rho = 1.0;
  double scale = 0.3;
  const auto model = detail::bind_demand(doc, "demand_model", base, scale);
  rc.model = detail::scaled(model, scale);
  const bool has_truth = std::any_of(std::begin(kConfigSchema), std::end(kConfigSchema), [&](const KeySpec& s) {
    return s.key.starts_with("demand_model_truth.") && doc.has(std::string(s.key));
  });
  if (has_truth) {
    double truth_scale = scale;
    rc.truth_model = detail::scaled(detail::bind_demand(doc, "demand_model_truth", model, truth_scale), truth_scale);
  }

  // tariff and costs
  rc.tariff.alpha = 0.0;
  rc.tariff.beta = 70.0;
  if (auto v = doc.number("tariff.alpha")) rc.tariff.alpha = *v;
  if (auto v = doc.number("tariff.beta")) rc.tariff.beta = *v;
  rc.cost.fixed_cost_per_hour = 5.0;
  if (auto v = doc.number("cost_model.fixed_cost_per_hour")) rc.cost.fixed_cost_per_hour = *v;
  if (auto v = doc.number("cost_model.marginal_cost")) rc.cost.marginal_cost = *v;
  if (auto v = doc.string("settlement.imbalance_accounting")) {
    if (*v == "verbatim") rc.accounting = ImbalanceAccounting::verbatim;
    else if (*v == "residual") rc.accounting = ImbalanceAccounting::residual;
    else throw ConfigError("settlement.imbalance_accounting must be \"verbatim\" or \"residual\"");
  }

  // policy
  auto& p = rc.policy;
  p.seed = derive_seed(cfg.seed, {3});
  p.alpha = rc.tariff.alpha;
  p.beta = rc.tariff.beta;
  if (auto v = doc.string("policy.kind")) p.kind = policy_kind_from_string(*v);
  if (auto v = doc.number("policy.y_min")) p.y_min = *v;
  if (auto v = doc.number("policy.y_max")) p.y_max = *v;
  if (auto v = doc.number("policy.grid_levels")) p.grid_levels = static_cast<int>(*v);
  if (auto v = doc.number("policy.max_sweeps")) p.max_sweeps = static_cast<int>(*v);
  if (auto v = doc.number("policy.restarts")) p.restarts = static_cast<int>(*v);
  if (auto v = doc.number("policy.penalty_weight")) p.penalty_weight = *v;
  if (auto v = doc.number("policy.mc_samples")) p.mc_samples = static_cast<int>(*v);
  if (auto v = doc.number("policy.chance_level")) p.chance_level = *v;
  if (auto v = doc.number("policy.alpha")) p.alpha = *v;
  if (auto v = doc.number("policy.beta")) p.beta = *v;
  if (auto v = doc.number("policy.seed")) p.seed = static_cast<std::uint64_t>(*v);

  rc.validate();
  return cfg;
}

inline Scenario load_scenario(const CliConfig& cfg) {
  if (cfg.csv_path) {
    auto s = load_csv(*cfg.csv_path, cfg.generator.calendar);
    if (s.hours() != cfg.horizon) {
      throw ConfigError("scenario file has " + std::to_string(s.hours()) + " hours but horizon is " +
                        std::to_string(cfg.horizon));
    }
    return s;
  }
  return generate(cfg.generator, Horizon(cfg.horizon));
}

} // namespace dynprice
