#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dynprice/error.hpp"
#include "dynprice/scenario.hpp"

namespace dynprice {

/// Scenario CSV failure. `row` is the 1-based data row (header excluded), 0
/// when the problem is not tied to a row.
class CsvError : public Error {
public:
  enum class Kind { io, missing_column, parse, non_finite, negative_value, bad_row_count, non_consecutive };

  CsvError(Kind kind, std::string column, std::size_t row, const std::string& what)
      : Error(what), kind_(kind), column_(std::move(column)), row_(row) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& column() const noexcept { return column_; }
  std::size_t row() const noexcept { return row_; }

private:
  Kind kind_;
  std::string column_;
  std::size_t row_;
};

namespace csv {

inline constexpr std::string_view kTime = "t";
inline constexpr std::string_view kProduction = "production_kwh";
inline constexpr std::string_view kConsumption = "baseline_consumption_kwh";
inline constexpr std::string_view kDayAhead = "dayahead_price_eur_mwh";
inline constexpr std::string_view kImbalance = "imbalance_price_eur_mwh";
inline constexpr std::string_view kFeaturePrefix = "feature:";

/// Shortest text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    throw Error("cannot format number");
  }
  return std::string(buf, ptr);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) {
      break;
    }
    pos = next + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

} // namespace csv

inline void save_csv(const Scenario& s, std::ostream& out) {
  out << csv::kTime << ',' << csv::kProduction << ',' << csv::kConsumption << ',' << csv::kDayAhead << ','
      << csv::kImbalance;
  for (const auto& [name, _] : s.features) {
    out << ',' << csv::kFeaturePrefix << name;
  }
  out << '\n';
  for (std::int64_t i = 0; i < s.hours(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out << (s.start().t + i) << ',' << csv::format_double(s.production.values[k]) << ','
        << csv::format_double(s.baseline_consumption.values[k]) << ','
        << csv::format_double(s.dayahead_price.values[k]) << ','
        << csv::format_double(s.imbalance_price.values[k]);
    for (const auto& [_, series] : s.features) {
      out << ',' << csv::format_double(series.values[k]);
    }
    out << '\n';
  }
}

inline void save_csv(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw CsvError(CsvError::Kind::io, "", 0, "cannot open '" + path.string() + "' for writing");
  }
  save_csv(s, out);
  if (!out) {
    throw CsvError(CsvError::Kind::io, "", 0, "write to '" + path.string() + "' failed");
  }
}

inline Scenario load_csv(std::istream& in, const CalendarConfig& calendar = {}) {
  using Kind = CsvError::Kind;
  std::string line;
  if (!std::getline(in, line)) {
    throw CsvError(Kind::missing_column, "", 0, "empty file: header row required");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
    line.erase(0, 3);  // UTF-8 BOM
  }
  std::vector<std::string> header;
  for (auto cell : csv::split(line)) {
    header.emplace_back(csv::trim(cell));
  }

  const std::string_view required[] = {csv::kTime, csv::kProduction, csv::kConsumption, csv::kDayAhead,
                                       csv::kImbalance};
  std::vector<std::size_t> req_idx;
  for (auto name : required) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw CsvError(Kind::missing_column, std::string(name), 0, "missing column '" + std::string(name) + "'");
    }
    req_idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::pair<std::string, std::size_t>> feature_idx;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    if (h.starts_with(csv::kFeaturePrefix)) {
      feature_idx.emplace_back(h.substr(csv::kFeaturePrefix.size()), i);
    } else if (std::find(std::begin(required), std::end(required), h) == std::end(required)) {
      throw CsvError(Kind::missing_column, h, 0, "unknown column '" + h + "'");
    }
  }

  std::vector<std::int64_t> times;
  std::vector<std::vector<double>> cols(4);
  std::vector<std::vector<double>> fcols(feature_idx.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (csv::trim(line).empty()) {
      continue;
    }
    ++row;
    auto cells = csv::split(line);
    if (cells.size() != header.size()) {
      throw CsvError(Kind::parse, "", row,
                     "row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                         " fields, got " + std::to_string(cells.size()));
    }
    auto number = [&](std::size_t idx) {
      auto text = csv::trim(cells[idx]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw CsvError(Kind::parse, header[idx], row,
                       "row " + std::to_string(row) + ", column '" + header[idx] + "': cannot parse '" +
                           std::string(text) + "'");
      }
      if (!std::isfinite(v)) {
        throw CsvError(Kind::non_finite, header[idx], row,
                       "row " + std::to_string(row) + ", column '" + header[idx] + "': NaN or infinite value");
      }
      return v;
    };
    {
      auto text = csv::trim(cells[req_idx[0]]);
      std::int64_t t = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t);
      if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw CsvError(Kind::parse, "t", row, "row " + std::to_string(row) + ", column 't': not an integer");
      }
      if (!times.empty() && t != times.back() + 1) {
        throw CsvError(Kind::non_consecutive, "t", row,
                       "row " + std::to_string(row) + ", column 't': hours must be consecutive");
      }
      times.push_back(t);
    }
    for (std::size_t c = 0; c < 4; ++c) {
      const double v = number(req_idx[c + 1]);
      if (c < 2 && v < 0.0) {
        throw CsvError(Kind::negative_value, header[req_idx[c + 1]], row,
                       "row " + std::to_string(row) + ", column '" + header[req_idx[c + 1]] +
                           "': negative value " + csv::format_double(v));
      }
      cols[c].push_back(v);
    }
    for (std::size_t f = 0; f < feature_idx.size(); ++f) {
      fcols[f].push_back(number(feature_idx[f].second));
    }
  }
  if (row == 0 || row % kHoursPerDay != 0) {
    throw CsvError(Kind::bad_row_count, "", row,
                   "horizon not multiple of 24: file has " + std::to_string(row) + " data rows");
  }

  const TimeStep start{times.front()};
  Scenario s;
  s.production = HourlySeries(start, std::move(cols[0]), Unit::kwh_per_h);
  s.baseline_consumption = HourlySeries(start, std::move(cols[1]), Unit::kwh_per_h);
  s.dayahead_price = HourlySeries(start, std::move(cols[2]), Unit::eur_per_mwh);
  s.imbalance_price = HourlySeries(start, std::move(cols[3]), Unit::eur_per_mwh);
  for (std::size_t f = 0; f < feature_idx.size(); ++f) {
    s.features.emplace(feature_idx[f].first, HourlySeries(start, std::move(fcols[f]), Unit::dimensionless));
  }
  s.calendar = calendar.features(start, static_cast<std::int64_t>(row));
  s.validate();
  return s;
}

inline Scenario load_csv(const std::filesystem::path& path, const CalendarConfig& calendar = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CsvError(CsvError::Kind::io, "", 0, "cannot open '" + path.string() + "'");
  }
  return load_csv(in, calendar);
}

} // namespace dynprice
