#pragma once

// File formats.
//
//   series      period,value            one row per period, file order kept
//   matrix      <corner>,<label>...     then one label-first row per criterion
//   indicators  entity,<criterion>...   one row per entity
//   config      key=value               dotted keys, '#' comments
//
// Lines whose first character is '#' are comments in every CSV format.
// Writers emit a canonical form: header first, floats fixed at 9 decimals.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "greyahp/ahp.hpp"
#include "greyahp/allocation.hpp"
#include "greyahp/error.hpp"
#include "greyahp/grey_verhulst.hpp"
#include "greyahp/timeseries.hpp"

namespace greyahp::io {

inline std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Accepts plain reals and simple fractions such as "1/3".
inline std::optional<double> parse_judgment(std::string_view s) {
  const std::string t = trim(s);
  const auto slash = t.find('/');
  if (slash == std::string::npos) return parse_double(t);
  const auto num = parse_double(std::string_view(t).substr(0, slash));
  const auto den = parse_double(std::string_view(t).substr(slash + 1));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

inline std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  std::string s(buf);
  if (s == "-0.000000000") s.erase(0, 1);
  return s;
}

/// Config numbers: fixed 9 decimals unless that loses more than 1e-9 relative
/// (tolerances like 1e-12), then scientific.
inline std::string format_config_number(double v) {
  const std::string fixed = format_fixed(v);
  if (std::abs(std::strtod(fixed.c_str(), nullptr) - v) <= 1e-9 * std::abs(v)) return fixed;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

struct Line {
  std::size_t number = 0;
  std::string text;
};

/// Non-blank, non-comment lines with their 1-based physical line numbers.
inline std::vector<Line> read_lines(std::istream& in) {
  std::vector<Line> out;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (number == 1 && text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
    const std::string t = trim(text);
    if (t.empty() || t.front() == '#') continue;
    out.push_back({number, t});
  }
  return out;
}

inline std::vector<Line> read_file_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return read_lines(in);
}

[[noreturn]] inline void parse_fail(const std::string& where, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, where + ":" + std::to_string(line) + ": " + msg);
}

// ---------------------------------------------------------------------------
// series

inline TimeSeries parse_series(std::istream& in, const std::string& where = "<series>") {
  const auto lines = read_lines(in);
  if (lines.empty()) parse_fail(where, 1, "missing header row 'period,value'");
  if (split(lines.front().text).size() != 2) {
    parse_fail(where, lines.front().number, "header must have two columns: period,value");
  }
  TimeSeries s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i].text);
    if (cells.size() != 2) parse_fail(where, lines[i].number, "expected 2 columns");
    const auto v = parse_double(cells[1]);
    if (!v) parse_fail(where, lines[i].number, "'" + cells[1] + "' is not a number");
    if (!(*v > 0.0)) {
      throw Error(ErrorCode::NonPositiveValue, where + ":" + std::to_string(lines[i].number) +
                                                   ": value " + cells[1] + " is not positive");
    }
    s.periods.push_back(cells[0]);
    s.values.push_back(*v);
  }
  if (!s.periods.empty()) s.t0_label = s.periods.front();
  return s;
}

inline TimeSeries load_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return parse_series(in, path.string());
}

inline std::string save_series(const TimeSeries& s) {
  std::string out = "period,value\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::string label = i < s.periods.size() ? s.periods[i] : std::to_string(i + 1);
    out += label + "," + format_fixed(s[i]) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// pairwise matrix

inline constexpr double kReciprocityTolerance = 1e-6;

inline PairwiseMatrix parse_matrix(std::istream& in, const std::string& where = "<matrix>",
                                   std::vector<std::string>* repairs = nullptr) {
  const auto lines = read_lines(in);
  if (lines.empty()) parse_fail(where, 1, "missing header row");
  auto header = split(lines.front().text);
  if (header.size() < 2) parse_fail(where, lines.front().number, "header needs at least one label");
  std::vector<std::string> labels(header.begin() + 1, header.end());
  const std::size_t n = labels.size();
  if (lines.size() - 1 != n) {
    throw Error(ErrorCode::NotSquare, where + ": " + std::to_string(lines.size() - 1) + " row(s) for " +
                                          std::to_string(n) + " column label(s)");
  }
  std::vector<std::vector<double>> raw(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& line = lines[i + 1];
    const auto cells = split(line.text);
    if (cells.size() != n + 1) {
      throw Error(ErrorCode::NotSquare, where + ":" + std::to_string(line.number) + ": row has " +
                                            std::to_string(cells.size() - 1) + " value(s), expected " +
                                            std::to_string(n));
    }
    if (cells[0] != labels[i]) {
      parse_fail(where, line.number, "row label '" + cells[0] + "' does not match column label '" +
                                         labels[i] + "'");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = parse_judgment(cells[j + 1]);
      if (!v || !(*v > 0.0)) parse_fail(where, line.number, "'" + cells[j + 1] + "' is not a positive number");
      raw[i][j] = *v;
    }
  }

  PairwiseMatrix m(labels);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(raw[i][i] - 1.0) > kReciprocityTolerance) {
      throw Error(ErrorCode::ReciprocityViolation,
                  where + ": diagonal entry (" + std::to_string(i + 1) + "," + std::to_string(i + 1) +
                      ") is " + std::to_string(raw[i][i]));
    }
    if (raw[i][i] != 1.0 && repairs) {
      repairs->push_back("diagonal (" + std::to_string(i + 1) + "," + std::to_string(i + 1) + ") set to 1");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      PairwiseMatrix::check_scale(i, j, raw[i][j]);
      const double product = raw[i][j] * raw[j][i];
      if (std::abs(product - 1.0) > kReciprocityTolerance) {
        throw Error(ErrorCode::ReciprocityViolation,
                    where + ": entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")=" +
                        std::to_string(raw[i][j]) + " and (" + std::to_string(j + 1) + "," +
                        std::to_string(i + 1) + ")=" + std::to_string(raw[j][i]) +
                        " are not reciprocal");
      }
      m.set_judgment(i, j, std::clamp(raw[i][j], kSaatyMin, kSaatyMax));
      if (m(j, i) != raw[j][i] && repairs) {
        repairs->push_back("entry (" + std::to_string(j + 1) + "," + std::to_string(i + 1) +
                           ") repaired to the exact reciprocal of (" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + ")");
      }
    }
  }
  return m;
}

inline PairwiseMatrix load_matrix(const std::filesystem::path& path,
                                  std::vector<std::string>* repairs = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return parse_matrix(in, path.string(), repairs);
}

inline std::string save_matrix(const PairwiseMatrix& m) {
  std::string out = "criterion";
  for (const auto& l : m.labels()) out += "," + l;
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.labels()[i];
    for (std::size_t j = 0; j < m.size(); ++j) out += "," + format_fixed(m(i, j));
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// indicators

using DirectionMap = std::map<std::string, Direction>;

inline IndicatorTable parse_indicators(std::istream& in, const DirectionMap& directions,
                                       const std::string& where = "<indicators>") {
  const auto lines = read_lines(in);
  if (lines.empty()) parse_fail(where, 1, "missing header row 'entity,<criterion>...'");
  const auto header = split(lines.front().text);
  if (header.size() < 2) parse_fail(where, lines.front().number, "header needs at least one criterion");

  IndicatorTable t;
  t.criteria.assign(header.begin() + 1, header.end());
  for (const auto& c : t.criteria) {
    if (c.empty()) parse_fail(where, lines.front().number, "empty criterion name");
    auto it = directions.find(c);
    if (it == directions.end()) {
      throw Error(ErrorCode::UnknownCriterion, "no direction given for criterion '" + c + "'");
    }
    t.directions.push_back(it->second);
  }
  for (const auto& [name, dir] : directions) {
    if (!t.criterion_index(name)) {
      throw Error(ErrorCode::UnknownCriterion, "direction names unknown criterion '" + name + "'");
    }
  }
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r].text);
    if (cells[0].empty()) parse_fail(where, lines[r].number, "empty entity name");
    if (t.entity_index(cells[0])) parse_fail(where, lines[r].number, "duplicate entity '" + cells[0] + "'");
    if (cells.size() > t.cols() + 1) parse_fail(where, lines[r].number, "too many columns");
    t.entities.push_back(cells[0]);
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (c + 1 >= cells.size() || cells[c + 1].empty()) {
        throw Error(ErrorCode::MissingCell, where + ":" + std::to_string(lines[r].number) +
                                                ": missing value for (" + cells[0] + ", " +
                                                t.criteria[c] + ")");
      }
      const auto v = parse_double(cells[c + 1]);
      if (!v) parse_fail(where, lines[r].number, "'" + cells[c + 1] + "' is not a number");
      t.values.push_back(*v);
    }
  }
  return t;
}

inline IndicatorTable load_indicators(const std::filesystem::path& path, const DirectionMap& directions) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return parse_indicators(in, directions, path.string());
}

/// Criterion names from an indicators file header, for filling default directions.
inline std::vector<std::string> peek_criteria(const std::filesystem::path& path) {
  const auto lines = read_file_lines(path);
  if (lines.empty()) parse_fail(path.string(), 1, "missing header row");
  auto header = split(lines.front().text);
  return {header.begin() + 1, header.end()};
}

inline std::string save_indicators(const IndicatorTable& t) {
  std::string out = "entity";
  for (const auto& c : t.criteria) out += "," + c;
  out += "\n";
  for (std::size_t e = 0; e < t.rows(); ++e) {
    out += t.entities[e];
    for (std::size_t c = 0; c < t.cols(); ++c) out += "," + format_fixed(t.at(e, c));
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// config

using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(std::istream& in, const std::string& where = "<config>") {
  KeyValues kv;
  for (const auto& line : read_lines(in)) {
    const auto eq = line.text.find('=');
    if (eq == std::string::npos) parse_fail(where, line.number, "expected key=value");
    std::string key = trim(std::string_view(line.text).substr(0, eq));
    std::string value = trim(std::string_view(line.text).substr(eq + 1));
    if (key.empty()) parse_fail(where, line.number, "empty key");
    if (kv.count(key)) parse_fail(where, line.number, "duplicate key '" + key + "'");
    kv.emplace(std::move(key), std::move(value));
  }
  return kv;
}

inline std::string save_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

inline std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& cell : split(text)) {
    const auto v = parse_double(cell);
    if (!v) throw Error(ErrorCode::ParseError, what + ": '" + cell + "' is not a number");
    out.push_back(*v);
  }
  return out;
}

struct ProjectConfig {
  std::filesystem::path series;
  std::filesystem::path matrix;
  std::filesystem::path indicators;
  bool indicators_normalized = false;
  DirectionMap directions;
  std::map<std::string, double> gamma;
  std::map<std::string, double> max_share;
  std::string forecast_model = "verhulst";
  double forecast_eps = kSaturationEps;
  int forecast_horizon = 0;
  double ahp_tol = 1e-12;
  int ahp_max_iter = 10000;
  std::string allocate_method = "ahp";
  std::vector<double> betas;
  std::vector<double> inflows;
};

inline ProjectConfig parse_project(const KeyValues& kv, const std::filesystem::path& base_dir = {},
                                   const std::string& where = "<config>") {
  ProjectConfig cfg;
  auto number = [&](const std::string& key, const std::string& value) {
    const auto v = parse_double(value);
    if (!v) throw Error(ErrorCode::ParseError, where + ": " + key + " is not a number");
    return *v;
  };
  auto path = [&](const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  auto suffix = [](const std::string& key, std::string_view prefix) -> std::optional<std::string> {
    if (key.rfind(prefix, 0) == 0 && key.size() > prefix.size()) return key.substr(prefix.size());
    return std::nullopt;
  };
  std::optional<int> horizon;
  for (const auto& [key, value] : kv) {
    if (key == "series") cfg.series = path(value);
    else if (key == "matrix") cfg.matrix = path(value);
    else if (key == "indicators") cfg.indicators = path(value);
    else if (key == "indicators.normalized") cfg.indicators_normalized = value == "true" || value == "1";
    else if (auto c = suffix(key, "direction.")) cfg.directions[*c] = parse_direction(value);
    else if (auto c = suffix(key, "gamma.")) cfg.gamma[*c] = number(key, value);
    else if (auto e = suffix(key, "max_share.")) cfg.max_share[*e] = number(key, value);
    else if (key == "forecast.model") cfg.forecast_model = value;
    else if (key == "forecast.eps") cfg.forecast_eps = number(key, value);
    else if (key == "forecast.horizon") cfg.forecast_horizon = static_cast<int>(number(key, value));
    else if (key == "ahp.tol") cfg.ahp_tol = number(key, value);
    else if (key == "ahp.max_iter") cfg.ahp_max_iter = static_cast<int>(number(key, value));
    else if (key == "allocate.method") cfg.allocate_method = value;
    else if (key == "factor.betas") cfg.betas = parse_number_list(value, key);
    else if (key == "simulate.inflows") cfg.inflows = parse_number_list(value, key);
    else if (key == "simulate.horizon") horizon = static_cast<int>(number(key, value));
    else throw Error(ErrorCode::ParseError, where + ": unknown key '" + key + "'");
  }
  if (horizon && static_cast<std::size_t>(*horizon) != cfg.inflows.size()) {
    throw Error(ErrorCode::ParseError, where + ": simulate.horizon=" + std::to_string(*horizon) +
                                           " but simulate.inflows has " +
                                           std::to_string(cfg.inflows.size()) + " value(s)");
  }
  return cfg;
}

inline ProjectConfig load_project(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return parse_project(parse_key_values(in, path.string()), path.parent_path(), path.string());
}

/// Canonical key=value form of a project (sorted keys).
inline KeyValues to_key_values(const ProjectConfig& cfg) {
  KeyValues kv;
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_config_number(v[i]);
    return s;
  };
  if (!cfg.series.empty()) kv["series"] = cfg.series.generic_string();
  if (!cfg.matrix.empty()) kv["matrix"] = cfg.matrix.generic_string();
  if (!cfg.indicators.empty()) kv["indicators"] = cfg.indicators.generic_string();
  if (cfg.indicators_normalized) kv["indicators.normalized"] = "true";
  for (const auto& [c, d] : cfg.directions) kv["direction." + c] = std::string(to_string(d));
  for (const auto& [c, g] : cfg.gamma) kv["gamma." + c] = format_config_number(g);
  for (const auto& [e, s] : cfg.max_share) kv["max_share." + e] = format_config_number(s);
  kv["forecast.model"] = cfg.forecast_model;
  kv["forecast.eps"] = format_config_number(cfg.forecast_eps);
  kv["forecast.horizon"] = std::to_string(cfg.forecast_horizon);
  kv["ahp.tol"] = format_config_number(cfg.ahp_tol);
  kv["ahp.max_iter"] = std::to_string(cfg.ahp_max_iter);
  kv["allocate.method"] = cfg.allocate_method;
  if (!cfg.betas.empty()) kv["factor.betas"] = join(cfg.betas);
  if (!cfg.inflows.empty()) kv["simulate.inflows"] = join(cfg.inflows);
  return kv;
}

/// Per-criterion gamma in table column order; criteria without an entry get 0.
inline FeedbackConfig feedback_config(const ProjectConfig& cfg, const IndicatorTable& table) {
  FeedbackConfig fb;
  for (const auto& [name, g] : cfg.gamma) {
    if (!table.criterion_index(name)) {
      throw Error(ErrorCode::UnknownCriterion, "gamma names unknown criterion '" + name + "'");
    }
  }
  for (const auto& c : table.criteria) {
    auto it = cfg.gamma.find(c);
    fb.gamma.push_back(it == cfg.gamma.end() ? 0.0 : it->second);
  }
  fb.horizon = cfg.inflows.size();
  if (!cfg.max_share.empty()) {
    fb.max_share.resize(table.rows());
    for (const auto& [name, cap] : cfg.max_share) {
      const auto e = table.entity_index(name);
      if (!e) throw Error(ErrorCode::InvalidArgument, "max_share names unknown entity '" + name + "'");
      fb.max_share[*e] = cap;
    }
  }
  return fb;
}

}  // namespace greyahp::io
