#pragma once

// Request/response layer shared by the CLI and the HTTP service. Both front
// ends build a request struct, call one of the run_* functions and print the
// returned JSON, so identical inputs give identical payloads.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "greyahp/ahp.hpp"
#include "greyahp/allocation.hpp"
#include "greyahp/error.hpp"
#include "greyahp/grey_verhulst.hpp"
#include "greyahp/logistic.hpp"
#include "greyahp/sensitivity.hpp"
#include "greyahp/timeseries.hpp"

namespace greyahp::api {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.3.0";

inline json error_payload(const Error& e) {
  return json{{"error", {{"code", std::string(e.code_name())}, {"message", e.what()}}}};
}

[[noreturn]] inline void bad_request(const std::string& msg) { throw Error(ErrorCode::BadRequest, msg); }

// ---------------------------------------------------------------------------
// requests

struct ForecastRequest {
  TimeSeries series;
  std::string model = "verhulst";
  double eps = kSaturationEps;
  int horizon = 0;
};

struct AhpRequest {
  PairwiseMatrix matrix;
  double tol = 1e-12;
  int max_iter = 10000;
};

struct AllocateRequest {
  PairwiseMatrix matrix;  // unused for method=factor
  bool has_matrix = false;
  IndicatorTable indicators;
  bool normalized = false;
  std::string method = "ahp";
  std::vector<double> betas;
  std::map<std::string, double> max_share;
  double tol = 1e-12;
  int max_iter = 10000;
};

struct SensitivityRequest {
  std::string subject = "forecast";  // or "allocation"
  ForecastRequest forecast;
  AllocateRequest allocation;
  PerturbationSpec spec;
};

struct SimulateRequest {
  PairwiseMatrix matrix;
  IndicatorTable indicators;
  std::vector<double> inflows;
  FeedbackConfig feedback;
};

// ---------------------------------------------------------------------------
// JSON -> request. Shape problems raise BadRequest (HTTP 422); value problems
// surface later as domain errors (HTTP 400).

namespace detail {

inline const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) bad_request(std::string("missing field '") + key + "'");
  return obj.at(key);
}

inline std::vector<double> numbers(const json& arr, const char* what) {
  if (!arr.is_array()) bad_request(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) bad_request(std::string(what) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::vector<std::string> strings(const json& arr, const char* what) {
  if (!arr.is_array()) bad_request(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) bad_request(std::string(what) + " must contain only strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

inline std::vector<std::vector<double>> number_rows(const json& arr, const char* what) {
  if (!arr.is_array()) bad_request(std::string(what) + " must be an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : arr) out.push_back(numbers(row, what));
  return out;
}

inline std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("c" + std::to_string(i + 1));
  return out;
}

}  // namespace detail

/// Accepts either {"labels": [...], "rows": [[...]]} or a bare array of rows.
inline PairwiseMatrix matrix_from_json(const json& j) {
  const json& rows_json = j.is_array() ? j : detail::field(j, "rows");
  const auto rows = detail::number_rows(rows_json, "matrix rows");
  const std::size_t n = rows.size();
  if (n < 1 || n > kMaxCriteria) bad_request("matrix must have 1..10 rows");
  for (const auto& r : rows) {
    if (r.size() != n) bad_request("matrix is not square");
  }
  std::vector<std::string> labels = detail::default_labels(n);
  if (j.is_object() && j.contains("labels")) {
    labels = detail::strings(j.at("labels"), "matrix labels");
    if (labels.size() != n) bad_request("matrix label count differs from its order");
  }
  return PairwiseMatrix::from_rows(std::move(labels), rows);
}

inline json matrix_to_json(const PairwiseMatrix& m) {
  return json{{"labels", m.labels()}, {"rows", m.rows()}};
}

inline TimeSeries series_from_json(const json& j) {
  TimeSeries s;
  s.values = detail::numbers(j.is_array() ? j : detail::field(j, "values"), "series values");
  if (j.is_object() && j.contains("periods")) {
    s.periods = detail::strings(j.at("periods"), "series periods");
    if (s.periods.size() != s.values.size()) bad_request("series periods and values differ in length");
    if (!s.periods.empty()) s.t0_label = s.periods.front();
  }
  return s;
}

inline json series_to_json(const TimeSeries& s) {
  json j{{"values", s.values}};
  if (!s.periods.empty()) j["periods"] = s.periods;
  return j;
}

inline IndicatorTable indicators_from_json(const json& j, const json& directions) {
  IndicatorTable t;
  t.entities = detail::strings(detail::field(j, "entities"), "entities");
  t.criteria = detail::strings(detail::field(j, "criteria"), "criteria");
  const auto rows = detail::number_rows(detail::field(j, "values"), "indicator values");
  if (rows.size() != t.entities.size()) bad_request("one indicator row per entity is required");
  for (const auto& r : rows) {
    if (r.size() != t.criteria.size()) bad_request("indicator row length differs from criterion count");
    t.values.insert(t.values.end(), r.begin(), r.end());
  }
  if (!directions.is_null() && !directions.is_object()) bad_request("directions must be an object");
  for (const auto& c : t.criteria) {
    Direction d = Direction::Benefit;
    if (directions.is_object() && directions.contains(c)) {
      if (!directions.at(c).is_string()) bad_request("direction values must be strings");
      d = parse_direction(directions.at(c).get<std::string>());
    }
    t.directions.push_back(d);
  }
  if (directions.is_object()) {
    for (const auto& [name, _] : directions.items()) {
      if (!t.criterion_index(name)) {
        throw Error(ErrorCode::UnknownCriterion, "direction names unknown criterion '" + name + "'");
      }
    }
  }
  return t;
}

inline json indicators_to_json(const IndicatorTable& t) {
  json rows = json::array();
  for (std::size_t e = 0; e < t.rows(); ++e) {
    json r = json::array();
    for (std::size_t c = 0; c < t.cols(); ++c) r.push_back(t.at(e, c));
    rows.push_back(r);
  }
  return json{{"entities", t.entities}, {"criteria", t.criteria}, {"values", rows}};
}

inline json directions_to_json(const IndicatorTable& t) {
  json d = json::object();
  for (std::size_t c = 0; c < t.cols(); ++c) d[t.criteria[c]] = std::string(to_string(t.directions[c]));
  return d;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad_request(std::string("field '") + key + "' has the wrong type");
  }
}

inline ForecastRequest forecast_request_from_json(const json& j) {
  if (!j.is_object()) bad_request("request body must be a JSON object");
  ForecastRequest r;
  r.series = series_from_json(detail::field(j, "series"));
  r.model = get_or<std::string>(j, "model", "verhulst");
  r.eps = get_or<double>(j, "eps", kSaturationEps);
  r.horizon = get_or<int>(j, "horizon", 0);
  return r;
}

inline json forecast_request_to_json(const ForecastRequest& r) {
  return json{{"series", series_to_json(r.series)}, {"model", r.model}, {"eps", r.eps}, {"horizon", r.horizon}};
}

inline AhpRequest ahp_request_from_json(const json& j) {
  if (!j.is_object()) bad_request("request body must be a JSON object");
  AhpRequest r;
  json m = detail::field(j, "matrix");
  if (m.is_array() && j.contains("labels")) m = json{{"rows", m}, {"labels", j.at("labels")}};
  r.matrix = matrix_from_json(m);
  r.tol = get_or<double>(j, "tol", 1e-12);
  r.max_iter = get_or<int>(j, "max_iter", 10000);
  return r;
}

inline AllocateRequest allocate_request_from_json(const json& j) {
  if (!j.is_object()) bad_request("request body must be a JSON object");
  AllocateRequest r;
  r.method = get_or<std::string>(j, "method", "ahp");
  if (r.method != "ahp" && r.method != "factor") bad_request("method must be 'ahp' or 'factor'");
  if (j.contains("matrix")) {
    r.matrix = matrix_from_json(j.at("matrix"));
    r.has_matrix = true;
  } else if (r.method == "ahp") {
    bad_request("missing field 'matrix'");
  }
  r.indicators = indicators_from_json(detail::field(j, "indicators"),
                                      j.contains("directions") ? j.at("directions") : json());
  r.normalized = get_or<bool>(j, "normalized", false);
  if (j.contains("betas")) r.betas = detail::numbers(j.at("betas"), "betas");
  if (r.method == "factor" && r.betas.empty()) bad_request("method 'factor' requires betas");
  r.max_share = get_or<std::map<std::string, double>>(j, "max_share", {});
  r.tol = get_or<double>(j, "tol", 1e-12);
  r.max_iter = get_or<int>(j, "max_iter", 10000);
  return r;
}

inline json allocate_request_to_json(const AllocateRequest& r) {
  json j{{"method", r.method},
         {"indicators", indicators_to_json(r.indicators)},
         {"directions", directions_to_json(r.indicators)},
         {"normalized", r.normalized}};
  if (r.has_matrix) j["matrix"] = matrix_to_json(r.matrix);
  if (!r.betas.empty()) j["betas"] = r.betas;
  if (!r.max_share.empty()) j["max_share"] = r.max_share;
  return j;
}

inline PerturbationSpec spec_from_json(const json& j) {
  if (!j.is_object()) bad_request("spec must be an object");
  PerturbationSpec s;
  s.kind = parse_perturbation_kind(get_or<std::string>(j, "kind", ""));
  s.index = get_or<std::size_t>(j, "index", 0);
  s.row = get_or<std::size_t>(j, "row", 0);
  s.col = get_or<std::size_t>(j, "col", 0);
  s.entity = get_or<std::string>(j, "entity", "");
  s.criterion = get_or<std::string>(j, "criterion", "");
  s.value = get_or<double>(j, "value", 1.0);
  return s;
}

inline json spec_to_json(const PerturbationSpec& s) {
  json j{{"kind", std::string(to_string(s.kind))}, {"value", s.value}};
  switch (s.kind) {
    case PerturbationKind::RemovePoint:
    case PerturbationKind::SetPoint: j["index"] = s.index; break;
    case PerturbationKind::ScaleMatrixEntry:
      j["row"] = s.row;
      j["col"] = s.col;
      break;
    case PerturbationKind::ScaleIndicator:
      j["entity"] = s.entity;
      j["criterion"] = s.criterion;
      break;
  }
  return j;
}

inline SensitivityRequest sensitivity_request_from_json(const json& j) {
  if (!j.is_object()) bad_request("request body must be a JSON object");
  SensitivityRequest r;
  r.subject = get_or<std::string>(j, "subject", "forecast");
  r.spec = spec_from_json(detail::field(j, "spec"));
  if (r.subject == "forecast") {
    r.forecast = forecast_request_from_json(j);
  } else if (r.subject == "allocation") {
    r.allocation = allocate_request_from_json(j);
  } else {
    bad_request("subject must be 'forecast' or 'allocation'");
  }
  return r;
}

inline SimulateRequest simulate_request_from_json(const json& j) {
  if (!j.is_object()) bad_request("request body must be a JSON object");
  SimulateRequest r;
  r.matrix = matrix_from_json(detail::field(j, "matrix"));
  r.indicators = indicators_from_json(detail::field(j, "indicators"),
                                      j.contains("directions") ? j.at("directions") : json());
  r.inflows = detail::numbers(detail::field(j, "inflows"), "inflows");
  const auto gamma = get_or<std::map<std::string, double>>(j, "gamma", {});
  for (const auto& [name, _] : gamma) {
    if (!r.indicators.criterion_index(name)) {
      throw Error(ErrorCode::UnknownCriterion, "gamma names unknown criterion '" + name + "'");
    }
  }
  for (const auto& c : r.indicators.criteria) {
    auto it = gamma.find(c);
    r.feedback.gamma.push_back(it == gamma.end() ? 0.0 : it->second);
  }
  r.feedback.horizon = get_or<std::size_t>(j, "horizon", r.inflows.size());
  const auto caps = get_or<std::map<std::string, double>>(j, "max_share", {});
  if (!caps.empty()) {
    r.feedback.max_share.resize(r.indicators.rows());
    for (const auto& [name, cap] : caps) {
      const auto e = r.indicators.entity_index(name);
      if (!e) throw Error(ErrorCode::InvalidArgument, "max_share names unknown entity '" + name + "'");
      r.feedback.max_share[*e] = cap;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// responses

inline json weights_to_json(const WeightVector& w) {
  return json{{"labels", w.labels},        {"values", w.weights}, {"lambda_max", w.lambda_max},
              {"ci", w.ci},                {"ri", w.ri},          {"cr", w.cr},
              {"consistent", w.consistent}, {"iterations", w.iterations}};
}

inline json scores_to_json(const ScoreTable& s) {
  const auto order = rank_order(s.entities, s.scores);
  json ranking = json::array();
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto e = order[r];
    ranking.push_back(
        {{"rank", r + 1}, {"entity", s.entities[e]}, {"index", s.scores[e]}, {"ratio", s.proportions[e]}});
  }
  return json{{"entities", s.entities},
              {"scores", s.scores},
              {"proportions", s.proportions},
              {"ranking", ranking},
              {"clamped", s.clamped}};
}

inline json run_ahp(const AhpRequest& r) {
  const auto w = principal_weights(r.matrix, r.tol, r.max_iter);
  return json{{"command", "ahp"}, {"matrix", matrix_to_json(r.matrix)}, {"weights", weights_to_json(w)}};
}

inline json run_forecast(const ForecastRequest& r) {
  json out{{"command", "forecast"}, {"model", r.model}, {"n", r.series.size()}};
  if (!r.series.periods.empty()) out["periods"] = r.series.periods;
  if (r.horizon < 0) throw Error(ErrorCode::InvalidArgument, "horizon must be nonnegative");
  const std::size_t n = r.series.size();
  const std::size_t total = n + static_cast<std::size_t>(r.horizon);

  if (r.model == "verhulst") {
    const auto model = fit_grey_verhulst(r.series);
    const auto acc = validate(model, r.series);
    const auto curve = predict_range(model, total);
    out["params"] = {{"a", model.a}, {"b", model.b}, {"x0", model.x0}};
    out["fitted"] = std::vector<double>(curve.begin(), curve.begin() + static_cast<std::ptrdiff_t>(n));
    out["forecast"] = std::vector<double>(curve.begin() + static_cast<std::ptrdiff_t>(n), curve.end());
    out["residuals"] = acc.residuals;
    out["accuracy"] = {{"q", acc.q}, {"c", acc.c}, {"p", acc.p}, {"grade", std::string(to_string(acc.grade))}};
    try {
      const auto sat = saturation(model, r.eps);
      out["saturation"] = {{"time", sat.time}, {"value", sat.value}, {"eps", r.eps}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoSaturation) throw;
      out["saturation"] = nullptr;
      out["saturation_note"] = e.what();
    }
  } else if (r.model == "logistic") {
    const auto fit = fit_logistic(r.series);
    std::vector<double> fitted, forecast;
    for (std::size_t t = 0; t < total; ++t) {
      (t < n ? fitted : forecast).push_back(predict_logistic(fit.params, static_cast<double>(t)));
    }
    out["params"] = {{"L", fit.params.L}, {"b", fit.params.b}, {"k", fit.params.k}};
    out["fitted"] = fitted;
    out["forecast"] = forecast;
    out["fit_quality"] = {{"r2", fit.quality.r2},
                          {"rss", fit.quality.rss},
                          {"tss", fit.quality.tss},
                          {"converged", fit.quality.converged},
                          {"degenerate_tss", fit.quality.degenerate_tss},
                          {"iterations", fit.quality.iterations}};
    out["asymptote"] = fit.params.L;
  } else {
    throw Error(ErrorCode::InvalidArgument, "model must be 'verhulst' or 'logistic'");
  }
  return out;
}

inline std::vector<std::optional<double>> caps_for(const IndicatorTable& t,
                                                   const std::map<std::string, double>& caps) {
  std::vector<std::optional<double>> out;
  if (caps.empty()) return out;
  out.resize(t.rows());
  for (const auto& [name, cap] : caps) {
    const auto e = t.entity_index(name);
    if (!e) throw Error(ErrorCode::InvalidArgument, "max_share names unknown entity '" + name + "'");
    out[*e] = cap;
  }
  return out;
}

inline json run_allocate(const AllocateRequest& r) {
  json out{{"command", "allocate"}, {"method", r.method}, {"normalized_input", r.normalized}};
  json warnings = json::array();
  const IndicatorTable scored = r.normalized ? r.indicators : normalize_indicators(r.indicators);
  ScoreTable scores;
  if (r.method == "ahp") {
    const auto w = principal_weights(r.matrix, r.tol, r.max_iter);
    if (!w.consistent) {
      warnings.push_back("InconsistentMatrix: cr=" + std::to_string(w.cr) + " is not below 0.1");
    }
    out["weights"] = weights_to_json(w);
    scores = score_ahp(scored, w);
  } else if (r.method == "factor") {
    out["betas"] = r.betas;
    scores = score_factor(scored, r.betas);
    for (const auto& e : scores.clamped) warnings.push_back("negative score for '" + e + "' clamped to 0");
  } else {
    throw Error(ErrorCode::InvalidArgument, "method must be 'ahp' or 'factor'");
  }
  scores.proportions = apply_max_share(std::move(scores.proportions), caps_for(scored, r.max_share));
  out["normalized_indicators"] = indicators_to_json(scored);
  out.update(scores_to_json(scores));
  out["warnings"] = warnings;
  return out;
}

inline json summary_to_json(const Summary& s) {
  json j = json::object();
  for (const auto& [k, v] : s) j[k] = v;
  return j;
}

inline json report_to_json(const SensitivityReport& rep, const std::string& subject) {
  json shifts = json::array();
  for (const auto& r : rep.rank_shifts) {
    shifts.push_back({{"entity", r.entity}, {"old_rank", r.old_rank}, {"new_rank", r.new_rank}});
  }
  json out{{"command", "sensitivity"},
           {"subject", subject},
           {"spec", spec_to_json(rep.spec)},
           {"baseline", summary_to_json(rep.baseline)},
           {"perturbed", summary_to_json(rep.perturbed)},
           {"deltas", summary_to_json(rep.deltas)},
           {"rank_shifts", shifts},
           {"notes", rep.notes}};
  if (rep.baseline_consistent) out["baseline_consistent"] = *rep.baseline_consistent;
  if (rep.perturbed_consistent) out["perturbed_consistent"] = *rep.perturbed_consistent;
  return out;
}

inline json run_sensitivity(const SensitivityRequest& r) {
  if (r.subject == "forecast") {
    return report_to_json(perturb_forecast(r.forecast.series, r.spec, r.forecast.eps), r.subject);
  }
  if (r.subject == "allocation") {
    const AllocationSubject subject{r.allocation.matrix, r.allocation.indicators, r.allocation.normalized};
    return report_to_json(perturb_allocation(subject, r.spec), r.subject);
  }
  throw Error(ErrorCode::InvalidArgument, "subject must be 'forecast' or 'allocation'");
}

inline json run_simulate(const SimulateRequest& r) {
  const auto w = principal_weights(r.matrix);
  const auto trajectory = simulate_feedback(r.indicators, r.inflows, w, r.feedback);
  json periods = json::array();
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    json p = scores_to_json(trajectory[t]);
    p["period"] = t + 1;
    p["inflow"] = r.inflows[t];
    periods.push_back(std::move(p));
  }
  return json{{"command", "simulate"},
              {"weights", weights_to_json(w)},
              {"entities", r.indicators.entities},
              {"periods", periods}};
}

inline json health() { return json{{"status", "ok"}, {"version", kVersion}}; }

}  // namespace greyahp::api
