#include <gtest/gtest.h>

#include "greyahp/api.hpp"
#include "greyahp/io.hpp"
#include "test_support.hpp"

using namespace greyahp;
using api::json;

namespace {

const std::string kData = GREYAHP_DATA_DIR;

json reference_matrix_json() { return api::matrix_to_json(greyahp::testing::reference_matrix()); }

json reference_rows_json() {
  io::DirectionMap d;
  for (const auto& c : greyahp::testing::kCriteria) d[c] = Direction::Benefit;
  return api::indicators_to_json(io::load_indicators(kData + "/indicators_reference_rows.csv", d));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ApiPayload, ErrorShape) {
  const auto j = api::error_payload(Error(ErrorCode::NotSquare, "3 rows, 4 columns"));
  EXPECT_EQ(j["error"]["code"], "NotSquare");
  EXPECT_EQ(j["error"]["message"], "3 rows, 4 columns");
}

TEST(ApiAhp, ReferenceWeights) {
  const auto out = api::run_ahp(api::ahp_request_from_json({{"matrix", reference_matrix_json()}}));
  const std::vector<double> expected{0.1428, 0.2641, 0.5068, 0.0863};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out["weights"]["values"][i].get<double>(), expected[i], 0.005);
  EXPECT_TRUE(out["weights"]["consistent"].get<bool>());
  EXPECT_EQ(out["weights"]["labels"][2], "unemployment_rate");
}

TEST(ApiAhp, BareRowsGetDefaultLabels) {
  const json body{{"matrix", json::array({json::array({1, 3}), json::array({1.0 / 3, 1})})}};
  const auto out = api::run_ahp(api::ahp_request_from_json(body));
  EXPECT_EQ(out["weights"]["labels"], json({"c1", "c2"}));
  EXPECT_NEAR(out["weights"]["values"][0].get<double>(), 0.75, 1e-12);
}

TEST(ApiAhp, ShapeProblemsAreBadRequests) {
  const json ragged{{"matrix", json::array({json::array({1, 2}), json::array({0.5})})}};
  EXPECT_EQ(code_of([&] { api::ahp_request_from_json(ragged); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([] { api::ahp_request_from_json(json::array()); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([] { api::ahp_request_from_json({{"matrix", "x"}}); }), ErrorCode::BadRequest);
  const json recip{{"matrix", json::array({json::array({1, 2}), json::array({2, 1})})}};
  EXPECT_EQ(code_of([&] { api::ahp_request_from_json(recip); }), ErrorCode::ReciprocityViolation);
}

TEST(ApiForecast, VerhulstPayload) {
  const auto series = io::load_series(kData + "/series_synthetic.csv");
  const json body{{"series", api::series_to_json(series)}, {"horizon", 4}};
  const auto out = api::run_forecast(api::forecast_request_from_json(body));
  EXPECT_EQ(out["model"], "verhulst");
  EXPECT_EQ(out["fitted"].size(), series.size());
  EXPECT_EQ(out["forecast"].size(), 4u);
  EXPECT_EQ(out["fitted"][0].get<double>(), series[0]);
  EXPECT_TRUE(out["accuracy"]["grade"].is_string());
  EXPECT_TRUE(out["saturation"].is_object());
  const double a = out["params"]["a"], b = out["params"]["b"];
  EXPECT_DOUBLE_EQ(out["saturation"]["value"].get<double>(), a / b);
}

TEST(ApiForecast, LogisticPayload) {
  const auto series = io::load_series(kData + "/series_synthetic.csv");
  const json body{{"series", api::series_to_json(series)}, {"model", "logistic"}};
  const auto out = api::run_forecast(api::forecast_request_from_json(body));
  EXPECT_GT(out["fit_quality"]["r2"].get<double>(), 0.99);
  EXPECT_TRUE(out["fit_quality"]["converged"].get<bool>());
  EXPECT_EQ(out["asymptote"], out["params"]["L"]);
}

TEST(ApiForecast, UnknownModelAndShortSeries) {
  const json bad_model{{"series", {{"values", {1, 2, 3, 4, 5}}}}, {"model", "gompertz"}};
  EXPECT_EQ(code_of([&] { api::run_forecast(api::forecast_request_from_json(bad_model)); }),
            ErrorCode::InvalidArgument);
  const json short_series{{"series", {{"values", {1, 2, 3}}}}};
  EXPECT_EQ(code_of([&] { api::run_forecast(api::forecast_request_from_json(short_series)); }),
            ErrorCode::SeriesTooShort);
}

TEST(ApiAllocate, PrenormalizedReferenceRows) {
  const json body{{"matrix", reference_matrix_json()}, {"indicators", reference_rows_json()}, {"normalized", true}};
  const auto out = api::run_allocate(api::allocate_request_from_json(body));
  EXPECT_EQ(out["entities"][0], "Ireland");
  EXPECT_NEAR(out["scores"][0].get<double>(), 0.4296, 5e-4);
  EXPECT_EQ(out["ranking"].size(), 3u);
  EXPECT_TRUE(out["warnings"].empty());
  double total = 0;
  for (const auto& p : out["proportions"]) total += p.get<double>();
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ApiAllocate, InconsistentMatrixWarnsButScores) {
  const auto cyclic = build_matrix(greyahp::testing::kCriteria, {{0, 1, 9.0}, {0, 2, 1.0 / 9}, {0, 3, 1.0},
                                                                 {1, 2, 9.0}, {1, 3, 1.0}, {2, 3, 1.0}});
  const json body{{"matrix", api::matrix_to_json(cyclic)}, {"indicators", reference_rows_json()}, {"normalized", true}};
  const auto out = api::run_allocate(api::allocate_request_from_json(body));
  ASSERT_EQ(out["warnings"].size(), 1u);
  EXPECT_EQ(out["warnings"][0].get<std::string>().rfind("InconsistentMatrix", 0), 0u);
  EXPECT_FALSE(out["weights"]["consistent"].get<bool>());
}

TEST(ApiAllocate, FactorMethodNeedsBetas) {
  const json body{{"method", "factor"}, {"indicators", reference_rows_json()}};
  EXPECT_EQ(code_of([&] { api::allocate_request_from_json(body); }), ErrorCode::BadRequest);
  json with{{"method", "factor"}, {"indicators", reference_rows_json()}, {"normalized", true}, {"betas", {0, 1, 0, 0, 0}}};
  const auto out = api::run_allocate(api::allocate_request_from_json(with));
  EXPECT_EQ(out["betas"].size(), 5u);
  EXPECT_EQ(out["ranking"][0]["entity"], "Estonia");  // selector on the gdp column
}

TEST(ApiAllocate, RequestRoundTripsThroughJson) {
  const auto cfg = io::load_project(kData + "/project.conf");
  api::AllocateRequest req;
  req.matrix = io::load_matrix(cfg.matrix);
  req.has_matrix = true;
  req.indicators = io::load_indicators(cfg.indicators, cfg.directions);
  req.max_share = {{"Germany", 0.05}};
  const auto again = api::allocate_request_from_json(api::allocate_request_to_json(req));
  EXPECT_EQ(again.indicators, req.indicators);
  EXPECT_EQ(again.matrix, req.matrix);
  EXPECT_EQ(api::run_allocate(again).dump(), api::run_allocate(req).dump());
  const auto out = api::run_allocate(req);
  const auto g = *req.indicators.entity_index("Germany");
  EXPECT_NEAR(out["proportions"][g].get<double>(), 0.05, 1e-12);
}

TEST(ApiAllocate, DirectionForUnknownCriterion) {
  const json body{{"matrix", reference_matrix_json()}, {"indicators", reference_rows_json()}, {"directions", {{"inflation", "cost"}}}};
  EXPECT_EQ(code_of([&] { api::allocate_request_from_json(body); }), ErrorCode::UnknownCriterion);
}

TEST(ApiSensitivity, MatrixEntryReport) {
  const auto cfg = io::load_project(kData + "/project.conf");
  const auto table = io::load_indicators(cfg.indicators, cfg.directions);
  const json body{{"subject", "allocation"},
                  {"matrix", reference_matrix_json()},
                  {"indicators", api::indicators_to_json(table)},
                  {"directions", api::directions_to_json(table)},
                  {"spec", {{"kind", "scale_matrix_entry"}, {"row", 3}, {"col", 4}, {"value", 0.6}}}};
  const auto out = api::run_sensitivity(api::sensitivity_request_from_json(body));
  EXPECT_NEAR(out["perturbed"]["weight.public_welfare_index"].get<double>(), 0.1045, 0.005);
  EXPECT_TRUE(out["perturbed_consistent"].get<bool>());
  EXPECT_EQ(out["rank_shifts"].size(), table.rows());
  EXPECT_EQ(out["spec"]["kind"], "scale_matrix_entry");
}

TEST(ApiSensitivity, ForecastSubject) {
  const json body{{"series", {{"values", {10, 22, 45, 80, 120, 150, 170, 182}}}},
                  {"spec", {{"kind", "remove_point"}, {"index", 3}}}};
  const auto out = api::run_sensitivity(api::sensitivity_request_from_json(body));
  EXPECT_EQ(out["subject"], "forecast");
  EXPECT_TRUE(out["deltas"].contains("a"));
  EXPECT_EQ(code_of([] { api::sensitivity_request_from_json({{"spec", {{"kind", "shake"}}}}); }),
            ErrorCode::InvalidArgument);
}

TEST(ApiSimulate, ZeroInflowsAreConstant) {
  const auto cfg = io::load_project(kData + "/project.conf");
  const auto table = io::load_indicators(cfg.indicators, cfg.directions);
  json body{{"matrix", reference_matrix_json()},
            {"indicators", api::indicators_to_json(table)},
            {"directions", api::directions_to_json(table)},
            {"inflows", {0, 0, 0}},
            {"gamma", cfg.gamma}};
  const auto out = api::run_simulate(api::simulate_request_from_json(body));
  ASSERT_EQ(out["periods"].size(), 3u);
  EXPECT_EQ(out["periods"][0]["proportions"], out["periods"][2]["proportions"]);
  body["gamma"]["inflation"] = 1.0;
  EXPECT_EQ(code_of([&] { api::simulate_request_from_json(body); }), ErrorCode::UnknownCriterion);
}

TEST(ApiHealth, Payload) {
  EXPECT_EQ(api::health()["status"], "ok");
  EXPECT_EQ(api::health()["version"], api::kVersion);
}
