#include <gtest/gtest.h>

#include <cmath>

#include "greyahp/grey_verhulst.hpp"
#include "test_support.hpp"

using namespace greyahp;
using greyahp::testing::rel_close;
using greyahp::testing::whitening_samples;

namespace {

const GreyVerhulstModel kModel{-0.5, -0.00025, 100.0};

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

TEST(GreyFit, ConstantSeriesIsSingular) {
  EXPECT_EQ(code_of([] { fit_grey_verhulst(make_series({7, 7, 7, 7, 7})); }), ErrorCode::SingularSystem);
}

TEST(GreyFit, LengthAndPositivityGuards) {
  EXPECT_EQ(code_of([] { fit_grey_verhulst(make_series({2, 3})); }), ErrorCode::SeriesTooShort);
  EXPECT_EQ(code_of([] { fit_grey_verhulst(make_series({2, 3, 4})); }), ErrorCode::SeriesTooShort);
  EXPECT_EQ(code_of([] { fit_grey_verhulst(make_series({2, 3, -4, 5})); }), ErrorCode::NonPositiveData);
}

TEST(GreyFit, RecoversGeneratingParameters) {
  const auto series = make_series(whitening_samples(kModel.a, kModel.b, kModel.x0, 10));
  const auto m = fit_grey_verhulst(series);
  EXPECT_TRUE(rel_close(m.a, kModel.a, 0.05)) << m.a;
  EXPECT_TRUE(rel_close(m.b, kModel.b, 0.05)) << m.b;
  EXPECT_EQ(m.x0, series[0]);
}

TEST(GreyPredict, AnchorsAtFirstObservation) {
  EXPECT_TRUE(rel_close(predict(kModel, 0.0), kModel.x0, 1e-9));
  const auto fitted = fit_grey_verhulst(make_series({31000, 47120, 68150, 103900, 144800, 210300}));
  EXPECT_TRUE(rel_close(predict(fitted, 0.0), 31000.0, 1e-9));
}

TEST(GreyPredict, ApproachesAsymptote) {
  // With the anchor at half the capacity the tail term is e^-10 ~ 4.5e-5.
  const GreyVerhulstModel m{-0.5, -0.00025, 1000.0};
  const double k = 10.0 / std::abs(m.a);
  EXPECT_TRUE(rel_close(predict(m, k), m.a / m.b, 1e-4));

  // Generic anchor: looser bound at K = ceil(10/|a|), monotone tail.
  const double K = std::ceil(10.0 / std::abs(kModel.a));
  EXPECT_TRUE(rel_close(predict(kModel, K), kModel.a / kModel.b, 1e-3));
  double prev = predict(kModel, K);
  for (int j = 1; j < 50; ++j) {
    const double cur = predict(kModel, K + j);
    EXPECT_GE(cur, prev);
    prev = cur;
  }
}

TEST(GreyPredict, FittedCurveTracksTrainingData) {
  const auto series = make_series(whitening_samples(kModel.a, kModel.b, kModel.x0, 10));
  const auto m = fit_grey_verhulst(series);
  const auto rep = validate(m, series);
  double q = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    q += std::abs(predict(m, static_cast<double>(k)) - series[k]) / series[k];
  }
  q /= static_cast<double>(series.size());
  EXPECT_NEAR(rep.q, q, 1e-15);
  EXPECT_LT(rep.q, 0.01);
}

TEST(GreyPredict, VanishingDenominatorIsReported) {
  const GreyVerhulstModel degenerate{0.0, 1.0, 1.0};
  EXPECT_EQ(code_of([&] { predict(degenerate, 0.0); }), ErrorCode::NumericOverflow);
}

TEST(GreySaturation, DivergingModelHasNoSaturation) {
  EXPECT_EQ(code_of([] { saturation(GreyVerhulstModel{0.3, 0.001, 10.0}); }), ErrorCode::NoSaturation);
}

TEST(GreySaturation, ValueIsRatioAndTimeMatchesScan) {
  const auto sat = saturation(kModel, 1e-4);
  EXPECT_TRUE(rel_close(sat.value, 2000.0, 1e-9));

  // Brute-force scan with the closed form written out independently.
  auto curve = [](double k) {
    return kModel.a * kModel.x0 / (kModel.b * kModel.x0 + (kModel.a - kModel.b * kModel.x0) * std::exp(kModel.a * k));
  };
  std::int64_t first = -1;
  for (int k = 1; k <= 200; ++k) {
    if (std::abs(curve(k) - curve(k - 1)) / curve(k - 1) < 1e-4) {
      first = k;
      break;
    }
  }
  ASSERT_GT(first, 0);
  EXPECT_EQ(sat.time, first);
}

TEST(GreyValidate, PerfectModel) {
  const auto series = make_series(predict_range(kModel, 10));
  const auto rep = validate(kModel, series);
  EXPECT_EQ(rep.q, 0.0);
  EXPECT_EQ(rep.c, 0.0);
  EXPECT_EQ(rep.p, 1.0);
  EXPECT_EQ(rep.grade, AccuracyGrade::I);
}

TEST(GreyValidate, AlternatingOnePercentPerturbation) {
  auto values = predict_range(kModel, 10);
  // Hand residual table: |e|/x_obs = 0.01/(1 +- 0.01).
  double expected_q = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    values[k] *= 1.0 + sign * 0.01;
    expected_q += 0.01 / (1.0 + sign * 0.01);
  }
  expected_q /= static_cast<double>(values.size());
  const auto rep = validate(kModel, make_series(values));
  EXPECT_GE(rep.q, 0.009);
  EXPECT_LE(rep.q, 0.011);
  EXPECT_NEAR(rep.q, expected_q, 1e-12);
  EXPECT_GE(rep.p, 0.0);
  EXPECT_LE(rep.p, 1.0);
}

TEST(GreyValidate, TooShort) {
  EXPECT_EQ(code_of([] { validate(kModel, make_series({1, 2, 3})); }), ErrorCode::SeriesTooShort);
}

TEST(GreyGrade, MidBandPairIsLevelThree) { EXPECT_EQ(grade_accuracy(0.57, 0.73), AccuracyGrade::III); }

TEST(GreyGrade, AllCellsAndBoundaries) {
  EXPECT_EQ(grade_accuracy(0.10, 0.99), AccuracyGrade::I);
  EXPECT_EQ(grade_accuracy(0.35, 0.95), AccuracyGrade::I);
  EXPECT_EQ(grade_accuracy(0.3500001, 0.95), AccuracyGrade::II);
  EXPECT_EQ(grade_accuracy(0.35, 0.9499999), AccuracyGrade::II);
  EXPECT_EQ(grade_accuracy(0.50, 0.80), AccuracyGrade::II);
  EXPECT_EQ(grade_accuracy(0.5000001, 0.99), AccuracyGrade::III);
  EXPECT_EQ(grade_accuracy(0.20, 0.7999999), AccuracyGrade::III);
  EXPECT_EQ(grade_accuracy(0.65, 0.70), AccuracyGrade::III);
  EXPECT_EQ(grade_accuracy(0.6500001, 0.99), AccuracyGrade::IV);
  EXPECT_EQ(grade_accuracy(0.10, 0.6999999), AccuracyGrade::IV);
  EXPECT_EQ(grade_accuracy(2.0, 0.0), AccuracyGrade::IV);
  // Worst level wins.
  EXPECT_EQ(grade_accuracy(0.10, 0.75), AccuracyGrade::III);
  EXPECT_EQ(grade_accuracy(0.45, 0.99), AccuracyGrade::II);
}

TEST(GreyProperties, ScaleCovariance) {
  const auto base = make_series({31000, 47120, 68150, 103900, 144800, 210300, 281700, 380900, 476200, 587400});
  const auto m = fit_grey_verhulst(base);
  const auto sat = saturation(m);
  for (double alpha : {0.001, 0.5, 3.0, 250.0}) {
    TimeSeries scaled = base;
    for (double& v : scaled.values) v *= alpha;
    const auto ms = fit_grey_verhulst(scaled);
    EXPECT_TRUE(rel_close(ms.a, m.a, 1e-6));
    EXPECT_TRUE(rel_close(ms.b, m.b / alpha, 1e-6));
    EXPECT_TRUE(rel_close(saturation(ms).value, alpha * sat.value, 1e-6));
  }
}

TEST(GreyProperties, AnchorIdentityOnRandomFits) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> a_dist(-0.9, -0.1), cap_dist(1e3, 1e7), frac(0.01, 0.4);
  std::uniform_real_distribution<double> noise(-0.02, 0.02);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = a_dist(rng), cap = cap_dist(rng), x0 = frac(rng) * cap;
    auto values = whitening_samples(a, a / cap, x0, 10);
    for (double& v : values) v *= 1.0 + noise(rng);
    try {
      const auto m = fit_grey_verhulst(make_series(values));
      EXPECT_TRUE(rel_close(predict(m, 0.0), m.x0, 1e-9));
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NumericOverflow);
    }
  }
}
