#include <gtest/gtest.h>

#include <random>

#include "greyahp/timeseries.hpp"

using namespace greyahp;

TEST(Difference, RejectsSinglePoint) {
  try {
    difference(make_series({5.0}));
    FAIL() << "expected SeriesTooShort";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SeriesTooShort);
  }
}

TEST(Difference, ConstantSeriesHasZeroDifferences) {
  EXPECT_EQ(difference(make_series({4.0, 4.0, 4.0})).values, (std::vector<double>{0.0, 0.0}));
}

TEST(Difference, HandArithmetic) {
  EXPECT_EQ(difference(make_series({1, 3, 6, 10})).values, (std::vector<double>{2, 3, 4}));
}

TEST(Cumulate, Examples) {
  EXPECT_EQ(cumulate(DifferencedSeries{}, 7.0).values, (std::vector<double>{7.0}));
  EXPECT_EQ(cumulate(DifferencedSeries{{2, 3, 4}}, 1.0).values, (std::vector<double>{1, 3, 6, 10}));
  EXPECT_EQ(cumulate(DifferencedSeries{{0, 0}}, 5.0).values, (std::vector<double>{5, 5, 5}));
}

TEST(NeighborMean, Examples) {
  EXPECT_EQ(neighbor_mean(make_series({2.5, 2.5})).values, (std::vector<double>{2.5}));
  EXPECT_EQ(neighbor_mean(make_series({1, 3, 6})).values, (std::vector<double>{2, 4.5}));
  EXPECT_EQ(neighbor_mean(make_series({0.5, 1.5, 2.5, 3.5})).values, (std::vector<double>{1, 2, 3}));
  EXPECT_THROW(neighbor_mean(make_series({1.0})), Error);
}

// Counts are integers, so differencing and cumulating are exact.
TEST(SeriesProperties, RoundTripLengthAndLinearity) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(2, 40);
  std::uniform_int_distribution<long> val(1, 5'000'000);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    TimeSeries s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) s.values.push_back(static_cast<double>(val(rng)));

    const auto d = difference(s);
    EXPECT_EQ(cumulate(d, s[0]).values, s.values);
    EXPECT_EQ(d.size(), s.size() - 1);
    EXPECT_EQ(neighbor_mean(s).size(), s.size() - 1);

    const auto m = neighbor_mean(s);
    for (std::size_t k = 0; k < m.size(); ++k) {
      EXPECT_GE(m[k], std::min(s[k], s[k + 1]));
      EXPECT_LE(m[k], std::max(s[k], s[k + 1]));
    }

    const double alpha = scale(rng);
    TimeSeries scaled = s;
    for (double& v : scaled.values) v *= alpha;
    const auto ds = difference(scaled);
    for (std::size_t k = 0; k < d.size(); ++k) {
      EXPECT_NEAR(ds[k], alpha * d[k], 1e-12 * std::max(1.0, std::abs(alpha * s[k + 1]) + std::abs(alpha * s[k])));
    }
  }
}

TEST(Stats, PopulationStddev) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_DOUBLE_EQ(population_stddev(v), 2.0);
}
