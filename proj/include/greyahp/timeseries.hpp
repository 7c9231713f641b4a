#pragma once

// Series primitives shared by the grey and logistic forecasters.
//
// Storage is 0-based. Messages and docs use the 1-based period index k, so
// the first difference of a series lives at k = 2.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "greyahp/error.hpp"

namespace greyahp {

struct TimeSeries {
  std::vector<double> values;
  std::string t0_label;           // label of the first period, e.g. "2015-01"
  std::string step_label = "period";
  std::vector<std::string> periods;  // optional per-row labels, same length as values when set

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Differences x(k) - x(k-1) for k = 2..n.
struct DifferencedSeries {
  std::vector<double> values;
  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Neighbor means (x(k) + x(k-1)) / 2 for k = 2..n.
struct NeighborMeanSeries {
  std::vector<double> values;
  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

inline TimeSeries make_series(std::vector<double> values, std::string t0_label = {}) {
  TimeSeries s;
  s.values = std::move(values);
  s.t0_label = std::move(t0_label);
  return s;
}

namespace detail {

inline void require_length(std::size_t n, std::size_t min_n, const char* what) {
  if (n < min_n) {
    throw Error(ErrorCode::SeriesTooShort,
                std::string(what) + ": series has " + std::to_string(n) +
                    " point(s), need at least " + std::to_string(min_n));
  }
}

inline void require_positive(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw Error(ErrorCode::NonPositiveData,
                  "value at k=" + std::to_string(i + 1) + " is not a positive finite number");
    }
  }
}

}  // namespace detail

inline DifferencedSeries difference(std::span<const double> series) {
  detail::require_length(series.size(), 2, "difference");
  DifferencedSeries out;
  out.values.reserve(series.size() - 1);
  for (std::size_t k = 1; k < series.size(); ++k) out.values.push_back(series[k] - series[k - 1]);
  return out;
}

inline DifferencedSeries difference(const TimeSeries& series) { return difference(series.values); }

/// Inverse of difference(): running sum of the differences starting at `first`.
inline TimeSeries cumulate(const DifferencedSeries& diffs, double first) {
  TimeSeries out;
  out.values.reserve(diffs.size() + 1);
  out.values.push_back(first);
  for (double d : diffs.values) out.values.push_back(out.values.back() + d);
  return out;
}

inline NeighborMeanSeries neighbor_mean(std::span<const double> series) {
  detail::require_length(series.size(), 2, "neighbor_mean");
  NeighborMeanSeries out;
  out.values.reserve(series.size() - 1);
  for (std::size_t k = 1; k < series.size(); ++k) {
    out.values.push_back(0.5 * (series[k] + series[k - 1]));
  }
  return out;
}

inline NeighborMeanSeries neighbor_mean(const TimeSeries& series) {
  return neighbor_mean(series.values);
}

inline double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Population standard deviation (divides by n).
inline double population_stddev(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace greyahp
