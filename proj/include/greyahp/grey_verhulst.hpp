#pragma once

// Grey Verhulst forecaster.
//
// The raw observations play the accumulated role x1(k); their first
// differences x0(k) = x1(k) - x1(k-1) and neighbor means z(k) feed the
// least-squares system
//
//   x0(k) = -a z(k) + b z(k)^2,   k = 2..n
//
// whose solution (a, b) enters the whitening equation
//
//   x1_hat(k+1) = a x0 / (b x0 + (a - b x0) exp(a k))
//
// with x0 anchored at the first observation. For a < 0 the curve saturates
// at a / b.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "greyahp/error.hpp"
#include "greyahp/timeseries.hpp"

namespace greyahp {

struct GreyVerhulstModel {
  double a = 0.0;   // development coefficient, 1/period
  double b = 0.0;   // saturation coefficient, 1/(period * count)
  double x0 = 0.0;  // anchor value, count units
};

enum class AccuracyGrade { I = 1, II = 2, III = 3, IV = 4 };

constexpr std::string_view to_string(AccuracyGrade g) {
  switch (g) {
    case AccuracyGrade::I: return "I";
    case AccuracyGrade::II: return "II";
    case AccuracyGrade::III: return "III";
    case AccuracyGrade::IV: return "IV";
  }
  return "IV";
}

struct AccuracyReport {
  double q = 0.0;  // mean relative residual
  double c = 0.0;  // variance ratio S2 / S1
  double p = 0.0;  // small-error probability
  AccuracyGrade grade = AccuracyGrade::IV;
  std::vector<double> residuals;
};

struct SaturationResult {
  std::int64_t time = 0;  // period index k
  double value = 0.0;     // asymptote a / b
};

inline constexpr double kSaturationEps = 1e-4;

/// Least-squares fit of (a, b) on the raw series. The 2x2 normal equations are
/// solved in closed form. The determinant is compared against s11 * s22 (its
/// Hadamard bound), which keeps the test independent of the data's scale.
inline GreyVerhulstModel fit_grey_verhulst(const TimeSeries& series) {
  detail::require_length(series.size(), 4, "grey Verhulst fit");
  detail::require_positive(series.values);

  const DifferencedSeries x0 = difference(series);
  const NeighborMeanSeries z = neighbor_mean(series);

  // B rows are [-z, z^2]; accumulate B^T B and B^T Y directly.
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, r1 = 0.0, r2 = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    const double z2 = zi * zi;
    s11 += z2;
    s12 += -zi * z2;
    s22 += z2 * z2;
    r1 += -zi * x0[i];
    r2 += z2 * x0[i];
  }
  const double det = s11 * s22 - s12 * s12;
  if (!std::isfinite(det) || std::abs(det) <= 1e-12 * s11 * s22) {
    throw Error(ErrorCode::SingularSystem,
                "B^T B is singular: the series carries no information about the growth shape");
  }

  GreyVerhulstModel model;
  model.a = (s22 * r1 - s12 * r2) / det;
  model.b = (s11 * r2 - s12 * r1) / det;
  model.x0 = series[0];
  if (model.b == 0.0 || !std::isfinite(model.a) || !std::isfinite(model.b)) {
    throw Error(ErrorCode::SingularSystem,
                "fitted saturation coefficient is zero; the model degenerates to an exponential");
  }
  return model;
}

/// Whitening-equation value x1_hat(k+1); `k` may be fractional for plotting.
inline double predict(const GreyVerhulstModel& m, double k) {
  const double denom = m.b * m.x0 + (m.a - m.b * m.x0) * std::exp(m.a * k);
  const double value = m.a * m.x0 / denom;
  if (denom == 0.0 || !std::isfinite(value)) {
    throw Error(ErrorCode::NumericOverflow,
                "whitening equation denominator vanished at k=" + std::to_string(k));
  }
  return value;
}

inline std::vector<double> predict_range(const GreyVerhulstModel& m, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(predict(m, static_cast<double>(k)));
  return out;
}

inline bool converges(const GreyVerhulstModel& m) { return m.a < 0.0 && m.b != 0.0; }

/// The asymptote a / b and the first period whose relative change from the
/// previous one drops below `eps`.
inline SaturationResult saturation(const GreyVerhulstModel& m, double eps = kSaturationEps,
                                   std::int64_t max_periods = 1'000'000) {
  if (!converges(m)) {
    throw Error(ErrorCode::NoSaturation,
                "model diverges (a=" + std::to_string(m.a) + " is not negative)");
  }
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "saturation eps must be positive");

  SaturationResult r;
  r.value = m.a / m.b;
  constexpr double tiny = std::numeric_limits<double>::min();
  double prev = predict(m, 0.0);
  for (std::int64_t k = 1; k <= max_periods; ++k) {
    const double cur = predict(m, static_cast<double>(k));
    if (std::abs(cur - prev) / std::max(prev, tiny) < eps) {
      r.time = k;
      return r;
    }
    prev = cur;
  }
  throw Error(ErrorCode::NoSaturation,
              "relative change stayed above eps for " + std::to_string(max_periods) + " periods");
}

/// Worst of the levels implied separately by C and p.
inline AccuracyGrade grade_accuracy(double c, double p) {
  auto level_c = [](double v) {
    if (v <= 0.35) return 1;
    if (v <= 0.50) return 2;
    if (v <= 0.65) return 3;
    return 4;
  };
  auto level_p = [](double v) {
    if (v >= 0.95) return 1;
    if (v >= 0.80) return 2;
    if (v >= 0.70) return 3;
    return 4;
  };
  return static_cast<AccuracyGrade>(std::max(level_c(c), level_p(p)));
}

inline AccuracyReport validate(const GreyVerhulstModel& m, const TimeSeries& series) {
  detail::require_length(series.size(), 4, "validate");
  detail::require_positive(series.values);

  const std::size_t n = series.size();
  AccuracyReport rep;
  rep.residuals.resize(n);
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rep.residuals[i] = series[i] - predict(m, static_cast<double>(i));
    q += std::abs(rep.residuals[i]) / series[i];
  }
  rep.q = q / static_cast<double>(n);

  const double s1 = population_stddev(series.values);
  const double s2 = population_stddev(rep.residuals);
  if (s1 > 0.0) {
    rep.c = s2 / s1;
  } else {
    rep.c = s2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }

  const double mean_residual = mean(rep.residuals);
  const double band = 0.6745 * s1;
  std::size_t inside = 0;
  for (double e : rep.residuals) {
    if (std::abs(e - mean_residual) < band) ++inside;
  }
  rep.p = static_cast<double>(inside) / static_cast<double>(n);
  rep.grade = grade_accuracy(rep.c, rep.p);
  return rep;
}

}  // namespace greyahp
