#pragma once

// Three-parameter logistic baseline  f(t) = L / (1 + b exp(-k t))  fitted by
// Levenberg-Marquardt on the raw series, t = 0, 1, ..., n-1.

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <span>

#include "greyahp/error.hpp"
#include "greyahp/timeseries.hpp"

namespace greyahp {

struct LogisticParams {
  double L = 0.0;  // carrying capacity
  double b = 0.0;  // shape, > 0
  double k = 0.0;  // growth rate, 1/period
};

struct FitQuality {
  double r2 = 0.0;
  double rss = 0.0;
  double tss = 0.0;
  bool converged = false;
  bool degenerate_tss = false;  // constant data: r2 is reported as 0
  int iterations = 0;
};

struct LogisticFit {
  LogisticParams params;
  FitQuality quality;
};

struct LogisticOptions {
  int max_iterations = 500;
  double rss_rel_tol = 1e-10;
  double step_tol = 1e-12;
};

inline double predict_logistic(const LogisticParams& p, double t) {
  return p.L / (1.0 + p.b * std::exp(-p.k * t));
}

/// Partial derivatives of f(t) with respect to (L, b, k).
inline std::array<double, 3> logistic_jacobian(const LogisticParams& p, double t) {
  const double e = std::exp(-p.k * t);
  const double d = 1.0 + p.b * e;
  return {1.0 / d, -p.L * e / (d * d), p.L * p.b * t * e / (d * d)};
}

/// Linearized starting point: L0 slightly above the data maximum, then a
/// straight-line fit of logit(y / L0) against t gives k (slope) and -ln b
/// (intercept).
inline LogisticParams logistic_initial_guess(std::span<const double> y) {
  const double ymax = *std::max_element(y.begin(), y.end());
  LogisticParams p;
  p.L = 1.05 * ymax;
  const double delta = 1e-9 * p.L;
  const double n = static_cast<double>(y.size());
  double st = 0.0, sg = 0.0, stt = 0.0, stg = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i);
    const double ratio = std::clamp((y[i] + delta) / p.L, 1e-12, 1.0 - 1e-12);
    const double g = std::log(ratio / (1.0 - ratio));
    st += t;
    sg += g;
    stt += t * t;
    stg += t * g;
  }
  const double denom = n * stt - st * st;
  const double slope = denom != 0.0 ? (n * stg - st * sg) / denom : 0.0;
  const double intercept = (sg - slope * st) / n;
  p.k = slope;
  p.b = std::exp(-intercept);
  return p;
}

namespace detail {

inline double logistic_rss(const LogisticParams& p, std::span<const double> y) {
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = predict_logistic(p, static_cast<double>(i)) - y[i];
    rss += r * r;
  }
  return rss;
}

// Solves the 3x3 system A x = rhs by Gaussian elimination with partial pivoting.
inline std::optional<std::array<double, 3>> solve3(std::array<std::array<double, 3>, 3> a,
                                                   std::array<double, 3> rhs) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0 || !std::isfinite(a[pivot][col])) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::array<double, 3> x{};
  for (int r = 2; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace detail

inline LogisticFit fit_logistic(const TimeSeries& series,
                                std::optional<LogisticParams> init = std::nullopt,
                                const LogisticOptions& opt = {}) {
  detail::require_length(series.size(), 4, "logistic fit");
  detail::require_positive(series.values);
  const std::span<const double> y = series.values;

  LogisticParams p = init.value_or(logistic_initial_guess(y));
  double rss = detail::logistic_rss(p, y);
  double lambda = 1e-3;
  bool converged = rss == 0.0;
  int iter = 0;
  std::deque<double> recent{rss};

  while (!converged && iter < opt.max_iterations) {
    ++iter;
    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double t = static_cast<double>(i);
      const auto j = logistic_jacobian(p, t);
      const double r = predict_logistic(p, t) - y[i];
      for (int a = 0; a < 3; ++a) {
        jtr[a] += j[a] * r;
        for (int c = 0; c < 3; ++c) jtj[a][c] += j[a] * j[c];
      }
    }

    bool accepted = false;
    while (lambda < 1e20) {
      auto damped = jtj;
      for (int a = 0; a < 3; ++a) damped[a][a] += lambda * std::max(jtj[a][a], 1e-300);
      const auto step = detail::solve3(damped, {-jtr[0], -jtr[1], -jtr[2]});
      if (!step) {
        lambda *= 10.0;
        continue;
      }
      const LogisticParams trial{p.L + (*step)[0], p.b + (*step)[1], p.k + (*step)[2]};
      const double step_norm = std::hypot((*step)[0], (*step)[1], (*step)[2]);
      const double scale = 1.0 + std::hypot(p.L, p.b, p.k);
      const double trial_rss =
          (trial.L > 0.0 && trial.b > 0.0) ? detail::logistic_rss(trial, y)
                                           : std::numeric_limits<double>::infinity();
      if (std::isfinite(trial_rss) && trial_rss < rss) {
        const double rel = (rss - trial_rss) / rss;
        p = trial;
        rss = trial_rss;
        lambda = std::max(lambda * 0.1, 1e-15);
        accepted = true;
        if (rel < opt.rss_rel_tol || step_norm < opt.step_tol * scale || rss == 0.0) {
          converged = true;
        }
        break;
      }
      if (step_norm < opt.step_tol * scale) {
        // No representable improvement left.
        converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted && !converged) break;  // damping exhausted without progress
    recent.push_back(rss);
    if (recent.size() > 10) recent.pop_front();
  }

  if (!converged && iter >= opt.max_iterations) {
    const auto [lo, hi] = std::minmax_element(recent.begin(), recent.end());
    if (*hi > 0.0 && (*hi - *lo) / *hi > 0.01) {
      throw Error(ErrorCode::DivergedFit,
                  "logistic fit hit the iteration cap with RSS still moving by more than 1%");
    }
  }

  LogisticFit out;
  out.params = p;
  out.quality.rss = rss;
  out.quality.converged = converged;
  out.quality.iterations = iter;
  const double ybar = mean(y);
  for (double v : y) out.quality.tss += (v - ybar) * (v - ybar);
  if (out.quality.tss > 0.0) {
    out.quality.r2 = 1.0 - rss / out.quality.tss;
  } else {
    out.quality.r2 = 0.0;
    out.quality.degenerate_tss = true;
  }
  return out;
}

}  // namespace greyahp
