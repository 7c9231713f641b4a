#pragma once

// Pairwise comparison matrices on the Saaty scale, principal-eigenvector
// weights and the consistency ratio.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "greyahp/error.hpp"

namespace greyahp {

inline constexpr double kSaatyMin = 1.0 / 9.0;
inline constexpr double kSaatyMax = 9.0;
inline constexpr std::size_t kMaxCriteria = 10;

/// Saaty random index by matrix order.
inline double random_index(std::size_t n) {
  static constexpr std::array<double, 11> table{0.0,  0.0,  0.0,  0.58, 0.90, 1.12,
                                                1.24, 1.32, 1.41, 1.45, 1.49};
  if (n >= table.size()) throw Error(ErrorCode::InvalidArgument, "no random index for n > 10");
  return table[n];
}

struct Judgment {
  std::size_t i = 0;  // 0-based, i < j
  std::size_t j = 0;
  double value = 1.0;
};

/// Square positive reciprocal matrix. Entries are kept within the Saaty
/// bounds; the lower triangle always mirrors the upper one.
class PairwiseMatrix {
 public:
  PairwiseMatrix() = default;

  explicit PairwiseMatrix(std::vector<std::string> labels)
      : n_(labels.size()), entries_(n_ * n_, 1.0), labels_(std::move(labels)) {
    if (n_ < 1 || n_ > kMaxCriteria) {
      throw Error(ErrorCode::InvalidArgument,
                  "pairwise matrix order must be 1..10, got " + std::to_string(n_));
    }
  }

  /// Takes a full row-major matrix. Values must already be reciprocal within
  /// 1e-9 relative and on the Saaty scale.
  static PairwiseMatrix from_rows(std::vector<std::string> labels,
                                  const std::vector<std::vector<double>>& rows) {
    PairwiseMatrix m(std::move(labels));
    if (rows.size() != m.n_) throw Error(ErrorCode::NotSquare, "row count differs from label count");
    for (std::size_t i = 0; i < m.n_; ++i) {
      if (rows[i].size() != m.n_) {
        throw Error(ErrorCode::NotSquare, "row " + std::to_string(i + 1) + " has " +
                                              std::to_string(rows[i].size()) + " entries, expected " +
                                              std::to_string(m.n_));
      }
    }
    for (std::size_t i = 0; i < m.n_; ++i) {
      if (std::abs(rows[i][i] - 1.0) > 1e-9) {
        throw Error(ErrorCode::ReciprocityViolation,
                    "diagonal entry (" + std::to_string(i + 1) + "," + std::to_string(i + 1) +
                        ") is not 1");
      }
      for (std::size_t j = i + 1; j < m.n_; ++j) {
        const double v = rows[i][j];
        check_scale(i, j, v);
        if (std::abs(rows[j][i] * v - 1.0) > 1e-9) {
          throw Error(ErrorCode::ReciprocityViolation,
                      "entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") and (" +
                          std::to_string(j + 1) + "," + std::to_string(i + 1) +
                          ") are not reciprocal");
        }
        m.set_pair(i, j, v);
      }
    }
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  const std::vector<double>& data() const noexcept { return entries_; }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
    return out;
  }

  /// Sets entry (i, j) and its mirror. Off-scale values are clamped into
  /// [1/9, 9]; the return value says whether clamping happened.
  bool set_judgment(std::size_t i, std::size_t j, double value) {
    if (i >= n_ || j >= n_) throw Error(ErrorCode::InvalidArgument, "judgment index out of range");
    if (i == j) throw Error(ErrorCode::InvalidArgument, "diagonal entries are fixed at 1");
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::OutOfScale, "judgment must be a positive finite number");
    }
    const double clamped = std::clamp(value, kSaatyMin, kSaatyMax);
    set_pair(i, j, clamped);
    return clamped != value;
  }

  static void check_scale(std::size_t i, std::size_t j, double v) {
    // Small tolerance so that 0.111111111 (printed 1/9) is accepted.
    if (!(v >= kSaatyMin * (1.0 - 1e-9) && v <= kSaatyMax * (1.0 + 1e-9))) {
      throw Error(ErrorCode::OutOfScale, "judgment (" + std::to_string(i + 1) + "," +
                                             std::to_string(j + 1) + ") = " + std::to_string(v) +
                                             " is outside [1/9, 9]");
    }
  }

  bool operator==(const PairwiseMatrix&) const = default;

 private:
  void set_pair(std::size_t i, std::size_t j, double v) {
    entries_[i * n_ + j] = v;
    entries_[j * n_ + i] = 1.0 / v;
  }

  std::size_t n_ = 0;
  std::vector<double> entries_;
  std::vector<std::string> labels_;
};

/// Completes a matrix from its strict upper triangle (0-based indices).
inline PairwiseMatrix build_matrix(std::vector<std::string> labels,
                                   const std::vector<Judgment>& upper) {
  PairwiseMatrix m(std::move(labels));
  const std::size_t n = m.size();
  std::vector<bool> seen(n * n, false);
  for (const auto& jd : upper) {
    if (jd.i >= jd.j || jd.j >= n) {
      throw Error(ErrorCode::InvalidArgument, "judgment (" + std::to_string(jd.i + 1) + "," +
                                                  std::to_string(jd.j + 1) +
                                                  ") is not in the strict upper triangle");
    }
    PairwiseMatrix::check_scale(jd.i, jd.j, jd.value);
    m.set_judgment(jd.i, jd.j, jd.value);
    seen[jd.i * n + jd.j] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!seen[i * n + j]) {
        throw Error(ErrorCode::MissingJudgment, "no judgment for pair (" + std::to_string(i + 1) +
                                                    "," + std::to_string(j + 1) + ")");
      }
    }
  }
  return m;
}

/// Overload with generated labels c1..cn; n is inferred from the judgment count.
inline PairwiseMatrix build_matrix(const std::vector<Judgment>& upper) {
  std::size_t n = 1;
  for (const auto& jd : upper) n = std::max(n, jd.j + 1);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("c" + std::to_string(i + 1));
  return build_matrix(std::move(labels), upper);
}

struct Consistency {
  double lambda_max = 0.0;
  double ci = 0.0;
  double ri = 0.0;
  double cr = 0.0;
  bool consistent = true;
};

struct WeightVector {
  std::vector<std::string> labels;
  std::vector<double> weights;
  double lambda_max = 0.0;
  double ci = 0.0;
  double ri = 0.0;
  double cr = 0.0;
  bool consistent = true;
  int iterations = 0;

  std::optional<std::size_t> index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels.begin());
  }
};

inline Consistency consistency_from_lambda(double lambda_max, std::size_t n) {
  Consistency c;
  c.lambda_max = lambda_max;
  if (n <= 2) return c;  // every 1x1 / 2x2 reciprocal matrix is consistent
  c.ci = (lambda_max - static_cast<double>(n)) / static_cast<double>(n - 1);
  c.ri = random_index(n);
  c.cr = c.ci / c.ri;
  c.consistent = c.cr < 0.1;
  return c;
}

namespace detail {

inline std::vector<double> multiply(const PairwiseMatrix& m, const std::vector<double>& w) {
  const std::size_t n = m.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += m(i, j) * w[j];
  return out;
}

inline double rayleigh_ratio_mean(const PairwiseMatrix& m, const std::vector<double>& w) {
  const auto aw = multiply(m, w);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += aw[i] / w[i];
  return acc / static_cast<double>(w.size());
}

}  // namespace detail

/// Power iteration from the uniform vector, renormalized to unit sum each
/// step. Stops when every component changes by less than `tol` relative.
inline WeightVector principal_weights(const PairwiseMatrix& m, double tol = 1e-12,
                                      int max_iter = 10000) {
  const std::size_t n = m.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  int iter = 0;
  bool done = false;
  while (iter < max_iter) {
    ++iter;
    auto next = detail::multiply(m, w);
    double sum = 0.0;
    for (double v : next) sum += v;
    for (double& v : next) v /= sum;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - w[i]) / w[i]);
    w = std::move(next);
    if (change < tol) {
      done = true;
      break;
    }
  }
  if (!done) {
    throw Error(ErrorCode::NoConvergence,
                "power iteration did not converge in " + std::to_string(max_iter) + " iterations");
  }

  WeightVector out;
  out.labels = m.labels();
  out.weights = std::move(w);
  out.iterations = iter;
  const auto c = consistency_from_lambda(detail::rayleigh_ratio_mean(m, out.weights), n);
  out.lambda_max = c.lambda_max;
  out.ci = c.ci;
  out.ri = c.ri;
  out.cr = c.cr;
  out.consistent = c.consistent;
  return out;
}

inline Consistency consistency(const PairwiseMatrix& m) {
  const auto w = principal_weights(m);
  return consistency_from_lambda(w.lambda_max, m.size());
}

/// Wraps externally supplied weights (e.g. a expected table) so they can be
/// used for scoring. Weights are rescaled to sum to 1.
inline WeightVector make_weights(std::vector<std::string> labels, std::vector<double> weights) {
  if (labels.size() != weights.size()) {
    throw Error(ErrorCode::LabelMismatch, "weight and label counts differ");
  }
  double sum = 0.0;
  for (double v : weights) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative");
    sum += v;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights sum to zero");
  WeightVector out;
  out.labels = std::move(labels);
  out.weights = std::move(weights);
  for (double& v : out.weights) v /= sum;
  return out;
}

inline std::size_t argmax(const WeightVector& w) {
  return static_cast<std::size_t>(std::max_element(w.weights.begin(), w.weights.end()) -
                                  w.weights.begin());
}

}  // namespace greyahp
