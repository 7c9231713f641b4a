#pragma once

// Indicator normalization, weighted scoring and allocation shares, plus the
// inflow feedback loop x(t+1) = x(t) + F(t) * share(t) * gamma.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "greyahp/ahp.hpp"
#include "greyahp/error.hpp"

namespace greyahp {

enum class Direction { Benefit, Cost };

constexpr std::string_view to_string(Direction d) {
  return d == Direction::Benefit ? "benefit" : "cost";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "benefit") return Direction::Benefit;
  if (s == "cost") return Direction::Cost;
  throw Error(ErrorCode::InvalidArgument,
              "direction must be 'benefit' or 'cost', got '" + std::string(s) + "'");
}

/// Entities x criteria, row-major.
struct IndicatorTable {
  std::vector<std::string> entities;
  std::vector<std::string> criteria;
  std::vector<Direction> directions;  // one per criterion
  std::vector<double> values;

  std::size_t rows() const noexcept { return entities.size(); }
  std::size_t cols() const noexcept { return criteria.size(); }
  double at(std::size_t e, std::size_t c) const { return values[e * cols() + c]; }
  double& at(std::size_t e, std::size_t c) { return values[e * cols() + c]; }

  std::optional<std::size_t> entity_index(const std::string& name) const {
    auto it = std::find(entities.begin(), entities.end(), name);
    if (it == entities.end()) return std::nullopt;
    return static_cast<std::size_t>(it - entities.begin());
  }
  std::optional<std::size_t> criterion_index(const std::string& name) const {
    auto it = std::find(criteria.begin(), criteria.end(), name);
    if (it == criteria.end()) return std::nullopt;
    return static_cast<std::size_t>(it - criteria.begin());
  }

  void check_shape() const {
    if (directions.size() != criteria.size()) {
      throw Error(ErrorCode::LabelMismatch, "direction count differs from criterion count");
    }
    if (values.size() != rows() * cols()) {
      throw Error(ErrorCode::InvalidArgument, "indicator value count does not match the table shape");
    }
  }

  bool operator==(const IndicatorTable&) const = default;
};

struct ScoreTable {
  std::vector<std::string> entities;
  std::vector<double> scores;
  std::vector<double> proportions;
  std::vector<std::string> clamped;  // entities whose negative score was set to 0
};

/// Ranks (1 = largest score); ties are ordered by entity name.
inline std::vector<std::size_t> rank_order(const std::vector<std::string>& entities,
                                           const std::vector<double>& scores) {
  std::vector<std::size_t> order(entities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return entities[a] < entities[b];
  });
  return order;
}

inline std::vector<int> ranks(const std::vector<std::string>& entities,
                              const std::vector<double>& scores) {
  const auto order = rank_order(entities, scores);
  std::vector<int> out(entities.size());
  for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = static_cast<int>(r + 1);
  return out;
}

inline std::vector<double> proportions(const std::vector<double>& scores) {
  double sum = 0.0;
  for (double s : scores) {
    if (s < 0.0) throw Error(ErrorCode::InvalidArgument, "scores must be nonnegative");
    sum += s;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::AllNonPositive, "no entity has a positive score");
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s / sum);
  return out;
}

/// Caps individual shares and hands the excess to uncapped entities in
/// proportion to their current shares.
inline std::vector<double> apply_max_share(std::vector<double> shares,
                                           const std::vector<std::optional<double>>& caps) {
  if (caps.empty()) return shares;
  std::vector<bool> fixed(shares.size(), false);
  for (std::size_t round = 0; round < shares.size(); ++round) {
    double excess = 0.0;
    double free_mass = 0.0;
    bool changed = false;
    for (std::size_t i = 0; i < shares.size(); ++i) {
      if (fixed[i]) continue;
      if (caps[i] && shares[i] > *caps[i]) {
        excess += shares[i] - *caps[i];
        shares[i] = *caps[i];
        fixed[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
    for (std::size_t i = 0; i < shares.size(); ++i)
      if (!fixed[i]) free_mass += shares[i];
    if (free_mass <= 0.0) {
      throw Error(ErrorCode::InvalidArgument, "max-share caps leave no entity to absorb the excess");
    }
    for (std::size_t i = 0; i < shares.size(); ++i)
      if (!fixed[i]) shares[i] += excess * shares[i] / free_mass;
  }
  return shares;
}

/// Benefit criteria: min-max scaling to [0, 1].
/// Cost criteria: (n - rank) / (n - 1) with rank 1 for the smallest raw
/// value, ties sharing their mean rank.
inline IndicatorTable normalize_indicators(const IndicatorTable& table) {
  table.check_shape();
  const std::size_t n = table.rows();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "normalization needs at least two entities");
  IndicatorTable out = table;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    if (table.directions[c] == Direction::Benefit) {
      double lo = table.at(0, c), hi = table.at(0, c);
      for (std::size_t e = 1; e < n; ++e) {
        lo = std::min(lo, table.at(e, c));
        hi = std::max(hi, table.at(e, c));
      }
      if (!(hi > lo)) {
        throw Error(ErrorCode::DegenerateCriterion,
                    "criterion '" + table.criteria[c] + "' has the same value for every entity");
      }
      for (std::size_t e = 0; e < n; ++e) out.at(e, c) = (table.at(e, c) - lo) / (hi - lo);
    } else {
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::size_t a, std::size_t b) { return table.at(a, c) < table.at(b, c); });
      std::size_t start = 0;
      while (start < n) {
        std::size_t end = start + 1;
        while (end < n && table.at(idx[end], c) == table.at(idx[start], c)) ++end;
        // positions start..end-1 hold ranks start+1..end
        const double mean_rank = 0.5 * static_cast<double>(start + 1 + end);
        for (std::size_t p = start; p < end; ++p) {
          out.at(idx[p], c) = (static_cast<double>(n) - mean_rank) / static_cast<double>(n - 1);
        }
        start = end;
      }
    }
  }
  return out;
}

/// Column index in `table` for each weight label.
inline std::vector<std::size_t> align_criteria(const IndicatorTable& table, const WeightVector& w) {
  if (w.labels.size() != table.cols()) {
    throw Error(ErrorCode::LabelMismatch, "table has " + std::to_string(table.cols()) +
                                              " criteria but the weight vector has " +
                                              std::to_string(w.labels.size()));
  }
  std::vector<std::size_t> cols;
  for (const auto& label : w.labels) {
    const auto c = table.criterion_index(label);
    if (!c) throw Error(ErrorCode::LabelMismatch, "criterion '" + label + "' not found in table");
    cols.push_back(*c);
  }
  return cols;
}

inline ScoreTable score_ahp(const IndicatorTable& normalized, const WeightVector& weights) {
  const auto cols = align_criteria(normalized, weights);
  ScoreTable out;
  out.entities = normalized.entities;
  out.scores.assign(normalized.rows(), 0.0);
  for (std::size_t e = 0; e < normalized.rows(); ++e) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) s += weights.weights[j] * normalized.at(e, cols[j]);
    out.scores[e] = s;
  }
  out.proportions = proportions(out.scores);
  return out;
}

/// Affine score beta0 + sum_j beta_j x_j in the table's column order.
/// Negative scores are clamped to 0 (listed in `clamped`) before proportioning.
inline ScoreTable score_factor(const IndicatorTable& table, const std::vector<double>& betas) {
  table.check_shape();
  if (betas.size() != table.cols() + 1) {
    throw Error(ErrorCode::LabelMismatch, "expected " + std::to_string(table.cols() + 1) +
                                              " betas (intercept first), got " +
                                              std::to_string(betas.size()));
  }
  ScoreTable out;
  out.entities = table.entities;
  out.scores.resize(table.rows());
  for (std::size_t e = 0; e < table.rows(); ++e) {
    double s = betas[0];
    for (std::size_t c = 0; c < table.cols(); ++c) s += betas[c + 1] * table.at(e, c);
    if (s < 0.0) {
      out.clamped.push_back(table.entities[e]);
      s = 0.0;
    }
    out.scores[e] = s;
  }
  out.proportions = proportions(out.scores);
  return out;
}

struct FeedbackConfig {
  std::vector<double> gamma;  // per criterion, indicator units per person
  std::size_t horizon = 1;
  std::vector<std::optional<double>> max_share;  // per entity, empty = no caps
};

inline IndicatorTable feedback_step(const IndicatorTable& state, double inflow,
                                    const std::vector<double>& shares, const FeedbackConfig& cfg) {
  state.check_shape();
  if (shares.size() != state.rows()) {
    throw Error(ErrorCode::LabelMismatch, "one share per entity is required");
  }
  if (cfg.gamma.size() != state.cols()) {
    throw Error(ErrorCode::LabelMismatch, "one gamma per criterion is required");
  }
  const double total = std::accumulate(shares.begin(), shares.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::SharesDontSum, "shares sum to " + std::to_string(total) + ", not 1");
  }
  IndicatorTable next = state;
  for (std::size_t e = 0; e < state.rows(); ++e)
    for (std::size_t c = 0; c < state.cols(); ++c) next.at(e, c) += inflow * shares[e] * cfg.gamma[c];
  return next;
}

/// One ScoreTable per period: normalize, score, share, then feed the
/// period's inflow back into the raw indicators.
inline std::vector<ScoreTable> simulate_feedback(const IndicatorTable& initial,
                                                 const std::vector<double>& inflows,
                                                 const WeightVector& weights,
                                                 const FeedbackConfig& cfg) {
  if (cfg.horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be at least 1");
  if (inflows.size() != cfg.horizon) {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(cfg.horizon) +
                                                " inflow values, got " +
                                                std::to_string(inflows.size()));
  }
  std::vector<ScoreTable> trajectory;
  trajectory.reserve(cfg.horizon);
  IndicatorTable state = initial;
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    try {
      ScoreTable st = score_ahp(normalize_indicators(state), weights);
      st.proportions = apply_max_share(std::move(st.proportions), cfg.max_share);
      state = feedback_step(state, inflows[t], st.proportions, cfg);
      trajectory.push_back(std::move(st));
    } catch (const Error& e) {
      throw Error(e.code(), "period " + std::to_string(t + 1) + ": " + e.what());
    }
  }
  return trajectory;
}

}  // namespace greyahp
