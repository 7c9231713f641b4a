#pragma once

// One-at-a-time perturbation harness for both forecasters and the allocator.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greyahp/ahp.hpp"
#include "greyahp/allocation.hpp"
#include "greyahp/error.hpp"
#include "greyahp/grey_verhulst.hpp"
#include "greyahp/timeseries.hpp"

namespace greyahp {

enum class PerturbationKind { RemovePoint, SetPoint, ScaleMatrixEntry, ScaleIndicator };

constexpr std::string_view to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::RemovePoint: return "remove_point";
    case PerturbationKind::SetPoint: return "set_point";
    case PerturbationKind::ScaleMatrixEntry: return "scale_matrix_entry";
    case PerturbationKind::ScaleIndicator: return "scale_indicator";
  }
  return "unknown";
}

inline PerturbationKind parse_perturbation_kind(std::string_view s) {
  if (s == "remove_point") return PerturbationKind::RemovePoint;
  if (s == "set_point") return PerturbationKind::SetPoint;
  if (s == "scale_matrix_entry") return PerturbationKind::ScaleMatrixEntry;
  if (s == "scale_indicator") return PerturbationKind::ScaleIndicator;
  throw Error(ErrorCode::InvalidArgument, "unknown perturbation kind '" + std::string(s) + "'");
}

/// Indices are 1-based: `index` is the period k for series perturbations,
/// (row, col) the matrix cell. Indicator targets are addressed by name.
struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::SetPoint;
  std::size_t index = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  std::string entity;
  std::string criterion;
  double value = 1.0;  // new value for set_point, factor for the scale kinds

  std::string describe() const {
    std::string s(to_string(kind));
    switch (kind) {
      case PerturbationKind::RemovePoint: return s + " k=" + std::to_string(index);
      case PerturbationKind::SetPoint:
        return s + " k=" + std::to_string(index) + " value=" + std::to_string(value);
      case PerturbationKind::ScaleMatrixEntry:
        return s + " (" + std::to_string(row) + "," + std::to_string(col) +
               ") factor=" + std::to_string(value);
      case PerturbationKind::ScaleIndicator:
        return s + " (" + entity + "," + criterion + ") factor=" + std::to_string(value);
    }
    return s;
  }
};

struct RankShift {
  std::string entity;
  int old_rank = 0;
  int new_rank = 0;
};

using Summary = std::map<std::string, double>;

struct SensitivityReport {
  PerturbationSpec spec;
  Summary baseline;
  Summary perturbed;
  Summary deltas;  // (perturbed - baseline) / max(|perturbed|, |baseline|)
  std::vector<RankShift> rank_shifts;
  std::vector<std::string> notes;
  std::optional<bool> baseline_consistent;  // allocation subjects only
  std::optional<bool> perturbed_consistent;
};

/// Symmetric relative change; swapping the arguments negates it.
inline double relative_delta(double baseline, double perturbed) {
  const double scale = std::max(std::abs(baseline), std::abs(perturbed));
  if (scale == 0.0) return 0.0;
  return (perturbed - baseline) / scale;
}

inline Summary compare(const Summary& baseline, const Summary& perturbed) {
  Summary out;
  for (const auto& [key, b] : baseline) {
    auto it = perturbed.find(key);
    if (it != perturbed.end()) out[key] = relative_delta(b, it->second);
  }
  return out;
}

inline Summary summarize_forecast(const TimeSeries& series, double eps,
                                  std::vector<std::string>* notes = nullptr) {
  const auto model = fit_grey_verhulst(series);
  const auto acc = validate(model, series);
  Summary s{{"a", model.a}, {"b", model.b}, {"q", acc.q}, {"c", acc.c}, {"p", acc.p}};
  try {
    const auto sat = saturation(model, eps);
    s["saturation_value"] = sat.value;
    s["saturation_time"] = static_cast<double>(sat.time);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoSaturation) throw;
    if (notes) notes->push_back(e.what());
  }
  return s;
}

inline TimeSeries apply_perturbation(const TimeSeries& series, const PerturbationSpec& spec) {
  const std::size_t n = series.size();
  TimeSeries out = series;
  switch (spec.kind) {
    case PerturbationKind::RemovePoint:
      detail::require_length(n > 0 ? n - 1 : 0, 4, "remove_point");
      if (spec.index < 1 || spec.index > n) {
        throw Error(ErrorCode::InvalidArgument,
                    "remove_point: k=" + std::to_string(spec.index) + " is outside 1.." +
                        std::to_string(n));
      }
      out.values.erase(out.values.begin() + static_cast<std::ptrdiff_t>(spec.index - 1));
      if (out.periods.size() == n) {
        out.periods.erase(out.periods.begin() + static_cast<std::ptrdiff_t>(spec.index - 1));
      }
      if (spec.index == 1 && !out.periods.empty()) out.t0_label = out.periods.front();
      return out;
    case PerturbationKind::SetPoint:
      if (spec.index < 1 || spec.index > n) {
        throw Error(ErrorCode::InvalidArgument,
                    "set_point: k=" + std::to_string(spec.index) + " is outside 1.." +
                        std::to_string(n));
      }
      if (!(spec.value > 0.0)) {
        throw Error(ErrorCode::NonPositiveData, "set_point: value must be positive");
      }
      out.values[spec.index - 1] = spec.value;
      return out;
    default:
      throw Error(ErrorCode::InvalidArgument,
                  std::string(to_string(spec.kind)) + " does not apply to a series");
  }
}

inline SensitivityReport perturb_forecast(const TimeSeries& series, const PerturbationSpec& spec,
                                          double eps = kSaturationEps) {
  SensitivityReport rep;
  rep.spec = spec;
  try {
    const TimeSeries changed = apply_perturbation(series, spec);
    rep.baseline = summarize_forecast(series, eps, &rep.notes);
    rep.perturbed = summarize_forecast(changed, eps, &rep.notes);
  } catch (const Error& e) {
    throw Error(e.code(), spec.describe() + ": " + e.what());
  }
  rep.deltas = compare(rep.baseline, rep.perturbed);
  return rep;
}

struct AllocationSubject {
  PairwiseMatrix matrix;
  IndicatorTable table;
  bool prenormalized = false;
};

struct AllocationOutcome {
  WeightVector weights;
  ScoreTable scores;
  std::vector<int> ranks;
};

inline AllocationOutcome evaluate_allocation(const AllocationSubject& subject) {
  AllocationOutcome out;
  out.weights = principal_weights(subject.matrix);
  out.scores = score_ahp(subject.prenormalized ? subject.table : normalize_indicators(subject.table),
                         out.weights);
  out.ranks = ranks(out.scores.entities, out.scores.scores);
  return out;
}

inline Summary summarize_allocation(const AllocationOutcome& o) {
  Summary s{{"lambda_max", o.weights.lambda_max}, {"ci", o.weights.ci}, {"cr", o.weights.cr}};
  for (std::size_t j = 0; j < o.weights.labels.size(); ++j) {
    s["weight." + o.weights.labels[j]] = o.weights.weights[j];
  }
  for (std::size_t e = 0; e < o.scores.entities.size(); ++e) {
    s["score." + o.scores.entities[e]] = o.scores.scores[e];
    s["share." + o.scores.entities[e]] = o.scores.proportions[e];
  }
  return s;
}

inline AllocationSubject apply_perturbation(const AllocationSubject& subject,
                                            const PerturbationSpec& spec,
                                            std::vector<std::string>* notes = nullptr) {
  AllocationSubject out = subject;
  switch (spec.kind) {
    case PerturbationKind::ScaleMatrixEntry: {
      const std::size_t n = subject.matrix.size();
      if (spec.row < 1 || spec.col < 1 || spec.row > n || spec.col > n || spec.row == spec.col) {
        throw Error(ErrorCode::InvalidArgument,
                    "scale_matrix_entry: (" + std::to_string(spec.row) + "," +
                        std::to_string(spec.col) + ") is not an off-diagonal cell of a " +
                        std::to_string(n) + "x" + std::to_string(n) + " matrix");
      }
      if (!(spec.value > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "scale_matrix_entry: factor must be positive");
      }
      const double target = subject.matrix(spec.row - 1, spec.col - 1) * spec.value;
      if (out.matrix.set_judgment(spec.row - 1, spec.col - 1, target) && notes) {
        notes->push_back("judgment clamped to the [1/9, 9] scale");
      }
      return out;
    }
    case PerturbationKind::ScaleIndicator: {
      const auto e = subject.table.entity_index(spec.entity);
      if (!e) throw Error(ErrorCode::InvalidArgument, "unknown entity '" + spec.entity + "'");
      const auto c = subject.table.criterion_index(spec.criterion);
      if (!c) throw Error(ErrorCode::UnknownCriterion, "unknown criterion '" + spec.criterion + "'");
      out.table.at(*e, *c) *= spec.value;
      return out;
    }
    default:
      throw Error(ErrorCode::InvalidArgument,
                  std::string(to_string(spec.kind)) + " does not apply to an allocation");
  }
}

inline SensitivityReport perturb_allocation(const AllocationSubject& subject,
                                            const PerturbationSpec& spec) {
  SensitivityReport rep;
  rep.spec = spec;
  AllocationOutcome base, pert;
  try {
    const AllocationSubject changed = apply_perturbation(subject, spec, &rep.notes);
    base = evaluate_allocation(subject);
    pert = evaluate_allocation(changed);
  } catch (const Error& e) {
    throw Error(e.code(), spec.describe() + ": " + e.what());
  }
  rep.baseline = summarize_allocation(base);
  rep.perturbed = summarize_allocation(pert);
  rep.deltas = compare(rep.baseline, rep.perturbed);
  rep.baseline_consistent = base.weights.consistent;
  rep.perturbed_consistent = pert.weights.consistent;
  if (!pert.weights.consistent) rep.notes.push_back("perturbed matrix fails the consistency check");
  rep.notes.push_back("rank ties are broken by entity name");
  for (std::size_t e = 0; e < base.scores.entities.size(); ++e) {
    rep.rank_shifts.push_back({base.scores.entities[e], base.ranks[e], pert.ranks[e]});
  }
  return rep;
}

inline SensitivityReport perturb_allocation(const PairwiseMatrix& matrix,
                                            const IndicatorTable& table,
                                            const PerturbationSpec& spec) {
  return perturb_allocation(AllocationSubject{matrix, table, false}, spec);
}

}  // namespace greyahp
