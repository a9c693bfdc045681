#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttr/core.hpp"
#include "ttr/rng.hpp"
#include "ttr/rulesets.hpp"

namespace ttr {

// val(w, h) for a grid of hyperparameter points and workloads. Cells may be
// missing (the trial failed); missingness is explicit, never a sentinel.
struct ValidationTable {
  std::vector<std::string> workload_ids;
  std::vector<MetricDirection> directions;  // parallel to workload_ids
  std::vector<std::string> point_ids;
  std::vector<std::vector<std::optional<double>>> values;  // [point][workload]

  void require_rectangular() const {
    if (workload_ids.size() != directions.size()) {
      throw Error("LengthMismatch", "one direction per workload required");
    }
    if (point_ids.size() != values.size()) {
      throw Error("LengthMismatch", "one value row per point required");
    }
    for (const auto& row : values) {
      if (row.size() != workload_ids.size()) {
        throw Error("LengthMismatch", "table is not rectangular");
      }
    }
  }
};

struct PhiResult {
  std::vector<ExtendedTime> per_point_phi;  // parallel to point_ids
  ExtendedTime phi;                         // min over points
  std::size_t best_point = 0;               // argmin, lowest index on ties
  std::vector<ExtendedTime> per_workload_phi;  // contributions of the best point
};

// Worst-case relative degradation of sharing one hyperparameter point across
// all workloads. phi(h) = max_w |val(w,h) - best_w| / |best_w|, with missing
// values contributing Infinite; the result is the point minimizing phi.
inline PhiResult phi_metric(const ValidationTable& table) {
  table.require_rectangular();
  if (table.point_ids.empty()) throw Error("EmptyTable", "no hyperparameter points");

  const std::size_t n_workloads = table.workload_ids.size();
  std::vector<double> best(n_workloads);
  for (std::size_t w = 0; w < n_workloads; ++w) {
    std::optional<double> val_best;
    for (std::size_t h = 0; h < table.point_ids.size(); ++h) {
      const auto& cell = table.values[h][w];
      if (!cell.has_value()) continue;
      if (!val_best.has_value() || better(*cell, *val_best, table.directions[w])) {
        val_best = *cell;
      }
    }
    if (!val_best.has_value()) {
      throw Error("EmptyWorkloadColumn",
                  "workload '" + table.workload_ids[w] + "' has no successful trial");
    }
    if (*val_best == 0.0) {
      throw Error("ZeroBestValue", "workload '" + table.workload_ids[w] +
                                       "': best value is zero, degradation undefined");
    }
    best[w] = *val_best;
  }

  const auto contribution = [&](std::size_t h, std::size_t w) {
    const auto& cell = table.values[h][w];
    if (!cell.has_value()) return ExtendedTime::infinite();
    return ExtendedTime::finite(std::abs(*cell - best[w]) / std::abs(best[w]));
  };

  PhiResult result;
  result.per_point_phi.reserve(table.point_ids.size());
  for (std::size_t h = 0; h < table.point_ids.size(); ++h) {
    ExtendedTime worst = ExtendedTime::finite(0.0);
    for (std::size_t w = 0; w < n_workloads; ++w) {
      const ExtendedTime c = contribution(h, w);
      if (c > worst) worst = c;
    }
    result.per_point_phi.push_back(worst);
  }

  result.best_point = 0;
  for (std::size_t h = 1; h < result.per_point_phi.size(); ++h) {
    if (result.per_point_phi[h] < result.per_point_phi[result.best_point]) {
      result.best_point = h;
    }
  }
  result.phi = result.per_point_phi[result.best_point];
  result.per_workload_phi.reserve(n_workloads);
  for (std::size_t w = 0; w < n_workloads; ++w) {
    result.per_workload_phi.push_back(contribution(result.best_point, w));
  }
  return result;
}

namespace detail {

// Linear-interpolation quantile of a sorted sample (the convention whose
// p = 0.5 case is the mean of the two middle order statistics).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace detail

struct TuningSimulation {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;

  friend bool operator==(const TuningSimulation&, const TuningSimulation&) = default;
};

// Simulates tuning with a budget of T trials: each replica draws T values
// from the pool with replacement and keeps the best; reports the median and
// quartiles of the replica bests. Replica r uses the sub-seed mix(seed, r),
// so replicas may be evaluated in any order or concurrently.
inline TuningSimulation simulate_tuning(const std::vector<double>& pool, std::size_t budget,
                                        std::size_t n_sims, std::uint64_t seed,
                                        MetricDirection direction) {
  if (pool.empty()) throw Error("EmptyPool", "need at least one trial result");
  if (budget < 1) throw Error("InvalidBudget", "budget must be >= 1");
  if (n_sims < 1) throw Error("InvalidBudget", "n_sims must be >= 1");

  std::vector<double> bests(n_sims);
  for (std::size_t r = 0; r < n_sims; ++r) {
    SplitMix64 rng(mix_seed(seed, r));
    double best = pool[rng.next_below(pool.size())];
    for (std::size_t t = 1; t < budget; ++t) {
      const double draw = pool[rng.next_below(pool.size())];
      if (better(draw, best, direction)) best = draw;
    }
    bests[r] = best;
  }
  std::sort(bests.begin(), bests.end());
  return {detail::quantile_sorted(bests, 0.5), detail::quantile_sorted(bests, 0.25),
          detail::quantile_sorted(bests, 0.75)};
}

struct TransferRanks {
  int base_to_variant = 0;  // rank of the base optimum within the variant results
  int variant_to_base = 0;  // rank of the variant optimum within the base results
  int min_rank = 0;

  friend bool operator==(const TransferRanks&, const TransferRanks&) = default;
};

namespace detail {

inline std::size_t arg_best(const std::vector<double>& values, MetricDirection direction) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (better(values[i], values[best], direction)) best = i;
  }
  return best;
}

// Number of points strictly better than values[index]; ties do not count.
inline int rank_within(const std::vector<double>& values, std::size_t index,
                       MetricDirection direction) {
  int rank = 0;
  for (const double v : values) {
    if (better(v, values[index], direction)) ++rank;
  }
  return rank;
}

}  // namespace detail

// How well each workload's optimal point transfers to the other workload:
// 0-indexed counts of strictly better points, so identical optima give ranks
// of zero.
inline TransferRanks transfer_ranks(const std::vector<double>& base,
                                    const std::vector<double>& variant,
                                    MetricDirection direction) {
  if (base.size() != variant.size() || base.empty()) {
    throw Error("MismatchedPointSets", "both workloads must score the same point list");
  }
  const std::size_t best_base = detail::arg_best(base, direction);
  const std::size_t best_variant = detail::arg_best(variant, direction);
  TransferRanks ranks;
  ranks.base_to_variant = detail::rank_within(variant, best_base, direction);
  ranks.variant_to_base = detail::rank_within(base, best_variant, direction);
  ranks.min_rank = std::min(ranks.base_to_variant, ranks.variant_to_base);
  return ranks;
}

struct CostEstimate {
  double one_hyperparameter_h = 0.0;
  double scoring_h = 0.0;
  std::optional<double> tuning_h;  // external tuning only
};

// Machine-hours to evaluate a submission: running every workload once with a
// single hyperparameter (held-out variants double it, the self-tuning budget
// multiplier stretches it), times studies for scoring, times trials per
// study for full tuning.
inline CostEstimate estimate_costs(const std::map<std::string, double>& budgets_s,
                                   const RulesetConfig& ruleset, bool include_heldout,
                                   const std::optional<std::vector<std::string>>& subset = {}) {
  ruleset.validate();
  double total_s = 0.0;
  if (subset.has_value()) {
    for (const auto& id : *subset) {
      const auto it = budgets_s.find(id);
      if (it == budgets_s.end()) {
        throw Error("UnknownWorkloadInSubset", "no workload '" + id + "' in the budget table");
      }
      total_s += it->second;
    }
  } else {
    for (const auto& [id, seconds] : budgets_s) total_s += seconds;
  }
  if (!(total_s > 0.0)) throw Error("NonPositiveBudget", "budgets must sum to > 0");

  double one_hp = total_s / 3600.0;
  if (include_heldout) one_hp *= 2.0;
  if (ruleset.kind == RulesetKind::SelfTuning) one_hp *= ruleset.budget_multiplier;

  CostEstimate est;
  est.one_hyperparameter_h = one_hp;
  est.scoring_h = static_cast<double>(ruleset.studies) * one_hp;
  if (ruleset.kind == RulesetKind::ExternalTuning) {
    est.tuning_h = static_cast<double>(ruleset.trials_per_study) * est.scoring_h;
  }
  return est;
}

}  // namespace ttr
