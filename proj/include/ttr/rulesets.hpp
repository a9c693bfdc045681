#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "ttr/core.hpp"
#include "ttr/curves.hpp"

namespace ttr {

enum class RulesetKind { ExternalTuning, SelfTuning };

// The tuning regime. Studies simulate independent practitioners; their count
// is kept odd so the median never has to average two studies.
struct RulesetConfig {
  RulesetKind kind = RulesetKind::ExternalTuning;
  int studies = 5;
  int trials_per_study = 20;      // external tuning
  double budget_multiplier = 3.0;  // self-tuning

  static RulesetConfig external(int studies = 5, int trials_per_study = 20) {
    RulesetConfig c;
    c.kind = RulesetKind::ExternalTuning;
    c.studies = studies;
    c.trials_per_study = trials_per_study;
    return c;
  }

  static RulesetConfig self_tuning(int studies = 5, double budget_multiplier = 3.0) {
    RulesetConfig c;
    c.kind = RulesetKind::SelfTuning;
    c.studies = studies;
    c.budget_multiplier = budget_multiplier;
    return c;
  }

  void validate() const {
    if (studies < 1 || studies % 2 == 0) {
      throw Error("InvalidStudyCount", "studies must be odd and >= 1, got " + std::to_string(studies));
    }
    if (trials_per_study < 1) {
      throw Error("NonPositiveBudget",
                  "trials_per_study must be >= 1, got " + std::to_string(trials_per_study));
    }
    if (!(budget_multiplier >= 1.0)) {
      throw Error("NonPositiveBudget",
                  "budget_multiplier must be >= 1, got " + format_double(budget_multiplier));
    }
  }

  friend bool operator==(const RulesetConfig&, const RulesetConfig&) = default;
};

// External tuning: among one study's trials, select the one that reaches the
// validation target fastest (ties: lowest trial index), then score it by its
// time to the test target. One workload budget bounds both clocks.
inline ExtendedTime score_study_external(const std::vector<TrialRecord>& trials,
                                         const WorkloadSpec& workload) {
  for (std::size_t i = 1; i < trials.size(); ++i) {
    if (trials[i].study_index != trials[0].study_index) {
      throw Error("MixedStudies", "trials from studies " + std::to_string(trials[0].study_index) +
                                      " and " + std::to_string(trials[i].study_index));
    }
  }

  const ExtendedTime budget = ExtendedTime::finite(workload.max_runtime_s);
  const TrialRecord* selected = nullptr;
  ExtendedTime selected_t_val = ExtendedTime::infinite();
  for (const TrialRecord& trial : trials) {
    const ExtendedTime t_val = time_to_target(trial, workload.validation_target,
                                              workload.direction, MetricKind::Validation, budget);
    if (t_val.is_infinite()) continue;
    if (selected == nullptr || t_val < selected_t_val ||
        (t_val == selected_t_val && trial.trial_index < selected->trial_index)) {
      selected = &trial;
      selected_t_val = t_val;
    }
  }
  if (selected == nullptr) return ExtendedTime::infinite();

  // Only the selected trial's log needs test metrics.
  return time_to_target(*selected, workload.test_target, workload.direction, MetricKind::Test,
                        budget);
}

// Self-tuning: a single on-the-clock run per study, scored by the time to the
// test target alone, under the multiplied budget.
inline ExtendedTime score_study_selftuning(const TrialRecord& trial, const WorkloadSpec& workload,
                                           double budget_multiplier = 3.0) {
  const ExtendedTime budget = ExtendedTime::finite(budget_multiplier * workload.max_runtime_s);
  return time_to_target(trial, workload.test_target, workload.direction, MetricKind::Test, budget);
}

// Median of the per-study times; Infinite sorts last, so the result is
// Infinite exactly when a majority of studies failed.
inline ExtendedTime score_workload(std::vector<ExtendedTime> study_scores) {
  if (study_scores.empty() || study_scores.size() % 2 == 0) {
    throw Error("EvenStudyCount",
                "need an odd number of study scores, got " + std::to_string(study_scores.size()));
  }
  std::sort(study_scores.begin(), study_scores.end());
  return study_scores[study_scores.size() / 2];
}

}  // namespace ttr
