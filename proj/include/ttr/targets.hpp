#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ttr/core.hpp"
#include "ttr/curves.hpp"

namespace ttr {

// One seeded repetition of the chosen configuration: the best validation and
// test values it reached.
struct RerunOutcome {
  int seed_index = 0;
  double best_validation = 0.0;
  double best_test = 0.0;
};

struct SelectedTrial {
  std::size_t position = 0;  // index into the trial list passed in
  int study_index = 0;
  int trial_index = 0;
  double best_validation = 0.0;
};

// Best validation value a trial reached within the budget, or nothing if no
// in-budget event exists (or the trial did not complete).
inline std::optional<double> best_validation_within(const TrialRecord& trial,
                                                    ExtendedTime budget,
                                                    MetricDirection direction,
                                                    Clock clock = Clock::Runtime) {
  if (trial.status != TrialStatus::Completed) return std::nullopt;
  std::optional<double> best;
  for (const EvalEvent& event : trial.events) {
    const double clock_value =
        clock == Clock::Runtime ? event.runtime_s : static_cast<double>(event.step);
    if (budget.is_finite() && clock_value > budget.value()) continue;
    if (!best.has_value() || better(event.validation_metric, *best, direction)) {
      best = event.validation_metric;
    }
  }
  return best;
}

inline std::optional<double> best_test_within(const TrialRecord& trial, ExtendedTime budget,
                                              MetricDirection direction,
                                              Clock clock = Clock::Runtime) {
  if (trial.status != TrialStatus::Completed) return std::nullopt;
  std::optional<double> best;
  for (const EvalEvent& event : trial.events) {
    const double clock_value =
        clock == Clock::Runtime ? event.runtime_s : static_cast<double>(event.step);
    if (budget.is_finite() && clock_value > budget.value()) continue;
    if (!event.test_metric.has_value()) continue;
    if (!best.has_value() || better(*event.test_metric, *best, direction)) {
      best = *event.test_metric;
    }
  }
  return best;
}

// The trial with the best best-so-far validation metric; ties go to the
// lowest trial index (then study index, then list position).
inline SelectedTrial select_best_config(const std::vector<TrialRecord>& trials,
                                        MetricDirection direction,
                                        ExtendedTime budget = ExtendedTime::infinite(),
                                        Clock clock = Clock::Runtime) {
  std::optional<SelectedTrial> selected;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto best = best_validation_within(trials[i], budget, direction, clock);
    if (!best.has_value()) continue;
    const SelectedTrial candidate{i, trials[i].study_index, trials[i].trial_index, *best};
    if (!selected.has_value() || better(candidate.best_validation, selected->best_validation, direction) ||
        (candidate.best_validation == selected->best_validation &&
         (candidate.trial_index < selected->trial_index ||
          (candidate.trial_index == selected->trial_index &&
           candidate.study_index < selected->study_index)))) {
      selected = candidate;
    }
  }
  if (!selected.has_value()) {
    throw Error("NoCompletedTrials", "no completed trial with an in-budget eval event");
  }
  return *selected;
}

// Sample median of the per-seed best validation values; for even counts, the
// arithmetic mean of the two middle order statistics.
inline double validation_target(const std::vector<RerunOutcome>& reruns) {
  if (reruns.empty()) throw Error("EmptyReruns", "need at least one rerun");
  std::vector<double> values;
  values.reserve(reruns.size());
  for (const auto& rerun : reruns) values.push_back(rerun.best_validation);
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Worst best_test (inclusive comparison) among the reruns whose
// best_validation meets the validation target.
inline double test_target(const std::vector<RerunOutcome>& reruns, double validation_target_value,
                          MetricDirection direction) {
  std::optional<double> worst;
  for (const auto& rerun : reruns) {
    if (!meets(rerun.best_validation, validation_target_value, direction)) continue;
    if (!worst.has_value() || worse(rerun.best_test, *worst, direction)) {
      worst = rerun.best_test;
    }
  }
  if (!worst.has_value()) {
    throw Error("NoQualifyingReruns", "no rerun meets the validation target");
  }
  return *worst;
}

// Target setting runs under a reduced clock: 0.75x the submission budget.
inline double target_setting_budget(double max_runtime_s) {
  if (!(max_runtime_s > 0.0)) {
    throw Error("NonPositiveBudget", "max_runtime must be > 0, got " + format_double(max_runtime_s));
  }
  return 0.75 * max_runtime_s;
}

}  // namespace ttr
