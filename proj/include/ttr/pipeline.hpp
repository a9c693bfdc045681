#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttr/config.hpp"
#include "ttr/io.hpp"
#include "ttr/rulesets.hpp"
#include "ttr/scoring.hpp"
#include "ttr/targets.hpp"

namespace ttr {

struct ScoringOutcome {
  ScoreMatrix fixed_times;    // raw per-(submission, fixed workload) times
  ScoreMatrix heldout_times;  // empty workload list when no held-out workloads
  ScoreMatrix gated_times;    // fixed times after the held-out gate
  std::vector<PerformanceProfile> profiles;  // per submission, over gated times
  std::vector<BenchmarkScore> scores;        // aligned with profiles
  std::vector<LeaderboardRow> leaderboard;   // sorted: score desc, id asc
};

namespace detail {

// Per-workload time for one submission: every configured study scored, then
// the median across studies. Studies with no logged trials count as Infinite
// (a submission cannot gain by logging less, selection being a minimum).
inline ExtendedTime score_submission_workload(const BenchmarkConfig& config,
                                              const TrialDataset& dataset,
                                              const std::string& submission,
                                              const WorkloadSpec& workload) {
  const auto by_study = dataset.by_study(submission, workload.id);
  for (const auto& [study, trials] : by_study) {
    if (study < 0 || study >= config.ruleset.studies) {
      throw Error("StudyIndexOutOfRange",
                  submission + "/" + workload.id + ": study " + std::to_string(study) +
                      " outside the configured " + std::to_string(config.ruleset.studies));
    }
  }

  std::vector<ExtendedTime> study_scores;
  study_scores.reserve(static_cast<std::size_t>(config.ruleset.studies));
  for (int study = 0; study < config.ruleset.studies; ++study) {
    const auto it = by_study.find(study);
    if (it == by_study.end()) {
      study_scores.push_back(ExtendedTime::infinite());
      continue;
    }
    std::vector<TrialRecord> trials;
    trials.reserve(it->second.size());
    for (const TrialRecord* t : it->second) trials.push_back(*t);

    if (config.ruleset.kind == RulesetKind::ExternalTuning) {
      if (trials.size() > static_cast<std::size_t>(config.ruleset.trials_per_study)) {
        throw Error("TooManyTrials",
                    submission + "/" + workload.id + "/study " + std::to_string(study) + ": " +
                        std::to_string(trials.size()) + " trials logged, allowed " +
                        std::to_string(config.ruleset.trials_per_study));
      }
      study_scores.push_back(score_study_external(trials, workload));
    } else {
      if (trials.size() != 1) {
        throw Error("TooManyTrials", submission + "/" + workload.id + "/study " +
                                         std::to_string(study) +
                                         ": self-tuning allows exactly one trial per study");
      }
      study_scores.push_back(
          score_study_selftuning(trials.front(), workload, config.ruleset.budget_multiplier));
    }
  }
  return score_workload(std::move(study_scores));
}

}  // namespace detail

// Runs the full arbitration: per-study scoring, median aggregation, the
// held-out gate, performance profiles, and benchmark scores.
inline ScoringOutcome score_dataset(const BenchmarkConfig& config, const TrialDataset& dataset) {
  const std::vector<std::string> submissions = dataset.submissions();
  if (submissions.empty()) throw Error("EmptyMatrix", "dataset contains no trials");

  std::vector<std::string> fixed_ids;
  for (const WorkloadSpec* w : config.fixed_workloads()) fixed_ids.push_back(w->id);
  std::vector<std::string> heldout_ids;
  std::map<std::string, std::string> linkage;  // held-out id -> fixed id
  for (const WorkloadSpec* w : config.heldout_workloads()) {
    heldout_ids.push_back(w->id);
    linkage.emplace(w->id, *w->heldout_base);
  }
  if (fixed_ids.empty()) throw Error("EmptyMatrix", "config lists no fixed workloads");

  ScoringOutcome outcome;
  outcome.fixed_times = ScoreMatrix(submissions, fixed_ids);
  outcome.heldout_times = ScoreMatrix(submissions, heldout_ids);
  for (std::size_t s = 0; s < submissions.size(); ++s) {
    for (std::size_t w = 0; w < fixed_ids.size(); ++w) {
      outcome.fixed_times.at(s, w) = detail::score_submission_workload(
          config, dataset, submissions[s], config.workload(fixed_ids[w]));
    }
    for (std::size_t w = 0; w < heldout_ids.size(); ++w) {
      outcome.heldout_times.at(s, w) = detail::score_submission_workload(
          config, dataset, submissions[s], config.workload(heldout_ids[w]));
    }
  }

  outcome.gated_times =
      apply_heldout_gate(outcome.fixed_times, outcome.heldout_times, linkage, config.r_max);

  const ScoreMatrix ratios = performance_ratios(outcome.gated_times);
  for (std::size_t s = 0; s < submissions.size(); ++s) {
    PerformanceProfile profile =
        performance_profile(ratio_row(ratios, s), fixed_ids.size(), submissions[s]);
    outcome.scores.push_back(benchmark_score(profile, config.r_max));
    outcome.profiles.push_back(std::move(profile));
  }

  for (std::size_t s = 0; s < submissions.size(); ++s) {
    LeaderboardRow row;
    row.submission = submissions[s];
    row.score = outcome.scores[s].value;
    for (std::size_t w = 0; w < fixed_ids.size(); ++w) {
      row.times.push_back(outcome.fixed_times.at(s, w));
    }
    outcome.leaderboard.push_back(std::move(row));
  }
  std::sort(outcome.leaderboard.begin(), outcome.leaderboard.end(),
            [](const LeaderboardRow& a, const LeaderboardRow& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.submission < b.submission;
            });
  return outcome;
}

struct WorkloadTargets {
  std::string workload_id;
  std::string best_submission;
  SelectedTrial best;
  double validation_target = 0.0;
  double test_target = 0.0;
};

// Target setting from logs: pick the best configuration across every logged
// trial of a workload under the 0.75x budget, then turn its seeded rerun
// logs into the median validation target and worst-case qualifying test
// target. Rerun trials are keyed by trial index (one trial = one seed).
inline std::vector<WorkloadTargets> derive_targets(const BenchmarkConfig& config,
                                                   const TrialDataset& tuning_logs,
                                                   const TrialDataset& rerun_logs) {
  std::vector<WorkloadTargets> out;
  for (const WorkloadSpec& workload : config.workloads) {
    const ExtendedTime budget = ExtendedTime::finite(target_setting_budget(workload.max_runtime_s));

    WorkloadTargets targets;
    targets.workload_id = workload.id;

    std::optional<SelectedTrial> best;
    for (const auto& [key, trial] : tuning_logs.trials) {
      if (key.workload != workload.id) continue;
      const auto value = best_validation_within(trial, budget, workload.direction);
      if (!value.has_value()) continue;
      if (!best.has_value() || better(*value, best->best_validation, workload.direction)) {
        best = SelectedTrial{0, key.study, key.trial, *value};
        targets.best_submission = key.submission;
      }
    }
    if (!best.has_value()) {
      throw Error("NoCompletedTrials", "no in-budget trial logged for workload '" + workload.id + "'");
    }
    targets.best = *best;

    std::vector<RerunOutcome> reruns;
    for (const auto& [key, trial] : rerun_logs.trials) {
      if (key.workload != workload.id) continue;
      const auto val = best_validation_within(trial, budget, workload.direction);
      const auto test = best_test_within(trial, budget, workload.direction);
      if (!val.has_value() || !test.has_value()) continue;
      reruns.push_back({key.trial, *val, *test});
    }
    if (reruns.empty()) {
      throw Error("MissingReruns", "no rerun logs for workload '" + workload.id + "'");
    }
    targets.validation_target = validation_target(reruns);
    targets.test_target = test_target(reruns, targets.validation_target, workload.direction);
    out.push_back(std::move(targets));
  }
  return out;
}

inline std::string targets_csv(const std::vector<WorkloadTargets>& targets) {
  std::string out = "workload,validation_target,test_target,best_submission,best_study,best_trial\n";
  for (const auto& t : targets) {
    out += t.workload_id;
    out += ',';
    out += format_double(t.validation_target);
    out += ',';
    out += format_double(t.test_target);
    out += ',';
    out += t.best_submission;
    out += ',';
    out += std::to_string(t.best.study_index);
    out += ',';
    out += std::to_string(t.best.trial_index);
    out += '\n';
  }
  return out;
}

}  // namespace ttr
