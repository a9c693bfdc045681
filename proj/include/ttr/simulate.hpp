#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ttr/config.hpp"
#include "ttr/core.hpp"
#include "ttr/pipeline.hpp"
#include "ttr/rng.hpp"
#include "ttr/searchspace.hpp"

namespace ttr {

// Synthetic training curve: metric(step) = asymptote + amplitude *
// exp(-rate * step) + noise. The noiseless curve must approach the asymptote
// from the losing side, so amplitude >= 0 under Minimize and <= 0 under
// Maximize.
struct CurveModel {
  double asymptote = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;
  double noise_scale = 0.0;
  MetricDirection direction = MetricDirection::Minimize;

  void validate() const {
    if (!(rate > 0.0)) throw Error("InvalidCurveModel", "rate must be > 0");
    if (!(noise_scale >= 0.0)) throw Error("InvalidCurveModel", "noise_scale must be >= 0");
    const bool monotone = direction == MetricDirection::Minimize ? amplitude >= 0.0
                                                                 : amplitude <= 0.0;
    if (!monotone) {
      throw Error("InvalidCurveModel", "noiseless curve must be monotone toward the asymptote");
    }
  }

  double noiseless_at(std::int64_t step) const {
    return asymptote + amplitude * std::exp(-rate * static_cast<double>(step));
  }
};

// Deterministic synthetic trial: eval events at multiples of eval_interval,
// runtime proportional to steps, validation and test drawn from the same
// curve with independent noise.
inline TrialRecord generate_trial(const CurveModel& model, std::int64_t eval_interval,
                                  std::int64_t num_steps, double seconds_per_step,
                                  std::uint64_t seed) {
  model.validate();
  if (eval_interval < 1 || eval_interval > num_steps) {
    throw Error("InvalidBudget", "need 1 <= eval_interval <= num_steps");
  }
  if (!(seconds_per_step > 0.0)) throw Error("InvalidBudget", "seconds_per_step must be > 0");

  TrialRecord trial;
  for (std::int64_t step = eval_interval; step <= num_steps; step += eval_interval) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(step)));
    EvalEvent event;
    event.step = step;
    event.runtime_s = static_cast<double>(step) * seconds_per_step;
    const double base = model.noiseless_at(step);
    event.validation_metric = base + model.noise_scale * rng.next_normal();
    event.test_metric = base + model.noise_scale * rng.next_normal();
    trial.events.push_back(event);
  }
  return trial;
}

// A mock contestant: a curve for every (workload, hyperparameter point).
struct MockSubmission {
  std::string id;
  std::function<CurveModel(const WorkloadSpec&, const HyperparameterPoint&)> family;
};

struct MockCompetitionOutcome {
  ScoringOutcome scoring;
  TrialDataset dataset;
  std::string log_text;  // the emitted trial log, one JSONL record per event
};

// Synthesizes a full competition: samples tuning points per (submission,
// workload, study), generates trials, and runs the entire scoring path.
// Deterministic given (config, submissions, seed).
inline MockCompetitionOutcome run_mock_competition(const BenchmarkConfig& config,
                                                   const std::vector<MockSubmission>& submissions,
                                                   std::uint64_t seed) {
  validate_benchmark_config(config);
  constexpr std::int64_t kEvalsPerTrial = 20;
  constexpr std::int64_t kStepsPerEval = 5;
  constexpr std::int64_t kNumSteps = kEvalsPerTrial * kStepsPerEval;

  TrialDataset dataset;
  for (std::size_t si = 0; si < submissions.size(); ++si) {
    const MockSubmission& submission = submissions[si];
    for (std::size_t wi = 0; wi < config.workloads.size(); ++wi) {
      const WorkloadSpec& workload = config.workloads[wi];
      const double budget_s = config.ruleset.kind == RulesetKind::SelfTuning
                                  ? config.ruleset.budget_multiplier * workload.max_runtime_s
                                  : workload.max_runtime_s;
      const double seconds_per_step = budget_s / static_cast<double>(kNumSteps);

      for (int study = 0; study < config.ruleset.studies; ++study) {
        std::vector<HyperparameterPoint> points;
        if (config.ruleset.kind == RulesetKind::ExternalTuning) {
          const auto space_it = config.search_spaces.find(submission.id);
          if (space_it == config.search_spaces.end()) {
            throw Error("MissingSearchSpace", "no search space for submission '" + submission.id + "'");
          }
          const std::uint64_t study_seed = mix_seed(seed, si, wi, static_cast<std::uint64_t>(study));
          const auto n = static_cast<std::size_t>(config.ruleset.trials_per_study);
          points = space_it->second.kind == SearchSpace::Kind::Box
                       ? sample_quasirandom(space_it->second, n, study_seed)
                       : sample_optlist(space_it->second, n, study_seed);
        } else {
          points.emplace_back();  // self-tuning: one run, no tunables
        }

        for (std::size_t ti = 0; ti < points.size(); ++ti) {
          const CurveModel model = submission.family(workload, points[ti]);
          TrialRecord trial =
              generate_trial(model, kStepsPerEval, kNumSteps, seconds_per_step,
                             mix_seed(seed, si, wi, static_cast<std::uint64_t>(study), ti));
          trial.workload_id = workload.id;
          trial.study_index = study;
          trial.trial_index = static_cast<int>(ti);
          trial.point = points[ti];
          dataset.trials.emplace(
              TrialKey{submission.id, workload.id, study, static_cast<int>(ti)},
              std::move(trial));
        }
      }
    }
  }

  MockCompetitionOutcome outcome;
  outcome.scoring = score_dataset(config, dataset);
  outcome.log_text = serialize_trial_log(dataset);
  outcome.dataset = std::move(dataset);
  return outcome;
}

}  // namespace ttr
