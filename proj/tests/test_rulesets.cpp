#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "ttr/rng.hpp"
#include "ttr/rulesets.hpp"

using namespace ttr;

namespace {

WorkloadSpec simple_workload(double max_runtime = 1000.0) {
  WorkloadSpec w;
  w.id = "w";
  w.validation_target = 0.5;
  w.test_target = 0.4;
  w.max_runtime_s = max_runtime;
  return w;
}

// A trial that reaches the validation target at t_val and the test target at
// t_test >= t_val (runtime seconds); pass a negative time for "never".
TrialRecord trial_reaching(int trial_index, double t_val, double t_test, int study = 0) {
  TrialRecord t;
  t.workload_id = "w";
  t.study_index = study;
  t.trial_index = trial_index;
  std::int64_t step = 0;
  double clock = 0.5;
  t.events.push_back({++step, clock, 0.9, 0.9});  // nothing reached yet
  if (t_val >= 0.0) {
    clock = std::max(clock, t_val);
    t.events.push_back({++step, clock, 0.5, 0.9});
  }
  if (t_test >= 0.0) {
    clock = std::max(clock, t_test);
    t.events.push_back({++step, clock, 0.5, 0.4});
  }
  return t;
}

}  // namespace

TEST_CASE("external study scoring selects by validation and scores by test") {
  const auto workload = simple_workload();
  const std::vector<TrialRecord> trials = {
      trial_reaching(0, 100.0, 120.0),
      trial_reaching(1, 80.0, 200.0),
      trial_reaching(2, -1.0, -1.0),
  };
  // Trial 1 wins selection with t_val = 80; its *test* time scores.
  CHECK(score_study_external(trials, workload) == ExtendedTime::finite(200.0));
}

TEST_CASE("external study scoring edge cases") {
  const auto workload = simple_workload();

  SECTION("all trials missing the validation target score infinite") {
    const std::vector<TrialRecord> trials = {trial_reaching(0, -1.0, -1.0),
                                             trial_reaching(1, -1.0, -1.0)};
    CHECK(score_study_external(trials, workload).is_infinite());
  }

  SECTION("a selected trial that never reaches the test target scores infinite") {
    const std::vector<TrialRecord> trials = {trial_reaching(0, 50.0, -1.0)};
    CHECK(score_study_external(trials, workload).is_infinite());
  }

  SECTION("selection ties break toward the lower trial index") {
    const std::vector<TrialRecord> trials = {trial_reaching(7, 50.0, 300.0),
                                             trial_reaching(3, 50.0, 400.0)};
    CHECK(score_study_external(trials, workload) == ExtendedTime::finite(400.0));
  }

  SECTION("trials from different studies are rejected") {
    const std::vector<TrialRecord> trials = {trial_reaching(0, 50.0, 60.0, 0),
                                             trial_reaching(1, 50.0, 60.0, 1)};
    try {
      score_study_external(trials, workload);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == "MixedStudies");
    }
  }

  SECTION("the workload budget bounds both clocks") {
    // Validation reached in budget, test only beyond it.
    const std::vector<TrialRecord> trials = {trial_reaching(0, 900.0, 1100.0)};
    CHECK(score_study_external(trials, workload).is_infinite());
  }

  SECTION("an empty study scores infinite") {
    CHECK(score_study_external({}, workload).is_infinite());
  }
}

TEST_CASE("self-tuning scoring uses the tripled budget and the test target only") {
  auto workload = simple_workload(101780.0);

  // Reaches the test target at 150000 s: inside 3 x 101780 = 305340 s.
  CHECK(score_study_selftuning(trial_reaching(0, 1.0, 150000.0), workload, 3.0) ==
        ExtendedTime::finite(150000.0));
  // 310000 s exceeds the tripled budget.
  CHECK(score_study_selftuning(trial_reaching(0, 1.0, 310000.0), workload, 3.0).is_infinite());
  // Never reaching the test target.
  CHECK(score_study_selftuning(trial_reaching(0, 1.0, -1.0), workload, 3.0).is_infinite());
}

TEST_CASE("workload score is the median study time") {
  const auto f = [](double v) { return ExtendedTime::finite(v); };
  const auto inf = ExtendedTime::infinite();

  CHECK(score_workload({f(100), f(120), f(90), inf, f(110)}) == f(110));
  CHECK(score_workload({inf, inf, inf, f(50), f(60)}).is_infinite());
  CHECK(score_workload({f(7), f(7), f(7), f(7), f(7)}) == f(7));

  try {
    score_workload({f(1), f(2)});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "EvenStudyCount");
  }
}

TEST_CASE("workload score is permutation invariant and majority-rules on failures") {
  SplitMix64 rng(88);
  for (int i = 0; i < 200; ++i) {
    std::vector<ExtendedTime> scores;
    int infinite_count = 0;
    for (int k = 0; k < 5; ++k) {
      if (rng.next_unit() < 0.4) {
        scores.push_back(ExtendedTime::infinite());
        ++infinite_count;
      } else {
        scores.push_back(ExtendedTime::finite(rng.next_unit() * 100.0));
      }
    }
    const auto median = score_workload(scores);
    auto shuffled = scores;
    rng.shuffle(shuffled);
    CHECK(score_workload(shuffled) == median);
    CHECK(median.is_infinite() == (infinite_count >= 3));
  }
}

TEST_CASE("shrinking the budget never decreases a study score") {
  SplitMix64 rng(31);
  for (int i = 0; i < 500; ++i) {
    auto workload = simple_workload(200.0 + rng.next_unit() * 800.0);
    std::vector<TrialRecord> trials;
    const int n = 1 + static_cast<int>(rng.next_below(5));
    for (int k = 0; k < n; ++k) {
      const double t_val = rng.next_unit() < 0.3 ? -1.0 : 2.0 + rng.next_unit() * 900.0;
      const double t_test =
          t_val < 0.0 || rng.next_unit() < 0.2 ? -1.0 : t_val + rng.next_unit() * 200.0;
      trials.push_back(trial_reaching(k, t_val, t_test));
    }
    const auto full = score_study_external(trials, workload);
    auto tighter = workload;
    tighter.max_runtime_s = workload.max_runtime_s * (0.3 + 0.6 * rng.next_unit());
    const auto clipped = score_study_external(trials, tighter);
    CHECK(clipped >= full);
  }
}

TEST_CASE("ruleset configuration invariants") {
  CHECK_NOTHROW(RulesetConfig::external(5, 20).validate());
  CHECK_NOTHROW(RulesetConfig::self_tuning(5, 3.0).validate());
  CHECK_THROWS_AS(RulesetConfig::external(0, 20).validate(), Error);
  CHECK_THROWS_AS(RulesetConfig::external(4, 20).validate(), Error);
  CHECK_THROWS_AS(RulesetConfig::external(5, 0).validate(), Error);
  CHECK_THROWS_AS(RulesetConfig::self_tuning(5, 0.5).validate(), Error);
}
