#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ttr/curves.hpp"
#include "ttr/simulate.hpp"

using namespace ttr;

namespace {

CurveModel clean_curve(double asymptote, double amplitude, double rate) {
  CurveModel m;
  m.asymptote = asymptote;
  m.amplitude = amplitude;
  m.rate = rate;
  m.noise_scale = 0.0;
  m.direction = MetricDirection::Minimize;
  return m;
}

// A small two-workload benchmark with one held-out variant.
BenchmarkConfig mock_config() {
  BenchmarkConfig config;
  WorkloadSpec a;
  a.id = "alpha";
  a.validation_target = 0.30;
  a.test_target = 0.32;
  a.max_runtime_s = 1000.0;
  WorkloadSpec b;
  b.id = "beta";
  b.validation_target = 0.20;
  b.test_target = 0.22;
  b.max_runtime_s = 2000.0;
  WorkloadSpec av;
  av.id = "alpha_variant";
  av.heldout_base = "alpha";
  av.validation_target = 0.33;
  av.test_target = 0.35;
  av.max_runtime_s = 1000.0;
  config.workloads = {a, b, av};
  config.ruleset = RulesetConfig::external(3, 4);
  config.search_spaces.emplace(
      "good", SearchSpace::box({DimensionSpec::log_uniform("reach", 0.1, 1.0)}));
  config.search_spaces.emplace(
      "hopeless", SearchSpace::box({DimensionSpec::log_uniform("reach", 0.1, 1.0)}));
  return config;
}

// Curves that dive below every target quickly; tuning moves the asymptote.
MockSubmission good_submission(const std::string& id = "good") {
  return {id, [](const WorkloadSpec& w, const HyperparameterPoint& p) {
            CurveModel m;
            const double binding = std::min(w.validation_target, w.test_target);
            m.asymptote = binding * (1.0 - 0.5 * p.real_or("reach", 0.5));
            m.amplitude = 1.0;
            m.rate = 0.15;
            m.noise_scale = 0.0;
            m.direction = w.direction;
            return m;
          }};
}

MockSubmission hopeless_submission() {
  return {"hopeless", [](const WorkloadSpec& w, const HyperparameterPoint&) {
            CurveModel m;
            m.asymptote = w.validation_target * 3.0;  // never close to target
            m.amplitude = 1.0;
            m.rate = 0.15;
            m.noise_scale = 0.0;
            m.direction = w.direction;
            return m;
          }};
}

}  // namespace

TEST_CASE("generated trials follow the curve model") {
  SECTION("noiseless minimize curves decrease strictly") {
    const auto trial = generate_trial(clean_curve(0.1, 1.0, 0.05), 5, 100, 2.0, 7);
    REQUIRE(trial.events.size() == 20);
    for (std::size_t i = 0; i < trial.events.size(); ++i) {
      CHECK(trial.events[i].step == static_cast<std::int64_t>(5 * (i + 1)));
      CHECK(trial.events[i].runtime_s == Catch::Approx(trial.events[i].step * 2.0));
      if (i > 0) {
        CHECK(trial.events[i].validation_metric < trial.events[i - 1].validation_metric);
      }
      CHECK(trial.events[i].test_metric.has_value());
    }
    CHECK_NOTHROW(validate_trial(trial));
  }

  SECTION("the same seed reproduces the trial exactly") {
    CurveModel noisy = clean_curve(0.2, 0.8, 0.03);
    noisy.noise_scale = 0.05;
    const auto a = generate_trial(noisy, 10, 200, 1.0, 123);
    const auto b = generate_trial(noisy, 10, 200, 1.0, 123);
    const auto c = generate_trial(noisy, 10, 200, 1.0, 124);
    CHECK(a == b);
    CHECK(a != c);
  }

  SECTION("model invariants are enforced") {
    CurveModel bad = clean_curve(0.1, -1.0, 0.05);  // rises away from target under Minimize
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = clean_curve(0.1, 1.0, 0.0);
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_THROWS_AS(generate_trial(clean_curve(0.1, 1.0, 0.1), 200, 100, 1.0, 1), Error);
  }
}

TEST_CASE("crossing curves are detected between two generated trials") {
  // Fast start, worse asymptote vs slow start, better asymptote: the
  // exponentials intersect once for suitable parameters.
  const auto quick = generate_trial(clean_curve(0.40, 0.30, 0.08), 5, 200, 1.0, 1);
  const auto patient = generate_trial(clean_curve(0.20, 0.80, 0.03), 5, 200, 1.0, 2);

  MetricSeries qs, ps;
  for (const auto& e : quick.events) qs.points.push_back({e.runtime_s, e.validation_metric});
  for (const auto& e : patient.events) ps.points.push_back({e.runtime_s, e.validation_metric});

  // Analytically: 0.40 + 0.30 e^{-0.08 t} = 0.20 + 0.80 e^{-0.03 t} has a
  // solution near t = 28 (the left side starts lower and ends higher).
  CHECK(quick.events.front().validation_metric < patient.events.front().validation_metric);
  CHECK(quick.events.back().validation_metric > patient.events.back().validation_metric);
  CHECK(crossings(qs, ps).size() >= 1);
}

TEST_CASE("mock competitions exercise the whole scoring path") {
  const auto config = mock_config();

  SECTION("a submission reaching every target instantly scores one") {
    const auto outcome = run_mock_competition(config, {good_submission(), hopeless_submission()}, 99);
    const auto& scores = outcome.scoring.scores;
    REQUIRE(scores.size() == 2);
    // Submissions come back in sorted id order: good then hopeless.
    CHECK(scores[0].submission_id == "good");
    CHECK(scores[0].value == 1.0);
    CHECK(scores[1].submission_id == "hopeless");
    CHECK(scores[1].value == 0.0);
    CHECK(outcome.scoring.leaderboard.front().submission == "good");
  }

  SECTION("identical submissions tie exactly") {
    // Point-independent noiseless curves: both entrants produce the same
    // trial data, so their scores must coincide bit for bit.
    const auto constant_family = [](const WorkloadSpec& w, const HyperparameterPoint&) {
      CurveModel m;
      m.asymptote = 0.5 * std::min(w.validation_target, w.test_target);
      m.amplitude = 1.0;
      m.rate = 0.2;
      m.noise_scale = 0.0;
      m.direction = w.direction;
      return m;
    };
    auto config2 = config;
    config2.search_spaces.emplace(
        "good_twin", SearchSpace::box({DimensionSpec::log_uniform("reach", 0.1, 1.0)}));
    const auto outcome = run_mock_competition(
        config2, {{"good", constant_family}, {"good_twin", constant_family}}, 7);
    REQUIRE(outcome.scoring.scores.size() == 2);
    CHECK(outcome.scoring.scores[0].value == outcome.scoring.scores[1].value);
    // Equal scores order by submission id.
    CHECK(outcome.scoring.leaderboard[0].submission == "good");
    CHECK(outcome.scoring.leaderboard[1].submission == "good_twin");
  }

  SECTION("self-tuning competitions run one trial per study") {
    auto self_config = config;
    self_config.ruleset = RulesetConfig::self_tuning(3, 3.0);
    const auto outcome = run_mock_competition(self_config, {good_submission()}, 5);
    CHECK(outcome.scoring.scores[0].value == 1.0);
    // 3 workloads x 3 studies x 1 trial
    CHECK(outcome.dataset.trials.size() == 9);
  }
}

TEST_CASE("mock competition determinism and log re-ingestion") {
  const auto config = mock_config();
  const auto first = run_mock_competition(config, {good_submission(), hopeless_submission()}, 2718);
  const auto second = run_mock_competition(config, {good_submission(), hopeless_submission()}, 2718);

  CHECK(first.log_text == second.log_text);
  CHECK(first.scoring.leaderboard == second.scoring.leaderboard);
  CHECK(leaderboard_csv(first.scoring.leaderboard, {"alpha", "beta"}) ==
        leaderboard_csv(second.scoring.leaderboard, {"alpha", "beta"}));

  // Feeding the emitted logs back through the parser gives the same scores.
  const auto reparsed = parse_trial_log(first.log_text);
  const auto rescored = score_dataset(config, reparsed);
  CHECK(rescored.fixed_times == first.scoring.fixed_times);
  CHECK(rescored.gated_times == first.scoring.gated_times);
  for (std::size_t i = 0; i < rescored.scores.size(); ++i) {
    CHECK(rescored.scores[i].value == first.scoring.scores[i].value);
  }
}
