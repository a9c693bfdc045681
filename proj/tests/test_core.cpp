#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "ttr/config.hpp"
#include "ttr/core.hpp"
#include "ttr/rng.hpp"

using namespace ttr;

TEST_CASE("meets is inclusive in both directions") {
  CHECK(meets(0.5, 0.5, MetricDirection::Minimize));
  CHECK(meets(0.4, 0.5, MetricDirection::Minimize));
  CHECK_FALSE(meets(0.6, 0.5, MetricDirection::Minimize));
  CHECK(meets(30.8491, 30.8491, MetricDirection::Maximize));
  CHECK(meets(31.0, 30.8491, MetricDirection::Maximize));
  CHECK_FALSE(meets(30.0, 30.8491, MetricDirection::Maximize));
}

TEST_CASE("extended time ordering is total and stable under sorting") {
  const auto inf = ExtendedTime::infinite();
  CHECK(ExtendedTime::finite(1e12) < inf);
  CHECK(inf == ExtendedTime::infinite());
  CHECK(ExtendedTime::finite(2.0) < ExtendedTime::finite(3.0));
  CHECK(ExtendedTime::finite(3.0) == ExtendedTime::finite(3.0));

  SplitMix64 rng(17);
  std::vector<ExtendedTime> values;
  for (int i = 0; i < 200; ++i) {
    values.push_back(rng.next_unit() < 0.25 ? ExtendedTime::infinite()
                                            : ExtendedTime::finite(rng.next_unit() * 1e5));
  }
  std::sort(values.begin(), values.end());
  auto sorted_again = values;
  std::sort(sorted_again.begin(), sorted_again.end());
  CHECK(values == sorted_again);
  CHECK(std::is_sorted(values.begin(), values.end()));
}

TEST_CASE("extended time rejects negatives and round-trips through text") {
  CHECK_THROWS_AS(ExtendedTime::finite(-1.0), Error);
  CHECK(ExtendedTime::infinite().str() == "inf");
  CHECK(ExtendedTime::parse("inf").is_infinite());
  const auto t = ExtendedTime::finite(5777.25);
  CHECK(ExtendedTime::parse(t.str()) == t);
  CHECK(ExtendedTime::parse("0") == ExtendedTime::finite(0.0));
  CHECK_THROWS_AS(ExtendedTime::parse("oops"), Error);
  CHECK_THROWS_AS(ExtendedTime::infinite().value(), Error);
}

TEST_CASE("ratios in the extended domain") {
  const auto inf = ExtendedTime::infinite();
  CHECK(ratio_of(inf, ExtendedTime::finite(10.0)).is_infinite());
  CHECK(ratio_of(inf, inf).is_infinite());
  CHECK(ratio_of(ExtendedTime::finite(30822), ExtendedTime::finite(29962)).value() ==
        Catch::Approx(1.0287030238301849).epsilon(1e-12));
  CHECK(ratio_of(ExtendedTime::finite(0.0), ExtendedTime::finite(0.0)) ==
        ExtendedTime::finite(1.0));
  CHECK(ratio_of(ExtendedTime::finite(1.0), ExtendedTime::finite(0.0)).is_infinite());
}

namespace {

WorkloadSpec fixed_workload(std::string id, double max_runtime = 1000.0) {
  WorkloadSpec w;
  w.id = std::move(id);
  w.validation_target = 0.5;
  w.test_target = 0.6;
  w.max_runtime_s = max_runtime;
  return w;
}

WorkloadSpec heldout_workload(std::string id, std::string base) {
  WorkloadSpec w = fixed_workload(std::move(id));
  w.heldout_base = std::move(base);
  return w;
}

}  // namespace

TEST_CASE("benchmark config validation") {
  BenchmarkConfig config;
  for (int i = 0; i < 8; ++i) config.workloads.push_back(fixed_workload("w" + std::to_string(i)));
  for (int i = 0; i < 8; ++i) {
    config.workloads.push_back(
        heldout_workload("w" + std::to_string(i) + "_variant", "w" + std::to_string(i)));
  }
  config.ruleset = RulesetConfig::external(5, 20);

  SECTION("the full roster is accepted") { CHECK_NOTHROW(validate_benchmark_config(config)); }

  SECTION("a held-out spec must name an existing fixed base") {
    config.workloads.push_back(heldout_workload("dangling", "missing"));
    try {
      validate_benchmark_config(config);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == "DanglingHeldOutBase");
      CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }
  }

  SECTION("zero runtime budget is rejected") {
    config.workloads[0].max_runtime_s = 0.0;
    try {
      validate_benchmark_config(config);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == "NonPositiveBudget");
      CHECK(std::string(e.what()).find("w0") != std::string::npos);
    }
  }

  SECTION("duplicate workload ids are rejected") {
    config.workloads.push_back(fixed_workload("w3"));
    try {
      validate_benchmark_config(config);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == "DuplicateWorkloadId");
    }
  }

  SECTION("at most one held-out variant per fixed workload") {
    config.workloads.push_back(heldout_workload("w0_second_variant", "w0"));
    try {
      validate_benchmark_config(config);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == "DuplicateHeldOutVariant");
    }
  }

  SECTION("a held-out base must itself be fixed") {
    config.workloads.push_back(heldout_workload("nested", "w0_variant"));
    try {
      validate_benchmark_config(config);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == "DanglingHeldOutBase");
    }
  }

  SECTION("study counts must be positive and odd") {
    config.ruleset.studies = 4;
    CHECK_THROWS_AS(validate_benchmark_config(config), Error);
    config.ruleset.studies = 5;
    config.ruleset.trials_per_study = 0;
    CHECK_THROWS_AS(validate_benchmark_config(config), Error);
  }
}

TEST_CASE("trial validation enforces event ordering") {
  TrialRecord trial;
  trial.workload_id = "w";
  trial.events = {{100, 10.0, 0.9, {}}, {200, 20.0, 0.8, {}}};
  CHECK_NOTHROW(validate_trial(trial));

  SECTION("steps strictly increase") {
    trial.events.push_back({200, 30.0, 0.7, {}});
    CHECK_THROWS_AS(validate_trial(trial), Error);
  }
  SECTION("runtime never decreases") {
    trial.events.push_back({300, 19.0, 0.7, {}});
    CHECK_THROWS_AS(validate_trial(trial), Error);
  }
  SECTION("completed trials need events") {
    trial.events.clear();
    CHECK_THROWS_AS(validate_trial(trial), Error);
    trial.status = TrialStatus::Crashed;
    CHECK_NOTHROW(validate_trial(trial));
  }
}

TEST_CASE("score matrix lookups") {
  ScoreMatrix m({"a", "b"}, {"w1", "w2", "w3"});
  CHECK(m.at(0, 0).is_infinite());
  m.at(1, 2) = ExtendedTime::finite(7.0);
  CHECK(m.at(m.submission_index("b"), m.workload_index("w3")) == ExtendedTime::finite(7.0));
  CHECK_THROWS_AS(m.submission_index("c"), Error);
  CHECK(m.column_min(2) == ExtendedTime::finite(7.0));
  CHECK(m.column_min(0).is_infinite());
}
