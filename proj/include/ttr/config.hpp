#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ttr/core.hpp"
#include "ttr/rulesets.hpp"
#include "ttr/searchspace.hpp"

namespace ttr {

// Everything the arbiter needs to score a benchmark: the workload roster,
// the tuning ruleset, the profile integration limit, and (optionally) the
// search space declared by each submission.
struct BenchmarkConfig {
  std::vector<WorkloadSpec> workloads;
  RulesetConfig ruleset;
  double r_max = 4.0;
  std::map<std::string, SearchSpace> search_spaces;  // keyed by submission id

  std::vector<const WorkloadSpec*> fixed_workloads() const {
    std::vector<const WorkloadSpec*> out;
    for (const auto& w : workloads) {
      if (!w.is_heldout()) out.push_back(&w);
    }
    return out;
  }

  std::vector<const WorkloadSpec*> heldout_workloads() const {
    std::vector<const WorkloadSpec*> out;
    for (const auto& w : workloads) {
      if (w.is_heldout()) out.push_back(&w);
    }
    return out;
  }

  const WorkloadSpec& workload(const std::string& id) const {
    for (const auto& w : workloads) {
      if (w.id == id) return w;
    }
    throw Error("UnknownWorkload", "no workload '" + id + "' in config");
  }

  friend bool operator==(const BenchmarkConfig&, const BenchmarkConfig&) = default;
};

// Checks all workload invariants and the held-out/base linkage; returns the
// config unchanged on success.
inline BenchmarkConfig validate_benchmark_config(BenchmarkConfig config) {
  std::set<std::string> ids;
  for (const auto& w : config.workloads) {
    if (!ids.insert(w.id).second) {
      throw Error("DuplicateWorkloadId", "workload id '" + w.id + "' appears twice");
    }
    if (!(w.max_runtime_s > 0.0)) {
      throw Error("NonPositiveBudget", "workload '" + w.id + "': max_runtime must be > 0");
    }
    if (w.max_steps.has_value() && *w.max_steps <= 0) {
      throw Error("NonPositiveBudget", "workload '" + w.id + "': max_steps must be > 0");
    }
  }

  std::set<std::string> claimed_bases;
  for (const auto& w : config.workloads) {
    if (!w.is_heldout()) continue;
    const std::string& base = *w.heldout_base;
    bool found_fixed_base = false;
    for (const auto& other : config.workloads) {
      if (other.id == base && !other.is_heldout()) {
        found_fixed_base = true;
        break;
      }
    }
    if (!found_fixed_base) {
      throw Error("DanglingHeldOutBase",
                  "workload '" + w.id + "' names missing fixed base '" + base + "'");
    }
    if (!claimed_bases.insert(base).second) {
      throw Error("DuplicateHeldOutVariant",
                  "fixed workload '" + base + "' has more than one held-out variant");
    }
  }

  config.ruleset.validate();
  if (!(config.r_max > 1.0)) {
    throw Error("InvalidRMax", "r_max must be > 1, got " + format_double(config.r_max));
  }
  for (const auto& [submission, space] : config.search_spaces) {
    try {
      space.validate();
    } catch (const Error& e) {
      throw Error(e.code(), "search space for '" + submission + "': " + e.what());
    }
  }
  return config;
}

}  // namespace ttr
