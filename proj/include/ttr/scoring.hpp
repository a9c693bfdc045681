#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttr/core.hpp"

namespace ttr {

struct ProfileBreakpoint {
  double tau = 1.0;
  double rho = 0.0;  // value of the profile at and after tau

  friend bool operator==(const ProfileBreakpoint&, const ProfileBreakpoint&) = default;
};

// A right-continuous, nondecreasing step function on tau >= 1: the fraction
// of workloads on which the submission's performance ratio is <= tau.
struct PerformanceProfile {
  std::string submission_id;
  std::vector<ProfileBreakpoint> breakpoints;  // strictly increasing tau
  std::size_t n_workloads = 0;

  double rho_at(double tau) const {
    double rho = 0.0;
    for (const auto& bp : breakpoints) {
      if (bp.tau > tau) break;
      rho = bp.rho;
    }
    return rho;
  }

  friend bool operator==(const PerformanceProfile&, const PerformanceProfile&) = default;
};

struct BenchmarkScore {
  std::string submission_id;
  double value = 0.0;  // in [0, 1]
  double r_max = 4.0;

  friend bool operator==(const BenchmarkScore&, const BenchmarkScore&) = default;
};

// r_{s,w} = t_{s,w} / min_s t_{s,w}. Infinite cells, and whole columns whose
// minimum is Infinite, give Infinite ratios.
inline ScoreMatrix performance_ratios(const ScoreMatrix& matrix) {
  if (matrix.n_submissions() == 0 || matrix.n_workloads() == 0) {
    throw Error("EmptyMatrix", "score matrix has no cells");
  }
  ScoreMatrix ratios(matrix.submissions(), matrix.workloads());
  for (std::size_t w = 0; w < matrix.n_workloads(); ++w) {
    const ExtendedTime fastest = matrix.column_min(w);
    for (std::size_t s = 0; s < matrix.n_submissions(); ++s) {
      ratios.at(s, w) = ratio_of(matrix.at(s, w), fastest);
    }
  }
  return ratios;
}

// Empirical CDF of the finite ratios, scaled by 1/n_workloads. Infinite
// ratios never enter, so a submission that failed everywhere has an empty
// breakpoint list (rho identically zero).
inline PerformanceProfile performance_profile(const std::vector<ExtendedTime>& ratios,
                                              std::size_t n_workloads,
                                              std::string submission_id = {}) {
  if (ratios.size() != n_workloads) {
    throw Error("LengthMismatch", "got " + std::to_string(ratios.size()) + " ratios for " +
                                      std::to_string(n_workloads) + " workloads");
  }
  std::vector<double> finite;
  for (const auto& r : ratios) {
    if (r.is_finite()) finite.push_back(r.value());
  }
  std::sort(finite.begin(), finite.end());

  PerformanceProfile profile;
  profile.submission_id = std::move(submission_id);
  profile.n_workloads = n_workloads;
  std::size_t covered = 0;
  while (covered < finite.size()) {
    const double tau = finite[covered];
    std::size_t next = covered;
    while (next < finite.size() && finite[next] == tau) ++next;
    profile.breakpoints.push_back(
        {tau, static_cast<double>(next) / static_cast<double>(n_workloads)});
    covered = next;
  }
  return profile;
}

// Row of per-submission ratios from a ratio matrix.
inline std::vector<ExtendedTime> ratio_row(const ScoreMatrix& ratios, std::size_t submission) {
  std::vector<ExtendedTime> row;
  row.reserve(ratios.n_workloads());
  for (std::size_t w = 0; w < ratios.n_workloads(); ++w) row.push_back(ratios.at(submission, w));
  return row;
}

// B = integral of the profile over [1, r_max], normalized by r_max - 1.
// Computed exactly as a sum over the breakpoint segments.
inline BenchmarkScore benchmark_score(const PerformanceProfile& profile, double r_max = 4.0) {
  if (!(r_max > 1.0)) {
    throw Error("InvalidRMax", "r_max must be > 1, got " + format_double(r_max));
  }
  double area = 0.0;
  double prev_tau = 1.0;
  double rho = 0.0;
  for (const auto& bp : profile.breakpoints) {
    if (bp.tau <= 1.0) {
      rho = bp.rho;  // already counted at the left edge of the integral
      continue;
    }
    if (bp.tau >= r_max) break;
    area += (bp.tau - prev_tau) * rho;
    prev_tau = bp.tau;
    rho = bp.rho;
  }
  area += (r_max - prev_tau) * rho;
  return {profile.submission_id, area / (r_max - 1.0), r_max};
}

// The held-out gate. A fixed-workload cell keeps its finite time only if the
// submission (1) reached the fixed targets in budget, (2) within r_max of the
// fastest submission on that fixed workload, (3) reached the linked held-out
// targets in budget, and (4) within r_max of the fastest *eligible*
// submission on the held-out workload, where eligible means having reached
// the corresponding fixed target. Fixed workloads without a linked held-out
// workload are gated by (1)-(2) only. Failing cells become Infinite.
inline ScoreMatrix apply_heldout_gate(const ScoreMatrix& fixed, const ScoreMatrix& heldout,
                                      const std::map<std::string, std::string>& linkage,
                                      double r_max = 4.0) {
  if (fixed.submissions() != heldout.submissions() && heldout.n_workloads() > 0) {
    throw Error("SubmissionMismatch", "fixed and held-out matrices list different submissions");
  }
  for (const auto& [heldout_id, fixed_id] : linkage) {
    heldout.workload_index(heldout_id);  // throws UnknownWorkload
    fixed.workload_index(fixed_id);
  }
  std::map<std::string, std::string> fixed_to_heldout;
  for (const auto& [heldout_id, fixed_id] : linkage) {
    if (!fixed_to_heldout.emplace(fixed_id, heldout_id).second) {
      throw Error("DanglingLinkage", "fixed workload '" + fixed_id + "' linked twice");
    }
  }

  ScoreMatrix gated = fixed;
  for (std::size_t w = 0; w < fixed.n_workloads(); ++w) {
    const ExtendedTime fastest_fixed = fixed.column_min(w);

    const auto link = fixed_to_heldout.find(fixed.workloads()[w]);
    std::optional<std::size_t> h;
    ExtendedTime fastest_eligible_heldout = ExtendedTime::infinite();
    if (link != fixed_to_heldout.end()) {
      h = heldout.workload_index(link->second);
      for (std::size_t s = 0; s < fixed.n_submissions(); ++s) {
        if (fixed.at(s, w).is_finite() && heldout.at(s, *h) < fastest_eligible_heldout) {
          fastest_eligible_heldout = heldout.at(s, *h);
        }
      }
    }

    for (std::size_t s = 0; s < fixed.n_submissions(); ++s) {
      const ExtendedTime t = fixed.at(s, w);
      bool keep = t.is_finite() && t <= scale(fastest_fixed, r_max);
      if (keep && h.has_value()) {
        const ExtendedTime ht = heldout.at(s, *h);
        keep = ht.is_finite() && ht <= scale(fastest_eligible_heldout, r_max);
      }
      if (!keep) gated.at(s, w) = ExtendedTime::infinite();
    }
  }
  return gated;
}

// Geometric mean of finite positive times, computed in log space.
inline double geometric_mean_time(const std::vector<ExtendedTime>& times) {
  if (times.empty()) throw Error("EmptyTimes", "need at least one time");
  double log_sum = 0.0;
  for (const auto& t : times) {
    if (t.is_infinite()) throw Error("InfiniteTime", "geometric mean needs finite times");
    if (!(t.value() > 0.0)) {
      throw Error("NonPositiveTime", "geometric mean needs positive times");
    }
    log_sum += std::log(t.value());
  }
  return std::exp(log_sum / static_cast<double>(times.size()));
}

}  // namespace ttr
