#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "ttr/core.hpp"

namespace ttr {

struct SeriesPoint {
  double x = 0.0;  // step or runtime
  double y = 0.0;  // metric value

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

// A metric observed at discrete eval points. Between events the series holds
// its last value (step-function semantics); nothing is interpolated.
struct MetricSeries {
  std::vector<SeriesPoint> points;
  MetricDirection direction = MetricDirection::Minimize;
};

namespace detail {

inline void require_series(const MetricSeries& series) {
  if (series.points.empty()) throw Error("EmptySeries", "series has no points");
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (series.points[i].x <= series.points[i - 1].x) {
      throw Error("NonMonotoneSeries", "series x values must be strictly increasing");
    }
  }
}

}  // namespace detail

// Running extremum of the series under its direction (min for Minimize,
// max for Maximize), at the same x values.
inline MetricSeries best_so_far(const MetricSeries& series) {
  detail::require_series(series);
  MetricSeries out = series;
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    if (!better(out.points[i].y, out.points[i - 1].y, out.direction)) {
      out.points[i].y = out.points[i - 1].y;
    }
  }
  return out;
}

enum class MetricKind { Validation, Test };
enum class Clock { Runtime, Steps };

// Clock value of the first eval event that meets the target within the
// budget; Infinite if there is none. Events whose clock value exceeds the
// budget are ignored entirely. Trials that diverged or crashed never reach
// any target.
inline ExtendedTime time_to_target(const TrialRecord& trial, double target,
                                   MetricDirection direction, MetricKind metric,
                                   ExtendedTime budget, Clock clock = Clock::Runtime) {
  validate_trial(trial);
  if (trial.status != TrialStatus::Completed) return ExtendedTime::infinite();

  ExtendedTime reached = ExtendedTime::infinite();
  for (const EvalEvent& event : trial.events) {
    const double clock_value =
        clock == Clock::Runtime ? event.runtime_s : static_cast<double>(event.step);
    if (budget.is_finite() && clock_value > budget.value()) continue;

    double observed = 0.0;
    if (metric == MetricKind::Validation) {
      observed = event.validation_metric;
    } else {
      if (!event.test_metric.has_value()) {
        throw Error("MissingTestMetric",
                    "in-budget eval event at step " + std::to_string(event.step) +
                        " carries no test metric");
      }
      observed = *event.test_metric;
    }
    if (reached.is_infinite() && meets(observed, target, direction)) {
      reached = ExtendedTime::finite(clock_value);
    }
  }
  return reached;
}

// A maximal x-interval (lo, hi] inside which the leader changed: the sign of
// a - b differs between the eval points at lo and hi.
using CrossingInterval = std::pair<double, double>;

// Every leader change between two series over their overlapping x-range,
// comparing them as step functions. Ties (a = b) do not count as a change.
inline std::vector<CrossingInterval> crossings(const MetricSeries& a, const MetricSeries& b) {
  detail::require_series(a);
  detail::require_series(b);
  if (a.direction != b.direction) {
    throw Error("DirectionMismatch", "crossings requires series with one direction");
  }

  const double lo = std::max(a.points.front().x, b.points.front().x);
  const double hi = std::min(a.points.back().x, b.points.back().x);

  // Merged evaluation grid restricted to the overlap.
  std::vector<double> grid;
  for (const auto& p : a.points) {
    if (p.x >= lo && p.x <= hi) grid.push_back(p.x);
  }
  for (const auto& p : b.points) {
    if (p.x >= lo && p.x <= hi) grid.push_back(p.x);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const auto value_at = [](const MetricSeries& s, double x) {
    double y = s.points.front().y;
    for (const auto& p : s.points) {
      if (p.x > x) break;
      y = p.y;
    }
    return y;
  };

  std::vector<CrossingInterval> out;
  int last_sign = 0;
  double last_sign_x = lo;
  for (const double x : grid) {
    const double diff = value_at(a, x) - value_at(b, x);
    const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) out.emplace_back(last_sign_x, x);
    last_sign = sign;
    last_sign_x = x;
  }
  return out;
}

}  // namespace ttr
