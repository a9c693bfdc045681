#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ttr/error.hpp"

namespace ttr {

enum class MetricDirection { Minimize, Maximize };

// Target comparisons are inclusive: a value exactly equal to the target
// counts as reached.
inline bool meets(double value, double target, MetricDirection direction) {
  return direction == MetricDirection::Minimize ? value <= target : value >= target;
}

// Strictly better under the direction's ordering.
inline bool better(double a, double b, MetricDirection direction) {
  return direction == MetricDirection::Minimize ? a < b : a > b;
}

inline bool worse(double a, double b, MetricDirection direction) {
  return better(b, a, direction);
}

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error("MalformedNumber", "not a decimal number: '" + std::string(text) + "'");
  }
  return v;
}

// An extended nonnegative quantity: a finite value (seconds, steps, or a
// dimensionless ratio) or the distinguished value Infinite. Infinite compares
// strictly greater than every finite value; it is an explicit variant and is
// never encoded as a sentinel float. Default-constructed as Infinite ("no
// result yet").
class ExtendedTime {
 public:
  ExtendedTime() = default;

  static ExtendedTime finite(double value) {
    if (!(value >= 0.0)) {
      throw Error("NegativeTime", "finite value must be >= 0, got " + format_double(value));
    }
    ExtendedTime t;
    t.infinite_ = false;
    t.value_ = value;
    return t;
  }

  static ExtendedTime infinite() { return ExtendedTime{}; }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  double value() const {
    if (infinite_) throw Error("InfiniteTime", "no finite value available");
    return value_;
  }

  double value_or(double fallback) const { return infinite_ ? fallback : value_; }

  friend bool operator==(const ExtendedTime& a, const ExtendedTime& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

  friend std::strong_ordering operator<=>(const ExtendedTime& a, const ExtendedTime& b) {
    if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
    if (a.infinite_) return std::strong_ordering::greater;
    if (b.infinite_) return std::strong_ordering::less;
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string str() const { return infinite_ ? "inf" : format_double(value_); }

  static ExtendedTime parse(std::string_view text) {
    if (text == "inf") return infinite();
    return finite(parse_double(text));
  }

 private:
  bool infinite_ = true;
  double value_ = 0.0;
};

// num / den in the extended domain. An Infinite numerator gives Infinite;
// Infinite / Infinite is Infinite (it contributes nothing below any finite
// cutoff). A zero denominator with a positive numerator is Infinite; 0 / 0
// is taken as 1 (equal to the minimum it is measured against).
inline ExtendedTime ratio_of(ExtendedTime num, ExtendedTime den) {
  if (num.is_infinite() || den.is_infinite()) return ExtendedTime::infinite();
  if (den.value() == 0.0) {
    return num.value() == 0.0 ? ExtendedTime::finite(1.0) : ExtendedTime::infinite();
  }
  return ExtendedTime::finite(num.value() / den.value());
}

inline ExtendedTime scale(ExtendedTime t, double factor) {
  if (t.is_infinite()) return t;
  return ExtendedTime::finite(t.value() * factor);
}

// One scoring unit. A workload is either fixed (fully specified up front) or
// a held-out variant of a fixed base workload, used only for gating.
struct WorkloadSpec {
  std::string id;
  std::optional<std::string> heldout_base;  // set iff this is a held-out variant
  MetricDirection direction = MetricDirection::Minimize;
  double validation_target = 0.0;
  double test_target = 0.0;
  double max_runtime_s = 0.0;
  std::optional<std::int64_t> max_steps;

  bool is_heldout() const { return heldout_base.has_value(); }

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

// One logged evaluation: accumulated timed wall-clock at evaluation time,
// exclusive of the untimed model evaluations themselves.
struct EvalEvent {
  std::int64_t step = 0;
  double runtime_s = 0.0;
  double validation_metric = 0.0;
  std::optional<double> test_metric;

  friend bool operator==(const EvalEvent&, const EvalEvent&) = default;
};

enum class TrialStatus { Completed, Diverged, Crashed };

using ParamValue = std::variant<double, std::int64_t, std::string>;

inline std::string param_value_str(const ParamValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

// A flat name -> value assignment for every tunable of a submission.
struct HyperparameterPoint {
  std::map<std::string, ParamValue> entries;

  const ParamValue* find(const std::string& name) const {
    const auto it = entries.find(name);
    return it == entries.end() ? nullptr : &it->second;
  }

  double real(const std::string& name) const {
    const ParamValue* v = find(name);
    if (v == nullptr) throw Error("MissingHyperparameter", "no entry named '" + name + "'");
    if (const auto* d = std::get_if<double>(v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
    throw Error("WrongHyperparameterType", "'" + name + "' is not numeric");
  }

  double real_or(const std::string& name, double fallback) const {
    return find(name) == nullptr ? fallback : real(name);
  }

  friend bool operator==(const HyperparameterPoint&, const HyperparameterPoint&) = default;
};

// One training run: a hyperparameter point plus its ordered eval events.
struct TrialRecord {
  std::string workload_id;
  int study_index = 0;
  int trial_index = 0;
  HyperparameterPoint point;
  std::vector<EvalEvent> events;
  TrialStatus status = TrialStatus::Completed;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// Checks the event-ordering invariants: strictly increasing steps,
// nondecreasing runtime, and nonempty events for Completed trials.
inline void validate_trial(const TrialRecord& trial) {
  if (trial.status == TrialStatus::Completed && trial.events.empty()) {
    throw Error("EmptyTrial", "completed trial " + trial.workload_id + "/" +
                                  std::to_string(trial.trial_index) + " has no eval events");
  }
  for (std::size_t i = 1; i < trial.events.size(); ++i) {
    if (trial.events[i].step <= trial.events[i - 1].step) {
      throw Error("NonMonotoneStep", "eval steps must be strictly increasing");
    }
    if (trial.events[i].runtime_s < trial.events[i - 1].runtime_s) {
      throw Error("NonMonotoneRuntime", "accumulated runtime must be nondecreasing");
    }
  }
}

// Rectangular per-(submission, workload) table of extended training times.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;

  ScoreMatrix(std::vector<std::string> submissions, std::vector<std::string> workloads)
      : submissions_(std::move(submissions)),
        workloads_(std::move(workloads)),
        times_(submissions_.size() * workloads_.size()) {}

  std::size_t n_submissions() const { return submissions_.size(); }
  std::size_t n_workloads() const { return workloads_.size(); }

  const std::vector<std::string>& submissions() const { return submissions_; }
  const std::vector<std::string>& workloads() const { return workloads_; }

  ExtendedTime& at(std::size_t submission, std::size_t workload) {
    return times_[index(submission, workload)];
  }
  const ExtendedTime& at(std::size_t submission, std::size_t workload) const {
    return times_[index(submission, workload)];
  }

  std::size_t submission_index(const std::string& id) const {
    for (std::size_t i = 0; i < submissions_.size(); ++i) {
      if (submissions_[i] == id) return i;
    }
    throw Error("UnknownSubmission", "no submission '" + id + "' in matrix");
  }

  std::size_t workload_index(const std::string& id) const {
    for (std::size_t i = 0; i < workloads_.size(); ++i) {
      if (workloads_[i] == id) return i;
    }
    throw Error("UnknownWorkload", "no workload '" + id + "' in matrix");
  }

  // Column minimum over all submissions.
  ExtendedTime column_min(std::size_t workload) const {
    ExtendedTime best = ExtendedTime::infinite();
    for (std::size_t s = 0; s < n_submissions(); ++s) {
      if (at(s, workload) < best) best = at(s, workload);
    }
    return best;
  }

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::size_t index(std::size_t submission, std::size_t workload) const {
    if (submission >= submissions_.size() || workload >= workloads_.size()) {
      throw Error("IndexOutOfRange", "score matrix index out of range");
    }
    return submission * workloads_.size() + workload;
  }

  std::vector<std::string> submissions_;
  std::vector<std::string> workloads_;
  std::vector<ExtendedTime> times_;
};

}  // namespace ttr
