#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ttr/config.hpp"
#include "ttr/core.hpp"
#include "ttr/scoring.hpp"

namespace ttr {

using json = nlohmann::json;

namespace detail {

inline ParamValue param_from_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  throw Error("MalformedConfig", "hyperparameter values must be numbers or strings");
}

inline json param_to_json(const ParamValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

inline HyperparameterPoint point_from_json(const json& j) {
  HyperparameterPoint point;
  for (const auto& [name, value] : j.items()) {
    point.entries.emplace(name, param_from_json(value));
  }
  return point;
}

inline json point_to_json(const HyperparameterPoint& point) {
  json j = json::object();
  for (const auto& [name, value] : point.entries) j[name] = param_to_json(value);
  return j;
}

inline DimensionSpec dimension_from_json(const json& j) {
  DimensionSpec dim;
  dim.name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "log_uniform") {
    dim.kind = DimensionSpec::Kind::LogUniform;
    dim.lo = j.at("lo").get<double>();
    dim.hi = j.at("hi").get<double>();
  } else if (kind == "linear_uniform") {
    dim.kind = DimensionSpec::Kind::LinearUniform;
    dim.lo = j.at("lo").get<double>();
    dim.hi = j.at("hi").get<double>();
  } else if (kind == "discrete") {
    dim.kind = DimensionSpec::Kind::Discrete;
    for (const auto& v : j.at("values")) dim.values.push_back(param_from_json(v));
  } else if (kind == "fixed") {
    dim.kind = DimensionSpec::Kind::Fixed;
    dim.fixed_value = param_from_json(j.at("value"));
  } else {
    throw Error("MalformedConfig", "unknown dimension kind '" + kind + "'");
  }
  return dim;
}

inline json dimension_to_json(const DimensionSpec& dim) {
  json j;
  j["name"] = dim.name;
  switch (dim.kind) {
    case DimensionSpec::Kind::LogUniform:
      j["kind"] = "log_uniform";
      j["lo"] = dim.lo;
      j["hi"] = dim.hi;
      break;
    case DimensionSpec::Kind::LinearUniform:
      j["kind"] = "linear_uniform";
      j["lo"] = dim.lo;
      j["hi"] = dim.hi;
      break;
    case DimensionSpec::Kind::Discrete: {
      j["kind"] = "discrete";
      json values = json::array();
      for (const auto& v : dim.values) values.push_back(param_to_json(v));
      j["values"] = values;
      break;
    }
    case DimensionSpec::Kind::Fixed:
      j["kind"] = "fixed";
      j["value"] = param_to_json(dim.fixed_value);
      break;
  }
  return j;
}

}  // namespace detail

// Parses and validates a benchmark configuration document.
inline BenchmarkConfig parse_benchmark_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("MalformedConfig", e.what());
  }
  try {
    BenchmarkConfig config;
    config.r_max = doc.value("r_max", 4.0);

    const json& ruleset = doc.at("ruleset");
    const std::string kind = ruleset.value("kind", "external");
    if (kind == "external") {
      config.ruleset = RulesetConfig::external(ruleset.value("studies", 5),
                                               ruleset.value("trials_per_study", 20));
    } else if (kind == "self") {
      config.ruleset = RulesetConfig::self_tuning(ruleset.value("studies", 5),
                                                  ruleset.value("budget_multiplier", 3.0));
    } else {
      throw Error("MalformedConfig", "ruleset kind must be 'external' or 'self'");
    }

    for (const json& w : doc.at("workloads")) {
      WorkloadSpec spec;
      spec.id = w.at("id").get<std::string>();
      if (w.contains("heldout_base")) spec.heldout_base = w.at("heldout_base").get<std::string>();
      const std::string direction = w.value("direction", "minimize");
      if (direction == "minimize") {
        spec.direction = MetricDirection::Minimize;
      } else if (direction == "maximize") {
        spec.direction = MetricDirection::Maximize;
      } else {
        throw Error("MalformedConfig", "direction must be 'minimize' or 'maximize'");
      }
      spec.validation_target = w.at("validation_target").get<double>();
      spec.test_target = w.at("test_target").get<double>();
      spec.max_runtime_s = w.at("max_runtime_s").get<double>();
      if (w.contains("max_steps")) spec.max_steps = w.at("max_steps").get<std::int64_t>();
      config.workloads.push_back(std::move(spec));
    }

    if (doc.contains("search_spaces")) {
      for (const auto& [submission, space_json] : doc.at("search_spaces").items()) {
        SearchSpace space;
        const std::string space_kind = space_json.value("kind", "box");
        if (space_kind == "box") {
          space.kind = SearchSpace::Kind::Box;
          for (const json& d : space_json.at("dimensions")) {
            space.dimensions.push_back(detail::dimension_from_json(d));
          }
        } else if (space_kind == "optlist") {
          space.kind = SearchSpace::Kind::OptList;
          for (const json& p : space_json.at("points")) {
            space.opt_list.push_back(detail::point_from_json(p));
          }
        } else {
          throw Error("MalformedConfig", "search space kind must be 'box' or 'optlist'");
        }
        config.search_spaces.emplace(submission, std::move(space));
      }
    }
    return validate_benchmark_config(std::move(config));
  } catch (const json::exception& e) {
    throw Error("MalformedConfig", e.what());
  }
}

inline std::string serialize_benchmark_config(const BenchmarkConfig& config) {
  json doc;
  doc["r_max"] = config.r_max;
  json ruleset;
  if (config.ruleset.kind == RulesetKind::ExternalTuning) {
    ruleset["kind"] = "external";
    ruleset["studies"] = config.ruleset.studies;
    ruleset["trials_per_study"] = config.ruleset.trials_per_study;
  } else {
    ruleset["kind"] = "self";
    ruleset["studies"] = config.ruleset.studies;
    ruleset["budget_multiplier"] = config.ruleset.budget_multiplier;
  }
  doc["ruleset"] = ruleset;

  json workloads = json::array();
  for (const auto& w : config.workloads) {
    json entry;
    entry["id"] = w.id;
    if (w.heldout_base.has_value()) entry["heldout_base"] = *w.heldout_base;
    entry["direction"] = w.direction == MetricDirection::Minimize ? "minimize" : "maximize";
    entry["validation_target"] = w.validation_target;
    entry["test_target"] = w.test_target;
    entry["max_runtime_s"] = w.max_runtime_s;
    if (w.max_steps.has_value()) entry["max_steps"] = *w.max_steps;
    workloads.push_back(entry);
  }
  doc["workloads"] = workloads;

  if (!config.search_spaces.empty()) {
    json spaces = json::object();
    for (const auto& [submission, space] : config.search_spaces) {
      json entry;
      if (space.kind == SearchSpace::Kind::Box) {
        entry["kind"] = "box";
        json dims = json::array();
        for (const auto& d : space.dimensions) dims.push_back(detail::dimension_to_json(d));
        entry["dimensions"] = dims;
      } else {
        entry["kind"] = "optlist";
        json points = json::array();
        for (const auto& p : space.opt_list) points.push_back(detail::point_to_json(p));
        entry["points"] = points;
      }
      spaces[submission] = entry;
    }
    doc["search_spaces"] = spaces;
  }
  return doc.dump(2) + "\n";
}

// Identity of one trial inside a log dataset.
struct TrialKey {
  std::string submission;
  std::string workload;
  int study = 0;
  int trial = 0;

  friend bool operator==(const TrialKey&, const TrialKey&) = default;
  friend auto operator<=>(const TrialKey&, const TrialKey&) = default;
};

// Trial logs grouped by (submission, workload, study, trial), events ordered
// by step. Multiple files parse independently and merge by key order.
struct TrialDataset {
  std::map<TrialKey, TrialRecord> trials;

  std::vector<std::string> submissions() const {
    std::set<std::string> ids;
    for (const auto& [key, record] : trials) ids.insert(key.submission);
    return {ids.begin(), ids.end()};
  }

  // Trials of one (submission, workload) grouped per study index.
  std::map<int, std::vector<const TrialRecord*>> by_study(const std::string& submission,
                                                          const std::string& workload) const {
    std::map<int, std::vector<const TrialRecord*>> out;
    for (const auto& [key, record] : trials) {
      if (key.submission == submission && key.workload == workload) {
        out[key.study].push_back(&record);
      }
    }
    return out;
  }

  void merge(const TrialDataset& other) {
    for (const auto& [key, record] : other.trials) {
      if (!trials.emplace(key, record).second) {
        throw Error("DuplicateEvent", "trial logged twice: " + key.submission + "/" +
                                          key.workload + "/" + std::to_string(key.study) + "/" +
                                          std::to_string(key.trial));
      }
    }
  }

  friend bool operator==(const TrialDataset&, const TrialDataset&) = default;
};

// Parses line-delimited trial log records. Field names: submission,
// workload, study, trial, step, runtime_s, val, test (optional), status
// (optional). Rejects malformed lines by line number; rejects duplicate
// (submission, workload, study, trial, step) records and runtime that
// decreases within a trial.
inline TrialDataset parse_trial_log(std::istream& stream) {
  TrialDataset dataset;
  std::map<TrialKey, std::set<std::int64_t>> seen_steps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("MalformedLine", "line " + std::to_string(line_no) + ": " + e.what());
    }
    TrialKey key;
    EvalEvent event;
    TrialStatus status = TrialStatus::Completed;
    try {
      key.submission = record.at("submission").get<std::string>();
      key.workload = record.at("workload").get<std::string>();
      key.study = record.at("study").get<int>();
      key.trial = record.at("trial").get<int>();
      event.step = record.at("step").get<std::int64_t>();
      event.runtime_s = record.at("runtime_s").get<double>();
      event.validation_metric = record.at("val").get<double>();
      if (record.contains("test") && !record.at("test").is_null()) {
        event.test_metric = record.at("test").get<double>();
      }
      if (record.contains("status")) {
        const std::string s = record.at("status").get<std::string>();
        if (s == "completed") {
          status = TrialStatus::Completed;
        } else if (s == "diverged") {
          status = TrialStatus::Diverged;
        } else if (s == "crashed") {
          status = TrialStatus::Crashed;
        } else {
          throw Error("MalformedLine", "line " + std::to_string(line_no) +
                                           ": unknown status '" + s + "'");
        }
      }
    } catch (const json::exception& e) {
      throw Error("MalformedLine", "line " + std::to_string(line_no) + ": " + e.what());
    }

    if (!seen_steps[key].insert(event.step).second) {
      throw Error("DuplicateEvent", "line " + std::to_string(line_no) +
                                        ": repeated step " + std::to_string(event.step) +
                                        " for trial " + key.submission + "/" + key.workload + "/" +
                                        std::to_string(key.study) + "/" +
                                        std::to_string(key.trial));
    }
    TrialRecord& trial = dataset.trials[key];
    trial.workload_id = key.workload;
    trial.study_index = key.study;
    trial.trial_index = key.trial;
    trial.events.push_back(event);
    if (status != TrialStatus::Completed) trial.status = status;
  }

  for (auto& [key, trial] : dataset.trials) {
    std::sort(trial.events.begin(), trial.events.end(),
              [](const EvalEvent& a, const EvalEvent& b) { return a.step < b.step; });
    for (std::size_t i = 1; i < trial.events.size(); ++i) {
      if (trial.events[i].runtime_s < trial.events[i - 1].runtime_s) {
        throw Error("NonMonotoneRuntime",
                    "trial " + key.submission + "/" + key.workload + "/" +
                        std::to_string(key.study) + "/" + std::to_string(key.trial) +
                        ": runtime decreases at step " + std::to_string(trial.events[i].step));
      }
    }
  }
  return dataset;
}

inline TrialDataset parse_trial_log(const std::string& text) {
  std::istringstream stream(text);
  return parse_trial_log(stream);
}

// One JSONL record per eval event, keys fixed, trials in key order.
inline std::string serialize_trial_log(const TrialDataset& dataset) {
  std::string out;
  for (const auto& [key, trial] : dataset.trials) {
    for (const EvalEvent& event : trial.events) {
      json record;
      record["submission"] = key.submission;
      record["workload"] = key.workload;
      record["study"] = key.study;
      record["trial"] = key.trial;
      record["step"] = event.step;
      record["runtime_s"] = event.runtime_s;
      record["val"] = event.validation_metric;
      if (event.test_metric.has_value()) record["test"] = *event.test_metric;
      if (trial.status == TrialStatus::Diverged) record["status"] = "diverged";
      if (trial.status == TrialStatus::Crashed) record["status"] = "crashed";
      out += record.dump();
      out += '\n';
    }
  }
  return out;
}

// Reads and merges every *.jsonl file under a directory (sorted by path), or
// a single log file.
inline TrialDataset load_trial_logs(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw Error("IoFailure", "no such path: " + path.string());
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  TrialDataset dataset;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw Error("IoFailure", "cannot open " + file.string());
    dataset.merge(parse_trial_log(in));
  }
  return dataset;
}

struct LeaderboardRow {
  std::string submission;
  double score = 0.0;
  std::vector<ExtendedTime> times;  // per workload, "inf" when Infinite

  friend bool operator==(const LeaderboardRow&, const LeaderboardRow&) = default;
};

namespace detail {

inline std::string sanitize_filename(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("IoFailure", "write failed: " + path.string());
}

}  // namespace detail

// Profile breakpoints as (tau, rho) rows suitable for direct step plotting;
// a (1, 0) anchor row is prepended unless the profile already jumps at 1.
inline std::string profile_csv(const PerformanceProfile& profile) {
  std::string out = "tau,rho\n";
  if (profile.breakpoints.empty() || profile.breakpoints.front().tau > 1.0) {
    out += "1,0\n";
  }
  for (const auto& bp : profile.breakpoints) {
    out += format_double(bp.tau);
    out += ',';
    out += format_double(bp.rho);
    out += '\n';
  }
  return out;
}

inline std::string leaderboard_csv(const std::vector<LeaderboardRow>& rows,
                                   const std::vector<std::string>& workload_ids) {
  std::string out = "submission,benchmark_score";
  for (const auto& id : workload_ids) {
    out += ',';
    out += id;
  }
  out += '\n';
  for (const auto& row : rows) {
    out += row.submission;
    out += ',';
    out += format_double(row.score);
    for (const auto& t : row.times) {
      out += ',';
      out += t.str();
    }
    out += '\n';
  }
  return out;
}

// Writes leaderboard.csv (rows must already be sorted by descending score)
// and one profiles/<submission>.csv per profile.
inline void write_score_report(const std::filesystem::path& out_dir,
                               const std::vector<LeaderboardRow>& rows,
                               const std::vector<std::string>& workload_ids,
                               const std::vector<PerformanceProfile>& profiles) {
  namespace fs = std::filesystem;
  if (rows.empty()) throw Error("EmptyReport", "no submissions to report");
  std::error_code ec;
  fs::create_directories(out_dir / "profiles", ec);
  if (ec) throw Error("IoFailure", "cannot create " + (out_dir / "profiles").string());

  detail::write_file(out_dir / "leaderboard.csv", leaderboard_csv(rows, workload_ids));
  for (const auto& profile : profiles) {
    detail::write_file(
        out_dir / "profiles" / (detail::sanitize_filename(profile.submission_id) + ".csv"),
        profile_csv(profile));
  }
}

}  // namespace ttr
