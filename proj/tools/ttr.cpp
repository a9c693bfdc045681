// Command-line front end for the arbitration library: scores trial logs,
// derives targets, emits profiles, and runs the analysis utilities.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ttr/ttr.hpp"

namespace fs = std::filesystem;
using namespace ttr;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoFailure", "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("IoFailure", "write failed: " + path.string());
}

// Shared CLI state for the global flags.
struct GlobalOptions {
  std::string config_path;
  std::string logs_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  double r_max = 4.0;
  bool r_max_set = false;

  BenchmarkConfig load_config() const {
    if (config_path.empty()) throw Error("MissingArgument", "--config is required");
    auto config = parse_benchmark_config(read_file(config_path));
    if (r_max_set) config.r_max = r_max;
    return config;
  }

  TrialDataset load_logs() const {
    if (logs_path.empty()) throw Error("MissingArgument", "--logs is required");
    return load_trial_logs(logs_path);
  }
};

// A csv cell is either a decimal, the literal "inf", or empty (missing).
std::optional<double> parse_cell(const std::string& cell) {
  std::string trimmed;
  for (char ch : cell) {
    if (ch != ' ' && ch != '\t' && ch != '\r') trimmed += ch;
  }
  if (trimmed.empty()) return std::nullopt;
  if (trimmed == "inf") return std::numeric_limits<double>::infinity();
  return parse_double(trimmed);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(cell);
  return cells;
}

struct CsvTable {
  std::vector<std::string> columns;    // header cells after the first
  std::vector<std::string> row_ids;    // first cell of each row
  std::vector<std::vector<std::optional<double>>> values;
};

CsvTable read_csv_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoFailure", "cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (line_no == 1) {
      table.columns.assign(cells.begin() + 1, cells.end());
      continue;
    }
    if (cells.size() != table.columns.size() + 1) {
      throw Error("MalformedLine",
                  path.string() + " line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.columns.size() + 1) + " cells");
    }
    table.row_ids.push_back(cells[0]);
    std::vector<std::optional<double>> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(parse_cell(cells[i]));
    table.values.push_back(std::move(row));
  }
  if (table.columns.empty()) throw Error("MalformedLine", path.string() + ": missing header");
  return table;
}

MetricDirection parse_direction(const std::string& name) {
  if (name == "min" || name == "minimize") return MetricDirection::Minimize;
  if (name == "max" || name == "maximize") return MetricDirection::Maximize;
  throw Error("MalformedNumber", "direction must be min or max, got '" + name + "'");
}

int run_score(const GlobalOptions& global, const BenchmarkConfig& config) {
  const auto dataset = global.load_logs();
  const auto outcome = score_dataset(config, dataset);

  std::vector<std::string> fixed_ids;
  for (const auto* w : config.fixed_workloads()) fixed_ids.push_back(w->id);
  write_score_report(global.out_dir, outcome.leaderboard, fixed_ids, outcome.profiles);

  // Gated times alongside, same layout minus the score column.
  std::string gated = "submission";
  for (const auto& id : fixed_ids) gated += "," + id;
  gated += '\n';
  for (std::size_t s = 0; s < outcome.gated_times.n_submissions(); ++s) {
    gated += outcome.gated_times.submissions()[s];
    for (std::size_t w = 0; w < outcome.gated_times.n_workloads(); ++w) {
      gated += "," + outcome.gated_times.at(s, w).str();
    }
    gated += '\n';
  }
  write_file(fs::path(global.out_dir) / "gated_times.csv", gated);

  for (const auto& row : outcome.leaderboard) {
    std::cout << row.submission << " " << format_double(row.score) << "\n";
  }
  return 0;
}

int run_profile(const GlobalOptions& global, const std::string& times_path) {
  ScoreMatrix matrix;
  std::vector<std::string> workload_ids;
  if (!times_path.empty()) {
    const auto table = read_csv_table(times_path);
    std::vector<std::string> subs = table.row_ids;
    matrix = ScoreMatrix(subs, table.columns);
    workload_ids = table.columns;
    for (std::size_t s = 0; s < subs.size(); ++s) {
      for (std::size_t w = 0; w < table.columns.size(); ++w) {
        const auto& cell = table.values[s][w];
        if (!cell.has_value()) {
          throw Error("MalformedLine", "times table has a missing cell");
        }
        matrix.at(s, w) = std::isinf(*cell) ? ExtendedTime::infinite()
                                            : ExtendedTime::finite(*cell);
      }
    }
  } else {
    const auto config = global.load_config();
    const auto outcome = score_dataset(config, global.load_logs());
    matrix = outcome.gated_times;
    workload_ids = matrix.workloads();
  }

  const auto ratios = performance_ratios(matrix);
  std::error_code ec;
  fs::create_directories(fs::path(global.out_dir) / "profiles", ec);
  for (std::size_t s = 0; s < matrix.n_submissions(); ++s) {
    const auto profile = performance_profile(ratio_row(ratios, s), matrix.n_workloads(),
                                             matrix.submissions()[s]);
    write_file(fs::path(global.out_dir) / "profiles" / (matrix.submissions()[s] + ".csv"),
               profile_csv(profile));
    std::cout << matrix.submissions()[s] << " "
              << format_double(benchmark_score(profile, global.r_max).value) << "\n";
  }
  return 0;
}

int run_targets(const GlobalOptions& global, const std::string& reruns_path) {
  const auto config = global.load_config();
  const auto tuning = global.load_logs();
  if (reruns_path.empty()) throw Error("MissingArgument", "--reruns is required");
  const auto reruns = load_trial_logs(reruns_path);
  const auto targets = derive_targets(config, tuning, reruns);
  write_file(fs::path(global.out_dir) / "targets.csv", targets_csv(targets));
  for (const auto& t : targets) {
    std::cout << t.workload_id << " validation=" << format_double(t.validation_target)
              << " test=" << format_double(t.test_target) << "\n";
  }
  return 0;
}

int run_simulate_tuning(const GlobalOptions& global, const std::string& table_path,
                        std::size_t budget, std::size_t n_sims, const std::string& direction) {
  const auto table = read_csv_table(table_path);
  const auto dir = parse_direction(direction);
  std::string out = "workload,median,q1,q3\n";
  for (std::size_t w = 0; w < table.columns.size(); ++w) {
    std::vector<double> pool;
    for (const auto& row : table.values) {
      if (row[w].has_value() && !std::isinf(*row[w])) pool.push_back(*row[w]);
    }
    const auto r = simulate_tuning(pool, budget, n_sims, mix_seed(global.seed, w), dir);
    out += table.columns[w] + "," + format_double(r.median) + "," + format_double(r.q1) + "," +
           format_double(r.q3) + "\n";
  }
  write_file(fs::path(global.out_dir) / "tuning_simulation.csv", out);
  std::cout << out;
  return 0;
}

int run_phi(const GlobalOptions& global, const std::string& table_path,
            const std::vector<std::string>& maximize_ids) {
  auto table = read_csv_table(table_path);
  ValidationTable vt;
  vt.workload_ids = table.columns;
  for (const auto& id : table.columns) {
    const bool is_max =
        std::find(maximize_ids.begin(), maximize_ids.end(), id) != maximize_ids.end();
    vt.directions.push_back(is_max ? MetricDirection::Maximize : MetricDirection::Minimize);
  }
  vt.point_ids = table.row_ids;
  for (auto& row : table.values) {
    for (auto& cell : row) {
      if (cell.has_value() && std::isinf(*cell)) cell.reset();  // inf counts as failed
    }
  }
  vt.values = table.values;

  const auto result = phi_metric(vt);
  std::string points = "point,phi\n";
  for (std::size_t h = 0; h < vt.point_ids.size(); ++h) {
    points += vt.point_ids[h] + "," + result.per_point_phi[h].str() + "\n";
  }
  write_file(fs::path(global.out_dir) / "phi_points.csv", points);

  std::string workloads = "workload,phi_w\n";
  for (std::size_t w = 0; w < vt.workload_ids.size(); ++w) {
    workloads += vt.workload_ids[w] + "," + result.per_workload_phi[w].str() + "\n";
  }
  write_file(fs::path(global.out_dir) / "phi_workloads.csv", workloads);

  std::cout << "phi " << result.phi.str() << " at point " << vt.point_ids[result.best_point]
            << "\n";
  return 0;
}

int run_transfer_ranks(const GlobalOptions& global, const std::string& table_path,
                       const std::string& direction) {
  const auto table = read_csv_table(table_path);
  if (table.columns.size() != 2) {
    throw Error("MalformedLine", "transfer table needs exactly two columns (base, variant)");
  }
  std::vector<double> base, variant;
  for (const auto& row : table.values) {
    if (!row[0].has_value() || !row[1].has_value()) {
      throw Error("MismatchedPointSets", "every point needs a value on both workloads");
    }
    base.push_back(*row[0]);
    variant.push_back(*row[1]);
  }
  const auto ranks = transfer_ranks(base, variant, parse_direction(direction));
  const std::string out = "rank,value\nbase_to_variant," + std::to_string(ranks.base_to_variant) +
                          "\nvariant_to_base," + std::to_string(ranks.variant_to_base) + "\nmin," +
                          std::to_string(ranks.min_rank) + "\n";
  write_file(fs::path(global.out_dir) / "transfer_ranks.csv", out);
  std::cout << "base_to_variant " << ranks.base_to_variant << "\n"
            << "variant_to_base " << ranks.variant_to_base << "\n"
            << "min " << ranks.min_rank << "\n";
  return 0;
}

int run_optlist(const GlobalOptions& global, const std::string& rankings_path,
                std::size_t budget) {
  // Rankings csv: one column per workload, rows are rank positions, cells
  // are point ids (blank when a column is exhausted).
  std::ifstream in(rankings_path);
  if (!in) throw Error("IoFailure", "cannot open " + rankings_path);
  std::string line;
  std::vector<std::vector<std::string>> rankings;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (line_no == 1) {
      rankings.resize(cells.size());
      continue;
    }
    for (std::size_t w = 0; w < cells.size() && w < rankings.size(); ++w) {
      if (!cells[w].empty()) rankings[w].push_back(cells[w]);
    }
  }
  const auto chosen = build_optlist(rankings, budget);
  std::string out;
  for (const auto& id : chosen) out += id + "\n";
  write_file(fs::path(global.out_dir) / "optlist.txt", out);
  std::cout << out;
  return 0;
}

int run_sample(const GlobalOptions& global, const std::string& submission, std::size_t count) {
  const auto config = global.load_config();
  const auto it = config.search_spaces.find(submission);
  if (it == config.search_spaces.end()) {
    throw Error("MissingSearchSpace", "no search space for submission '" + submission + "'");
  }
  const auto points = it->second.kind == SearchSpace::Kind::Box
                          ? sample_quasirandom(it->second, count, global.seed)
                          : sample_optlist(it->second, count, global.seed);
  std::string out;
  for (const auto& point : points) {
    json j = json::object();
    for (const auto& [name, value] : point.entries) {
      if (const auto* d = std::get_if<double>(&value)) {
        j[name] = *d;
      } else if (const auto* i = std::get_if<std::int64_t>(&value)) {
        j[name] = *i;
      } else {
        j[name] = std::get<std::string>(value);
      }
    }
    out += j.dump() + "\n";
  }
  write_file(fs::path(global.out_dir) / "points.jsonl", out);
  std::cout << out;
  return 0;
}

int run_cost(const GlobalOptions& global, bool heldout, const std::vector<std::string>& subset) {
  const auto config = global.load_config();
  std::map<std::string, double> budgets;
  for (const auto* w : config.fixed_workloads()) budgets.emplace(w->id, w->max_runtime_s);
  const auto est = estimate_costs(budgets, config.ruleset, heldout,
                                  subset.empty()
                                      ? std::optional<std::vector<std::string>>{}
                                      : std::optional<std::vector<std::string>>{subset});
  std::string out = "setting,hours\n";
  out += "one_hyperparameter," + format_double(est.one_hyperparameter_h) + "\n";
  out += "scoring," + format_double(est.scoring_h) + "\n";
  if (est.tuning_h.has_value()) out += "tuning," + format_double(*est.tuning_h) + "\n";
  write_file(fs::path(global.out_dir) / "costs.csv", out);
  std::cout << out;
  return 0;
}

int run_simulate(const GlobalOptions& global) {
  const auto config = global.load_config();

  // Two stock entrants: one tuned well for every workload, one marginal.
  const auto family = [](double difficulty) {
    return [difficulty](const WorkloadSpec& w, const HyperparameterPoint& p) {
      CurveModel m;
      m.direction = w.direction;
      const double reach = p.real_or("reach", 0.5);
      if (w.direction == MetricDirection::Minimize) {
        const double binding = std::min(w.validation_target, w.test_target);
        m.asymptote = binding * (1.0 - 0.4 * reach) * difficulty;
        m.amplitude = std::abs(binding) + 1.0;
      } else {
        const double binding = std::max(w.validation_target, w.test_target);
        m.asymptote = binding * (1.0 + 0.4 * reach) / difficulty;
        m.amplitude = -(std::abs(binding) + 1.0);
      }
      m.rate = 0.12;
      m.noise_scale = 0.0;
      return m;
    };
  };
  std::vector<MockSubmission> entrants;
  auto config_with_spaces = config;
  for (const auto& [name, difficulty] :
       std::vector<std::pair<std::string, double>>{{"steady", 1.0}, {"marginal", 1.2}}) {
    entrants.push_back({name, family(difficulty)});
    if (config_with_spaces.search_spaces.find(name) == config_with_spaces.search_spaces.end()) {
      config_with_spaces.search_spaces.emplace(
          name, SearchSpace::box({DimensionSpec::log_uniform("reach", 0.1, 1.0)}));
    }
  }

  const auto outcome = run_mock_competition(config_with_spaces, entrants, global.seed);
  write_file(fs::path(global.out_dir) / "trial_logs.jsonl", outcome.log_text);
  std::vector<std::string> fixed_ids;
  for (const auto* w : config.fixed_workloads()) fixed_ids.push_back(w->id);
  write_score_report(global.out_dir, outcome.scoring.leaderboard, fixed_ids,
                     outcome.scoring.profiles);
  std::cout << "wrote " << outcome.dataset.trials.size() << " trials\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-to-result benchmark arbitration"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config_path, "benchmark configuration file")->envname("TTR_CONFIG");
  app.add_option("--logs", global.logs_path, "trial log file or directory of *.jsonl");
  app.add_option("--out", global.out_dir, "output directory");
  app.add_option("--seed", global.seed, "random seed");
  app.add_option("--r-max", global.r_max, "profile integration limit")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { global.r_max_set = true; });

  auto* score = app.add_subcommand("score", "score trial logs into a leaderboard");
  std::string ruleset_kind;
  int studies = 0, trials = 0;
  double multiplier = 0.0;
  score->add_option("--ruleset", ruleset_kind, "external|self (overrides the config)");
  score->add_option("--studies", studies, "override the study count");
  score->add_option("--trials", trials, "override trials per study");
  score->add_option("--budget-multiplier", multiplier, "override the self-tuning multiplier");

  auto* profile = app.add_subcommand("profile", "emit performance profile tables");
  std::string times_path;
  profile->add_option("--times", times_path, "times csv (submission rows, workload columns)");

  auto* targets = app.add_subcommand("targets", "derive targets from tuning and rerun logs");
  std::string reruns_path;
  targets->add_option("--reruns", reruns_path, "rerun log file or directory");

  auto* simtune = app.add_subcommand("simulate-tuning", "bootstrap best-of-T tuning outcomes");
  std::string table_path, direction = "min";
  std::size_t budget = 20, n_sims = 1000;
  simtune->add_option("--table", table_path, "validation csv (point rows, workload columns)")
      ->required();
  simtune->add_option("--budget", budget, "trials per simulated study");
  simtune->add_option("--sims", n_sims, "number of simulations");
  simtune->add_option("--direction", direction, "min|max");

  auto* phi = app.add_subcommand("phi", "workload-sensitivity of shared hyperparameters");
  std::string phi_table;
  std::vector<std::string> maximize_ids;
  phi->add_option("--table", phi_table, "validation csv (point rows, workload columns)")
      ->required();
  phi->add_option("--maximize", maximize_ids, "workload columns whose metric is maximized")
      ->delimiter(',');

  auto* ranks = app.add_subcommand("transfer-ranks", "hyperparameter transfer between workloads");
  std::string ranks_table, ranks_direction = "min";
  ranks->add_option("--table", ranks_table, "csv with columns point,base,variant")->required();
  ranks->add_option("--direction", ranks_direction, "min|max");

  auto* optlist = app.add_subcommand("optlist", "greedy round-robin point list construction");
  std::string rankings_path;
  std::size_t optlist_budget = 20;
  optlist->add_option("--rankings", rankings_path, "csv of per-workload candidate rankings")
      ->required();
  optlist->add_option("--budget", optlist_budget, "list size");

  auto* sample = app.add_subcommand("sample", "draw tuning points from a search space");
  std::string sample_submission;
  std::size_t sample_count = 20;
  sample->add_option("--submission", sample_submission, "submission whose space to sample")
      ->required();
  sample->add_option("--count", sample_count, "number of points");

  auto* cost = app.add_subcommand("cost", "estimate evaluation cost in hours");
  bool heldout = false;
  std::vector<std::string> subset;
  cost->add_flag("--heldout", heldout, "include one held-out variant per workload");
  cost->add_option("--subset", subset, "restrict to these workload ids")->delimiter(',');

  auto* simulate = app.add_subcommand("simulate", "generate synthetic competition logs");
  simulate->group("");  // test fixture generation; hidden from help

  CLI11_PARSE(app, argc, argv);

  try {
    if (score->parsed()) {
      auto config = global.load_config();
      if (!ruleset_kind.empty()) {
        config.ruleset.kind =
            ruleset_kind == "self" ? RulesetKind::SelfTuning : RulesetKind::ExternalTuning;
      }
      if (studies > 0) config.ruleset.studies = studies;
      if (trials > 0) config.ruleset.trials_per_study = trials;
      if (multiplier > 0.0) config.ruleset.budget_multiplier = multiplier;
      config.ruleset.validate();
      return run_score(global, config);
    }
    if (profile->parsed()) return run_profile(global, times_path);
    if (targets->parsed()) return run_targets(global, reruns_path);
    if (simtune->parsed()) return run_simulate_tuning(global, table_path, budget, n_sims, direction);
    if (phi->parsed()) return run_phi(global, phi_table, maximize_ids);
    if (ranks->parsed()) return run_transfer_ranks(global, ranks_table, ranks_direction);
    if (optlist->parsed()) return run_optlist(global, rankings_path, optlist_budget);
    if (sample->parsed()) return run_sample(global, sample_submission, sample_count);
    if (cost->parsed()) return run_cost(global, heldout, subset);
    if (simulate->parsed()) return run_simulate(global);
  } catch (const Error& e) {
    json err;
    err["error"] = e.code();
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err;
    err["error"] = "InternalError";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
