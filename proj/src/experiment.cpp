#include "shctl/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "shctl/stats.hpp"

namespace shctl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

class LineError {
 public:
  LineError(std::string source, int line) : source_(std::move(source)), line_(line) {}
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + msg);
  }

 private:
  std::string source_;
  int line_;
};

double require_double(const std::string& v, const LineError& at, const std::string& key) {
  double d = 0.0;
  if (!parse_number(v, d)) at.fail(key + ": expected a number, got `" + v + "`");
  return d;
}

double require_positive(const std::string& v, const LineError& at, const std::string& key) {
  const double d = require_double(v, at, key);
  if (!(d > 0.0)) at.fail(key + ": must be positive");
  return d;
}

WorldPoint require_point(const std::string& v, const LineError& at, const std::string& key) {
  std::istringstream in(v);
  WorldPoint p;
  std::string rest;
  if (!(in >> p.x >> p.y) || (in >> rest)) at.fail(key + ": expected `x y` in meters");
  return p;
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string accuracy_text(double a) { return format("%.2f", a); }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source,
                              const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.source = source;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(line.substr(0, hash));
    if (body.empty()) continue;
    const LineError at(source, lineno);
    const auto eq = body.find('=');
    if (eq == std::string::npos) at.fail("expected `key = value`");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) at.fail("missing key");
    if (value.empty()) at.fail(key + ": missing value");
    if (cfg.key_lines.count(key)) at.fail(key + ": duplicate key");
    cfg.key_lines[key] = lineno;

    if (key == "map") {
      std::filesystem::path p(value);
      cfg.map_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else if (key == "start") {
      cfg.start = require_point(value, at, key);
    } else if (key == "goal") {
      cfg.goal = require_point(value, at, key);
    } else if (key == "directions") {
      cfg.directions.clear();
      for (const auto& item : split(value, ',')) {
        auto d = parse_direction_set(item);
        if (!d) at.fail("directions: unknown direction set `" + item + "`");
        cfg.directions.push_back(*d);
      }
    } else if (key == "accuracies") {
      cfg.accuracies.clear();
      for (const auto& item : split(value, ',')) {
        const double a = require_double(item, at, key);
        if (!(a >= 0.0 && a <= 1.0)) at.fail("accuracies: `" + item + "` outside [0, 1]");
        cfg.accuracies.push_back(a);
      }
    } else if (key == "modes") {
      cfg.modes.clear();
      for (const auto& item : split(value, ',')) {
        auto m = parse_control_mode(item);
        if (!m) at.fail("modes: unknown mode `" + item + "`");
        cfg.modes.push_back(*m);
      }
    } else if (key == "trials") {
      if (!parse_number(value, cfg.trials) || cfg.trials < 1) {
        at.fail("trials: expected an integer >= 1");
      }
    } else if (key == "seed") {
      if (!parse_number(value, cfg.base_seed)) at.fail("seed: expected a nonnegative integer");
    } else if (key == "period") {
      cfg.period = require_positive(value, at, key);
    } else if (key == "window") {
      if (!parse_number(value, cfg.sim.window)) at.fail("window: expected a nonnegative integer");
    } else if (key == "threshold") {
      cfg.sim.threshold = require_double(value, at, key);
      if (!(cfg.sim.threshold > 0.0 && cfg.sim.threshold < 1.0)) {
        at.fail("threshold: must lie in (0, 1)");
      }
    } else if (key == "beta") {
      cfg.sim.beta = require_double(value, at, key);
      if (!(cfg.sim.beta >= 0.0)) at.fail("beta: must be nonnegative");
    } else if (key == "speed") {
      cfg.sim.speed = require_positive(value, at, key);
    } else if (key == "radius") {
      cfg.robot_radius = require_double(value, at, key);
      if (!(cfg.robot_radius >= 0.0)) at.fail("radius: must be nonnegative");
    } else if (key == "dt") {
      cfg.sim.dt = require_positive(value, at, key);
    } else if (key == "timeout") {
      cfg.sim.timeout = require_positive(value, at, key);
    } else if (key == "goal_radius") {
      cfg.sim.goal_radius = require_positive(value, at, key);
    } else if (key == "delta") {
      cfg.sim.delta = require_double(value, at, key);
    } else {
      at.fail("unknown key `" + key + "`");
    }
  }
  for (const char* required : {"map", "start", "goal"}) {
    if (!cfg.key_lines.count(required)) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": missing required key `" +
                        required + "`");
    }
  }
  if (cfg.directions.empty() || cfg.accuracies.empty() || cfg.modes.empty()) {
    throw ConfigError(source + ": directions, accuracies and modes must be nonempty");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ":0: cannot open config file");
  return parse_config(in, path.string(), path.parent_path());
}

std::vector<ConditionCell> condition_cells(const ExperimentConfig& config) {
  std::vector<ConditionCell> cells;
  for (DirectionSet d : config.directions) {
    std::vector<double> levels = config.accuracies;
    if (d == DirectionSet::All) levels = {1.0};
    for (double a : levels) {
      for (ControlMode m : config.modes) {
        const ConditionCell c{d, a, m};
        if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
      }
    }
  }
  return cells;
}

std::uint64_t trial_seed(std::uint64_t base_seed, const ConditionCell& cell, int trial) {
  const std::string key = std::string(to_string(cell.directions)) + "|" +
                          accuracy_text(cell.accuracy) + "|" +
                          std::string(to_string(cell.mode)) + "|" + std::to_string(trial);
  return base_seed + fnv1a(key);
}

PreparedExperiment prepare(const ExperimentConfig& config) {
  auto anchored = [&](const std::string& key, const std::string& msg) {
    const auto it = config.key_lines.find(key);
    const int line = it == config.key_lines.end() ? 0 : it->second;
    return ConfigError(config.source + ":" + std::to_string(line) + ": " + msg);
  };
  OccupancyGrid raw = [&] {
    try {
      return load_map(config.map_path);
    } catch (const MapError& e) {
      throw anchored("map", std::string("map: ") + e.what());
    }
  }();
  OccupancyGrid grid = inflate(raw, config.robot_radius);
  if (!is_free_point(grid, config.start)) {
    throw anchored("start", "start: not in a free cell of the inflated map");
  }
  const auto goal = world_to_cell(grid, config.goal);
  if (!goal || !grid.is_free(*goal)) {
    throw anchored("goal", "goal: not in a free cell of the inflated map");
  }
  const PotentialField field = compute_field(grid, *goal);
  if (!field.reachable(*world_to_cell(grid, config.start))) {
    throw anchored("goal", "goal: unreachable from start");
  }
  return {std::move(grid), *goal};
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& config,
                                        const PreparedExperiment& prepared,
                                        const std::optional<std::filesystem::path>& trajectory_dir) {
  const auto cells = condition_cells(config);
  const std::size_t per_cell = static_cast<std::size_t>(config.trials);
  std::vector<TrialResult> results(cells.size() * per_cell);
  SimParams params = config.sim;
  params.backend = kernels::Backend::Serial;  // parallelism is across trials

  const auto jobs = static_cast<std::int64_t>(results.size());
  std::vector<std::string> errors(results.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t j = 0; j < jobs; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const ConditionCell& cell = cells[idx / per_cell];
    const int trial = static_cast<int>(idx % per_cell);
    const InputCondition cond{cell.directions, cell.accuracy, config.period, cell.mode};
    try {
      std::vector<TrajectorySample> traj;
      results[idx] = run_trial(prepared.grid, config.start, prepared.goal, cond,
                               trial_seed(config.base_seed, cell, trial), params,
                               trajectory_dir ? &traj : nullptr);
      if (trajectory_dir) {
        const std::string name = std::string(to_string(cell.directions)) + "_" +
                                 accuracy_text(cell.accuracy) + "_" +
                                 std::string(to_string(cell.mode)) + "_" +
                                 std::to_string(trial) + ".csv";
        std::ofstream out(*trajectory_dir / name);
        if (!out) throw std::runtime_error("cannot write trajectory " + name);
        write_trajectory_csv(traj, out);
      }
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }
  return results;
}

std::vector<ResultRow> to_rows(const std::vector<TrialResult>& results) {
  std::vector<ResultRow> rows;
  rows.reserve(results.size());
  for (const auto& r : results) {
    ResultRow row;
    row.direction = to_string(r.condition.directions);
    row.accuracy = accuracy_text(r.condition.accuracy);
    row.mode = to_string(r.condition.mode);
    row.seed = r.seed;
    row.success = r.success;
    row.collisions = r.collisions;
    // Round through the printed form so summaries recomputed from the CSV match.
    row.elapsed = std::stod(format("%.3f", r.elapsed));
    row.path_length = std::stod(format("%.4f", r.path_length));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.direction << ',' << r.accuracy << ',' << r.mode << ',' << r.seed << ','
        << (r.success ? 1 : 0) << ',' << static_cast<long long>(r.collisions) << ','
        << format("%.3f", r.elapsed) << ',' << format("%.4f", r.path_length) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultsHeader) {
    throw std::runtime_error("results CSV: unexpected header");
  }
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) {
      throw std::runtime_error("results CSV line " + std::to_string(lineno) + ": expected 8 fields");
    }
    ResultRow r;
    r.direction = f[0];
    r.accuracy = f[1];
    r.mode = f[2];
    int success = 0;
    if (!parse_number(f[3], r.seed) || !parse_number(f[4], success) ||
        !parse_number(f[5], r.collisions) || !parse_number(f[6], r.elapsed) ||
        !parse_number(f[7], r.path_length)) {
      throw std::runtime_error("results CSV line " + std::to_string(lineno) + ": bad number");
    }
    r.success = success != 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  struct Group {
    SummaryRow row;
    std::vector<double> collisions, elapsed, path;
    int successes = 0;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.row.direction == r.direction && g.row.accuracy == r.accuracy &&
             g.row.mode == r.mode;
    });
    if (it == groups.end()) {
      groups.push_back({});
      it = std::prev(groups.end());
      it->row.direction = r.direction;
      it->row.accuracy = r.accuracy;
      it->row.mode = r.mode;
    }
    it->collisions.push_back(r.collisions);
    it->elapsed.push_back(r.elapsed);
    it->path.push_back(r.path_length);
    it->successes += r.success ? 1 : 0;
  }
  for (auto& g : groups) {
    g.row.trials = static_cast<int>(g.collisions.size());
    g.row.collisions = {stats::mean(g.collisions), stats::stddev(g.collisions), std::nullopt};
    g.row.elapsed = {stats::mean(g.elapsed), stats::stddev(g.elapsed), std::nullopt};
    g.row.path_length = {stats::mean(g.path), stats::stddev(g.path), std::nullopt};
    g.row.success_rate = static_cast<double>(g.successes) / g.row.trials;
  }
  // Pair each shared cell with its direct counterpart.
  for (auto& a : groups) {
    if (a.row.mode != "shared") continue;
    for (auto& b : groups) {
      if (b.row.mode != "direct" || b.row.direction != a.row.direction ||
          b.row.accuracy != a.row.accuracy) {
        continue;
      }
      auto set = [](MetricSummary& x, MetricSummary& y, const std::vector<double>& xs,
                    const std::vector<double>& ys) {
        if (auto w = stats::welch_test(xs, ys)) {
          x.p = w->p;
          y.p = w->p;
        }
      };
      set(a.row.collisions, b.row.collisions, a.collisions, b.collisions);
      set(a.row.elapsed, b.row.elapsed, a.elapsed, b.elapsed);
      set(a.row.path_length, b.row.path_length, a.path, b.path);
    }
  }
  std::vector<SummaryRow> out;
  for (auto& g : groups) out.push_back(std::move(g.row));
  return out;
}

void write_summary_csv(const std::vector<SummaryRow>& summary, std::ostream& out) {
  out << "direction,accuracy,mode,trials,collisions_mean,collisions_std,elapsed_mean_s,"
         "elapsed_std_s,path_length_mean_m,path_length_std_m,success_rate,collisions_p,"
         "elapsed_p,path_length_p,collisions_sig,elapsed_sig,path_length_sig\n";
  auto p_text = [](const MetricSummary& m) {
    return m.p ? format("%.6g", *m.p) : std::string();
  };
  auto sig_text = [](const MetricSummary& m) {
    return m.p ? std::string(static_cast<std::size_t>(stats::significance_level(*m.p)), '*')
               : std::string();
  };
  for (const auto& s : summary) {
    out << s.direction << ',' << s.accuracy << ',' << s.mode << ',' << s.trials << ','
        << format("%.4f", s.collisions.mean) << ',' << format("%.4f", s.collisions.std) << ','
        << format("%.4f", s.elapsed.mean) << ',' << format("%.4f", s.elapsed.std) << ','
        << format("%.4f", s.path_length.mean) << ',' << format("%.4f", s.path_length.std)
        << ',' << format("%.4f", s.success_rate) << ',' << p_text(s.collisions) << ','
        << p_text(s.elapsed) << ',' << p_text(s.path_length) << ',' << sig_text(s.collisions)
        << ',' << sig_text(s.elapsed) << ',' << sig_text(s.path_length) << '\n';
  }
}

}  // namespace shctl
