#ifndef SHCTL_EXPERIMENT_HPP_
#define SHCTL_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shctl/simulator.hpp"

namespace shctl {

// Config problem; what() is anchored as `file:line: message`.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain-text `key = value` file, '#' starts a comment. Keys:
//   map, start, goal                 required; start/goal as `x y` meters
//   directions   all, eight, four    comma separated
//   accuracies   1.0, 0.9, ...       ignored (fixed at 1.0) for `all`
//   modes        shared, direct
//   trials, seed, period
//   window, threshold, beta          estimator N, T, beta
//   speed, radius, dt, timeout, goal_radius, delta
struct ExperimentConfig {
  std::string source = "<config>";
  std::filesystem::path map_path;
  WorldPoint start{};
  WorldPoint goal{};
  std::vector<DirectionSet> directions{DirectionSet::All, DirectionSet::Eight,
                                       DirectionSet::Four};
  std::vector<double> accuracies{1.0, 0.9, 0.8, 0.7};
  std::vector<ControlMode> modes{ControlMode::Shared, ControlMode::Direct};
  int trials = 20;
  std::uint64_t base_seed = 1;
  double period = 1.0;
  double robot_radius = 0.25;
  SimParams sim{};
  std::map<std::string, int> key_lines;  // for line-anchored validation errors
};

// Relative map paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::string& source,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct ConditionCell {
  DirectionSet directions;
  double accuracy;
  ControlMode mode;

  friend bool operator==(const ConditionCell&, const ConditionCell&) = default;
};

// Direction-major, then accuracy, then mode. `all` contributes a single
// accuracy level (1.0).
std::vector<ConditionCell> condition_cells(const ExperimentConfig& config);

// base_seed + FNV-1a hash of the cell and trial index.
std::uint64_t trial_seed(std::uint64_t base_seed, const ConditionCell& cell, int trial);

// The loaded map inflated by the robot radius, with start/goal checked.
struct PreparedExperiment {
  OccupancyGrid grid;
  Cell goal;
};
PreparedExperiment prepare(const ExperimentConfig& config);

// All trials, condition-then-trial order regardless of worker scheduling.
// Per-trial trajectories go to `trajectory_dir` when given.
std::vector<TrialResult> run_experiment(const ExperimentConfig& config,
                                        const PreparedExperiment& prepared,
                                        const std::optional<std::filesystem::path>& trajectory_dir = {});

// One results-CSV row; numeric fields hold exactly the values printed.
struct ResultRow {
  std::string direction;
  std::string accuracy;
  std::string mode;
  std::uint64_t seed = 0;
  bool success = false;
  double collisions = 0.0;
  double elapsed = 0.0;
  double path_length = 0.0;
};

inline constexpr const char* kResultsHeader =
    "direction,accuracy,mode,seed,success,collisions,elapsed_s,path_length_m";

std::vector<ResultRow> to_rows(const std::vector<TrialResult>& results);
void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);
std::vector<ResultRow> read_results_csv(std::istream& in);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;
  std::optional<double> p;  // shared vs direct, same direction/accuracy
};

struct SummaryRow {
  std::string direction;
  std::string accuracy;
  std::string mode;
  int trials = 0;
  MetricSummary collisions;
  MetricSummary elapsed;
  MetricSummary path_length;
  double success_rate = 0.0;
};

// Groups rows by (direction, accuracy, mode) in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(const std::vector<SummaryRow>& summary, std::ostream& out);

}  // namespace shctl

#endif  // SHCTL_EXPERIMENT_HPP_
