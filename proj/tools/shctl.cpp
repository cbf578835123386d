// Command-line front end: experiment batches, dataset export, live server.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "shctl/dataset.hpp"
#include "shctl/experiment.hpp"
#include "shctl/stats.hpp"
#include "shctl/teleop/server.hpp"

namespace {

using namespace shctl;

constexpr int kConfigError = 2;

std::optional<WorldPoint> parse_point(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::istringstream in(text);
  WorldPoint p;
  std::string rest;
  if (!(in >> p.x >> p.y) || (in >> rest)) throw CLI::ValidationError("expected \"x y\" in meters");
  return p;
}

void print_summary(const std::vector<SummaryRow>& summary) {
  std::printf("%-6s %-5s %-7s %9s %15s %15s %15s %8s\n", "dir", "acc", "mode", "trials",
              "collisions", "elapsed_s", "path_m", "success");
  for (const auto& s : summary) {
    auto cell = [](const MetricSummary& m) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.2f±%.2f%s", m.mean, m.std,
                    m.p ? std::string(static_cast<std::size_t>(stats::significance_level(*m.p)),
                                      '*')
                              .c_str()
                        : "");
      return std::string(buf);
    };
    std::printf("%-6s %-5s %-7s %9d %15s %15s %15s %8.2f\n", s.direction.c_str(),
                s.accuracy.c_str(), s.mode.c_str(), s.trials, cell(s.collisions).c_str(),
                cell(s.elapsed).c_str(), cell(s.path_length).c_str(), s.success_rate);
  }
}

int simulate(const std::string& config_path, const std::string& out, const std::string& summary,
             const std::string& traj_dir, const std::string& field_csv) {
  ExperimentConfig config;
  PreparedExperiment prepared{OccupancyGrid::free_space(3, 3, 1.0), {}};
  try {
    config = load_config(config_path);
    prepared = prepare(config);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  }
  if (!field_csv.empty()) {
    std::ofstream f(field_csv);
    if (!f) throw std::runtime_error(field_csv + ": cannot open for writing");
    write_field_csv(compute_field(prepared.grid, prepared.goal), f);
  }
  std::optional<std::filesystem::path> traj;
  if (!traj_dir.empty()) {
    std::filesystem::create_directories(traj_dir);
    traj = traj_dir;
  }
  const auto rows = to_rows(run_experiment(config, prepared, traj));
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error(out + ": cannot open for writing");
    write_results_csv(rows, f);
  }
  const auto table = summarize(rows);
  if (!summary.empty()) {
    std::ofstream f(summary);
    if (!f) throw std::runtime_error(summary + ": cannot open for writing");
    write_summary_csv(table, f);
  }
  print_summary(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-weighted shared control: experiments, dataset export, live teleop"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run the condition matrix of an experiment config");
  std::string config_path, out, summary, traj_dir, field_csv;
  sim->add_option("--config", config_path, "Experiment config file")->required();
  sim->add_option("--out", out, "Per-trial results CSV");
  sim->add_option("--summary", summary, "Per-condition summary CSV");
  sim->add_option("--trajectories", traj_dir, "Directory for per-trial trajectory CSVs");
  sim->add_option("--dump-field", field_csv, "Write the goal's potential field as CSV");

  auto* gen = app.add_subcommand("gen-dataset", "Export likelihood training samples");
  std::string map_path, dataset_out;
  GenerateOptions gen_opts;
  double radius = 0.25;
  gen->add_option("--map", map_path, "Map file (ASCII or P5)")->required();
  gen->add_option("--samples", gen_opts.samples, "Number of records to write")->required();
  gen->add_option("--min-distance", gen_opts.min_distance,
                  "Minimum start-goal distance in meters (default: half the map diagonal)");
  gen->add_option("--seed", gen_opts.seed, "Random seed");
  gen->add_option("--out", dataset_out, "Output file")->required();
  gen->add_option("--radius", radius, "Robot radius used to inflate the map")->capture_default_str();
  gen->add_option("--speed", gen_opts.trace.speed, "Command speed, m/s")->capture_default_str();
  gen->add_option("--dt", gen_opts.trace.dt, "Route step, s")->capture_default_str();

  auto* srv = app.add_subcommand("serve", "Live teleoperation server");
  std::string serve_map, start_text, goal_text;
  teleop::ServerOptions server_opts;
  double serve_radius = 0.25;
  std::string static_dir;
  srv->add_option("--map", serve_map, "Map file (ASCII or P5)")->required();
  srv->add_option("--port", server_opts.port, "TCP port")->capture_default_str();
  srv->add_option("--tick-hz", server_opts.tick_hz, "Simulation and frame rate")
      ->capture_default_str();
  srv->add_option("--address", server_opts.address, "Listen address")->capture_default_str();
  srv->add_option("--start", start_text, "Default start \"x y\" in meters");
  srv->add_option("--goal", goal_text, "Default goal \"x y\" in meters");
  srv->add_option("--radius", serve_radius, "Robot radius used to inflate the map")
      ->capture_default_str();
  srv->add_option("--timeout", server_opts.params.timeout, "Session timeout, s")
      ->capture_default_str();
  srv->add_option("--static", static_dir, "Directory served over plain HTTP");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(config_path, out, summary, traj_dir, field_csv);

    if (*gen) {
      const OccupancyGrid grid = inflate(load_map(map_path), radius);
      const std::size_t n = generate_dataset(grid, gen_opts, dataset_out);
      std::cout << "wrote " << n << " samples to " << dataset_out << '\n';
      return 0;
    }

    if (*srv) {
      teleop::MapEntry entry;
      entry.name = std::filesystem::path(serve_map).stem().string();
      entry.grid = std::make_shared<const OccupancyGrid>(inflate(load_map(serve_map), serve_radius));
      entry.start = parse_point(start_text);
      entry.goal = parse_point(goal_text);
      if (!static_dir.empty()) server_opts.static_dir = static_dir;
      server_opts.handle_signals = true;
      teleop::Server server({entry}, server_opts);
      std::cout << "serving map `" << entry.name << "` on port " << server.port() << std::endl;
      server.run();
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
