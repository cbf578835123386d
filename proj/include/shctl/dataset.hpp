#ifndef SHCTL_DATASET_HPP_
#define SHCTL_DATASET_HPP_

// Training-data export: random start/goal pairs, potential-descent routes
// along them, and the single-command goal likelihood at every route step.
//
// Container (all fields little-endian):
//   char[4]  magic "SCDS"
//   u32      version (1)
//   u32      width, height
//   f32      resolution, origin_x, origin_y, speed
//   u64      sample count
//   u8[W*H]  occupancy, row-major, 0 Free / 1 Occupied (inflated map)
// then per sample:
//   f32[2]   x_0       route start, meters
//   f32[2]   x_t       position, meters
//   f32[2]   v_t       command, m/s
//   f32[W*H] P(g | v_t, x_t, M), row-major, 0 on Occupied/unreachable cells

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "shctl/pseudo_user.hpp"

namespace shctl {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr int kEndpointAttempts = 10000;  // rejection cap per pair

struct EndpointPair {
  WorldPoint start;  // cell centers
  WorldPoint goal;
};

// `count` pairs of Free cell centers more than `min_distance` meters apart.
// Throws DatasetError when min_distance is not below the map diagonal or a
// pair is not found within kEndpointAttempts draws.
std::vector<EndpointPair> sample_endpoints(const OccupancyGrid& grid, double min_distance,
                                           std::size_t count, Rng& rng);

// Half the map diagonal.
double default_min_distance(const OccupancyGrid& grid);

struct RouteStep {
  WorldPoint position;
  VelocityCommand velocity;  // |v| = speed
};

struct Route {
  WorldPoint start;
  std::vector<RouteStep> steps;
};

struct TraceParams {
  double speed = 0.3;
  double dt = 0.05;
  double goal_radius = 0.3;
};

// Descends the goal's potential from `start` until within goal_radius of the
// goal cell center, recording position and command at every step. Throws
// DatasetError when the goal is unreachable.
Route trace_route(const OccupancyGrid& grid, WorldPoint start, WorldPoint goal,
                  const TraceParams& params);

// Computes the likelihood grid for every route step and writes the container.
// Routes are processed in parallel; records keep route order. Returns the
// number of records written.
std::size_t emit_samples(const OccupancyGrid& grid, const std::vector<Route>& routes,
                         double speed, const std::filesystem::path& out);

struct GenerateOptions {
  std::size_t samples = 1000;
  double min_distance = 0.0;  // <= 0: default_min_distance
  std::uint64_t seed = 1;
  TraceParams trace{};
};

// Draws pairs and traces routes until `samples` steps are collected (the
// last route is truncated), then emits them.
std::size_t generate_dataset(const OccupancyGrid& grid, const GenerateOptions& options,
                             const std::filesystem::path& out);

struct TrainingSample {
  WorldPoint x0;
  WorldPoint xt;
  VelocityCommand vt;
  std::vector<float> likelihood;
};

struct Dataset {
  OccupancyGrid grid;
  float speed = 0.0f;
  std::vector<TrainingSample> samples;
};

// Values come back exactly as stored (f32). Throws DatasetError on a bad
// magic, version or truncated file.
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace shctl

#endif  // SHCTL_DATASET_HPP_
