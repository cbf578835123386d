#include "shctl/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "shctl/autonomy.hpp"
#include "shctl/simulator.hpp"

namespace shctl {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'D', 'S'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}
  std::uint8_t u8() {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) {
      throw DatasetError(path_ + ": truncated at byte " + std::to_string(offset_));
    }
    ++offset_;
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  std::istream& in_;
  std::string path_;
  std::size_t offset_ = 0;
};

void write_point(Writer& w, double x, double y) {
  w.f32(static_cast<float>(x));
  w.f32(static_cast<float>(y));
}

}  // namespace

double default_min_distance(const OccupancyGrid& grid) {
  return 0.5 * std::hypot(grid.width(), grid.height()) * grid.resolution();
}

std::vector<EndpointPair> sample_endpoints(const OccupancyGrid& grid, double min_distance,
                                           std::size_t count, Rng& rng) {
  const double diagonal = std::hypot(grid.width(), grid.height()) * grid.resolution();
  if (!(min_distance < diagonal)) {
    throw DatasetError("min distance " + std::to_string(min_distance) +
                       " m is not below the map diagonal " + std::to_string(diagonal) + " m");
  }
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_free_index(i)) free.push_back(i);
  }
  if (free.size() < 2) throw DatasetError("map too constrained: fewer than two free cells");

  std::vector<EndpointPair> pairs;
  pairs.reserve(count);
  while (pairs.size() < count) {
    bool found = false;
    for (int attempt = 0; attempt < kEndpointAttempts && !found; ++attempt) {
      const WorldPoint a = cell_to_world(grid, grid.cell_at(free[rng() % free.size()]));
      const WorldPoint b = cell_to_world(grid, grid.cell_at(free[rng() % free.size()]));
      if (distance(a, b) > min_distance) {
        pairs.push_back({a, b});
        found = true;
      }
    }
    if (!found) {
      throw DatasetError("map too constrained: no free pair farther apart than " +
                         std::to_string(min_distance) + " m in " +
                         std::to_string(kEndpointAttempts) + " attempts");
    }
  }
  return pairs;
}

Route trace_route(const OccupancyGrid& grid, WorldPoint start, WorldPoint goal,
                  const TraceParams& params) {
  const auto goal_cell = world_to_cell(grid, goal);
  const auto start_cell = world_to_cell(grid, start);
  if (!goal_cell || !grid.is_free(*goal_cell)) throw DatasetError("goal is not in a free cell");
  if (!start_cell || !grid.is_free(*start_cell)) throw DatasetError("start is not in a free cell");
  const PotentialField field = compute_field(grid, *goal_cell);
  if (!field.reachable(*start_cell)) throw DatasetError("goal is unreachable from start");

  const WorldPoint target = cell_to_world(grid, *goal_cell);
  // Generous bound on the steps a descent can need; guards against a stall.
  const double budget = field.value(*start_cell) / (params.speed * params.dt);
  const auto max_steps = static_cast<std::size_t>(4.0 * budget) + 100;

  Route route{start, {}};
  SimState state;
  state.position = start;
  while (distance(state.position, target) > params.goal_radius) {
    if (route.steps.size() >= max_steps) {
      throw DatasetError("route did not converge within " + std::to_string(max_steps) +
                         " steps");
    }
    const VelocityCommand v =
        command_from_field(field, grid, state.position, params.speed);
    if (v.is_zero()) break;  // inside the goal cell
    route.steps.push_back({state.position, v});
    state = step(state, v, params.dt, grid);
  }
  return route;
}

std::size_t emit_samples(const OccupancyGrid& grid, const std::vector<Route>& routes,
                         double speed, const std::filesystem::path& out) {
  std::ofstream file(out, std::ios::binary);
  if (!file) throw DatasetError(out.string() + ": cannot open for writing");
  Writer w(file);

  std::uint64_t total = 0;
  for (const auto& r : routes) total += r.steps.size();
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(grid.width()));
  w.u32(static_cast<std::uint32_t>(grid.height()));
  w.f32(static_cast<float>(grid.resolution()));
  write_point(w, grid.origin().x, grid.origin().y);
  w.f32(static_cast<float>(speed));
  w.u64(total);
  for (CellState s : grid.cells()) w.u8(s == CellState::Free ? 0 : 1);

  // Bounded batches keep memory flat for large exports.
  constexpr std::size_t kBatch = 32;
  for (std::size_t begin = 0; begin < routes.size(); begin += kBatch) {
    const std::size_t end = std::min(routes.size(), begin + kBatch);
    std::vector<std::vector<std::vector<double>>> grids(end - begin);
    const auto n = static_cast<std::int64_t>(end - begin);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < n; ++k) {
      const Route& r = routes[begin + static_cast<std::size_t>(k)];
      auto& dst = grids[static_cast<std::size_t>(k)];
      dst.reserve(r.steps.size());
      for (const auto& s : r.steps) {
        dst.push_back(step_likelihood(grid, s.position, s.velocity, speed, 0.0,
                                      kernels::Backend::Serial));
      }
    }
    for (std::size_t k = 0; k < grids.size(); ++k) {
      const Route& r = routes[begin + k];
      for (std::size_t i = 0; i < r.steps.size(); ++i) {
        write_point(w, r.start.x, r.start.y);
        write_point(w, r.steps[i].position.x, r.steps[i].position.y);
        write_point(w, r.steps[i].velocity.vx, r.steps[i].velocity.vy);
        for (double p : grids[k][i]) w.f32(static_cast<float>(p));
      }
    }
    if (!file) throw DatasetError(out.string() + ": write failed");
  }
  file.flush();
  if (!file) throw DatasetError(out.string() + ": write failed");
  return static_cast<std::size_t>(total);
}

std::size_t generate_dataset(const OccupancyGrid& grid, const GenerateOptions& options,
                             const std::filesystem::path& out) {
  const double min_distance =
      options.min_distance > 0.0 ? options.min_distance : default_min_distance(grid);
  Rng rng(options.seed);
  std::vector<Route> routes;
  std::size_t collected = 0;
  // Draws are retried on disconnected pairs, bounded like endpoint sampling.
  int failures = 0;
  while (collected < options.samples) {
    const EndpointPair pair = sample_endpoints(grid, min_distance, 1, rng).front();
    const Cell a = *world_to_cell(grid, pair.start);
    const Cell b = *world_to_cell(grid, pair.goal);
    if (!compute_field(grid, b).reachable(a)) {
      if (++failures >= kEndpointAttempts) {
        throw DatasetError("map too constrained: no connected pair found");
      }
      continue;
    }
    Route r = trace_route(grid, pair.start, pair.goal, options.trace);
    const std::size_t take = std::min(r.steps.size(), options.samples - collected);
    r.steps.resize(take);
    collected += take;
    routes.push_back(std::move(r));
  }
  return emit_samples(grid, routes, options.trace.speed, out);
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DatasetError(path.string() + ": cannot open");
  Reader r(file, path.string());
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0) throw DatasetError(path.string() + ": bad magic");
  const std::uint32_t version = r.u32();
  if (version != kDatasetVersion) {
    throw DatasetError(path.string() + ": unsupported version " + std::to_string(version));
  }
  const auto width = static_cast<int>(r.u32());
  const auto height = static_cast<int>(r.u32());
  const float res = r.f32();
  const float ox = r.f32();
  const float oy = r.f32();
  const float speed = r.f32();
  const std::uint64_t count = r.u64();
  const std::size_t cells = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<CellState> occupancy(cells);
  for (auto& s : occupancy) s = r.u8() == 0 ? CellState::Free : CellState::Occupied;

  Dataset data{OccupancyGrid(width, height, res, {ox, oy}, std::move(occupancy)), speed, {}};
  data.samples.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    TrainingSample s;
    s.x0.x = r.f32();
    s.x0.y = r.f32();
    s.xt.x = r.f32();
    s.xt.y = r.f32();
    s.vt.vx = r.f32();
    s.vt.vy = r.f32();
    s.likelihood.resize(cells);
    for (float& p : s.likelihood) p = r.f32();
    data.samples.push_back(std::move(s));
  }
  if (file.peek() != std::char_traits<char>::eof()) {
    throw DatasetError(path.string() + ": trailing bytes after " + std::to_string(count) +
                       " samples");
  }
  return data;
}

}  // namespace shctl
