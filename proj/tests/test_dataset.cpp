#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "shctl/dataset.hpp"


using namespace shctl;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("shctl_" + name);
}

OccupancyGrid corridor() {
  std::istringstream in(
      "12 3 0.5 0 0\n"
      "############\n"
      "#..........#\n"
      "############\n");
  return parse_ascii_map(in);
}

OccupancyGrid rooms() {
  std::istringstream in(
      "14 10 0.25 0 0\n"
      "..............\n"
      "..............\n"
      "...######.....\n"
      "........#.....\n"
      "........#.....\n"
      "..###...#..##.\n"
      "........#.....\n"
      "..............\n"
      "....#.........\n"
      "..............\n");
  return parse_ascii_map(in);
}

}  // namespace

TEST_CASE("endpoint pairs are free cell centers far enough apart") {
  const auto g = rooms();
  Rng rng(3);
  const double d = default_min_distance(g);
  CHECK(d == doctest::Approx(0.5 * std::hypot(14 * 0.25, 10 * 0.25)));
  const auto pairs = sample_endpoints(g, d, 200, rng);
  REQUIRE(pairs.size() == 200);
  for (const auto& p : pairs) {
    CHECK(distance(p.start, p.goal) > d);
    const auto s = world_to_cell(g, p.start);
    REQUIRE(s.has_value());
    CHECK(g.is_free(*s));
    CHECK(cell_to_world(g, *s).x == p.start.x);
    CHECK(g.is_free(*world_to_cell(g, p.goal)));
  }
}

TEST_CASE("unattainable endpoint distances are reported") {
  const auto g = rooms();
  Rng rng(3);
  CHECK_THROWS_AS(sample_endpoints(g, 100.0, 1, rng), DatasetError);
  const auto c = corridor();
  // Longest free pair in the corridor is 9 cells = 4.5 m.
  CHECK_THROWS_WITH_AS(sample_endpoints(c, 4.6, 1, rng), doctest::Contains("constrained"),
                       DatasetError);
}

TEST_CASE("routes in a straight corridor run along the axis") {
  const auto g = corridor();
  TraceParams params;
  params.goal_radius = 0.31;  // keeps the stopping step off a rounding boundary
  const auto route = trace_route(g, {0.75, 0.75}, {5.25, 0.75}, params);
  REQUIRE(!route.steps.empty());
  CHECK(route.start.x == 0.75);
  for (const auto& s : route.steps) {
    CHECK(s.position.y == doctest::Approx(0.75));
    CHECK(s.velocity.vx == doctest::Approx(0.3));
    CHECK(s.velocity.vy == doctest::Approx(0.0));
  }
  // Stops once within 0.31 m of the goal: 4.19 m at 0.015 m per step.
  CHECK(route.steps.size() == 280);
  CHECK(route.steps.front().position.x == 0.75);
}

TEST_CASE("unreachable goals fail the trace") {
  auto g = corridor().with_cell({6, 1}, CellState::Occupied);
  CHECK_THROWS_AS(trace_route(g, {0.75, 0.75}, {5.25, 0.75}, {}), DatasetError);
}

TEST_CASE("generated dataset round-trips and matches the reference likelihood") {
  const auto g = rooms();
  const auto path = temp_file("dataset_roundtrip.bin");
  GenerateOptions opts;
  opts.samples = 60;
  opts.seed = 11;
  REQUIRE(generate_dataset(g, opts, path) == 60);
  CHECK(std::filesystem::file_size(path) ==
        4 + 4 + 8 + 16 + 8 + g.size() + 60 * (24 + 4 * g.size()));

  const Dataset ds = read_dataset(path);
  CHECK(ds.grid.width() == g.width());
  CHECK(ds.grid.height() == g.height());
  CHECK(ds.grid.resolution() == 0.25);
  CHECK(ds.speed == 0.3f);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(ds.grid.is_free_index(i) == g.is_free_index(i));
  REQUIRE(ds.samples.size() == 60);

  // Each record is the likelihood of its own command at its own position.
  for (std::size_t k = 0; k < ds.samples.size(); k += 7) {
    const auto& s = ds.samples[k];
    const auto ref = step_likelihood_reference(g, s.xt, s.vt, 0.3);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      // Positions and commands were rounded to f32 on the way out.
      REQUIRE(std::abs(s.likelihood[i] - ref[i]) < 1e-4);
    }
    CHECK(std::abs(s.vt.norm() - 0.3) < 1e-6);
  }
  // A route's records share the start.
  CHECK(ds.samples[0].x0.x == ds.samples[1].x0.x);
  std::filesystem::remove(path);
}

TEST_CASE("the route's goal is among the most likely cells at the start of a route") {
  const auto g = corridor();
  Route r = trace_route(g, {0.75, 0.75}, {5.25, 0.75}, {});
  const auto path = temp_file("dataset_corridor.bin");
  REQUIRE(emit_samples(g, {r}, 0.3, path) == r.steps.size());
  const Dataset ds = read_dataset(path);
  const auto& lk = ds.samples.front().likelihood;
  const float best = *std::max_element(lk.begin(), lk.end());
  CHECK(lk[static_cast<std::size_t>(1 * 12 + 10)] == best);
  std::filesystem::remove(path);
}

TEST_CASE("corrupted containers are rejected") {
  const auto g = corridor();
  const auto path = temp_file("dataset_bad.bin");
  GenerateOptions opts;
  opts.samples = 3;
  opts.min_distance = 1.0;
  generate_dataset(g, opts, path);
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& b) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
  };
  write(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(read_dataset(path), DatasetError);
  write(bytes + "x");
  CHECK_THROWS_AS(read_dataset(path), DatasetError);
  std::string bad = bytes;
  bad[0] = 'X';
  write(bad);
  CHECK_THROWS_WITH_AS(read_dataset(path), doctest::Contains("magic"), DatasetError);
  bad = bytes;
  bad[4] = 2;
  write(bad);
  CHECK_THROWS_WITH_AS(read_dataset(path), doctest::Contains("version"), DatasetError);
  std::filesystem::remove(path);
}
