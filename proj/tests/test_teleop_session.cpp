#include <doctest.h>

#include <numeric>
#include <sstream>

#include "shctl/teleop/session.hpp"

using namespace shctl;
using namespace shctl::teleop;

namespace {

std::shared_ptr<const OccupancyGrid> doorway_map() {
  std::istringstream in(
      "24 12 0.25 0 0\n"
      "########################\n"
      "#..........#...........#\n"
      "#..........#...........#\n"
      "#..........#...........#\n"
      "#..........#...........#\n"
      "#......................#\n"
      "#..........#...........#\n"
      "#..........#...........#\n"
      "#..........#...........#\n"
      "#..........#...........#\n"
      "#..........#...........#\n"
      "########################\n");
  return std::make_shared<const OccupancyGrid>(parse_ascii_map(in));
}

SessionConfig config(DirectionSet d, double accuracy, ControlMode mode, std::uint64_t seed = 4) {
  SessionConfig c;
  c.start = {0.6, 0.6};
  c.goal = {20, 8};
  c.condition = {d, accuracy, 1.0, mode};
  c.seed = seed;
  c.params.backend = kernels::Backend::Serial;
  c.params.timeout = 60.0;
  return c;
}

void ticks(Session& s, int n) {
  for (int i = 0; i < n; ++i) s.tick();
}

}  // namespace

TEST_CASE("inputs closer together than the period are limited") {
  Session s(doorway_map(), config(DirectionSet::Four, 1.0, ControlMode::Direct));
  CHECK(s.submit(0).status == InputStatus::Accepted);
  ticks(s, 8);  // 0.4 s
  const auto limited = s.submit(1);
  CHECK(limited.status == InputStatus::Limited);
  CHECK(limited.retry_after == doctest::Approx(0.6));
  CHECK(limited.sent.vy == doctest::Approx(0.3));
  ticks(s, 12);  // 1.0 s after the first input
  CHECK(s.submit(1).status == InputStatus::Accepted);
  CHECK(s.log().size() == 2);
}

TEST_CASE("vectors snap to the session's direction set") {
  Session four(doorway_map(), config(DirectionSet::Four, 1.0, ControlMode::Direct));
  const auto out = four.submit(VelocityCommand{0.9, 0.5});
  CHECK(out.status == InputStatus::Accepted);
  CHECK(out.sent.vx == doctest::Approx(0.3));
  CHECK(out.sent.vy == doctest::Approx(0.0));

  Session analog(doorway_map(), config(DirectionSet::All, 1.0, ControlMode::Direct));
  const auto a = analog.submit(VelocityCommand{3.0, 4.0});
  CHECK(a.sent.vx == doctest::Approx(0.18));
  CHECK(a.sent.vy == doctest::Approx(0.24));
  CHECK(analog.submit(2).status == InputStatus::Rejected);

  CHECK(four.submit(4).status == InputStatus::Rejected);
  CHECK(four.submit(-1).status == InputStatus::Rejected);
  CHECK(four.submit(VelocityCommand{0.0, 0.0}).status == InputStatus::Rejected);
}

TEST_CASE("at full accuracy the applied command is the sent one") {
  Session s(doorway_map(), config(DirectionSet::Eight, 1.0, ControlMode::Direct));
  for (int k = 0; k < 8; ++k) {
    REQUIRE(s.submit(k).status == InputStatus::Accepted);
    ticks(s, 20);
  }
  for (const auto& e : s.log()) CHECK(e.sent == e.applied);
}

TEST_CASE("corrupted inputs are logged but never echoed") {
  Session s(doorway_map(), config(DirectionSet::Four, 0.0, ControlMode::Direct));
  const auto out = s.submit(0);
  CHECK(out.sent.vx == doctest::Approx(0.3));
  REQUIRE(s.log().size() == 1);
  CHECK(s.log()[0].sent == out.sent);
  CHECK_FALSE(s.log()[0].applied == out.sent);
}

TEST_CASE("frames before any input") {
  Session s(doorway_map(), config(DirectionSet::Four, 1.0, ControlMode::Shared));
  const Frame f = s.frame();
  CHECK(f.clock == 0.0);
  CHECK(f.confidence == 0.0);
  CHECK(f.command.is_zero());
  CHECK_FALSE(f.estimated_goal.has_value());
  CHECK(f.status == SessionStatus::Running);
  const double total = std::accumulate(f.heatmap.values.begin(), f.heatmap.values.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("heatmap downsampling keeps the mass") {
  std::vector<double> p(200 * 130, 0.0);
  p[5] = 0.25;
  p[199 * 1 + 130 * 200 - 200] = 0.75;
  const Heatmap h = downsample(p, 200, 130);
  CHECK(h.block == 4);
  CHECK(h.width == 50);
  CHECK(h.height == 33);
  const double total = std::accumulate(h.values.begin(), h.values.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(h.values[1] == doctest::Approx(0.25));

  const Heatmap same = downsample(std::vector<double>(16, 1.0 / 16), 4, 4);
  CHECK(same.block == 1);
  CHECK(same.values.size() == 16);
}

TEST_CASE("shared-control session reaches the goal and reports it") {
  const auto grid = doorway_map();
  Session s(grid, config(DirectionSet::All, 1.0, ControlMode::Shared));
  const PotentialField field = compute_field(*grid, s.config().goal);
  int guard = 0;
  while (!s.terminal() && guard++ < 5000) {
    s.submit(ideal_command(field, *grid, s.state().position, 0.3));
    s.tick();
    const Frame f = s.frame();
    if (f.estimated_goal) {
      const double mass =
          std::accumulate(f.heatmap.values.begin(), f.heatmap.values.end(), 0.0);
      REQUIRE(mass == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
  CHECK(s.status() == SessionStatus::Succeeded);
  CHECK(s.failure_reason().empty());
  CHECK(s.result().reached);
  CHECK(s.result().collisions == 0);
  CHECK(s.frame().confidence > 0.0);
  CHECK(s.submit(0).status == InputStatus::Rejected);
}

TEST_CASE("a detached session fails after the grace period") {
  auto cfg = config(DirectionSet::Four, 1.0, ControlMode::Direct);
  cfg.grace_period = 2.0;
  Session s(doorway_map(), cfg);
  ticks(s, 10);
  s.detach();
  ticks(s, 30);
  CHECK(s.status() == SessionStatus::Running);
  s.attach();
  ticks(s, 60);
  CHECK(s.status() == SessionStatus::Running);
  s.detach();
  ticks(s, 41);
  CHECK(s.status() == SessionStatus::Failed);
  CHECK(s.failure_reason() == "connection lost");
}

TEST_CASE("a session that never moves times out") {
  auto cfg = config(DirectionSet::Four, 1.0, ControlMode::Direct);
  cfg.params.timeout = 1.0;
  Session s(doorway_map(), cfg);
  ticks(s, 19);
  CHECK_FALSE(s.terminal());
  s.tick();
  CHECK(s.status() == SessionStatus::Failed);
  CHECK(s.failure_reason() == "timeout");
  CHECK(s.result().elapsed == doctest::Approx(1.0));
}

TEST_CASE("invalid sessions are refused") {
  auto cfg = config(DirectionSet::Four, 1.5, ControlMode::Direct);
  CHECK_THROWS_AS(Session(doorway_map(), cfg), TrialConfigError);
  cfg = config(DirectionSet::Four, 1.0, ControlMode::Direct);
  cfg.goal = {0, 0};
  CHECK_THROWS_WITH_AS(Session(doorway_map(), cfg), doctest::Contains("goal"), TrialConfigError);
  cfg = config(DirectionSet::Four, 1.0, ControlMode::Direct);
  cfg.start = {0.1, 0.1};
  CHECK_THROWS_WITH_AS(Session(doorway_map(), cfg), doctest::Contains("start"), TrialConfigError);
}

TEST_CASE("feeding the scripted operator's inputs reproduces the batch trial") {
  const auto grid = doorway_map();
  for (auto [dir, acc, mode] :
       {std::tuple{DirectionSet::Four, 0.7, ControlMode::Shared},
        std::tuple{DirectionSet::Eight, 0.8, ControlMode::Direct},
        std::tuple{DirectionSet::All, 1.0, ControlMode::Shared}}) {
    const auto cfg = config(dir, acc, mode, 17);
    const TrialResult batch =
        run_trial(*grid, cfg.start, cfg.goal, cfg.condition, cfg.seed, cfg.params);

    Session s(grid, cfg);
    const PotentialField field = compute_field(*grid, cfg.goal);
    // Schedule and quantized ideal input from a scripted operator that never
    // errs; the session applies its own corruption with the same seed.
    InputCondition clean = cfg.condition;
    clean.accuracy = 1.0;
    PseudoUser script(clean, cfg.params.speed);
    Rng unused(0);
    while (!s.terminal()) {
      const double t = static_cast<double>(s.state().steps) * cfg.params.dt;
      if (auto rec = script.next_input(t, field, *grid, s.state().position, unused)) {
        REQUIRE(s.submit(rec->velocity).status == InputStatus::Accepted);
      }
      s.tick();
    }
    const TrialResult live = s.result();
    CAPTURE(to_string(dir));
    CHECK(live.reached == batch.reached);
    CHECK(live.collisions == batch.collisions);
    CHECK(live.elapsed == batch.elapsed);
    CHECK(live.path_length == batch.path_length);
  }
}
