#include "shctl/potential_field.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <queue>
#include <string>
#include <utility>

namespace shctl {

namespace {

struct Step {
  int dx;
  int dy;
  bool diagonal;
};

constexpr std::array<Step, 8> kSteps{{{1, 0, false},
                                      {-1, 0, false},
                                      {0, 1, false},
                                      {0, -1, false},
                                      {1, 1, true},
                                      {-1, 1, true},
                                      {1, -1, true},
                                      {-1, -1, true}}};

bool step_allowed(const OccupancyGrid& grid, Cell from, const Step& s) {
  const Cell to{from.x + s.dx, from.y + s.dy};
  if (!grid.is_free(to)) return false;
  if (s.diagonal) {
    return grid.is_free({from.x + s.dx, from.y}) && grid.is_free({from.x, from.y + s.dy});
  }
  return true;
}

}  // namespace

PotentialField::PotentialField(Cell goal, int width, int height, double resolution,
                               std::vector<double> values)
    : goal_(goal), width_(width), height_(height), resolution_(resolution),
      values_(std::move(values)) {}

PotentialField compute_field(const OccupancyGrid& grid, Cell goal) {
  if (!grid.in_bounds(goal)) {
    throw FieldError("goal cell (" + std::to_string(goal.x) + "," + std::to_string(goal.y) +
                     ") is outside the map");
  }
  if (!grid.is_free(goal)) {
    throw FieldError("goal cell (" + std::to_string(goal.x) + "," + std::to_string(goal.y) +
                     ") is occupied");
  }

  const std::size_t n = grid.size();
  std::vector<std::uint32_t> cardinal(n, 0), diagonal(n, 0);
  std::vector<double> key(n, kUnreachable);
  std::vector<char> done(n, 0);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  const std::size_t g = grid.index(goal);
  key[g] = 0.0;
  open.push({0.0, g});

  while (!open.empty()) {
    const auto [k, i] = open.top();
    open.pop();
    if (done[i]) continue;
    done[i] = 1;
    const Cell c = grid.cell_at(i);
    for (const Step& s : kSteps) {
      if (!step_allowed(grid, c, s)) continue;
      const std::size_t j = grid.index({c.x + s.dx, c.y + s.dy});
      if (done[j]) continue;
      const std::uint32_t a = cardinal[i] + (s.diagonal ? 0u : 1u);
      const std::uint32_t b = diagonal[i] + (s.diagonal ? 1u : 0u);
      const double cand = static_cast<double>(a) + static_cast<double>(b) * kSqrt2;
      if (cand < key[j]) {
        key[j] = cand;
        cardinal[j] = a;
        diagonal[j] = b;
        open.push({cand, j});
      }
    }
  }

  std::vector<double> values(n, kUnreachable);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) values[i] = path_cost(grid.resolution(), cardinal[i], diagonal[i]);
  }
  return PotentialField(goal, grid.width(), grid.height(), grid.resolution(), std::move(values));
}

double sample_or(const PotentialField& field, const OccupancyGrid& grid, WorldPoint p,
                 double fallback) {
  const auto c = world_to_cell(grid, p);
  if (!c || !grid.is_free(*c)) return fallback;
  const double v = field.value(*c);
  return v == kUnreachable ? fallback : v;
}

std::array<double, 2> gradient_at(const PotentialField& field, const OccupancyGrid& grid,
                                  WorldPoint x, double delta) {
  const auto cell = world_to_cell(grid, x);
  if (!cell) {
    throw FieldError("gradient requested outside the map");
  }
  if (!grid.is_free(*cell)) {
    throw FieldError("gradient requested inside an occupied cell");
  }
  const double here = field.value(*cell);
  if (here == kUnreachable) {
    throw FieldError("position cannot reach the field's goal");
  }
  const double d = delta > 0.0 ? delta : grid.resolution();
  const double uphill = here + d;
  const double xp = sample_or(field, grid, {x.x + d, x.y}, uphill);
  const double xm = sample_or(field, grid, {x.x - d, x.y}, uphill);
  const double yp = sample_or(field, grid, {x.x, x.y + d}, uphill);
  const double ym = sample_or(field, grid, {x.x, x.y - d}, uphill);
  return {(xp - xm) / (2.0 * d), (yp - ym) / (2.0 * d)};
}

std::optional<VelocityCommand> desired_velocity(const PotentialField& field,
                                                const OccupancyGrid& grid, WorldPoint x,
                                                double speed, double delta) {
  const auto grad = gradient_at(field, grid, x, delta);
  const double l = std::hypot(grad[0], grad[1]);
  if (l == 0.0) return std::nullopt;
  return VelocityCommand{-grad[0] * speed / l, -grad[1] * speed / l};
}

std::optional<VelocityCommand> steepest_neighbor_velocity(const PotentialField& field,
                                                          const OccupancyGrid& grid,
                                                          WorldPoint x, double speed) {
  const auto cell = world_to_cell(grid, x);
  if (!cell || !grid.is_free(*cell)) {
    throw FieldError("descent requested outside free space");
  }
  if (*cell == field.goal()) return std::nullopt;
  double best = field.value(*cell);
  std::optional<Step> chosen;
  for (const Step& s : kSteps) {
    if (!step_allowed(grid, *cell, s)) continue;
    const double v = field.value(Cell{cell->x + s.dx, cell->y + s.dy});
    if (v < best) {
      best = v;
      chosen = s;
    }
  }
  if (!chosen) return std::nullopt;
  const double l = std::hypot(chosen->dx, chosen->dy);
  return VelocityCommand{chosen->dx * speed / l, chosen->dy * speed / l};
}

void write_field_csv(const PotentialField& field, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      if (x) out << ',';
      const double v = field.value(Cell{x, y});
      if (v == kUnreachable) {
        out << "inf";
      } else {
        out << v;
      }
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace shctl
