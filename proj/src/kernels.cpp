#include "shctl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace shctl::kernels {

namespace {

constexpr std::size_t kBlock = 4096;

}  // namespace

SampleFields sample_fields(const OccupancyGrid& grid, WorldPoint x, double delta,
                           Backend backend) {
  const auto center = world_to_cell(grid, x);
  if (!center || !grid.is_free(*center)) {
    throw FieldError("likelihood requested at a position outside free space");
  }
  const double d = delta > 0.0 ? delta : grid.resolution();
  const std::array<WorldPoint, 4> points{
      {{x.x + d, x.y}, {x.x - d, x.y}, {x.x, x.y + d}, {x.x, x.y - d}}};

  // Slot 0 is the center; 1..4 the samples. Blocked samples stay empty.
  std::array<std::optional<Cell>, 5> sources;
  sources[0] = *center;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto c = world_to_cell(grid, points[k]);
    if (c && grid.is_free(*c)) sources[k + 1] = *c;
  }

  std::array<std::optional<PotentialField>, 5> solved;
  const int count = static_cast<int>(sources.size());
#pragma omp parallel for schedule(static, 1) if (backend == Backend::OpenMP)
  for (int k = 0; k < count; ++k) {
    if (sources[static_cast<std::size_t>(k)]) {
      solved[static_cast<std::size_t>(k)] =
          compute_field(grid, *sources[static_cast<std::size_t>(k)]);
    }
  }

  SampleFields out{std::move(*solved[0]), {}};
  for (std::size_t k = 0; k < 4; ++k) out.samples[k] = std::move(solved[k + 1]);
  return out;
}

void likelihood_grid(const OccupancyGrid& grid, const SampleFields& fields,
                     VelocityCommand v_user, double speed, double delta,
                     std::span<double> out, Backend backend) {
  const double d = delta > 0.0 ? delta : grid.resolution();
  const double* center = fields.center.values().data();
  std::array<const double*, 4> sample{};
  for (std::size_t k = 0; k < 4; ++k) {
    sample[k] = fields.samples[k] ? fields.samples[k]->values().data() : nullptr;
  }
  const auto n = static_cast<std::int64_t>(grid.size());

#pragma omp parallel for schedule(static) if (backend == Backend::OpenMP)
  for (std::int64_t gi = 0; gi < n; ++gi) {
    const auto g = static_cast<std::size_t>(gi);
    const double here = center[g];
    if (here == kUnreachable) {
      out[g] = 0.0;
      continue;
    }
    const double uphill = here + d;
    double s[4];
    for (std::size_t k = 0; k < 4; ++k) {
      const double v = sample[k] ? sample[k][g] : kUnreachable;
      s[k] = v == kUnreachable ? uphill : v;
    }
    const double gx = (s[0] - s[1]) / (2.0 * d);
    const double gy = (s[2] - s[3]) / (2.0 * d);
    const double l = std::hypot(gx, gy);
    double vx = 0.0, vy = 0.0;
    if (l != 0.0) {
      vx = -gx * speed / l;
      vy = -gy * speed / l;
    }
    out[g] = std::exp(-std::hypot(vx - v_user.vx, vy - v_user.vy));
  }
}

void log_product(std::span<const std::vector<double>* const> likelihoods,
                 std::span<double> out, Backend backend) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (backend == Backend::OpenMP)
  for (std::int64_t gi = 0; gi < n; ++gi) {
    const auto g = static_cast<std::size_t>(gi);
    double acc = 0.0;
    for (const std::vector<double>* lik : likelihoods) {
      acc += std::log((*lik)[g]);
    }
    out[g] = acc;
  }
}

bool normalize_from_log(std::span<const double> log_values, std::span<double> out,
                        Backend backend) {
  const auto n = static_cast<std::int64_t>(log_values.size());
  double peak = -kUnreachable;
#pragma omp parallel for schedule(static) reduction(max : peak) if (backend == Backend::OpenMP)
  for (std::int64_t i = 0; i < n; ++i) {
    peak = std::max(peak, log_values[static_cast<std::size_t>(i)]);
  }
  if (!std::isfinite(peak)) {
    std::fill(out.begin(), out.end(), 0.0);
    return false;
  }

  const std::size_t blocks = (log_values.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(static) if (backend == Backend::OpenMP)
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(lo + kBlock, log_values.size());
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double e = std::exp(log_values[i] - peak);
      out[i] = e;
      sum += e;
    }
    partial[static_cast<std::size_t>(b)] = sum;
  }
  double total = 0.0;
  for (double p : partial) total += p;

#pragma omp parallel for schedule(static) if (backend == Backend::OpenMP)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] /= total;
  }
  return true;
}

}  // namespace shctl::kernels
