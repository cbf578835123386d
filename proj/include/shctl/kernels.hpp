#ifndef SHCTL_KERNELS_HPP_
#define SHCTL_KERNELS_HPP_

// Data-parallel inner loops of goal estimation. Every kernel has a serial
// path and an OpenMP path that produce bit-identical output; the serial path
// is the reference the tests and benchmarks compare against.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "shctl/potential_field.hpp"

namespace shctl::kernels {

enum class Backend { Serial, OpenMP };

// Fields sourced at the robot's cell and at the four central-difference
// sample points x+d*ex, x-d*ex, x+d*ey, x-d*ey. A sample entry is empty when
// the sample point is outside the map or in an Occupied cell.
struct SampleFields {
  PotentialField center;
  std::array<std::optional<PotentialField>, 4> samples;
};

// Builds the five fields for position x; sources are solved concurrently
// under Backend::OpenMP.
SampleFields sample_fields(const OccupancyGrid& grid, WorldPoint x, double delta,
                           Backend backend);

// Per-goal likelihood exp(-|v_desired(x -> g) - v_user|) for every cell g,
// reading each goal's potential at the sample points off the sample-sourced
// fields (distances are symmetric). Unreachable and Occupied goals get 0.
void likelihood_grid(const OccupancyGrid& grid, const SampleFields& fields,
                     VelocityCommand v_user, double speed, double delta,
                     std::span<double> out, Backend backend);

// out[g] = sum over grids of log(likelihood[g]); -inf where any factor is 0.
// Summation runs oldest to newest for every cell.
void log_product(std::span<const std::vector<double>* const> likelihoods,
                 std::span<double> out, Backend backend);

// out = exp(log - max) / sum, with the sum reduced over fixed-size blocks in
// index order so the result does not depend on thread count. Returns false
// (leaving out zeroed) when no entry is finite.
bool normalize_from_log(std::span<const double> log_values, std::span<double> out,
                        Backend backend);

}  // namespace shctl::kernels

#endif  // SHCTL_KERNELS_HPP_
