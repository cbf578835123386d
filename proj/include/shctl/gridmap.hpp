#ifndef SHCTL_GRIDMAP_HPP_
#define SHCTL_GRIDMAP_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shctl/geometry.hpp"

namespace shctl {

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CellState : std::uint8_t { Free = 0, Occupied = 1 };

// Static 2-D occupancy map. Immutable once built; every cell is Free or
// Occupied. Cell (0,0) has its lower-left corner at origin().
class OccupancyGrid {
 public:
  OccupancyGrid(int width, int height, double resolution, WorldPoint origin,
                std::vector<CellState> cells);

  // All-free grid, mostly for tests and tools.
  static OccupancyGrid free_space(int width, int height, double resolution,
                                  WorldPoint origin = {});

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  WorldPoint origin() const { return origin_; }
  std::size_t size() const { return cells_.size(); }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t index) const {
    return {static_cast<int>(index % static_cast<std::size_t>(width_)),
            static_cast<int>(index / static_cast<std::size_t>(width_))};
  }

  CellState state(Cell c) const { return cells_[index(c)]; }
  bool is_free(Cell c) const { return in_bounds(c) && state(c) == CellState::Free; }
  bool is_occupied(Cell c) const { return state(c) == CellState::Occupied; }
  bool is_free_index(std::size_t i) const { return cells_[i] == CellState::Free; }

  const std::vector<CellState>& cells() const { return cells_; }
  std::size_t free_count() const;

  // Copy with one cell changed.
  OccupancyGrid with_cell(Cell c, CellState s) const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_;
  int height_;
  double resolution_;
  WorldPoint origin_;
  std::vector<CellState> cells_;
};

// Floors to the containing cell; nullopt when the point lies outside the map.
std::optional<Cell> world_to_cell(const OccupancyGrid& grid, WorldPoint p);

// Center of the cell.
WorldPoint cell_to_world(const OccupancyGrid& grid, Cell c);

// True when p lies inside a Free cell.
bool is_free_point(const OccupancyGrid& grid, WorldPoint p);

// Marks every Free cell whose center lies within `radius` meters of an
// Occupied cell center as Occupied.
OccupancyGrid inflate(const OccupancyGrid& grid, double radius);

struct RasterOptions {
  double resolution = 0.05;
  WorldPoint origin{};
};

// ASCII: header `W H RES OX OY`, then H rows of W chars, '.' Free, '#'
// Occupied, anything else Occupied. Row 0 of the body is the minimum-y row.
OccupancyGrid parse_ascii_map(std::istream& in, const std::string& source = "<stream>");

// Binary P5 grayscale, one byte per pixel; value >= 250 is Free. Pixel row r
// maps to grid row r (no vertical flip).
OccupancyGrid parse_pgm_map(std::istream& in, const RasterOptions& options,
                            const std::string& source = "<stream>");

// Dispatches on the file magic: "P5" → raster, otherwise ASCII.
OccupancyGrid load_map(const std::filesystem::path& path,
                       const RasterOptions& raster = {});

std::string to_ascii(const OccupancyGrid& grid);
void write_pgm(const OccupancyGrid& grid, std::ostream& out);

}  // namespace shctl

#endif  // SHCTL_GRIDMAP_HPP_
