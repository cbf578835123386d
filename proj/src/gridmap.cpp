#include "shctl/gridmap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace shctl {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, WorldPoint origin,
                             std::vector<CellState> cells)
    : width_(width), height_(height), resolution_(resolution), origin_(origin),
      cells_(std::move(cells)) {
  if (width < 3 || height < 3) {
    throw MapError("map must be at least 3x3 cells, got " + std::to_string(width) + "x" +
                   std::to_string(height));
  }
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw MapError("map resolution must be positive");
  }
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    throw MapError("map origin must be finite");
  }
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw MapError("cell count does not match map dimensions");
  }
}

OccupancyGrid OccupancyGrid::free_space(int width, int height, double resolution,
                                        WorldPoint origin) {
  std::vector<CellState> cells(static_cast<std::size_t>(std::max(width, 0)) *
                                   static_cast<std::size_t>(std::max(height, 0)),
                               CellState::Free);
  return OccupancyGrid(width, height, resolution, origin, std::move(cells));
}

std::size_t OccupancyGrid::free_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), CellState::Free));
}

OccupancyGrid OccupancyGrid::with_cell(Cell c, CellState s) const {
  OccupancyGrid copy = *this;
  copy.cells_.at(index(c)) = s;
  return copy;
}

std::optional<Cell> world_to_cell(const OccupancyGrid& grid, WorldPoint p) {
  const double fx = std::floor((p.x - grid.origin().x) / grid.resolution());
  const double fy = std::floor((p.y - grid.origin().y) / grid.resolution());
  if (!(fx >= 0.0) || !(fy >= 0.0) || fx >= grid.width() || fy >= grid.height()) {
    return std::nullopt;
  }
  return Cell{static_cast<int>(fx), static_cast<int>(fy)};
}

WorldPoint cell_to_world(const OccupancyGrid& grid, Cell c) {
  return {grid.origin().x + (c.x + 0.5) * grid.resolution(),
          grid.origin().y + (c.y + 0.5) * grid.resolution()};
}

bool is_free_point(const OccupancyGrid& grid, WorldPoint p) {
  const auto c = world_to_cell(grid, p);
  return c && grid.is_free(*c);
}

OccupancyGrid inflate(const OccupancyGrid& grid, double radius) {
  if (!(radius > 0.0)) {
    return grid;
  }
  const double res = grid.resolution();
  const int reach = static_cast<int>(std::floor(radius / res + 1e-9));
  const double limit = radius * radius + 1e-9 * res * res;

  std::vector<Cell> offsets;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      if ((dx != 0 || dy != 0) && (dx * dx + dy * dy) * res * res <= limit) {
        offsets.push_back({dx, dy});
      }
    }
  }

  std::vector<CellState> out = grid.cells();
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (!grid.is_occupied({x, y})) continue;
      for (const Cell& o : offsets) {
        const Cell n{x + o.x, y + o.y};
        if (grid.in_bounds(n)) out[grid.index(n)] = CellState::Occupied;
      }
    }
  }
  return OccupancyGrid(grid.width(), grid.height(), res, grid.origin(), std::move(out));
}

OccupancyGrid parse_ascii_map(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw MapError(source + ":1: missing header line");
  }
  std::istringstream header(line);
  long long w = 0, h = 0;
  double res = 0.0, ox = 0.0, oy = 0.0;
  if (!(header >> w >> h >> res >> ox >> oy)) {
    throw MapError(source + ":1: malformed header, expected `W H RES OX OY`");
  }
  std::string extra;
  if (header >> extra) {
    throw MapError(source + ":1: trailing text in header: `" + extra + "`");
  }
  if (w <= 0 || h <= 0) {
    throw MapError(source + ":1: zero or negative map dimensions");
  }
  if (w < 3 || h < 3) {
    throw MapError(source + ":1: map must be at least 3x3 cells");
  }
  if (!(res > 0.0)) {
    throw MapError(source + ":1: resolution must be positive");
  }
  if (w > 100000 || h > 100000) {
    throw MapError(source + ":1: map dimensions too large");
  }

  std::vector<CellState> cells(static_cast<std::size_t>(w * h));
  for (long long row = 0; row < h; ++row) {
    const long long lineno = row + 2;
    if (!std::getline(in, line)) {
      throw MapError(source + ":" + std::to_string(lineno) + ": expected " +
                     std::to_string(h) + " grid rows, found " + std::to_string(row));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<long long>(line.size()) != w) {
      throw MapError(source + ":" + std::to_string(lineno) + ": row has " +
                     std::to_string(line.size()) + " cells, expected " + std::to_string(w));
    }
    for (long long col = 0; col < w; ++col) {
      cells[static_cast<std::size_t>(row * w + col)] =
          line[static_cast<std::size_t>(col)] == '.' ? CellState::Free : CellState::Occupied;
    }
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") {
      throw MapError(source + ": unexpected text after " + std::to_string(h) + " grid rows");
    }
  }
  return OccupancyGrid(static_cast<int>(w), static_cast<int>(h), res, {ox, oy},
                       std::move(cells));
}

namespace {

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in, const std::string& source) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) {
    throw MapError(source + ": byte " + std::to_string(static_cast<long long>(in.tellg())) +
                   ": truncated raster header");
  }
  return tok;
}

long long pgm_int(std::istream& in, const std::string& source, const char* what) {
  const std::string tok = pgm_token(in, source);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw MapError(source + ": malformed raster " + what + " `" + tok + "`");
  }
  return v;
}

}  // namespace

OccupancyGrid parse_pgm_map(std::istream& in, const RasterOptions& options,
                            const std::string& source) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5') {
    throw MapError(source + ": byte 0: not a binary P5 raster");
  }
  const long long w = pgm_int(in, source, "width");
  const long long h = pgm_int(in, source, "height");
  const long long maxval = pgm_int(in, source, "maxval");
  if (w <= 0 || h <= 0) {
    throw MapError(source + ": zero or negative raster dimensions");
  }
  if (w < 3 || h < 3) {
    throw MapError(source + ": raster must be at least 3x3 pixels");
  }
  if (maxval <= 0 || maxval > 255) {
    throw MapError(source + ": maxval must be in 1..255 (one byte per cell)");
  }
  const auto data_start = in.tellg();
  std::vector<unsigned char> pixels(static_cast<std::size_t>(w * h));
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) {
    throw MapError(source + ": byte " +
                   std::to_string(static_cast<long long>(data_start) + in.gcount()) +
                   ": raster data truncated");
  }
  std::vector<CellState> cells(pixels.size());
  std::transform(pixels.begin(), pixels.end(), cells.begin(), [](unsigned char v) {
    return v >= 250 ? CellState::Free : CellState::Occupied;
  });
  return OccupancyGrid(static_cast<int>(w), static_cast<int>(h), options.resolution,
                       options.origin, std::move(cells));
}

OccupancyGrid load_map(const std::filesystem::path& path, const RasterOptions& raster) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MapError(path.string() + ": cannot open map file");
  }
  char head[2] = {0, 0};
  in.read(head, 2);
  in.clear();
  in.seekg(0);
  if (head[0] == 'P' && head[1] == '5') {
    return parse_pgm_map(in, raster, path.string());
  }
  return parse_ascii_map(in, path.string());
}

std::string to_ascii(const OccupancyGrid& grid) {
  std::string out = std::to_string(grid.width()) + " " + std::to_string(grid.height()) + " " +
                    format_number(grid.resolution()) + " " + format_number(grid.origin().x) +
                    " " + format_number(grid.origin().y) + "\n";
  out.reserve(out.size() + grid.size() + static_cast<std::size_t>(grid.height()));
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      out.push_back(grid.is_occupied({x, y}) ? '#' : '.');
    }
    out.push_back('\n');
  }
  return out;
}

void write_pgm(const OccupancyGrid& grid, std::ostream& out) {
  out << "P5\n" << grid.width() << " " << grid.height() << "\n255\n";
  for (CellState s : grid.cells()) {
    out.put(s == CellState::Free ? static_cast<char>(255) : static_cast<char>(0));
  }
}

}  // namespace shctl
