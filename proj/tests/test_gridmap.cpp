#include <doctest.h>

#include <sstream>

#include "shctl/gridmap.hpp"

using namespace shctl;

namespace {

OccupancyGrid ascii(const std::string& text) {
  std::istringstream in(text);
  return parse_ascii_map(in, "test.txt");
}

std::string pgm(int w, int h, const std::vector<unsigned char>& px) {
  std::string s = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  s.append(px.begin(), px.end());
  return s;
}

}  // namespace

TEST_CASE("ascii map parses rows bottom-up") {
  const auto g = ascii("4 3 0.5 1 2\n....\n.#..\n...#\n");
  CHECK(g.width() == 4);
  CHECK(g.height() == 3);
  CHECK(g.resolution() == 0.5);
  CHECK(g.origin() == WorldPoint{1.0, 2.0});
  CHECK(g.is_occupied({1, 1}));
  CHECK(g.is_occupied({3, 2}));
  CHECK(g.free_count() == 10);
}

TEST_CASE("unknown map characters count as occupied") {
  const auto g = ascii("3 3 1 0 0\n...\n.?.\n...\n");
  CHECK(g.is_occupied({1, 1}));
}

TEST_CASE("ascii errors carry source and line") {
  auto message = [](const std::string& text) {
    try {
      ascii(text);
    } catch (const MapError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("3 3 1 0 0\n...\n..\n...\n").rfind("test.txt:3:", 0) == 0);
  CHECK(message("3 3 0 0 0\n...\n...\n...\n").rfind("test.txt:1:", 0) == 0);
  CHECK(message("3 3 1 0\n...\n...\n...\n").rfind("test.txt:1:", 0) == 0);
  CHECK(message("2 2 1 0 0\n..\n..\n").find("3x3") != std::string::npos);
  CHECK_FALSE(message("3 3 1 0 0\n...\n...\n").empty());
}

TEST_CASE("raster threshold and orientation") {
  std::vector<unsigned char> px(9, 255);
  px[0] = 120;  // (0,0)
  px[5] = 249;  // (2,1)
  std::istringstream in(pgm(3, 3, px));
  const auto g = parse_pgm_map(in, {0.1, {}});
  CHECK(g.is_occupied({0, 0}));
  CHECK(g.is_occupied({2, 1}));
  CHECK(g.is_free({1, 0}));
  CHECK(g.resolution() == 0.1);
}

TEST_CASE("raster errors") {
  std::istringstream bad_magic("P2\n3 3\n255\n");
  CHECK_THROWS_AS(parse_pgm_map(bad_magic, {}), MapError);
  std::string short_body = pgm(3, 3, std::vector<unsigned char>(9, 255)).substr(0, 18);
  std::istringstream truncated(short_body);
  CHECK_THROWS_WITH_AS(parse_pgm_map(truncated, {}, "m.pgm"), doctest::Contains("byte"), MapError);
}

TEST_CASE("raster round trip through write_pgm") {
  const auto g = ascii("5 4 1 0 0\n.....\n.##..\n....#\n#....\n");
  std::stringstream s;
  write_pgm(g, s);
  const auto back = parse_pgm_map(s, {1.0, {}});
  CHECK(back == g);
}

TEST_CASE("ascii round trip") {
  const auto g = ascii("5 4 0.25 -1 0.5\n.....\n.##..\n....#\n#....\n");
  CHECK(ascii(to_ascii(g)) == g);
}

TEST_CASE("world and cell conversion") {
  const auto g = OccupancyGrid::free_space(10, 8, 0.5, {1.0, -1.0});
  CHECK(world_to_cell(g, {1.0, -1.0}) == Cell{0, 0});
  CHECK(world_to_cell(g, {1.49, -0.51}) == Cell{0, 0});
  CHECK(world_to_cell(g, {1.5, -0.5}) == Cell{1, 1});
  CHECK_FALSE(world_to_cell(g, {0.99, 0.0}).has_value());
  CHECK_FALSE(world_to_cell(g, {6.0, 0.0}).has_value());
  CHECK(cell_to_world(g, {2, 3}) == WorldPoint{2.25, 0.75});
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 10; ++x) CHECK(world_to_cell(g, cell_to_world(g, {x, y})) == Cell{x, y});
  }
}

TEST_CASE("inflation by one cell marks the four cardinal neighbours") {
  const auto g = OccupancyGrid::free_space(5, 5, 1.0).with_cell({2, 2}, CellState::Occupied);
  const auto inflated = inflate(g, 1.0);
  for (Cell c : {Cell{1, 2}, Cell{3, 2}, Cell{2, 1}, Cell{2, 3}, Cell{2, 2}}) {
    CHECK(inflated.is_occupied(c));
  }
  CHECK(inflated.free_count() == 20);
  CHECK(inflate(g, 0.0) == g);
  CHECK(inflate(g, 1.5).free_count() == 16);  // diagonals at sqrt(2) join
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(OccupancyGrid::free_space(2, 5, 1.0), MapError);
  CHECK_THROWS_AS(OccupancyGrid::free_space(5, 5, 0.0), MapError);
  CHECK_THROWS_AS(OccupancyGrid(3, 3, 1.0, {}, std::vector<CellState>(8)), MapError);
}
