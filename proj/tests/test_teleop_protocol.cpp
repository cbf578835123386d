#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "shctl/teleop/protocol.hpp"

using namespace shctl;
using namespace shctl::teleop;
using Json = nlohmann::json;

namespace {

ProtocolError error_of(const std::string& text) {
  auto r = parse_request(text);
  REQUIRE(std::holds_alternative<ProtocolError>(r));
  return std::get<ProtocolError>(r);
}

Request request_of(const std::string& text) {
  auto r = parse_request(text);
  REQUIRE(std::holds_alternative<Request>(r));
  return std::get<Request>(r);
}

std::shared_ptr<const OccupancyGrid> small_map() {
  std::istringstream in(
      "6 4 0.5 1 2\n"
      "......\n"
      "..#...\n"
      "......\n"
      "......\n");
  return std::make_shared<const OccupancyGrid>(parse_ascii_map(in));
}

Session small_session() {
  SessionConfig c;
  c.start = {1.25, 2.25};
  c.goal = {5, 3};
  c.condition = {DirectionSet::Four, 0.9, 1.0, ControlMode::Shared};
  c.params.backend = kernels::Backend::Serial;
  return Session(small_map(), c);
}

}  // namespace

TEST_CASE("create requests") {
  const auto req = request_of(
      R"({"type":"create","map":"two_room","directions":"four","accuracy":0.8,)"
      R"("period":0.5,"mode":"direct","seed":9,"start":{"x":1,"y":2},"timeout":30})");
  const auto& c = std::get<CreateRequest>(req);
  CHECK(c.map == "two_room");
  CHECK(c.condition.directions == DirectionSet::Four);
  CHECK(c.condition.accuracy == 0.8);
  CHECK(c.condition.period == 0.5);
  CHECK(c.condition.mode == ControlMode::Direct);
  CHECK(c.seed == 9);
  CHECK(c.start == WorldPoint{1, 2});
  CHECK_FALSE(c.goal.has_value());
  CHECK(c.timeout == 30.0);

  const auto d = std::get<CreateRequest>(request_of(R"({"type":"create","map":"m"})"));
  CHECK(d.condition.directions == DirectionSet::All);
  CHECK(d.condition.mode == ControlMode::Shared);
}

TEST_CASE("invalid create fields are named") {
  auto e = error_of(R"({"type":"create","map":"m","accuracy":1.5})");
  CHECK(e.request == "create");
  CHECK(e.field == "accuracy");
  CHECK(error_of(R"({"type":"create","map":"m","period":0})").field == "period");
  CHECK(error_of(R"({"type":"create","map":"m","directions":"six"})").field == "directions");
  CHECK(error_of(R"({"type":"create","map":"m","mode":"auto"})").field == "mode");
  CHECK(error_of(R"({"type":"create","map":"m","seed":-1})").field == "seed");
  CHECK(error_of(R"({"type":"create","map":"m","goal":[1,2]})").field == "goal");
  CHECK(error_of(R"({"type":"create","map":"m","timeout":-3})").field == "timeout");
  CHECK(error_of(R"({"type":"create"})").field == "map");
  CHECK(error_of(R"({"type":"create","map":"m","accuracy":"high"})").field == "accuracy");
}

TEST_CASE("input requests") {
  const auto a = std::get<InputRequest>(request_of(R"({"type":"input","session":"ab","direction":3})"));
  CHECK(a.session == "ab");
  CHECK(std::get<int>(a.input) == 3);
  const auto b =
      std::get<InputRequest>(request_of(R"({"type":"input","session":"ab","vector":{"x":0.1,"y":-2}})"));
  CHECK(std::get<VelocityCommand>(b.input) == VelocityCommand{0.1, -2});

  CHECK(error_of(R"({"type":"input","direction":3})").field == "session");
  CHECK(error_of(R"({"type":"input","session":"ab"})").field == "direction");
  CHECK(error_of(R"({"type":"input","session":"ab","direction":1,"vector":{"x":1,"y":0}})")
            .field == "direction");
  CHECK(error_of(R"({"type":"input","session":"ab","direction":1.5})").field == "direction");
  CHECK(error_of(R"({"type":"input","session":"ab","vector":{"x":1}})").field == "vector");
}

TEST_CASE("malformed messages") {
  CHECK(error_of("not json").request.empty());
  CHECK(error_of("[1,2]").message == "expected a JSON object");
  CHECK(error_of(R"({"kind":"create"})").field == "type");
  const auto e = error_of(R"({"type":"teleport"})");
  CHECK(e.request == "teleport");
  CHECK(e.field == "type");
  CHECK(std::get<AttachRequest>(request_of(R"({"type":"attach","session":"x"})")).session == "x");
}

TEST_CASE("created message carries the map, condition and first frame") {
  const Session s = small_session();
  const Json j = Json::parse(created_message("0123456789abcdef", "small", s));
  CHECK(j["type"] == "created");
  CHECK(j["session"] == "0123456789abcdef");
  CHECK(j["map"]["name"] == "small");
  CHECK(j["map"]["width"] == 6);
  CHECK(j["map"]["height"] == 4);
  CHECK(j["map"]["resolution"] == 0.5);
  CHECK(j["map"]["origin"]["x"] == 1.0);
  CHECK(j["map"]["occupancy"].size() == 24);
  CHECK(j["map"]["occupancy"][8] == 1);
  CHECK(j["map"]["occupancy"][0] == 0);
  CHECK(j["goal"]["x"] == 3.75);
  CHECK(j["goal"]["y"] == 3.75);
  CHECK(j["condition"]["directions"] == "four");
  CHECK(j["condition"]["direction_count"] == 4);
  CHECK(j["condition"]["accuracy"] == 0.9);
  CHECK(j["condition"]["mode"] == "shared");
  const Json& f = j["frame"];
  CHECK(f["type"] == "frame");
  CHECK(f["t"] == 0.0);
  CHECK(f["c"] == 0.0);
  CHECK(f["goal_estimate"].is_null());
  CHECK(f["status"] == "running");
  CHECK(f["heatmap"]["width"] == 6);
  CHECK(f["heatmap"]["cell_m"] == 0.5);
  double total = 0.0;
  for (const auto& v : f["heatmap"]["values"]) total += v.get<double>();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("acks echo the sent command") {
  InputOutcome limited{InputStatus::Limited, {0.3, 0.0}, 0.25, {}};
  Json j = Json::parse(ack_message("s", limited));
  CHECK(j["type"] == "input_ack");
  CHECK(j["status"] == "limited");
  CHECK(j["sent"]["vx"] == 0.3);
  CHECK(j["retry_after_s"] == 0.25);
  CHECK_FALSE(j.contains("message"));

  InputOutcome rejected{InputStatus::Rejected, {}, 0.0, "direction: bad"};
  j = Json::parse(ack_message("s", rejected));
  CHECK(j["status"] == "rejected");
  CHECK(j["message"] == "direction: bad");
  CHECK_FALSE(j.contains("retry_after_s"));
}

TEST_CASE("frames and terminal messages after input") {
  Session s = small_session();
  REQUIRE(s.submit(0).status == InputStatus::Accepted);
  s.tick();
  Json f = Json::parse(frame_message("s", s));
  CHECK(f["goal_estimate"].is_object());
  CHECK(f["t"] == doctest::Approx(0.05));
  CHECK(f["position"]["x"].get<double>() > 1.25);

  while (!s.terminal()) {
    if (s.clock() >= static_cast<double>(s.log().size())) s.submit(0);
    s.tick();
  }
  const Json t = Json::parse(terminal_message("s", s));
  CHECK(t["type"] == "terminal");
  CHECK(t["status"] == std::string(to_string(s.status())));
  CHECK(t["result"]["reached"] == s.result().reached);
  CHECK(t["result"]["elapsed_s"] == s.result().elapsed);
  REQUIRE(t["inputs"].size() == s.log().size());
  CHECK(t["inputs"][0]["sent"]["vx"] == doctest::Approx(0.3));
  CHECK(t["inputs"][0]["corrupted"] == !(s.log()[0].sent == s.log()[0].applied));
  CHECK(t["frame"]["status"] == t["status"]);
}

TEST_CASE("error messages") {
  const Json j = Json::parse(error_message({"create", "accuracy", "accuracy: outside [0, 1]"}));
  CHECK(j == Json{{"type", "error"},
                  {"request", "create"},
                  {"field", "accuracy"},
                  {"message", "accuracy: outside [0, 1]"}});
}
