#include "shctl/teleop/protocol.hpp"

#include <json.hpp>

namespace shctl::teleop {

namespace {

using Json = nlohmann::json;

Json point(WorldPoint p) { return {{"x", p.x}, {"y", p.y}}; }
Json velocity(VelocityCommand v) { return {{"vx", v.vx}, {"vy", v.vy}}; }

ProtocolError fail(std::string request, std::string field, std::string message) {
  return {std::move(request), std::move(field), std::move(message)};
}

std::optional<double> number(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

std::optional<WorldPoint> read_point(const Json& v) {
  if (!v.is_object()) return std::nullopt;
  const auto x = number(v, "x");
  const auto y = number(v, "y");
  if (!x || !y) return std::nullopt;
  return WorldPoint{*x, *y};
}

std::variant<Request, ProtocolError> parse_create(const Json& msg) {
  CreateRequest req;
  const auto map = msg.find("map");
  if (map == msg.end() || !map->is_string()) return fail("create", "map", "expected a string");
  req.map = map->get<std::string>();

  if (auto it = msg.find("directions"); it != msg.end()) {
    const auto d = it->is_string() ? parse_direction_set(it->get<std::string>()) : std::nullopt;
    if (!d) return fail("create", "directions", "expected all, eight or four");
    req.condition.directions = *d;
  }
  if (auto it = msg.find("mode"); it != msg.end()) {
    const auto m = it->is_string() ? parse_control_mode(it->get<std::string>()) : std::nullopt;
    if (!m) return fail("create", "mode", "expected shared or direct");
    req.condition.mode = *m;
  }
  for (auto [key, dst] : {std::pair{"accuracy", &req.condition.accuracy},
                          std::pair{"period", &req.condition.period}}) {
    if (auto it = msg.find(key); it != msg.end()) {
      if (!it->is_number()) return fail("create", key, "expected a number");
      *dst = it->get<double>();
    }
  }
  if (auto err = validate(req.condition)) {
    const auto colon = err->find(':');
    return fail("create", colon == std::string::npos ? "" : err->substr(0, colon), *err);
  }
  if (auto it = msg.find("seed"); it != msg.end()) {
    if (!it->is_number_unsigned()) return fail("create", "seed", "expected a nonnegative integer");
    req.seed = it->get<std::uint64_t>();
  }
  for (auto [key, dst] : {std::pair{"start", &req.start}, std::pair{"goal", &req.goal}}) {
    if (auto it = msg.find(key); it != msg.end()) {
      *dst = read_point(*it);
      if (!*dst) return fail("create", key, "expected {\"x\": number, \"y\": number}");
    }
  }
  if (auto it = msg.find("timeout"); it != msg.end()) {
    if (!it->is_number() || !(it->get<double>() > 0.0)) {
      return fail("create", "timeout", "expected a positive number");
    }
    req.timeout = it->get<double>();
  }
  return Request{std::move(req)};
}

std::variant<Request, ProtocolError> parse_input(const Json& msg) {
  const auto session = msg.find("session");
  if (session == msg.end() || !session->is_string()) {
    return fail("input", "session", "expected a string");
  }
  InputRequest req{session->get<std::string>(), 0};
  const auto dir = msg.find("direction");
  const auto vec = msg.find("vector");
  if ((dir == msg.end()) == (vec == msg.end())) {
    return fail("input", "direction", "give exactly one of direction or vector");
  }
  if (dir != msg.end()) {
    if (!dir->is_number_integer()) return fail("input", "direction", "expected an integer");
    req.input = dir->get<int>();
  } else {
    const auto p = read_point(*vec);
    if (!p) return fail("input", "vector", "expected {\"x\": number, \"y\": number}");
    req.input = VelocityCommand{p->x, p->y};
  }
  return Request{std::move(req)};
}

Json heatmap_json(const Heatmap& h, double resolution) {
  return {{"width", h.width},
          {"height", h.height},
          {"cell_m", h.block * resolution},
          {"values", h.values}};
}

Json result_json(const TrialResult& r) {
  return {{"success", r.success},
          {"reached", r.reached},
          {"collisions", r.collisions},
          {"elapsed_s", r.elapsed},
          {"path_length_m", r.path_length}};
}

Json frame_json(const std::string& id, const Session& session) {
  const Frame f = session.frame();
  Json j = {{"type", "frame"},
            {"session", id},
            {"t", f.clock},
            {"position", point(f.position)},
            {"collisions", f.collisions},
            {"path_length", f.path_length},
            {"c", f.confidence},
            {"command", velocity(f.command)},
            {"status", std::string(to_string(f.status))},
            {"heatmap", heatmap_json(f.heatmap, session.grid().resolution())}};
  j["goal_estimate"] =
      f.estimated_goal ? point(cell_to_world(session.grid(), *f.estimated_goal)) : Json(nullptr);
  return j;
}

}  // namespace

std::variant<Request, ProtocolError> parse_request(std::string_view text) {
  const Json msg = Json::parse(text, nullptr, false);
  if (msg.is_discarded() || !msg.is_object()) return fail("", "", "expected a JSON object");
  const auto type = msg.find("type");
  if (type == msg.end() || !type->is_string()) return fail("", "type", "expected a string");
  const std::string t = type->get<std::string>();
  if (t == "create") return parse_create(msg);
  if (t == "input") return parse_input(msg);
  if (t == "attach") {
    const auto session = msg.find("session");
    if (session == msg.end() || !session->is_string()) {
      return fail("attach", "session", "expected a string");
    }
    return Request{AttachRequest{session->get<std::string>()}};
  }
  return fail(t, "type", "unknown message type `" + t + "`");
}

std::string created_message(const std::string& id, const std::string& map_name,
                            const Session& session) {
  const OccupancyGrid& g = session.grid();
  std::vector<int> occupancy(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) occupancy[i] = g.is_free_index(i) ? 0 : 1;
  const InputCondition& c = session.config().condition;
  const Json j = {
      {"type", "created"},
      {"session", id},
      {"map",
       {{"name", map_name},
        {"width", g.width()},
        {"height", g.height()},
        {"resolution", g.resolution()},
        {"origin", point(g.origin())},
        {"occupancy", occupancy}}},
      {"start", point(session.config().start)},
      {"goal", point(cell_to_world(g, session.config().goal))},
      {"goal_radius", session.config().params.goal_radius},
      {"speed", session.config().params.speed},
      {"condition",
       {{"directions", std::string(to_string(c.directions))},
        {"direction_count", direction_count(c.directions)},
        {"accuracy", c.accuracy},
        {"period", c.period},
        {"mode", std::string(to_string(c.mode))}}},
      {"frame", frame_json(id, session)}};
  return j.dump();
}

std::string ack_message(const std::string& id, const InputOutcome& outcome) {
  Json j = {{"type", "input_ack"},
            {"session", id},
            {"status", std::string(to_string(outcome.status))},
            {"sent", velocity(outcome.sent)}};
  if (outcome.status == InputStatus::Limited) j["retry_after_s"] = outcome.retry_after;
  if (outcome.status == InputStatus::Rejected) j["message"] = outcome.message;
  return j.dump();
}

std::string frame_message(const std::string& id, const Session& session) {
  return frame_json(id, session).dump();
}

std::string terminal_message(const std::string& id, const Session& session) {
  Json inputs = Json::array();
  for (const auto& e : session.log()) {
    inputs.push_back({{"t", e.time},
                      {"position", point(e.position)},
                      {"sent", velocity(e.sent)},
                      {"applied", velocity(e.applied)},
                      {"corrupted", !(e.sent == e.applied)}});
  }
  Json j = {{"type", "terminal"},
            {"session", id},
            {"status", std::string(to_string(session.status()))},
            {"reason", std::string(session.failure_reason())},
            {"result", result_json(session.result())},
            {"inputs", inputs},
            {"frame", frame_json(id, session)}};
  return j.dump();
}

std::string error_message(const ProtocolError& error) {
  return Json{{"type", "error"},
              {"request", error.request},
              {"field", error.field},
              {"message", error.message}}
      .dump();
}

}  // namespace shctl::teleop
