#include <doctest.h>

#include <chrono>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <json.hpp>

#include "shctl/teleop/server.hpp"

using namespace shctl;
using Json = nlohmann::json;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::shared_ptr<const OccupancyGrid> open_map() {
  std::istringstream in(
      "20 10 0.25 0 0\n"
      "....................\n"
      "....................\n"
      "....................\n"
      ".........#..........\n"
      ".........#..........\n"
      ".........#..........\n"
      "....................\n"
      "....................\n"
      "....................\n"
      "....................\n");
  return std::make_shared<const OccupancyGrid>(parse_ascii_map(in));
}

// Runs a server on an ephemeral port for the lifetime of the fixture.
struct LiveServer {
  teleop::Server server;
  std::thread thread;

  LiveServer()
      : server({teleop::MapEntry{"open", open_map(), WorldPoint{0.5, 0.5}, WorldPoint{4.5, 2.0}}},
               [] {
                 teleop::ServerOptions o;
                 o.address = "127.0.0.1";
                 o.port = 0;
                 o.tick_hz = 20.0;
                 o.params.backend = kernels::Backend::Serial;
                 return o;
               }()),
        thread([this] { server.run(); }) {}

  ~LiveServer() {
    server.stop();
    thread.join();
  }
};

class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    beast::get_lowest_layer(ws_).expires_after(std::chrono::seconds(10));
    beast::get_lowest_layer(ws_).connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    ws_.handshake("127.0.0.1", "/");
  }

  void send(const Json& j) { ws_.write(asio::buffer(j.dump())); }

  Json read() {
    beast::get_lowest_layer(ws_).expires_after(std::chrono::seconds(10));
    beast::flat_buffer buf;
    ws_.read(buf);
    return Json::parse(beast::buffers_to_string(buf.data()));
  }

  // Next message of `type`, skipping frames.
  Json read_type(const std::string& type) {
    for (int i = 0; i < 1000; ++i) {
      Json j = read();
      if (j["type"] == type) return j;
      if (j["type"] != "frame") return j;
    }
    return {};
  }

 private:
  asio::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
};

Json create(Client& c, Json extra = Json::object()) {
  Json msg = {{"type", "create"}, {"map", "open"}, {"directions", "four"}, {"accuracy", 1.0},
              {"mode", "shared"}, {"seed", 3}};
  msg.update(extra);
  c.send(msg);
  return c.read_type("created");
}

}  // namespace

TEST_CASE("create, input, frames and rate limiting over a websocket") {
  LiveServer live;
  Client client(live.server.port());

  const Json created = create(client);
  REQUIRE(created["type"] == "created");
  const std::string id = created["session"];
  CHECK(id.size() == 16);
  CHECK(created["map"]["width"] == 20);
  CHECK(created["start"]["x"] == 0.5);
  CHECK(created["frame"]["heatmap"]["values"].size() == 200);

  client.send({{"type", "input"}, {"session", id}, {"direction", 0}});
  const Json ack = client.read_type("input_ack");
  CHECK(ack["status"] == "accepted");
  CHECK(ack["sent"]["vx"] == doctest::Approx(0.3));

  client.send({{"type", "input"}, {"session", id}, {"direction", 1}});
  const Json limited = client.read_type("input_ack");
  CHECK(limited["status"] == "limited");
  CHECK(limited["retry_after_s"].get<double>() > 0.0);
  CHECK(limited["retry_after_s"].get<double>() <= 1.0);

  // Frame rate over one wall-clock second.
  const auto t0 = std::chrono::steady_clock::now();
  int frames = 0;
  double last_t = -1.0;
  bool moved = false;
  while (std::chrono::steady_clock::now() - t0 < std::chrono::seconds(1)) {
    const Json j = client.read();
    if (j["type"] != "frame") continue;
    ++frames;
    CHECK(j["t"].get<double>() > last_t);
    last_t = j["t"].get<double>();
    moved = moved || j["position"]["x"].get<double>() > 0.5;
    CHECK(j["goal_estimate"].is_object());
  }
  MESSAGE("frames in one second: ", frames);
  CHECK(frames >= 10);
  CHECK(moved);
}

TEST_CASE("sessions get distinct ids and run to a terminal message") {
  LiveServer live;
  Client a(live.server.port());
  Client b(live.server.port());
  const std::string ida = create(a)["session"];
  const std::string idb = create(b)["session"];
  CHECK(ida != idb);

  // A session started on its goal finishes on the first tick.
  const Json near = create(a, {{"start", {{"x", 4.4}, {"y", 2.1}}}});
  REQUIRE(near["type"] == "created");
  Json terminal;
  for (int i = 0; i < 200; ++i) {
    terminal = a.read();
    if (terminal["type"] == "terminal" && terminal["session"] == near["session"]) break;
  }
  CHECK(terminal["type"] == "terminal");
  CHECK(terminal["status"] == "succeeded");
  CHECK(terminal["result"]["reached"] == true);
  CHECK(terminal["inputs"].empty());
}

TEST_CASE("invalid requests get field errors") {
  LiveServer live;
  Client c(live.server.port());

  c.send({{"type", "create"}, {"map", "open"}, {"accuracy", 1.5}});
  Json e = c.read();
  CHECK(e["type"] == "error");
  CHECK(e["request"] == "create");
  CHECK(e["field"] == "accuracy");

  c.send({{"type", "create"}, {"map", "elsewhere"}});
  e = c.read();
  CHECK(e["type"] == "error");
  CHECK(e["field"] == "map");

  c.send({{"type", "create"}, {"map", "open"}, {"goal", {{"x", 2.375}, {"y", 1.0}}}});
  e = c.read();
  CHECK(e["type"] == "error");
  CHECK(e["field"] == "goal");

  c.send({{"type", "input"}, {"session", "nope"}, {"direction", 0}});
  e = c.read();
  CHECK(e["field"] == "session");

  c.send(Json::array({1, 2}));
  e = c.read();
  CHECK(e["type"] == "error");
}

TEST_CASE("a reconnecting client can attach to its session") {
  LiveServer live;
  std::string id;
  {
    Client first(live.server.port());
    id = create(first)["session"].get<std::string>();
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  Client second(live.server.port());
  second.send({{"type", "attach"}, {"session", id}});
  const Json j = second.read_type("created");
  CHECK(j["type"] == "created");
  CHECK(j["session"] == id);
  CHECK(j["frame"]["t"].get<double>() > 0.0);
  CHECK(second.read_type("frame")["session"] == id);
}
