#ifndef SHCTL_TELEOP_SERVER_HPP_
#define SHCTL_TELEOP_SERVER_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shctl/simulator.hpp"

namespace shctl::teleop {

struct MapEntry {
  std::string name;
  std::shared_ptr<const OccupancyGrid> grid;  // already inflated
  std::optional<WorldPoint> start;            // used when a create omits it
  std::optional<WorldPoint> goal;
};

struct ServerOptions {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;  // 0 picks a free port
  double tick_hz = 20.0;
  double grace_period = 30.0;
  SimParams params{};  // dt is replaced by 1 / tick_hz
  std::optional<std::filesystem::path> static_dir;
  bool handle_signals = false;  // stop on SIGINT/SIGTERM
};

// Websocket session server. Plain HTTP GETs are answered from static_dir;
// upgrade requests on any path become a message connection. All sessions are
// ticked in real time on one event loop thread.
class Server {
 public:
  // Binds immediately, so port() is valid before run().
  Server(std::vector<MapEntry> maps, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  // Blocks until stop().
  void run();
  // Safe to call from any thread.
  void stop();

  struct Impl;  // event loop state, opaque

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace shctl::teleop

#endif  // SHCTL_TELEOP_SERVER_HPP_
