#include "shctl/teleop/server.hpp"

#include <chrono>
#include <csignal>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "shctl/teleop/protocol.hpp"

namespace shctl::teleop {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

// Frames beyond this many queued messages are dropped for a slow client;
// acks and terminal messages are always queued.
constexpr std::size_t kMaxQueuedFrames = 32;

std::string_view content_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

}  // namespace

class WsConnection;

struct Server::Impl {
  struct Entry {
    std::string map_name;
    std::unique_ptr<Session> session;
    std::weak_ptr<WsConnection> client;
  };

  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  asio::steady_timer timer{ioc};
  asio::signal_set signals{ioc};
  std::chrono::steady_clock::time_point next_tick;
  std::chrono::nanoseconds tick_period{};
  std::vector<MapEntry> maps;
  ServerOptions options;
  std::map<std::string, Entry> sessions;
  std::mt19937_64 id_rng{std::random_device{}()};

  void accept();
  void schedule_tick();
  void on_tick();
  void handle(const std::shared_ptr<WsConnection>& conn, std::string_view text);
  void on_close(const WsConnection* conn);
  std::string new_id();
  std::optional<std::string> serve_file(std::string_view target, std::string& type) const;
};

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, Server::Impl* server)
      : ws_(std::move(socket)), server_(server) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->read();
    });
  }

  void send(std::string text, bool droppable) {
    if (closed_) return;
    if (droppable && queue_.size() >= kMaxQueuedFrames) return;
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_->handle(self, text);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->close();
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    queue_.clear();
    server_->on_close(this);
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl* server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, Server::Impl* server)
      : stream_(std::move(socket)), server_(server) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->on_request();
                     });
  }

 private:
  void on_request() {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      std::make_shared<WsConnection>(stream_.release_socket(), server_)->start(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(false);
    std::string type;
    std::optional<std::string> body;
    if (req_.method() == http::verb::get) {
      const auto target = req_.target();
      body = server_->serve_file({target.data(), target.size()}, type);
    }
    if (body) {
      res->result(http::status::ok);
      res->set(http::field::content_type, type);
      res->body() = std::move(*body);
    } else {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    }
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code, std::size_t) {
                        beast::error_code ignored;
                        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                      });
  }

  beast::tcp_stream stream_;
  Server::Impl* server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

void Server::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec == asio::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpConnection>(std::move(socket), this)->start();
    accept();
  });
}

void Server::Impl::schedule_tick() {
  next_tick += tick_period;
  timer.expires_at(next_tick);
  timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    on_tick();
    schedule_tick();
  });
}

void Server::Impl::on_tick() {
  for (auto it = sessions.begin(); it != sessions.end();) {
    Entry& e = it->second;
    e.session->tick();
    auto client = e.client.lock();
    if (client) client->send(frame_message(it->first, *e.session), true);
    if (e.session->terminal()) {
      if (client) client->send(terminal_message(it->first, *e.session), false);
      it = sessions.erase(it);
      continue;
    }
    ++it;
  }
}

std::string Server::Impl::new_id() {
  while (true) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(id_rng()));
    if (!sessions.count(buf)) return buf;
  }
}

void Server::Impl::handle(const std::shared_ptr<WsConnection>& conn, std::string_view text) {
  auto parsed = parse_request(text);
  if (auto* err = std::get_if<ProtocolError>(&parsed)) {
    conn->send(error_message(*err), false);
    return;
  }
  const Request& req = std::get<Request>(parsed);

  if (const auto* create = std::get_if<CreateRequest>(&req)) {
    auto map = std::find_if(maps.begin(), maps.end(),
                            [&](const MapEntry& m) { return m.name == create->map; });
    if (map == maps.end()) {
      conn->send(error_message({"create", "map", "unknown map `" + create->map + "`"}), false);
      return;
    }
    const auto start = create->start ? create->start : map->start;
    const auto goal = create->goal ? create->goal : map->goal;
    if (!start || !goal) {
      conn->send(error_message({"create", start ? "goal" : "start",
                                "required: this map has no default"}),
                 false);
      return;
    }
    const auto goal_cell = world_to_cell(*map->grid, *goal);
    if (!goal_cell) {
      conn->send(error_message({"create", "goal", "outside the map"}), false);
      return;
    }
    SessionConfig cfg;
    cfg.start = *start;
    cfg.goal = *goal_cell;
    cfg.condition = create->condition;
    cfg.seed = create->seed;
    cfg.params = options.params;
    cfg.params.dt = 1.0 / options.tick_hz;
    if (create->timeout) cfg.params.timeout = *create->timeout;
    cfg.grace_period = options.grace_period;
    try {
      auto session = std::make_unique<Session>(map->grid, cfg);
      const std::string id = new_id();
      conn->send(created_message(id, map->name, *session), false);
      sessions[id] = Entry{map->name, std::move(session), conn};
    } catch (const TrialConfigError& e) {
      const std::string msg = e.what();
      const auto colon = msg.find(':');
      conn->send(error_message({"create", colon == std::string::npos ? "" : msg.substr(0, colon),
                                msg}),
                 false);
    }
    return;
  }

  const std::string& id = std::holds_alternative<InputRequest>(req)
                              ? std::get<InputRequest>(req).session
                              : std::get<AttachRequest>(req).session;
  auto it = sessions.find(id);
  if (it == sessions.end()) {
    conn->send(error_message({std::holds_alternative<InputRequest>(req) ? "input" : "attach",
                              "session", "no running session `" + id + "`"}),
               false);
    return;
  }
  Entry& e = it->second;
  if (std::holds_alternative<AttachRequest>(req)) {
    e.client = conn;
    e.session->attach();
    conn->send(created_message(id, e.map_name, *e.session), false);
    return;
  }
  const InputOutcome outcome = e.session->submit(std::get<InputRequest>(req).input);
  conn->send(ack_message(id, outcome), false);
}

void Server::Impl::on_close(const WsConnection* conn) {
  for (auto& [id, e] : sessions) {
    auto client = e.client.lock();
    if (!client || client.get() == conn) {
      e.client.reset();
      e.session->detach();
    }
  }
}

std::optional<std::string> Server::Impl::serve_file(std::string_view target,
                                                    std::string& type) const {
  if (!options.static_dir) return std::nullopt;
  std::string path(target.substr(0, target.find('?')));
  if (path.empty() || path.front() != '/' || path.find("..") != std::string::npos) {
    return std::nullopt;
  }
  if (path.back() == '/') path += "index.html";
  const std::filesystem::path file = *options.static_dir / path.substr(1);
  std::ifstream in(file, std::ios::binary);
  if (!in || std::filesystem::is_directory(file)) return std::nullopt;
  std::ostringstream body;
  body << in.rdbuf();
  type = content_type(file);
  return body.str();
}

Server::Server(std::vector<MapEntry> maps, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (!(options.tick_hz > 0.0)) throw std::invalid_argument("tick rate must be positive");
  impl_->maps = std::move(maps);
  impl_->options = std::move(options);
  impl_->tick_period = std::chrono::nanoseconds(
      static_cast<std::int64_t>(1e9 / impl_->options.tick_hz));
  const tcp::endpoint endpoint(asio::ip::make_address(impl_->options.address),
                               impl_->options.port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen();
}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->accept();
  if (impl_->options.handle_signals) {
    impl_->signals.add(SIGINT);
    impl_->signals.add(SIGTERM);
    impl_->signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  impl_->next_tick = std::chrono::steady_clock::now();
  impl_->schedule_tick();
  impl_->ioc.run();
}

void Server::stop() { impl_->ioc.stop(); }

}  // namespace shctl::teleop
