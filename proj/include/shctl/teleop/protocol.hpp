#ifndef SHCTL_TELEOP_PROTOCOL_HPP_
#define SHCTL_TELEOP_PROTOCOL_HPP_

// JSON text messages exchanged over the session websocket. Coordinates are
// meters, velocities m/s, times seconds of session clock. The field-by-field
// schema is in docs/protocol.md.

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "shctl/teleop/session.hpp"

namespace shctl::teleop {

struct CreateRequest {
  std::string map;
  InputCondition condition{};
  std::uint64_t seed = 1;
  std::optional<WorldPoint> start;
  std::optional<WorldPoint> goal;
  std::optional<double> timeout;
};

struct InputRequest {
  std::string session;
  OperatorInput input;
};

// Re-binds a connection to a running session inside its grace period.
struct AttachRequest {
  std::string session;
};

using Request = std::variant<CreateRequest, InputRequest, AttachRequest>;

struct ProtocolError {
  std::string request;  // message type, or empty if unknown
  std::string field;
  std::string message;
};

std::variant<Request, ProtocolError> parse_request(std::string_view text);

std::string created_message(const std::string& id, const std::string& map_name,
                            const Session& session);
std::string ack_message(const std::string& id, const InputOutcome& outcome);
std::string frame_message(const std::string& id, const Session& session);
std::string terminal_message(const std::string& id, const Session& session);
std::string error_message(const ProtocolError& error);

}  // namespace shctl::teleop

#endif  // SHCTL_TELEOP_PROTOCOL_HPP_
