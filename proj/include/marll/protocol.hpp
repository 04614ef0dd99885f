#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "marll/engine.hpp"
#include "marll/harness.hpp"

namespace marll {

inline constexpr std::string_view kProtocolVersion = "marll/1";

struct Message {
  std::string protocol{kProtocolVersion};
  std::string kind;
  std::string session;  // empty for connection-level messages
  std::uint64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();

  nlohmann::json to_json() const;
  std::string encode() const;  // one line, no trailing newline
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ProtocolError for malformed JSON, a missing kind or a foreign
/// protocol version.
Message decode_message(std::string_view line);

/// The live sessions owned by one connection. handle() applies a client
/// message and returns the immediate replies; tick() advances every running
/// session by one sweep and returns the frames and completion notices it
/// produced. Commands therefore always land between sweeps.
class SessionHub {
 public:
  SessionHub();
  ~SessionHub();
  SessionHub(SessionHub&&) noexcept;
  SessionHub& operator=(SessionHub&&) noexcept;

  std::vector<Message> handle(const Message& msg);
  std::vector<Message> tick();

  bool has_running() const;
  std::size_t session_count() const { return sessions_.size(); }
  /// nullptr when the id is unknown or belongs to a classic playback.
  const Session* find(const std::string& id) const;

 private:
  struct Entry;

  std::vector<Message> create(const Message& msg);
  Message frame_of(const std::string& id, Entry& e);
  Message reply(const std::string& kind, const std::string& id, nlohmann::json payload);
  Message error(const Message& cause, const std::string& what);
  Entry& entry(const std::string& id);
  std::vector<Message> advance(const std::string& id, Entry& e, std::size_t sweeps);

  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
  std::uint64_t conn_seq_ = 0;
};

}  // namespace marll
