#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace marll {

class AddressInUseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks an ephemeral port
};

/// Line-delimited JSON over TCP; every connection owns its own sessions.
/// A connection whose first line is an HTTP "GET /health" request gets a
/// plain HTTP 200 answer instead.
class Server {
 public:
  /// Binds and listens. Throws AddressInUseError when the port is taken and
  /// std::runtime_error for other socket failures.
  explicit Server(const ServerOptions& options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return port_; }

  /// Serves until `stop` becomes true.
  void run(const std::atomic<bool>& stop);

 private:
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace marll
