#include "marll/server.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <list>
#include <string>
#include <vector>

#include "marll/protocol.hpp"

namespace marll {
namespace {

// Stepping for a connection pauses while this much output is unsent.
constexpr std::size_t kMaxPendingOutput = 16u << 20;

struct Connection {
  int fd = -1;
  std::string in;
  std::string out;
  SessionHub hub;
  bool first_line = true;
  bool closing = false;  // close once `out` drains
  bool dead = false;
};

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL, 0) | O_NONBLOCK); }

void append(Connection& c, const std::vector<Message>& msgs) {
  for (const auto& m : msgs) {
    c.out += m.encode();
    c.out += '\n';
  }
}

std::string http_response(int status, const std::string& reason, const std::string& body) {
  return "HTTP/1.1 " + std::to_string(status) + " " + reason +
         "\r\nContent-Type: application/json\r\nContent-Length: " + std::to_string(body.size()) +
         "\r\nConnection: close\r\n\r\n" + body;
}

void handle_line(Connection& c, std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (c.first_line && line.starts_with("GET ")) {
    c.out += line.starts_with("GET /health ") || line == "GET /health"
                 ? http_response(200, "OK", R"({"status":"ok","protocol":"marll/1"})")
                 : http_response(404, "Not Found", R"({"status":"not found"})");
    c.closing = true;
    return;
  }
  c.first_line = false;
  if (line.empty()) return;
  try {
    append(c, c.hub.handle(decode_message(line)));
  } catch (const ProtocolError& e) {
    Message m;
    m.kind = "error";
    m.payload = {{"message", e.what()}};
    append(c, {m});
  }
}

void read_from(Connection& c) {
  char buf[65536];
  for (;;) {
    const ssize_t got = ::recv(c.fd, buf, sizeof buf, 0);
    if (got > 0) {
      c.in.append(buf, static_cast<std::size_t>(got));
      continue;
    }
    if (got == 0) c.dead = true;
    else if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) c.dead = true;
    break;
  }
  std::size_t start = 0;
  for (std::size_t nl; !c.closing && (nl = c.in.find('\n', start)) != std::string::npos; start = nl + 1) {
    handle_line(c, c.in.substr(start, nl - start));
  }
  c.in.erase(0, start);
  // A bare health probe may arrive without a newline before the peer waits.
  if (c.first_line && c.in.starts_with("GET /health")) handle_line(c, "GET /health");
}

void write_to(Connection& c) {
  while (!c.out.empty()) {
    const ssize_t sent = ::send(c.fd, c.out.data(), c.out.size(), MSG_NOSIGNAL);
    if (sent > 0) {
      c.out.erase(0, static_cast<std::size_t>(sent));
      continue;
    }
    if (sent < 0 && (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR)) return;
    c.dead = true;
    return;
  }
  if (c.closing) c.dead = true;
}

}  // namespace

Server::Server(const ServerOptions& options) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options.port);
  if (::inet_pton(AF_INET, options.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw std::runtime_error("bad listen address '" + options.host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const int err = errno;
    ::close(listen_fd_);
    if (err == EADDRINUSE) throw AddressInUseError("port " + std::to_string(options.port) + " is in use");
    throw std::runtime_error(std::string("bind: ") + std::strerror(err));
  }
  if (::listen(listen_fd_, 16) != 0) {
    const int err = errno;
    ::close(listen_fd_);
    throw std::runtime_error(std::string("listen: ") + std::strerror(err));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  set_nonblocking(listen_fd_);
}

Server::~Server() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::run(const std::atomic<bool>& stop) {
  std::list<Connection> conns;
  while (!stop.load()) {
    std::vector<pollfd> fds;
    fds.push_back({listen_fd_, POLLIN, 0});
    bool busy = false;
    for (auto& c : conns) {
      short events = POLLIN;
      if (!c.out.empty()) events |= POLLOUT;
      fds.push_back({c.fd, events, 0});
      busy = busy || (c.hub.has_running() && c.out.size() < kMaxPendingOutput);
    }
    const int ready = ::poll(fds.data(), fds.size(), busy ? 0 : 50);
    if (ready < 0 && errno != EINTR) throw std::runtime_error(std::string("poll: ") + std::strerror(errno));

    if (fds[0].revents & POLLIN) {
      for (int fd; (fd = ::accept(listen_fd_, nullptr, nullptr)) >= 0;) {
        set_nonblocking(fd);
        conns.emplace_back().fd = fd;
      }
    }
    std::size_t i = 1;
    for (auto& c : conns) {
      if (i >= fds.size()) break;
      const short re = fds[i++].revents;
      if (re & (POLLIN | POLLHUP | POLLERR)) read_from(c);
    }
    for (auto& c : conns) {
      if (!c.dead && !c.closing && c.out.size() < kMaxPendingOutput) append(c, c.hub.tick());
      if (!c.out.empty() || c.closing) write_to(c);
    }
    for (auto it = conns.begin(); it != conns.end();) {
      if (it->dead) {
        ::close(it->fd);
        it = conns.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& c : conns) ::close(c.fd);
}

}  // namespace marll
