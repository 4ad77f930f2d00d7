#pragma once

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <thread>

#include "scout/sensor.hpp"

namespace scout {

namespace detail {

struct FdGuard {
  int fd = -1;
  FdGuard() = default;
  explicit FdGuard(int f) : fd(f) {}
  FdGuard(const FdGuard&) = delete;
  FdGuard& operator=(const FdGuard&) = delete;
  FdGuard(FdGuard&& o) noexcept : fd(o.fd) { o.fd = -1; }
  FdGuard& operator=(FdGuard&& o) noexcept {
    reset();
    fd = o.fd;
    o.fd = -1;
    return *this;
  }
  ~FdGuard() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  explicit operator bool() const { return fd >= 0; }
};

inline void send_all(int fd, std::string_view data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("send failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

/// Reads until '\n' or deadline; returns the line including the newline.
inline std::string recv_line(int fd, std::chrono::steady_clock::time_point deadline) {
  std::string buf;
  char chunk[512];
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) throw Timeout("sensor: no response before timeout");
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd pfd{fd, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(std::max<long long>(left, 1)));
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (pr == 0) throw Timeout("sensor: no response before timeout");
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n == 0) throw ProtocolError("sensor: connection closed before a full response line");
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("recv failed: ") + std::strerror(errno));
    }
    buf.append(chunk, static_cast<std::size_t>(n));
    const auto nl = buf.find('\n');
    if (nl != std::string::npos) return buf.substr(0, nl + 1);
    if (buf.size() > 4096) throw ProtocolError("sensor: response line too long");
  }
}

/// Maps a parsed (or unparsable) response line onto the client-side errors.
inline double response_to_value(std::string_view line) {
  const auto resp = parse_response(line);
  if (!resp) throw ProtocolError("sensor: malformed response: " +
                                 std::string(strip_line_ending(line)));
  if (resp->kind == WireResponse::Kind::Light) return resp->value;
  switch (resp->token) {
    case ErrToken::OutOfRange: throw OutOfField("sensor: position rejected (out_of_range)");
    case ErrToken::Busy: throw SensorBusy("sensor: backend busy");
    case ErrToken::BadRequest: throw ProtocolError("sensor: backend rejected the request");
  }
  throw ProtocolError("sensor: unknown error token");
}

}  // namespace detail

/// Client for a sensor served over TCP. One connection per request; the
/// returned position is the wire-quantized one actually measured.
class RemoteSensor : public Sensor {
 public:
  RemoteSensor(std::string host, int port, int timeout_ms = 5000)
      : host_(std::move(host)), port_(port), timeout_ms_(timeout_ms) {}

  SensorReading measure(double x, double y) override {
    const auto t0 = std::chrono::steady_clock::now();
    const auto deadline = t0 + std::chrono::milliseconds(timeout_ms_);

    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port_);
    if (::getaddrinfo(host_.c_str(), service.c_str(), &hints, &res) != 0)
      throw ConnectionRefused("sensor: cannot resolve " + host_ + ":" + service);

    detail::FdGuard fd;
    int last_errno = ECONNREFUSED;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      detail::FdGuard s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
      if (!s) continue;
      if (::connect(s.fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        fd = std::move(s);
        break;
      }
      last_errno = errno;
    }
    ::freeaddrinfo(res);
    if (!fd) {
      if (last_errno == ETIMEDOUT) throw Timeout("sensor: connect timed out");
      throw ConnectionRefused(std::string("sensor: connect failed: ") +
                              std::strerror(last_errno));
    }

    const std::string request = format_measure_request(x, y);
    detail::send_all(fd.fd, request);
    const std::string line = detail::recv_line(fd.fd, deadline);
    const double value = detail::response_to_value(line);

    SensorReading r;
    r.position = {quantize_position(x), quantize_position(y)};
    r.value = value;
    r.latency_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    return r;
  }

 private:
  std::string host_;
  int port_;
  int timeout_ms_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks an ephemeral port; see SensorServer::port()
  double latency_ms = 0.0;
  std::function<void(const std::string&)> log;  // one call per request line
};

/// Serves the wire protocol over TCP against a simulated ground truth.
/// One connection is active at a time; extra connections get "ERR busy".
class SensorServer {
 public:
  SensorServer(const GroundTruth& gt, const FieldBounds& field, ServeOptions opts = {})
      : core_{gt, field, 0}, opts_(std::move(opts)) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(opts_.port);
    if (::getaddrinfo(opts_.host.c_str(), service.c_str(), &hints, &res) != 0)
      throw BindFailure("serve: cannot resolve " + opts_.host + ":" + service);
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      detail::FdGuard s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
      if (!s) continue;
      const int one = 1;
      ::setsockopt(s.fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
      if (::bind(s.fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(s.fd, 8) == 0) {
        listen_fd_ = std::move(s);
        break;
      }
    }
    ::freeaddrinfo(res);
    if (!listen_fd_) throw BindFailure("serve: cannot bind " + opts_.host + ":" + service);

    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(listen_fd_.fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0) {
      if (addr.ss_family == AF_INET)
        port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
      else if (addr.ss_family == AF_INET6)
        port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    }
  }

  ~SensorServer() { stop(); }

  int port() const { return port_; }

  void start() {
    stop_flag_.store(false);
    thread_ = std::thread([this] { serve(stop_flag_); });
  }

  void stop() {
    stop_flag_.store(true);
    if (thread_.joinable()) thread_.join();
  }

  /// Blocking loop; returns when stop becomes true.
  void serve(std::atomic<bool>& stop) {
    detail::FdGuard active;
    std::string buf;
    while (!stop.load()) {
      pollfd pfds[2];
      pfds[0] = {listen_fd_.fd, POLLIN, 0};
      nfds_t n = 1;
      if (active) {
        pfds[1] = {active.fd, POLLIN, 0};
        n = 2;
      }
      const int pr = ::poll(pfds, n, 50);
      if (pr < 0) {
        if (errno == EINTR) continue;
        break;
      }
      if (pr == 0) continue;

      // Drain the active connection before accepting: a sequential client's
      // close-then-reconnect delivers EOF and the new SYN in the same wake,
      // and the EOF must clear the slot or the reconnect is refused as busy.
      if (n == 2 && active && (pfds[1].revents & (POLLIN | POLLHUP | POLLERR))) {
        char chunk[512];
        const ssize_t got = ::recv(active.fd, chunk, sizeof chunk, 0);
        if (got <= 0) {
          active.reset();
          continue;
        }
        buf.append(chunk, static_cast<std::size_t>(got));
        std::size_t nl;
        while (active && (nl = buf.find('\n')) != std::string::npos) {
          const std::string line = buf.substr(0, nl + 1);
          buf.erase(0, nl + 1);
          if (opts_.log) opts_.log(std::string(detail::strip_line_ending(line)));
          if (opts_.latency_ms > 0)
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(opts_.latency_ms));
          try {
            detail::send_all(active.fd, core_.handle_line(line));
          } catch (const ProtocolError&) {
            active.reset();
          }
        }
        if (buf.size() > 4096) active.reset();  // garbage flood; drop the client
      }

      if (pfds[0].revents & POLLIN) {
        detail::FdGuard conn(::accept(listen_fd_.fd, nullptr, nullptr));
        if (conn) {
          if (active) {
            // The arm is serial: one client at a time.
            try {
              detail::send_all(conn.fd, format_err_response(ErrToken::Busy));
            } catch (const ProtocolError&) {
            }
          } else {
            active = std::move(conn);
            buf.clear();
          }
        }
      }
    }
  }

  std::uint64_t requests_served() const { return core_.counter; }

 private:
  detail::RequestCore core_;
  ServeOptions opts_;
  detail::FdGuard listen_fd_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<bool> stop_flag_{false};
};

/// Client for the file-drop exchange: drop `request.txt` into a shared
/// directory, poll for `result.txt`, consume it.
class FileDropSensor : public Sensor {
 public:
  explicit FileDropSensor(std::filesystem::path dir, int poll_ms = 10, int timeout_ms = 5000)
      : dir_(std::move(dir)), poll_ms_(poll_ms), timeout_ms_(timeout_ms) {
    std::filesystem::create_directories(dir_);
  }

  SensorReading measure(double x, double y) override {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    const auto deadline = t0 + std::chrono::milliseconds(timeout_ms_);
    const fs::path request = dir_ / "request.txt";
    const fs::path result = dir_ / "result.txt";

    std::error_code ec;
    fs::remove(result, ec);  // drop any stale result from an aborted exchange

    const fs::path tmp = dir_ / "request.txt.tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << format_measure_request(x, y);
      if (!out) throw ProtocolError("sensor: cannot write " + tmp.string());
    }
    fs::rename(tmp, request);

    while (true) {
      if (fs::exists(result)) {
        std::ifstream in(result, std::ios::binary);
        std::string line;
        std::getline(in, line);
        fs::remove(result, ec);
        const double value = detail::response_to_value(line);
        SensorReading r;
        r.position = {quantize_position(x), quantize_position(y)};
        r.value = value;
        r.latency_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        return r;
      }
      if (std::chrono::steady_clock::now() >= deadline)
        throw Timeout("sensor: no result file before timeout");
      std::this_thread::sleep_for(std::chrono::milliseconds(poll_ms_));
    }
  }

 private:
  std::filesystem::path dir_;
  int poll_ms_;
  int timeout_ms_;
};

/// Serves the file-drop exchange against a simulated ground truth.
class FileDropServer {
 public:
  FileDropServer(const GroundTruth& gt, const FieldBounds& field, std::filesystem::path dir,
                 int poll_ms = 10, double latency_ms = 0.0,
                 std::function<void(const std::string&)> log = {})
      : core_{gt, field, 0},
        dir_(std::move(dir)),
        poll_ms_(poll_ms),
        latency_ms_(latency_ms),
        log_(std::move(log)) {
    std::filesystem::create_directories(dir_);
  }

  ~FileDropServer() { stop(); }

  void start() {
    stop_flag_.store(false);
    thread_ = std::thread([this] { serve(stop_flag_); });
  }

  void stop() {
    stop_flag_.store(true);
    if (thread_.joinable()) thread_.join();
  }

  void serve(std::atomic<bool>& stop) {
    namespace fs = std::filesystem;
    const fs::path request = dir_ / "request.txt";
    const fs::path result = dir_ / "result.txt";
    const fs::path tmp = dir_ / "result.txt.tmp";
    while (!stop.load()) {
      std::error_code ec;
      if (fs::exists(request, ec)) {
        std::string line;
        {
          std::ifstream in(request, std::ios::binary);
          std::getline(in, line);
        }
        fs::remove(request, ec);
        if (log_) log_(std::string(detail::strip_line_ending(line)));
        if (latency_ms_ > 0)
          std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(latency_ms_));
        {
          std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
          out << core_.handle_line(line + "\n");
        }
        fs::rename(tmp, result, ec);
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(poll_ms_));
    }
  }

  std::uint64_t requests_served() const { return core_.counter; }

 private:
  detail::RequestCore core_;
  std::filesystem::path dir_;
  int poll_ms_;
  double latency_ms_;
  std::function<void(const std::string&)> log_;
  std::thread thread_;
  std::atomic<bool> stop_flag_{false};
};

}  // namespace scout
