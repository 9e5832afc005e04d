#include "intent_orch/probe.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <memory>
#include <stdexcept>

#include "intent_orch/errors.hpp"

namespace intent_orch {

namespace {

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

struct AddrInfoDeleter {
  void operator()(addrinfo* ai) const { ::freeaddrinfo(ai); }
};

void connect_once(const std::string& host, std::uint16_t port,
                  std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* raw = nullptr;
  const auto service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &raw);
      rc != 0) {
    throw std::runtime_error(std::string("resolve failed: ") +
                             ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, AddrInfoDeleter> addrs(raw);

  std::string last_error = "no addresses";
  for (addrinfo* ai = addrs.get(); ai != nullptr; ai = ai->ai_next) {
    Fd sock(::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK,
                     ai->ai_protocol));
    if (sock.get() < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    int rc = ::connect(sock.get(), ai->ai_addr, ai->ai_addrlen);
    if (rc == 0) return;
    if (errno != EINPROGRESS) {
      last_error = std::strerror(errno);
      continue;
    }
    pollfd pfd{sock.get(), POLLOUT, 0};
    rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc == 0) {
      last_error = "timed out";
      continue;
    }
    if (rc < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(sock.get(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err == 0) return;
    last_error = std::strerror(err);
  }
  throw std::runtime_error(last_error);
}

}  // namespace

Connector tcp_connector() { return connect_once; }

double median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median of empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
}

double measure_rtt(const std::string& host, std::uint16_t port, int runs,
                   std::chrono::milliseconds timeout) {
  SteadyProbeClock clock;
  return measure_rtt(host, port, runs, timeout, clock, tcp_connector());
}

double measure_rtt(const std::string& host, std::uint16_t port, int runs,
                   std::chrono::milliseconds timeout, ProbeClock& clock,
                   const Connector& connect) {
  if (runs < 1) throw ContractError("runs must be >= 1");
  std::vector<double> samples;
  std::vector<std::string> failures;
  for (int i = 0; i < runs; ++i) {
    const auto start = clock.now();
    try {
      connect(host, port, timeout);
    } catch (const std::exception& e) {
      failures.push_back("run " + std::to_string(i + 1) + ": " + e.what());
      continue;
    }
    const auto elapsed = clock.now() - start;
    samples.push_back(
        std::chrono::duration<double, std::milli>(elapsed).count());
  }
  if (samples.empty()) {
    throw ProbeError("all " + std::to_string(runs) + " probes to " + host +
                         ":" + std::to_string(port) + " failed",
                     std::move(failures));
  }
  return median(std::move(samples));
}

}  // namespace intent_orch
