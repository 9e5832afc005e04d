#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "intent_orch/cluster_sim.hpp"
#include "intent_orch/intent.hpp"
#include "intent_orch/probe.hpp"

namespace intent_orch::testing {

/// Probe clock that only moves when told to. Fake connectors advance it to
/// simulate connect latency.
class ManualClock final : public ProbeClock {
 public:
  std::chrono::nanoseconds now() override { return now_; }
  void advance(std::chrono::nanoseconds d) { now_ += d; }

 private:
  std::chrono::nanoseconds now_{1'000'000'000};
};

/// Listening TCP socket on 127.0.0.1 with a kernel-assigned port. The
/// kernel completes handshakes from the backlog, so no accept loop needed.
class LoopbackListener {
 public:
  LoopbackListener() {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (fd_ < 0 || ::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(fd_, 128) != 0) {
      throw std::runtime_error("cannot open loopback listener");
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }
  ~LoopbackListener() { ::close(fd_); }
  LoopbackListener(const LoopbackListener&) = delete;
  LoopbackListener& operator=(const LoopbackListener&) = delete;

  std::uint16_t port() const { return port_; }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// A port that was free a moment ago and has no listener.
inline std::uint16_t unused_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

/// The three-node cluster from the relocation demo.
inline Topology demo_topology() {
  Topology t;
  t.nodes = {{"master", Region::kCloud, 45, 8},
             {"worker-1", Region::kEdge, 20, 6},
             {"worker-2", Region::kEdge, 10, 6}};
  return t;
}

inline Intent demo_intent() {
  return {"nginx-app",
          {{MetricKind::kRttUeToApp, Comparator::kLt, 25},
           {MetricKind::kNodeCpu, Comparator::kLt, 60}},
          {"master"},
          {}};
}

inline AppDeployment demo_deployment() { return {"nginx-app", "nginx:1.23", 10, 80}; }

/// Directory holding the bundled demo inputs.
inline std::filesystem::path scenarios_dir() { return INTENT_ORCH_SCENARIOS_DIR; }

}  // namespace intent_orch::testing
