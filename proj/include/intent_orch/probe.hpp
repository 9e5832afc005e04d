#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace intent_orch {

/// Time source for RTT probing; swapped for a fake in tests.
class ProbeClock {
 public:
  virtual ~ProbeClock() = default;
  virtual std::chrono::nanoseconds now() = 0;
};

class SteadyProbeClock final : public ProbeClock {
 public:
  std::chrono::nanoseconds now() override {
    return std::chrono::steady_clock::now().time_since_epoch();
  }
};

/// Establishes (and closes) one TCP connection; throws std::runtime_error
/// with a human-readable reason on refusal or timeout.
using Connector = std::function<void(const std::string& host,
                                     std::uint16_t port,
                                     std::chrono::milliseconds timeout)>;

Connector tcp_connector();

/// Median of the values; mean of the two middle elements for even sizes.
double median(std::vector<double> values);

/// Runs `runs` TCP connect-time measurements and returns the median of the
/// successful ones in milliseconds. Throws ProbeError when every run fails.
double measure_rtt(const std::string& host, std::uint16_t port, int runs,
                   std::chrono::milliseconds timeout);

double measure_rtt(const std::string& host, std::uint16_t port, int runs,
                   std::chrono::milliseconds timeout, ProbeClock& clock,
                   const Connector& connect);

}  // namespace intent_orch
