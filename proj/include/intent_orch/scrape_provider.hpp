#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "intent_orch/metrics.hpp"

namespace intent_orch {

struct RttTarget {
  std::string host;
  std::uint16_t port = 0;
};

struct ScrapeOptions {
  int rtt_runs = 5;
  std::chrono::milliseconds rtt_timeout{1000};
  std::chrono::milliseconds http_timeout{2000};
  // Overridable for tests; defaults to measure_rtt / the system clock.
  std::function<double(const RttTarget&)> rtt_probe;
  std::function<std::int64_t()> now_ms;
};

/// Live MetricsProvider: scrapes each node's exposition endpoint over HTTP,
/// derives CPU% from the last two scrapes and probes UE->node TCP RTT.
/// Safe for concurrent snapshot() calls; each node is serialized separately.
class ScrapeProvider final : public MetricsProvider {
 public:
  /// `endpoints` values look like "http://host:port/metrics".
  ScrapeProvider(std::map<NodeId, std::string> endpoints,
                 std::map<NodeId, RttTarget> rtt_targets,
                 ScrapeOptions options = {});

  std::vector<NodeId> list_nodes() const override;

  /// The first snapshot of a node has no CPU value (two scrapes needed).
  NodeMetrics snapshot(const NodeId& node_id) override;

 private:
  struct NodeState {
    std::string endpoint;
    RttTarget rtt_target;
    std::mutex mu;
    std::optional<std::int64_t> last_time_ms;
    std::vector<CoreCounters> last_counters;
  };

  std::string fetch(const std::string& endpoint) const;

  ScrapeOptions options_;
  std::map<NodeId, std::unique_ptr<NodeState>> nodes_;
};

}  // namespace intent_orch
