#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "intent_orch/backend.hpp"
#include "intent_orch/metrics.hpp"

namespace intent_orch {

enum class Region { kEdge, kCloud };

std::string_view to_string(Region region);

struct NodeSpec {
  NodeId node_id;
  Region region = Region::kEdge;
  double cpu_baseline = 0.0;
  double base_rtt_ms = 0.0;

  bool operator==(const NodeSpec&) const = default;
};

struct NoiseConfig {
  bool enabled = false;
  double cpu_sigma = 1.0;
  double rtt_sigma = 0.5;
  std::uint64_t seed = 0;

  bool operator==(const NoiseConfig&) const = default;
};

struct Topology {
  std::vector<NodeSpec> nodes;
  NoiseConfig noise;
  std::int64_t startup_latency_ms = 1000;
  std::int64_t drain_latency_ms = 500;

  bool operator==(const Topology&) const = default;
};

Topology parse_topology(std::string_view text, const std::string& source = {});
std::string serialize(const Topology& topology);

/// Monotone virtual time in milliseconds since scenario start.
class VirtualClock {
 public:
  std::int64_t now() const { return now_ms_; }
  void advance(std::int64_t dt_ms);

 private:
  std::int64_t now_ms_ = 0;
};

struct NodeState {
  NodeSpec spec;
  double cpu_injected = 0.0;
  double net_delay_injected_ms = 0.0;
  std::set<AppId> hosted_apps;
};

/// Deterministic edge/cloud cluster. Implements both the metrics and the
/// backend contracts on one virtual clock. Single-owner: not thread-safe.
class ClusterSimulator final : public MetricsProvider, public ClusterBackend {
 public:
  /// Throws ValidationError on duplicate ids, negative values or no nodes.
  explicit ClusterSimulator(Topology topology);

  // MetricsProvider / ClusterBackend
  std::vector<NodeId> list_nodes() const override;
  NodeMetrics snapshot(const NodeId& node_id) override;
  void deploy(const AppDeployment& app, const NodeId& node_id) override;
  void terminate(const AppId& app_id, const NodeId& node_id) override;
  std::vector<ReplicaPlacement> placement(const AppId& app_id) const override;

  // Fault injection. Unknown nodes throw ContractError.
  void inject_delay(const NodeId& node_id, double delay_ms);
  void clear_delay(const NodeId& node_id);
  void inject_cpu(const NodeId& node_id, double extra_percent);
  void clear_cpu(const NodeId& node_id);

  /// dt_ms must be > 0. Completes startups and drains that fall due.
  void advance(std::int64_t dt_ms);
  std::int64_t now() const { return clock_.now(); }

  const NodeState& node(const NodeId& node_id) const;
  const Topology& topology() const { return topology_; }

  /// Noise-free CPU load of a node, clamped to [0, 100].
  double cpu_percent(const NodeId& node_id) const;
  double rtt_ms(const NodeId& node_id) const;

  /// Test hook: fails the next deploy() calls targeting `node_id`.
  void fail_deploys_on(const NodeId& node_id, bool fail = true);

  /// Called after every state mutation (deploy, terminate, advance).
  void set_observer(std::function<void(const ClusterSimulator&)> observer) {
    observer_ = std::move(observer);
  }

 private:
  struct Replica {
    AppId app_id;
    NodeId node_id;
    ReplicaStatus status;
    std::int64_t since_ms;
    double cpu_demand;
  };

  NodeState& mutable_node(const NodeId& node_id);
  std::size_t index_of(const NodeId& node_id) const;
  double noise(std::size_t node_index, int channel, double sigma) const;
  void notify() const;

  Topology topology_;
  VirtualClock clock_;
  std::vector<NodeState> nodes_;
  std::vector<Replica> replicas_;
  std::set<NodeId> failing_deploys_;
  std::function<void(const ClusterSimulator&)> observer_;
};

}  // namespace intent_orch
