#pragma once

#include <string_view>
#include <vector>

#include "intent_orch/intent.hpp"

namespace intent_orch {

enum class ReplicaStatus { kStarting, kRunning, kTerminating };

std::string_view to_string(ReplicaStatus status);

struct ReplicaPlacement {
  NodeId node_id;
  ReplicaStatus status = ReplicaStatus::kStarting;

  bool operator==(const ReplicaPlacement&) const = default;
};

/// What the orchestrator needs from a container platform. The simulator is
/// the in-tree implementation; a Kubernetes client would be another.
class ClusterBackend {
 public:
  virtual ~ClusterBackend() = default;

  virtual std::vector<NodeId> list_nodes() const = 0;

  /// Idempotent per (app, node). Throws BackendError on failure.
  virtual void deploy(const AppDeployment& app, const NodeId& node_id) = 0;

  /// Throws BackendError if the app has no live replica on the node.
  virtual void terminate(const AppId& app_id, const NodeId& node_id) = 0;

  virtual std::vector<ReplicaPlacement> placement(const AppId& app_id) const = 0;
};

/// Replicas in starting or running state.
int live_replica_count(const std::vector<ReplicaPlacement>& placement);

}  // namespace intent_orch
