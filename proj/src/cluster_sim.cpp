#include "intent_orch/cluster_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "document.hpp"
#include "intent_orch/errors.hpp"

namespace intent_orch {

std::string_view to_string(ReplicaStatus status) {
  switch (status) {
    case ReplicaStatus::kStarting:
      return "starting";
    case ReplicaStatus::kRunning:
      return "running";
    case ReplicaStatus::kTerminating:
      return "terminating";
  }
  return "unknown";
}

int live_replica_count(const std::vector<ReplicaPlacement>& placement) {
  return static_cast<int>(std::count_if(
      placement.begin(), placement.end(), [](const ReplicaPlacement& r) {
        return r.status != ReplicaStatus::kTerminating;
      }));
}

std::string_view to_string(Region region) {
  return region == Region::kEdge ? "edge" : "cloud";
}

void VirtualClock::advance(std::int64_t dt_ms) {
  if (dt_ms <= 0) throw ContractError("clock advance must be > 0 ms");
  now_ms_ += dt_ms;
}

namespace {

void validate(const Topology& t, const std::string& source = {}) {
  if (t.nodes.empty()) throw ValidationError("topology has no nodes", 0, source);
  std::set<NodeId> ids;
  for (const auto& n : t.nodes) {
    if (n.node_id.empty()) throw ValidationError("empty node id", 0, source);
    if (!ids.insert(n.node_id).second) {
      throw ValidationError("duplicate node id '" + n.node_id + "'", 0, source);
    }
    if (!(n.cpu_baseline >= 0) || !(n.base_rtt_ms >= 0)) {
      throw ValidationError("negative baseline on node '" + n.node_id + "'", 0,
                            source);
    }
  }
  if (t.startup_latency_ms < 0 || t.drain_latency_ms < 0) {
    throw ValidationError("latencies must be >= 0", 0, source);
  }
  if (t.noise.cpu_sigma < 0 || t.noise.rtt_sigma < 0) {
    throw ValidationError("noise sigma must be >= 0", 0, source);
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_open(std::uint64_t bits) {
  // (0, 1]: never zero so log() stays finite.
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

Topology parse_topology(std::string_view text, const std::string& source) {
  doc::MapReader r(doc::load(text, source), source, "topology");
  Topology t;
  YAML::Node nodes = r.require("nodes");
  if (!nodes.IsSequence()) r.fail("'nodes' must be a list", nodes);
  if (nodes.size() == 0) r.fail("'nodes' must be non-empty", nodes);
  std::set<NodeId> ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    doc::MapReader nr(nodes[i], source, "nodes[" + std::to_string(i) + "]");
    NodeSpec n;
    YAML::Node id = nr.require("id");
    n.node_id = nr.convert<std::string>(id, "id");
    if (n.node_id.empty()) nr.fail("'id' must be non-empty", id);
    if (!ids.insert(n.node_id).second) {
      nr.fail("duplicate node id '" + n.node_id + "'", id);
    }
    YAML::Node region = nr.require("region");
    const auto rs = nr.convert<std::string>(region, "region");
    if (rs == "edge") {
      n.region = Region::kEdge;
    } else if (rs == "cloud") {
      n.region = Region::kCloud;
    } else {
      nr.fail("unknown region '" + rs + "'", region);
    }
    YAML::Node cpu = nr.require("cpu_baseline");
    n.cpu_baseline = nr.finite(cpu, "cpu_baseline");
    if (n.cpu_baseline < 0) nr.fail("'cpu_baseline' must be >= 0", cpu);
    YAML::Node rtt = nr.require("base_rtt_ms");
    n.base_rtt_ms = nr.finite(rtt, "base_rtt_ms");
    if (n.base_rtt_ms < 0) nr.fail("'base_rtt_ms' must be >= 0", rtt);
    nr.finish();
    t.nodes.push_back(std::move(n));
  }
  if (YAML::Node noise = r.optional("noise")) {
    doc::MapReader nr(noise, source, "noise");
    t.noise.enabled = nr.get_or<bool>("enabled", false);
    if (YAML::Node v = nr.optional("cpu_sigma")) {
      t.noise.cpu_sigma = nr.finite(v, "cpu_sigma");
      if (t.noise.cpu_sigma < 0) nr.fail("'cpu_sigma' must be >= 0", v);
    }
    if (YAML::Node v = nr.optional("rtt_sigma")) {
      t.noise.rtt_sigma = nr.finite(v, "rtt_sigma");
      if (t.noise.rtt_sigma < 0) nr.fail("'rtt_sigma' must be >= 0", v);
    }
    t.noise.seed = nr.get_or<std::uint64_t>("seed", 0);
    nr.finish();
  }
  for (const auto* key : {"startup_latency_ms", "drain_latency_ms"}) {
    if (YAML::Node v = r.optional(key)) {
      const auto ms = r.convert<std::int64_t>(v, key);
      if (ms < 0) r.fail(std::string("'") + key + "' must be >= 0", v);
      (std::string_view(key) == "startup_latency_ms" ? t.startup_latency_ms
                                                     : t.drain_latency_ms) = ms;
    }
  }
  r.finish();
  return t;
}

std::string serialize(const Topology& t) {
  YAML::Emitter out;
  doc::begin_emitter(out);
  out << YAML::BeginMap;
  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& n : t.nodes) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << n.node_id;
    out << YAML::Key << "region" << YAML::Value << std::string(to_string(n.region));
    out << YAML::Key << "cpu_baseline" << YAML::Value << n.cpu_baseline;
    out << YAML::Key << "base_rtt_ms" << YAML::Value << n.base_rtt_ms;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << t.noise.enabled;
  out << YAML::Key << "cpu_sigma" << YAML::Value << t.noise.cpu_sigma;
  out << YAML::Key << "rtt_sigma" << YAML::Value << t.noise.rtt_sigma;
  out << YAML::Key << "seed" << YAML::Value << t.noise.seed;
  out << YAML::EndMap;
  out << YAML::Key << "startup_latency_ms" << YAML::Value << t.startup_latency_ms;
  out << YAML::Key << "drain_latency_ms" << YAML::Value << t.drain_latency_ms;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ClusterSimulator::ClusterSimulator(Topology topology)
    : topology_(std::move(topology)) {
  validate(topology_);
  for (const auto& spec : topology_.nodes) nodes_.push_back({spec, 0, 0, {}});
}

std::vector<NodeId> ClusterSimulator::list_nodes() const {
  std::vector<NodeId> ids;
  for (const auto& n : nodes_) ids.push_back(n.spec.node_id);
  return ids;
}

std::size_t ClusterSimulator::index_of(const NodeId& node_id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].spec.node_id == node_id) return i;
  }
  throw ContractError("unknown node '" + node_id + "'");
}

const NodeState& ClusterSimulator::node(const NodeId& node_id) const {
  return nodes_[index_of(node_id)];
}

NodeState& ClusterSimulator::mutable_node(const NodeId& node_id) {
  return nodes_[index_of(node_id)];
}

double ClusterSimulator::cpu_percent(const NodeId& node_id) const {
  const auto& n = node(node_id);
  double load = n.spec.cpu_baseline + n.cpu_injected;
  for (const auto& r : replicas_) {
    if (r.node_id == node_id) load += r.cpu_demand;
  }
  return std::clamp(load, 0.0, 100.0);
}

double ClusterSimulator::rtt_ms(const NodeId& node_id) const {
  const auto& n = node(node_id);
  return n.spec.base_rtt_ms + n.net_delay_injected_ms;
}

// Gaussian draw keyed on (seed, node, time, channel) so that snapshot order
// never changes the noise sequence.
double ClusterSimulator::noise(std::size_t node_index, int channel,
                               double sigma) const {
  if (!topology_.noise.enabled || sigma == 0.0) return 0.0;
  std::uint64_t key = splitmix64(topology_.noise.seed);
  key = splitmix64(key ^ node_index);
  key = splitmix64(key ^ static_cast<std::uint64_t>(clock_.now()));
  key = splitmix64(key ^ static_cast<std::uint64_t>(channel));
  const double u1 = unit_open(key);
  const double u2 = unit_open(splitmix64(key));
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

NodeMetrics ClusterSimulator::snapshot(const NodeId& node_id) {
  const auto idx = index_of(node_id);
  NodeMetrics m;
  m.node_id = node_id;
  m.capture_time_ms = clock_.now();
  m.cpu_percent = std::clamp(
      cpu_percent(node_id) + noise(idx, 0, topology_.noise.cpu_sigma), 0.0,
      100.0);
  m.rtt_ue_to_app_ms =
      std::max(0.0, rtt_ms(node_id) + noise(idx, 1, topology_.noise.rtt_sigma));
  return m;
}

void ClusterSimulator::deploy(const AppDeployment& app, const NodeId& node_id) {
  auto& n = mutable_node(node_id);
  if (failing_deploys_.contains(node_id)) {
    throw BackendError("deploy of " + app.app_id + " on " + node_id +
                       " rejected");
  }
  for (const auto& r : replicas_) {
    if (r.app_id == app.app_id && r.node_id == node_id &&
        r.status != ReplicaStatus::kTerminating) {
      return;
    }
  }
  const auto status = topology_.startup_latency_ms == 0
                          ? ReplicaStatus::kRunning
                          : ReplicaStatus::kStarting;
  replicas_.push_back(
      {app.app_id, node_id, status, clock_.now(), app.cpu_demand});
  n.hosted_apps.insert(app.app_id);
  notify();
}

void ClusterSimulator::terminate(const AppId& app_id, const NodeId& node_id) {
  auto& n = mutable_node(node_id);
  auto it = std::find_if(replicas_.begin(), replicas_.end(), [&](const Replica& r) {
    return r.app_id == app_id && r.node_id == node_id &&
           r.status != ReplicaStatus::kTerminating;
  });
  if (it == replicas_.end()) {
    throw BackendError("app " + app_id + " has no live replica on " + node_id);
  }
  if (topology_.drain_latency_ms == 0) {
    replicas_.erase(it);
    const bool still_hosted =
        std::any_of(replicas_.begin(), replicas_.end(), [&](const Replica& r) {
          return r.app_id == app_id && r.node_id == node_id;
        });
    if (!still_hosted) n.hosted_apps.erase(app_id);
  } else {
    it->status = ReplicaStatus::kTerminating;
    it->since_ms = clock_.now();
  }
  notify();
}

std::vector<ReplicaPlacement> ClusterSimulator::placement(
    const AppId& app_id) const {
  std::vector<ReplicaPlacement> out;
  for (const auto& r : replicas_) {
    if (r.app_id == app_id) out.push_back({r.node_id, r.status});
  }
  return out;
}

void ClusterSimulator::inject_delay(const NodeId& node_id, double delay_ms) {
  if (!(delay_ms >= 0) || !std::isfinite(delay_ms)) {
    throw ContractError("injected delay must be finite and >= 0");
  }
  mutable_node(node_id).net_delay_injected_ms = delay_ms;
}

void ClusterSimulator::clear_delay(const NodeId& node_id) {
  mutable_node(node_id).net_delay_injected_ms = 0.0;
}

void ClusterSimulator::inject_cpu(const NodeId& node_id, double extra_percent) {
  if (!(extra_percent >= 0) || !std::isfinite(extra_percent)) {
    throw ContractError("injected CPU must be finite and >= 0");
  }
  mutable_node(node_id).cpu_injected = extra_percent;
}

void ClusterSimulator::clear_cpu(const NodeId& node_id) {
  mutable_node(node_id).cpu_injected = 0.0;
}

void ClusterSimulator::advance(std::int64_t dt_ms) {
  clock_.advance(dt_ms);
  const auto now = clock_.now();
  for (auto& r : replicas_) {
    if (r.status == ReplicaStatus::kStarting &&
        now - r.since_ms >= topology_.startup_latency_ms) {
      r.status = ReplicaStatus::kRunning;
      r.since_ms = r.since_ms + topology_.startup_latency_ms;
    }
  }
  std::erase_if(replicas_, [&](const Replica& r) {
    return r.status == ReplicaStatus::kTerminating &&
           now - r.since_ms >= topology_.drain_latency_ms;
  });
  for (auto& n : nodes_) {
    std::erase_if(n.hosted_apps, [&](const AppId& app) {
      return std::none_of(replicas_.begin(), replicas_.end(), [&](const Replica& r) {
        return r.app_id == app && r.node_id == n.spec.node_id;
      });
    });
  }
  notify();
}

void ClusterSimulator::fail_deploys_on(const NodeId& node_id, bool fail) {
  index_of(node_id);
  if (fail) {
    failing_deploys_.insert(node_id);
  } else {
    failing_deploys_.erase(node_id);
  }
}

void ClusterSimulator::notify() const {
  if (observer_) observer_(*this);
}

}  // namespace intent_orch
