#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intent_orch/cluster_sim.hpp"
#include "intent_orch/intent.hpp"
#include "intent_orch/orchestrator.hpp"

namespace intent_orch {

enum class EventKind {
  kDeployApp,
  kInjectDelay,
  kClearDelay,
  kInjectCpu,
  kClearCpu,
  kEnd,
};

std::string_view to_string(EventKind kind);

struct ScenarioEvent {
  std::int64_t at_ms = 0;
  EventKind kind = EventKind::kEnd;
  NodeId node_id;  // fault events
  double value = 0.0;  // delay in ms or extra CPU percent
  AppId app_id;  // deploy_app

  bool operator==(const ScenarioEvent&) const = default;
};

/// A scripted experiment plus everything needed to replay it.
struct Scenario {
  std::string name;
  std::int64_t tick_ms = 500;
  std::vector<ScenarioEvent> events;  // sorted, `end` last

  Topology topology;
  OrchestratorConfig config;
  Intent intent;
  AppDeployment deployment;
};

/// The event script on its own, before it is bound to the other inputs.
struct ScenarioScript {
  std::string name;
  std::int64_t tick_ms = 500;
  std::vector<ScenarioEvent> events;
};

/// Node references are only checked when `topology` is given.
ScenarioScript parse_scenario_script(std::string_view text,
                                     const Topology* topology,
                                     const std::string& source = {});

/// Parses the event script and validates it against the other inputs:
/// node names must exist in the topology, events must be sorted by time and
/// end with exactly one `end`, and deploy_app must name `deployment`.
Scenario parse_scenario(std::string_view text, Topology topology,
                        OrchestratorConfig config, Intent intent,
                        AppDeployment deployment,
                        const std::string& source = {});

struct Tick {
  std::int64_t t_ms = 0;
  std::vector<double> cpu_percent;  // one per topology node, topology order
  std::optional<double> rtt_ms;     // from the hosting node
  std::optional<NodeId> placement;
  std::string action;  // last decision so far, see describe_action()

  bool operator==(const Tick&) const = default;
};

struct Timeline {
  std::vector<NodeId> nodes;
  std::vector<Tick> ticks;
  std::vector<ScenarioEvent> events;  // as applied
  std::vector<Decision> decisions;
  std::optional<std::string> fatal_error;

  /// Distinct consecutive non-empty placements, e.g. [master, worker-2, ...].
  std::vector<NodeId> placement_sequence() const;
};

/// Observation points for tests.
struct ReplayHooks {
  std::function<void(const ClusterSimulator&, const Tick&)> on_tick;
  // Fires after every simulator state change (deploy, terminate, advance).
  std::function<void(const ClusterSimulator&)> on_sim_change;
};

/// Deterministic replay on a virtual clock. A fatal orchestrator error stops
/// the replay; the partial timeline is returned with `fatal_error` set.
Timeline run_scenario(const Scenario& scenario, const ReplayHooks& hooks = {});

enum class TimelineFormat { kCsv, kJsonLines };

std::optional<TimelineFormat> timeline_format_from_string(std::string_view s);

/// CSV columns: t_ms, cpu_<node> per node, rtt_ms, placement, action.
std::string export_timeline(const Timeline& timeline, TimelineFormat format);

/// Reads back nodes and ticks written by export_timeline.
Timeline import_timeline(std::string_view text, TimelineFormat format);

std::string export_decision_log(const Timeline& timeline);

}  // namespace intent_orch
