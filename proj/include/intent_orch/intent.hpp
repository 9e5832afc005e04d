#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intent_orch {

using NodeId = std::string;
using AppId = std::string;

enum class MetricKind {
  kRttUeToApp,  // milliseconds
  kNodeCpu,     // percent, 0..100
};

enum class Comparator { kLt, kLe, kGt, kGe };

std::string_view to_string(MetricKind kind);
std::string_view to_string(Comparator op);
std::optional<MetricKind> metric_kind_from_string(std::string_view name);
std::optional<Comparator> comparator_from_string(std::string_view name);
std::string_view unit_of(MetricKind kind);

bool compare(Comparator op, double lhs, double rhs);

struct Condition {
  MetricKind metric = MetricKind::kRttUeToApp;
  Comparator op = Comparator::kLt;
  double threshold = 0.0;

  bool operator==(const Condition&) const = default;
};

struct Intent {
  AppId app_id;
  std::vector<Condition> conditions;
  std::vector<NodeId> node_priority;
  // Per-app override of OrchestratorConfig::check_interval_default_s.
  std::optional<double> check_interval_s;

  bool operator==(const Intent&) const = default;
};

enum class BackendKind { kSimulator, kExternal };

struct OrchestratorConfig {
  double check_interval_default_s = 1.0;
  std::uint64_t rng_seed = 0;
  double cpu_tie_epsilon = 5.0;
  bool return_to_priority = true;
  std::int64_t cooldown_cycles = 1;
  BackendKind backend_kind = BackendKind::kSimulator;
  // Opaque; never interpreted by the simulator backend.
  std::map<std::string, std::string> credentials;
  std::int64_t relocation_timeout_ms = 10000;
  std::int64_t provider_failure_budget = 3;

  bool operator==(const OrchestratorConfig&) const = default;
};

struct AppDeployment {
  AppId app_id;
  std::string image_ref;
  double cpu_demand = 0.0;
  std::uint16_t service_port = 80;

  bool operator==(const AppDeployment&) const = default;
};

/// Per-node metric values as seen by evaluation. Either may be missing.
struct MetricValues {
  std::optional<double> rtt_ue_to_app_ms;
  std::optional<double> cpu_percent;

  std::optional<double> get(MetricKind kind) const;
};

struct ConditionStatus {
  Condition condition;
  double observed = 0.0;
  bool fulfilled = false;

  bool operator==(const ConditionStatus&) const = default;
};

struct IntentEvaluation {
  NodeId node_id;
  std::vector<ConditionStatus> statuses;
  bool all_fulfilled = false;

  bool operator==(const IntentEvaluation&) const = default;

  /// First violated condition, if any.
  const ConditionStatus* first_violation() const;
};

/// Exact comparison, no tolerance. Throws EvaluationError on non-finite input.
ConditionStatus evaluate_condition(const Condition& cond, double observed);

/// Throws EvaluationError naming the metric when a referenced value is absent.
IntentEvaluation evaluate_intent(const Intent& intent, const NodeId& node_id,
                                 const MetricValues& metrics);

double effective_check_interval_s(const Intent& intent,
                                  const OrchestratorConfig& config);

// Document I/O. `source` labels diagnostics (usually the file path).
// Accepts both the block-style canonical format and its JSON rendering.
Intent parse_intent(std::string_view text, const std::string& source = {});
OrchestratorConfig parse_orchestrator_config(std::string_view text,
                                             const std::string& source = {});
AppDeployment parse_deployment(std::string_view text,
                               const std::string& source = {});

std::string serialize(const Intent& intent);
std::string serialize(const OrchestratorConfig& config);
std::string serialize(const AppDeployment& deployment);

/// Reads a whole file; ParseError naming the path if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace intent_orch
