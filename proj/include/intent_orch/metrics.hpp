#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intent_orch/intent.hpp"

namespace intent_orch {

// ---------------------------------------------------------------------------
// Text exposition format (sample lines, HELP/TYPE comments, label escaping).
// ---------------------------------------------------------------------------

enum class SpecialValue { kNone, kPosInf, kNegInf, kNaN };

struct MetricSample {
  std::string name;
  std::map<std::string, std::string> labels;
  double value = 0.0;
  // Set when the value was written as +Inf, -Inf or NaN.
  SpecialValue special = SpecialValue::kNone;
  std::optional<std::int64_t> timestamp_ms;

  /// NaN-aware equality: two NaN samples compare equal via `special`.
  bool operator==(const MetricSample& other) const;
};

bool is_valid_metric_name(std::string_view name);
bool is_valid_label_name(std::string_view name);

/// One sample per sample line, in input order. Throws ParseError carrying the
/// 1-based line number of the first malformed line.
std::vector<MetricSample> parse_exposition(std::string_view text);

/// Inverse of parse_exposition for sample lines (no comments emitted).
std::string serialize_exposition(const std::vector<MetricSample>& samples);
std::string serialize_sample(const MetricSample& sample);

// ---------------------------------------------------------------------------
// CPU utilisation from cumulative per-core busy/idle counters.
// ---------------------------------------------------------------------------

struct CoreCounters {
  double busy_s = 0.0;
  double idle_s = 0.0;
};

struct CpuCounterWindow {
  std::int64_t t0_ms = 0;
  std::int64_t t1_ms = 0;
  std::vector<CoreCounters> at_t0;  // indexed by core
  std::vector<CoreCounters> at_t1;
};

/// 100 * Δbusy / (Δbusy + Δidle), aggregated over cores. Throws
/// UnavailableError on a counter reset, a core-set change or a zero delta.
double cpu_percent_from_counters(const CpuCounterWindow& window);

/// Collapses `node_cpu_seconds_total{cpu,mode}` samples into per-core
/// counters ordered by cpu label; mode "idle" is idle, every other mode busy.
std::vector<CoreCounters> cpu_counters_from_samples(
    const std::vector<MetricSample>& samples);

// ---------------------------------------------------------------------------
// Provider contract consumed by the control loop.
// ---------------------------------------------------------------------------

struct NodeMetrics {
  NodeId node_id;
  std::optional<double> cpu_percent;
  // RTT the UE would see if the app were hosted on this node.
  std::optional<double> rtt_ue_to_app_ms;
  std::int64_t capture_time_ms = 0;

  MetricValues values() const { return {rtt_ue_to_app_ms, cpu_percent}; }
  bool operator==(const NodeMetrics&) const = default;
};

class MetricsProvider {
 public:
  virtual ~MetricsProvider() = default;

  virtual std::vector<NodeId> list_nodes() const = 0;

  /// Throws UnavailableError when the node's data cannot be obtained. A
  /// failure for one node never affects another node's snapshot.
  virtual NodeMetrics snapshot(const NodeId& node_id) = 0;
};

}  // namespace intent_orch
