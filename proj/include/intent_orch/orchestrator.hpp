#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "intent_orch/backend.hpp"
#include "intent_orch/intent.hpp"
#include "intent_orch/metrics.hpp"

namespace intent_orch {

enum class Action { kKeep, kRelocate, kNoValidCandidate };

enum class Reason {
  kAllFulfilled,
  kConditionViolated,
  kReturnToPriority,
  kInitialPlacement,
};

std::string_view to_string(Action action);
std::string_view to_string(Reason reason);

/// One control-cycle outcome together with the evaluations behind it.
struct Decision {
  std::int64_t cycle = 0;
  std::int64_t cycle_time_ms = 0;
  AppId app_id;
  Action action = Action::kKeep;
  std::optional<NodeId> from;  // unset for initial placement
  std::optional<NodeId> to;
  Reason reason = Reason::kAllFulfilled;
  std::optional<MetricKind> violated_metric;
  std::vector<IntentEvaluation> evaluations;
  std::vector<NodeId> unavailable;

  const IntentEvaluation* evaluation_for(const NodeId& node_id) const;
  bool operator==(const Decision&) const = default;
};

/// "relocate:master->worker-2", "keep", ...
std::string describe_action(const Decision& decision);

/// One JSON object per decision, no trailing newline.
std::string to_json_line(const Decision& decision);

struct SelectionPolicy {
  std::vector<NodeId> node_priority;
  double cpu_tie_epsilon = 5.0;
  std::uint64_t rng_seed = 0;
  bool return_to_priority = true;
  std::int64_t cooldown_cycles = 1;

  static SelectionPolicy from(const Intent& intent,
                              const OrchestratorConfig& config);
};

/// Seeded generator for tie-breaking. mt19937_64 output is fixed by the
/// standard and index() avoids library-specific distributions, so draws are
/// identical on every platform.
class SelectionRng {
 public:
  explicit SelectionRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

struct Candidate {
  NodeId node_id;
  IntentEvaluation evaluation;
  double cpu_percent = 0.0;
};

/// Highest-priority candidate if any is in the priority list; otherwise a
/// seeded uniform draw among candidates within cpu_tie_epsilon of the least
/// loaded. Throws ContractError on an empty candidate list.
NodeId select_target(std::span<const Candidate> candidates,
                     const SelectionPolicy& policy, SelectionRng& rng);

/// Cycle bookkeeping carried between check_cycle calls.
struct CycleState {
  std::int64_t cycle = 0;
  std::optional<std::int64_t> last_relocation_cycle;

  /// At least `cooldown` full cycles since the last relocation decision.
  bool cooldown_elapsed(std::int64_t cooldown) const {
    return !last_relocation_cycle || cycle - *last_relocation_cycle - 1 >= cooldown;
  }
};

/// Evaluates the intent against every node and decides. Does not act.
/// Throws UnavailableError (retryable) if the hosting node cannot be
/// evaluated, or, before initial placement, if no node can.
Decision check_cycle(const Intent& intent, const AppDeployment& deployment,
                     const ClusterBackend& backend, MetricsProvider& provider,
                     const SelectionPolicy& policy, SelectionRng& rng,
                     const CycleState& state, std::int64_t now_ms);

/// Make-before-break relocation as a pollable state machine: deploy on the
/// target, wait for it to run, then terminate the source. On timeout the new
/// replica is terminated and the app stays where it was.
class Relocation {
 public:
  enum class Progress { kPending, kCompleted, kRolledBack };

  Relocation(AppDeployment app, std::optional<NodeId> from, NodeId to,
             std::int64_t started_ms, std::int64_t timeout_ms);

  /// Issues the deploy. On BackendError rolls back and rethrows.
  void start(ClusterBackend& backend);
  Progress poll(ClusterBackend& backend, std::int64_t now_ms);

  const std::optional<NodeId>& from() const { return from_; }
  const NodeId& to() const { return to_; }

 private:
  void roll_back(ClusterBackend& backend);

  AppDeployment app_;
  std::optional<NodeId> from_;
  NodeId to_;
  std::int64_t started_ms_;
  std::int64_t timeout_ms_;
};

/// Blocking relocation. `wait(dt_ms)` lets time pass (sleep, or advance a
/// simulator) and returns the new time. Relocating to the current node is a
/// no-op. Throws ContractError if the app is not running on `from`, and
/// BackendError if the target never became ready.
void relocate(const AppDeployment& app, const NodeId& from, const NodeId& to,
              ClusterBackend& backend,
              const std::function<std::int64_t(std::int64_t)>& wait,
              std::int64_t now_ms, std::int64_t timeout_ms,
              std::int64_t poll_ms = 100);

/// Closed-loop controller for one app. Time is supplied by the caller, so
/// the same object runs against a virtual clock or wall time.
class Orchestrator {
 public:
  Orchestrator(Intent intent, AppDeployment deployment,
               OrchestratorConfig config, ClusterBackend& backend,
               MetricsProvider& provider);

  /// First check cycle happens at `now_ms`.
  void start(std::int64_t now_ms);

  /// Progresses an in-flight relocation, then runs a check cycle if one is
  /// due. Returns the decision when a cycle ran. Throws FatalError once the
  /// provider failure budget is exhausted.
  std::optional<Decision> step(std::int64_t now_ms);

  const std::optional<NodeId>& current_host() const { return host_; }
  bool relocating() const { return pending_.has_value(); }
  std::int64_t next_due_ms() const { return next_due_ms_; }
  std::int64_t interval_ms() const { return interval_ms_; }
  bool started() const { return started_; }
  const Intent& intent() const { return intent_; }
  const AppDeployment& deployment() const { return deployment_; }

 private:
  void skip_to(std::int64_t now_ms);

  Intent intent_;
  AppDeployment deployment_;
  OrchestratorConfig config_;
  SelectionPolicy policy_;
  ClusterBackend& backend_;
  MetricsProvider& provider_;
  SelectionRng rng_;
  CycleState state_;
  std::int64_t interval_ms_;
  std::int64_t next_due_ms_ = 0;
  bool started_ = false;
  std::int64_t consecutive_failures_ = 0;
  std::optional<NodeId> host_;
  std::optional<Relocation> pending_;
};

/// Where run_loop gets its time from.
class LoopDriver {
 public:
  virtual ~LoopDriver() = default;
  virtual std::int64_t now_ms() = 0;
  /// Returns false if `stop` fired before the deadline.
  virtual bool sleep_until(std::int64_t deadline_ms, std::stop_token stop) = 0;
};

/// Wall-clock driver.
class SteadyLoopDriver final : public LoopDriver {
 public:
  std::int64_t now_ms() override;
  bool sleep_until(std::int64_t deadline_ms, std::stop_token stop) override;
};

/// Runs the control loop until `stop` is requested, handing every decision
/// to `sink` in order. FatalError propagates.
void run_loop(const Intent& intent, const AppDeployment& deployment,
              const OrchestratorConfig& config, ClusterBackend& backend,
              MetricsProvider& provider, LoopDriver& driver,
              std::stop_token stop,
              const std::function<void(const Decision&)>& sink,
              std::int64_t relocation_poll_ms = 100);

}  // namespace intent_orch
