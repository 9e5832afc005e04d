#include "intent_orch/orchestrator.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <json.hpp>

#include "intent_orch/errors.hpp"

namespace intent_orch {

std::string_view to_string(Action action) {
  switch (action) {
    case Action::kKeep:
      return "keep";
    case Action::kRelocate:
      return "relocate";
    case Action::kNoValidCandidate:
      return "no_valid_candidate";
  }
  return "unknown";
}

std::string_view to_string(Reason reason) {
  switch (reason) {
    case Reason::kAllFulfilled:
      return "all_fulfilled";
    case Reason::kConditionViolated:
      return "condition_violated";
    case Reason::kReturnToPriority:
      return "return_to_priority";
    case Reason::kInitialPlacement:
      return "initial_placement";
  }
  return "unknown";
}

const IntentEvaluation* Decision::evaluation_for(const NodeId& node_id) const {
  for (const auto& e : evaluations) {
    if (e.node_id == node_id) return &e;
  }
  return nullptr;
}

std::string describe_action(const Decision& d) {
  std::string out(to_string(d.action));
  if (d.action == Action::kRelocate) {
    out += ':';
    out += d.from.value_or("");
    out += "->";
    out += d.to.value_or("");
  }
  return out;
}

std::string to_json_line(const Decision& d) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["cycle"] = d.cycle;
  j["cycle_time_ms"] = d.cycle_time_ms;
  j["app_id"] = d.app_id;
  j["action"] = to_string(d.action);
  j["from"] = d.from ? ordered_json(*d.from) : ordered_json(nullptr);
  j["to"] = d.to ? ordered_json(*d.to) : ordered_json(nullptr);
  j["reason"] = to_string(d.reason);
  j["violated_metric"] = d.violated_metric
                             ? ordered_json(to_string(*d.violated_metric))
                             : ordered_json(nullptr);
  auto evals = ordered_json::array();
  for (const auto& e : d.evaluations) {
    ordered_json je;
    je["node_id"] = e.node_id;
    je["all_fulfilled"] = e.all_fulfilled;
    auto statuses = ordered_json::array();
    for (const auto& s : e.statuses) {
      statuses.push_back({{"metric", to_string(s.condition.metric)},
                          {"op", to_string(s.condition.op)},
                          {"threshold", s.condition.threshold},
                          {"observed", s.observed},
                          {"fulfilled", s.fulfilled}});
    }
    je["statuses"] = std::move(statuses);
    evals.push_back(std::move(je));
  }
  j["evaluations"] = std::move(evals);
  j["unavailable"] = d.unavailable;
  return j.dump();
}

SelectionPolicy SelectionPolicy::from(const Intent& intent,
                                      const OrchestratorConfig& config) {
  return {intent.node_priority, config.cpu_tie_epsilon, config.rng_seed,
          config.return_to_priority, config.cooldown_cycles};
}

std::size_t SelectionRng::index(std::size_t n) {
  if (n == 0) throw ContractError("draw from an empty range");
  const std::uint64_t range = n;
  // Reject the low values that would bias r % range.
  const std::uint64_t floor = (0 - range) % range;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= floor) return static_cast<std::size_t>(r % range);
  }
}

NodeId select_target(std::span<const Candidate> candidates,
                     const SelectionPolicy& policy, SelectionRng& rng) {
  if (candidates.empty()) throw ContractError("select_target: no candidates");
  for (const auto& preferred : policy.node_priority) {
    for (const auto& c : candidates) {
      if (c.node_id == preferred) return c.node_id;
    }
  }
  double least = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) least = std::min(least, c.cpu_percent);
  std::vector<const Candidate*> band;
  for (const auto& c : candidates) {
    if (c.cpu_percent <= least + policy.cpu_tie_epsilon) band.push_back(&c);
  }
  return band[rng.index(band.size())]->node_id;
}

namespace {

std::optional<NodeId> hosting_node(const ClusterBackend& backend,
                                   const AppId& app_id) {
  std::optional<NodeId> host;
  for (const auto& r : backend.placement(app_id)) {
    if (r.status == ReplicaStatus::kTerminating) continue;
    if (host && *host != r.node_id) {
      throw ContractError("app " + app_id + " has more than one live replica");
    }
    host = r.node_id;
  }
  return host;
}

}  // namespace

Decision check_cycle(const Intent& intent, const AppDeployment& deployment,
                     const ClusterBackend& backend, MetricsProvider& provider,
                     const SelectionPolicy& policy, SelectionRng& rng,
                     const CycleState& state, std::int64_t now_ms) {
  Decision d;
  d.cycle = state.cycle;
  d.cycle_time_ms = now_ms;
  d.app_id = deployment.app_id;

  const auto host = hosting_node(backend, deployment.app_id);

  std::vector<Candidate> valid;
  for (const auto& node_id : backend.list_nodes()) {
    try {
      const auto metrics = provider.snapshot(node_id);
      auto eval = evaluate_intent(intent, node_id, metrics.values());
      if (eval.all_fulfilled) {
        valid.push_back({node_id, eval, metrics.cpu_percent.value_or(0.0)});
      }
      d.evaluations.push_back(std::move(eval));
    } catch (const UnavailableError& e) {
      spdlog::debug("metrics for {} unavailable: {}", node_id, e.what());
      d.unavailable.push_back(node_id);
    } catch (const EvaluationError& e) {
      spdlog::debug("cannot evaluate {}: {}", node_id, e.what());
      d.unavailable.push_back(node_id);
    }
  }

  if (!host) {
    if (d.evaluations.empty()) {
      throw UnavailableError("no node could be evaluated for initial placement");
    }
    d.reason = Reason::kInitialPlacement;
    if (valid.empty()) {
      d.action = Action::kNoValidCandidate;
      return d;
    }
    d.action = Action::kRelocate;
    d.to = select_target(valid, policy, rng);
    return d;
  }

  const IntentEvaluation* host_eval = d.evaluation_for(*host);
  if (host_eval == nullptr) {
    throw UnavailableError("hosting node " + *host + " could not be evaluated");
  }

  if (const auto* violated = host_eval->first_violation()) {
    d.reason = Reason::kConditionViolated;
    d.violated_metric = violated->condition.metric;
    if (!state.cooldown_elapsed(policy.cooldown_cycles)) {
      d.action = Action::kKeep;
      return d;
    }
    std::erase_if(valid, [&](const Candidate& c) { return c.node_id == *host; });
    if (valid.empty()) {
      d.action = Action::kNoValidCandidate;
      return d;
    }
    d.action = Action::kRelocate;
    d.from = host;
    d.to = select_target(valid, policy, rng);
    return d;
  }

  d.action = Action::kKeep;
  d.reason = Reason::kAllFulfilled;
  if (policy.return_to_priority && !policy.node_priority.empty() &&
      policy.node_priority.front() != *host &&
      state.cooldown_elapsed(policy.cooldown_cycles)) {
    const auto& preferred = policy.node_priority.front();
    const auto* eval = d.evaluation_for(preferred);
    if (eval != nullptr && eval->all_fulfilled) {
      d.action = Action::kRelocate;
      d.reason = Reason::kReturnToPriority;
      d.from = host;
      d.to = preferred;
    }
  }
  return d;
}

Relocation::Relocation(AppDeployment app, std::optional<NodeId> from, NodeId to,
                       std::int64_t started_ms, std::int64_t timeout_ms)
    : app_(std::move(app)),
      from_(std::move(from)),
      to_(std::move(to)),
      started_ms_(started_ms),
      timeout_ms_(timeout_ms) {}

void Relocation::start(ClusterBackend& backend) {
  try {
    backend.deploy(app_, to_);
  } catch (const BackendError&) {
    roll_back(backend);
    throw;
  }
}

void Relocation::roll_back(ClusterBackend& backend) {
  for (const auto& r : backend.placement(app_.app_id)) {
    if (r.node_id == to_ && r.status != ReplicaStatus::kTerminating) {
      backend.terminate(app_.app_id, to_);
      return;
    }
  }
}

Relocation::Progress Relocation::poll(ClusterBackend& backend,
                                      std::int64_t now_ms) {
  for (const auto& r : backend.placement(app_.app_id)) {
    if (r.node_id == to_ && r.status == ReplicaStatus::kRunning) {
      if (from_) backend.terminate(app_.app_id, *from_);
      return Progress::kCompleted;
    }
  }
  if (now_ms - started_ms_ >= timeout_ms_) {
    roll_back(backend);
    return Progress::kRolledBack;
  }
  return Progress::kPending;
}

void relocate(const AppDeployment& app, const NodeId& from, const NodeId& to,
              ClusterBackend& backend,
              const std::function<std::int64_t(std::int64_t)>& wait,
              std::int64_t now_ms, std::int64_t timeout_ms,
              std::int64_t poll_ms) {
  if (from == to) return;
  const auto placement = backend.placement(app.app_id);
  const bool running_on_from =
      std::any_of(placement.begin(), placement.end(), [&](const auto& r) {
        return r.node_id == from && r.status == ReplicaStatus::kRunning;
      });
  if (!running_on_from) {
    throw ContractError("app " + app.app_id + " is not running on " + from);
  }
  Relocation reloc(app, from, to, now_ms, timeout_ms);
  reloc.start(backend);
  for (;;) {
    switch (reloc.poll(backend, now_ms)) {
      case Relocation::Progress::kCompleted:
        return;
      case Relocation::Progress::kRolledBack:
        throw BackendError("relocation of " + app.app_id + " to " + to +
                           " timed out; rolled back");
      case Relocation::Progress::kPending:
        now_ms = wait(poll_ms);
        break;
    }
  }
}

Orchestrator::Orchestrator(Intent intent, AppDeployment deployment,
                           OrchestratorConfig config, ClusterBackend& backend,
                           MetricsProvider& provider)
    : intent_(std::move(intent)),
      deployment_(std::move(deployment)),
      config_(std::move(config)),
      policy_(SelectionPolicy::from(intent_, config_)),
      backend_(backend),
      provider_(provider),
      rng_(config_.rng_seed),
      interval_ms_(std::max<std::int64_t>(
          1, std::llround(effective_check_interval_s(intent_, config_) * 1000))) {
  if (intent_.app_id != deployment_.app_id) {
    throw ContractError("intent app_id '" + intent_.app_id +
                        "' does not match deployment '" + deployment_.app_id +
                        "'");
  }
}

void Orchestrator::start(std::int64_t now_ms) {
  started_ = true;
  next_due_ms_ = now_ms;
  state_.cycle = 0;
}

void Orchestrator::skip_to(std::int64_t now_ms) {
  // Cycles that fell due but could not run still count toward the index.
  while (next_due_ms_ <= now_ms) {
    next_due_ms_ += interval_ms_;
    ++state_.cycle;
  }
}

std::optional<Decision> Orchestrator::step(std::int64_t now_ms) {
  if (!started_) throw ContractError("orchestrator not started");

  if (pending_) {
    switch (pending_->poll(backend_, now_ms)) {
      case Relocation::Progress::kCompleted:
        spdlog::info("{}: relocation to {} complete", deployment_.app_id,
                     pending_->to());
        host_ = pending_->to();
        pending_.reset();
        break;
      case Relocation::Progress::kRolledBack:
        spdlog::warn("{}: relocation to {} timed out, rolled back",
                     deployment_.app_id, pending_->to());
        pending_.reset();
        break;
      case Relocation::Progress::kPending:
        skip_to(now_ms);
        return std::nullopt;
    }
  }

  if (now_ms < next_due_ms_) return std::nullopt;

  std::optional<Decision> decision;
  try {
    decision = check_cycle(intent_, deployment_, backend_, provider_, policy_,
                           rng_, state_, now_ms);
    consecutive_failures_ = 0;
  } catch (const UnavailableError& e) {
    ++consecutive_failures_;
    spdlog::warn("{}: cycle {} aborted: {}", deployment_.app_id, state_.cycle,
                 e.what());
    if (consecutive_failures_ >= config_.provider_failure_budget) {
      throw FatalError("metrics provider failed " +
                       std::to_string(consecutive_failures_) +
                       " consecutive cycles");
    }
  }

  if (decision && decision->action == Action::kRelocate) {
    if (decision->reason != Reason::kInitialPlacement) {
      state_.last_relocation_cycle = state_.cycle;
    }
    spdlog::info("{}: {} ({})", deployment_.app_id, describe_action(*decision),
                 to_string(decision->reason));
    Relocation reloc(deployment_, decision->from, *decision->to, now_ms,
                     config_.relocation_timeout_ms);
    try {
      reloc.start(backend_);
      pending_ = std::move(reloc);
    } catch (const BackendError& e) {
      spdlog::error("{}: relocation failed: {}", deployment_.app_id, e.what());
    }
  } else if (decision && decision->action == Action::kNoValidCandidate) {
    spdlog::warn("{}: no valid candidate node, staying put", deployment_.app_id);
  }

  skip_to(now_ms);
  return decision;
}

std::int64_t SteadyLoopDriver::now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool SteadyLoopDriver::sleep_until(std::int64_t deadline_ms,
                                   std::stop_token stop) {
  std::mutex mu;
  std::condition_variable_any cv;
  std::unique_lock lock(mu);
  const auto deadline = std::chrono::steady_clock::time_point(
      std::chrono::milliseconds(deadline_ms));
  cv.wait_until(lock, stop, deadline, [] { return false; });
  return !stop.stop_requested();
}

void run_loop(const Intent& intent, const AppDeployment& deployment,
              const OrchestratorConfig& config, ClusterBackend& backend,
              MetricsProvider& provider, LoopDriver& driver,
              std::stop_token stop,
              const std::function<void(const Decision&)>& sink,
              std::int64_t relocation_poll_ms) {
  Orchestrator orch(intent, deployment, config, backend, provider);
  orch.start(driver.now_ms());
  while (!stop.stop_requested()) {
    const auto now = driver.now_ms();
    if (auto decision = orch.step(now)) sink(*decision);
    if (stop.stop_requested()) break;
    auto wake = orch.next_due_ms();
    if (orch.relocating()) wake = std::min(wake, now + relocation_poll_ms);
    if (!driver.sleep_until(std::max(wake, now + 1), stop)) break;
  }
}

}  // namespace intent_orch
