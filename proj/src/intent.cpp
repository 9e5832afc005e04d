#include "intent_orch/intent.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "document.hpp"
#include "intent_orch/errors.hpp"

namespace intent_orch {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kRttUeToApp:
      return "rtt_ue_to_app_ms";
    case MetricKind::kNodeCpu:
      return "node_cpu_percent";
  }
  return "unknown";
}

std::string_view to_string(Comparator op) {
  switch (op) {
    case Comparator::kLt:
      return "lt";
    case Comparator::kLe:
      return "le";
    case Comparator::kGt:
      return "gt";
    case Comparator::kGe:
      return "ge";
  }
  return "unknown";
}

std::optional<MetricKind> metric_kind_from_string(std::string_view name) {
  if (name == "rtt_ue_to_app_ms") return MetricKind::kRttUeToApp;
  if (name == "node_cpu_percent") return MetricKind::kNodeCpu;
  return std::nullopt;
}

std::optional<Comparator> comparator_from_string(std::string_view name) {
  if (name == "lt") return Comparator::kLt;
  if (name == "le") return Comparator::kLe;
  if (name == "gt") return Comparator::kGt;
  if (name == "ge") return Comparator::kGe;
  return std::nullopt;
}

std::string_view unit_of(MetricKind kind) {
  return kind == MetricKind::kRttUeToApp ? "ms" : "percent";
}

bool compare(Comparator op, double lhs, double rhs) {
  switch (op) {
    case Comparator::kLt:
      return lhs < rhs;
    case Comparator::kLe:
      return lhs <= rhs;
    case Comparator::kGt:
      return lhs > rhs;
    case Comparator::kGe:
      return lhs >= rhs;
  }
  return false;
}

std::optional<double> MetricValues::get(MetricKind kind) const {
  switch (kind) {
    case MetricKind::kRttUeToApp:
      return rtt_ue_to_app_ms;
    case MetricKind::kNodeCpu:
      return cpu_percent;
  }
  return std::nullopt;
}

const ConditionStatus* IntentEvaluation::first_violation() const {
  for (const auto& s : statuses) {
    if (!s.fulfilled) return &s;
  }
  return nullptr;
}

ConditionStatus evaluate_condition(const Condition& cond, double observed) {
  if (!std::isfinite(observed)) {
    throw EvaluationError("non-finite observed value for " +
                          std::string(to_string(cond.metric)));
  }
  return {cond, observed, compare(cond.op, observed, cond.threshold)};
}

IntentEvaluation evaluate_intent(const Intent& intent, const NodeId& node_id,
                                 const MetricValues& metrics) {
  IntentEvaluation eval{node_id, {}, true};
  eval.statuses.reserve(intent.conditions.size());
  for (const auto& cond : intent.conditions) {
    const auto observed = metrics.get(cond.metric);
    if (!observed) {
      throw EvaluationError("missing metric " +
                            std::string(to_string(cond.metric)) +
                            " for node " + node_id);
    }
    eval.statuses.push_back(evaluate_condition(cond, *observed));
    eval.all_fulfilled = eval.all_fulfilled && eval.statuses.back().fulfilled;
  }
  return eval;
}

double effective_check_interval_s(const Intent& intent,
                                  const OrchestratorConfig& config) {
  return intent.check_interval_s.value_or(config.check_interval_default_s);
}

namespace {

std::string require_identifier(doc::MapReader& r, const std::string& key) {
  YAML::Node v = r.require(key);
  auto s = r.convert<std::string>(v, key);
  if (s.empty()) r.fail("'" + key + "' must be non-empty", v);
  return s;
}

Condition parse_condition(const YAML::Node& node, const std::string& source,
                          std::size_t index) {
  doc::MapReader r(node, source, "conditions[" + std::to_string(index) + "]");
  Condition c;
  YAML::Node metric = r.require("metric");
  const auto kind = metric_kind_from_string(r.convert<std::string>(metric, "metric"));
  if (!kind) r.fail("unknown metric '" + metric.Scalar() + "'", metric);
  c.metric = *kind;

  YAML::Node op = r.require("op");
  const auto cmp = comparator_from_string(r.convert<std::string>(op, "op"));
  if (!cmp) r.fail("unknown comparator '" + op.Scalar() + "'", op);
  c.op = *cmp;

  YAML::Node threshold = r.require("threshold");
  c.threshold = r.finite(threshold, "threshold");
  if (c.threshold < 0) r.fail("'threshold' must be >= 0", threshold);
  r.finish();
  return c;
}

std::int64_t non_negative_int(doc::MapReader& r, const std::string& key,
                              std::int64_t fallback) {
  YAML::Node v = r.optional(key);
  if (!v) return fallback;
  const auto n = r.convert<std::int64_t>(v, key);
  if (n < 0) r.fail("'" + key + "' must be >= 0", v);
  return n;
}

}  // namespace

Intent parse_intent(std::string_view text, const std::string& source) {
  doc::MapReader r(doc::load(text, source), source, "intent");
  Intent intent;
  intent.app_id = require_identifier(r, "app_id");

  YAML::Node conds = r.require("conditions");
  if (!conds.IsSequence()) r.fail("'conditions' must be a list", conds);
  if (conds.size() == 0) r.fail("'conditions' must be non-empty", conds);
  std::set<MetricKind> seen;
  for (std::size_t i = 0; i < conds.size(); ++i) {
    auto c = parse_condition(conds[i], source, i);
    if (!seen.insert(c.metric).second) {
      r.fail("duplicate condition for metric '" +
                 std::string(to_string(c.metric)) + "'",
             conds[i]);
    }
    intent.conditions.push_back(c);
  }

  if (YAML::Node prio = r.optional("node_priority")) {
    if (!prio.IsSequence()) r.fail("'node_priority' must be a list", prio);
    std::set<NodeId> ids;
    for (const auto& n : prio) {
      auto id = r.convert<std::string>(n, "node_priority");
      if (!ids.insert(id).second) {
        r.fail("duplicate node '" + id + "' in node_priority", n);
      }
      intent.node_priority.push_back(std::move(id));
    }
  }

  if (YAML::Node interval = r.optional("check_interval_s")) {
    const double s = r.finite(interval, "check_interval_s");
    if (s <= 0) r.fail("'check_interval_s' must be > 0", interval);
    intent.check_interval_s = s;
  }
  r.finish();
  return intent;
}

OrchestratorConfig parse_orchestrator_config(std::string_view text,
                                             const std::string& source) {
  doc::MapReader r(doc::load(text, source), source, "config");
  OrchestratorConfig cfg;

  if (YAML::Node v = r.optional("check_interval_s")) {
    cfg.check_interval_default_s = r.finite(v, "check_interval_s");
    if (cfg.check_interval_default_s <= 0) {
      r.fail("'check_interval_s' must be > 0", v);
    }
  }
  if (YAML::Node v = r.optional("rng_seed")) {
    const auto raw = r.convert<std::string>(v, "rng_seed");
    if (!raw.empty() && raw.front() == '-') {
      r.fail("'rng_seed' must be an unsigned 64-bit integer", v);
    }
    cfg.rng_seed = r.convert<std::uint64_t>(v, "rng_seed");
  }
  if (YAML::Node v = r.optional("cpu_tie_epsilon")) {
    cfg.cpu_tie_epsilon = r.finite(v, "cpu_tie_epsilon");
    if (cfg.cpu_tie_epsilon < 0 || cfg.cpu_tie_epsilon > 100) {
      r.fail("'cpu_tie_epsilon' must be within [0, 100]", v);
    }
  }
  cfg.return_to_priority = r.get_or<bool>("return_to_priority", true);
  cfg.cooldown_cycles = non_negative_int(r, "cooldown_cycles", 1);

  if (YAML::Node v = r.optional("backend")) {
    const auto kind = r.convert<std::string>(v, "backend");
    if (kind == "simulator") {
      cfg.backend_kind = BackendKind::kSimulator;
    } else if (kind == "external") {
      cfg.backend_kind = BackendKind::kExternal;
    } else {
      r.fail("unknown backend '" + kind + "'", v);
    }
  }
  if (YAML::Node v = r.optional("credentials")) {
    if (!v.IsMap()) r.fail("'credentials' must be a mapping", v);
    for (const auto& kv : v) {
      cfg.credentials[kv.first.as<std::string>()] =
          r.convert<std::string>(kv.second, "credentials");
    }
  }
  cfg.relocation_timeout_ms =
      non_negative_int(r, "relocation_timeout_ms", cfg.relocation_timeout_ms);
  cfg.provider_failure_budget = non_negative_int(
      r, "provider_failure_budget", cfg.provider_failure_budget);
  if (cfg.provider_failure_budget == 0) {
    r.fail("'provider_failure_budget' must be >= 1",
           r.node()["provider_failure_budget"]);
  }
  r.finish();
  return cfg;
}

AppDeployment parse_deployment(std::string_view text,
                               const std::string& source) {
  doc::MapReader r(doc::load(text, source), source, "deployment");
  AppDeployment d;
  d.app_id = require_identifier(r, "app_id");
  d.image_ref = r.get_or<std::string>("image_ref", "");

  YAML::Node demand = r.require("cpu_demand");
  d.cpu_demand = r.finite(demand, "cpu_demand");
  if (d.cpu_demand < 0 || d.cpu_demand > 100) {
    r.fail("'cpu_demand' must be within [0, 100]", demand);
  }
  if (YAML::Node port = r.optional("service_port")) {
    const auto p = r.convert<std::int64_t>(port, "service_port");
    if (p < 1 || p > 65535) r.fail("'service_port' must be 1..65535", port);
    d.service_port = static_cast<std::uint16_t>(p);
  }
  r.finish();
  return d;
}

std::string serialize(const Intent& intent) {
  YAML::Emitter out;
  doc::begin_emitter(out);
  out << YAML::BeginMap;
  out << YAML::Key << "app_id" << YAML::Value << intent.app_id;
  out << YAML::Key << "conditions" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : intent.conditions) {
    out << YAML::BeginMap;
    out << YAML::Key << "metric" << YAML::Value << std::string(to_string(c.metric));
    out << YAML::Key << "op" << YAML::Value << std::string(to_string(c.op));
    out << YAML::Key << "threshold" << YAML::Value << c.threshold;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "node_priority" << YAML::Value << YAML::Flow
      << intent.node_priority;
  if (intent.check_interval_s) {
    out << YAML::Key << "check_interval_s" << YAML::Value
        << *intent.check_interval_s;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string serialize(const OrchestratorConfig& config) {
  YAML::Emitter out;
  doc::begin_emitter(out);
  out << YAML::BeginMap;
  out << YAML::Key << "check_interval_s" << YAML::Value
      << config.check_interval_default_s;
  out << YAML::Key << "rng_seed" << YAML::Value << config.rng_seed;
  out << YAML::Key << "cpu_tie_epsilon" << YAML::Value << config.cpu_tie_epsilon;
  out << YAML::Key << "return_to_priority" << YAML::Value
      << config.return_to_priority;
  out << YAML::Key << "cooldown_cycles" << YAML::Value << config.cooldown_cycles;
  out << YAML::Key << "backend" << YAML::Value
      << (config.backend_kind == BackendKind::kSimulator ? "simulator"
                                                         : "external");
  out << YAML::Key << "credentials" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : config.credentials) {
    out << YAML::Key << k << YAML::Value << v;
  }
  out << YAML::EndMap;
  out << YAML::Key << "relocation_timeout_ms" << YAML::Value
      << config.relocation_timeout_ms;
  out << YAML::Key << "provider_failure_budget" << YAML::Value
      << config.provider_failure_budget;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string serialize(const AppDeployment& deployment) {
  YAML::Emitter out;
  doc::begin_emitter(out);
  out << YAML::BeginMap;
  out << YAML::Key << "app_id" << YAML::Value << deployment.app_id;
  out << YAML::Key << "image_ref" << YAML::Value << deployment.image_ref;
  out << YAML::Key << "cpu_demand" << YAML::Value << deployment.cpu_demand;
  out << YAML::Key << "service_port" << YAML::Value
      << static_cast<int>(deployment.service_port);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file", 0, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace intent_orch
