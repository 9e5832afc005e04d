#include "intent_orch/scenario.hpp"

#include <charconv>
#include <json.hpp>
#include <sstream>

#include "document.hpp"
#include "intent_orch/errors.hpp"

namespace intent_orch {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kDeployApp:
      return "deploy_app";
    case EventKind::kInjectDelay:
      return "inject_delay";
    case EventKind::kClearDelay:
      return "clear_delay";
    case EventKind::kInjectCpu:
      return "inject_cpu";
    case EventKind::kClearCpu:
      return "clear_cpu";
    case EventKind::kEnd:
      return "end";
  }
  return "unknown";
}

namespace {

bool has_node(const Topology& t, const NodeId& id) {
  for (const auto& n : t.nodes) {
    if (n.node_id == id) return true;
  }
  return false;
}

ScenarioEvent parse_event(const YAML::Node& node, const Topology* topology,
                          const std::string& source, std::size_t index) {
  doc::MapReader r(node, source, "events[" + std::to_string(index) + "]");
  ScenarioEvent ev;
  YAML::Node at = r.require("at_ms");
  ev.at_ms = r.convert<std::int64_t>(at, "at_ms");
  if (ev.at_ms < 0) r.fail("'at_ms' must be >= 0", at);

  int kinds = 0;
  auto node_ref = [&](const YAML::Node& v, const std::string& key) {
    auto id = r.convert<std::string>(v, key);
    if (topology != nullptr && !has_node(*topology, id)) r.fail("unknown node '" + id + "'", v);
    return id;
  };
  auto fault = [&](const std::string& key, const std::string& amount_key) {
    YAML::Node v = r.optional(key);
    if (!v) return false;
    doc::MapReader fr(v, source, key);
    ev.node_id = node_ref(fr.require("node"), "node");
    YAML::Node amount = fr.require(amount_key);
    ev.value = fr.finite(amount, amount_key);
    if (ev.value < 0) fr.fail("'" + amount_key + "' must be >= 0", amount);
    fr.finish();
    return true;
  };

  if (YAML::Node v = r.optional("deploy_app")) {
    ev.kind = EventKind::kDeployApp;
    ev.app_id = r.convert<std::string>(v, "deploy_app");
    ++kinds;
  }
  if (fault("inject_delay", "delay_ms")) {
    ev.kind = EventKind::kInjectDelay;
    ++kinds;
  }
  if (fault("inject_cpu", "percent")) {
    ev.kind = EventKind::kInjectCpu;
    ++kinds;
  }
  if (YAML::Node v = r.optional("clear_delay")) {
    ev.kind = EventKind::kClearDelay;
    ev.node_id = node_ref(v, "clear_delay");
    ++kinds;
  }
  if (YAML::Node v = r.optional("clear_cpu")) {
    ev.kind = EventKind::kClearCpu;
    ev.node_id = node_ref(v, "clear_cpu");
    ++kinds;
  }
  if (YAML::Node v = r.optional("end")) {
    ev.kind = EventKind::kEnd;
    ++kinds;
  }
  if (kinds != 1) r.fail("event must have exactly one kind", node);
  r.finish();
  return ev;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, int line) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw ParseError("invalid number '" + std::string(s) + "'", line);
  }
  return v;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

}  // namespace

ScenarioScript parse_scenario_script(std::string_view text,
                                     const Topology* topology,
                                     const std::string& source) {
  doc::MapReader r(doc::load(text, source), source, "scenario");
  ScenarioScript sc;
  sc.name = r.get_or<std::string>("name", "");
  if (YAML::Node v = r.optional("tick_ms")) {
    sc.tick_ms = r.convert<std::int64_t>(v, "tick_ms");
    if (sc.tick_ms <= 0) r.fail("'tick_ms' must be > 0", v);
  }
  YAML::Node events = r.require("events");
  if (!events.IsSequence()) r.fail("'events' must be a list", events);
  if (events.size() == 0) r.fail("missing 'end' event", events);

  int deploys = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto ev = parse_event(events[i], topology, source, i);
    if (!sc.events.empty() && ev.at_ms < sc.events.back().at_ms) {
      r.fail("events are not sorted by at_ms", events[i]);
    }
    if (!sc.events.empty() && sc.events.back().kind == EventKind::kEnd) {
      r.fail("'end' must be the last event", events[i - 1]);
    }
    if (ev.kind == EventKind::kDeployApp && ++deploys > 1) {
      r.fail("only one deploy_app event is supported", events[i]);
    }
    sc.events.push_back(std::move(ev));
  }
  if (sc.events.back().kind != EventKind::kEnd) {
    r.fail("missing 'end' event", events[events.size() - 1]);
  }
  r.finish();
  return sc;
}

Scenario parse_scenario(std::string_view text, Topology topology,
                        OrchestratorConfig config, Intent intent,
                        AppDeployment deployment, const std::string& source) {
  auto script = parse_scenario_script(text, &topology, source);
  for (const auto& ev : script.events) {
    if (ev.kind == EventKind::kDeployApp && ev.app_id != deployment.app_id) {
      throw ValidationError("deploy_app '" + ev.app_id +
                                "' does not match deployment '" +
                                deployment.app_id + "'",
                            0, source);
    }
  }
  if (intent.app_id != deployment.app_id) {
    throw ValidationError("intent app_id '" + intent.app_id +
                              "' does not match deployment '" +
                              deployment.app_id + "'",
                          0, source);
  }
  Scenario sc;
  sc.name = std::move(script.name);
  sc.tick_ms = script.tick_ms;
  sc.events = std::move(script.events);
  sc.topology = std::move(topology);
  sc.config = std::move(config);
  sc.intent = std::move(intent);
  sc.deployment = std::move(deployment);
  return sc;
}

std::vector<NodeId> Timeline::placement_sequence() const {
  std::vector<NodeId> seq;
  for (const auto& t : ticks) {
    if (t.placement && (seq.empty() || seq.back() != *t.placement)) {
      seq.push_back(*t.placement);
    }
  }
  return seq;
}

Timeline run_scenario(const Scenario& sc, const ReplayHooks& hooks) {
  ClusterSimulator sim(sc.topology);
  if (hooks.on_sim_change) sim.set_observer(hooks.on_sim_change);
  Orchestrator orch(sc.intent, sc.deployment, sc.config, sim, sim);

  Timeline tl;
  tl.nodes = sim.list_nodes();
  std::size_t next_event = 0;
  bool ended = false;
  std::string last_action;

  while (!ended) {
    const auto now = sim.now();
    while (next_event < sc.events.size() &&
           sc.events[next_event].at_ms <= now) {
      const auto& ev = sc.events[next_event++];
      switch (ev.kind) {
        case EventKind::kDeployApp:
          orch.start(now);
          break;
        case EventKind::kInjectDelay:
          sim.inject_delay(ev.node_id, ev.value);
          break;
        case EventKind::kClearDelay:
          sim.clear_delay(ev.node_id);
          break;
        case EventKind::kInjectCpu:
          sim.inject_cpu(ev.node_id, ev.value);
          break;
        case EventKind::kClearCpu:
          sim.clear_cpu(ev.node_id);
          break;
        case EventKind::kEnd:
          ended = true;
          break;
      }
      tl.events.push_back(ev);
    }

    if (orch.started() && !tl.fatal_error) {
      try {
        if (auto d = orch.step(now)) {
          last_action = describe_action(*d);
          tl.decisions.push_back(std::move(*d));
        }
      } catch (const FatalError& e) {
        tl.fatal_error = e.what();
        ended = true;
      }
    }

    Tick tick;
    tick.t_ms = now;
    for (const auto& id : tl.nodes) {
      tick.cpu_percent.push_back(*sim.snapshot(id).cpu_percent);
    }
    tick.placement = orch.current_host();
    if (tick.placement) {
      tick.rtt_ms = sim.snapshot(*tick.placement).rtt_ue_to_app_ms;
    }
    tick.action = last_action;
    if (hooks.on_tick) hooks.on_tick(sim, tick);
    tl.ticks.push_back(std::move(tick));

    if (!ended) sim.advance(sc.tick_ms);
  }
  return tl;
}

std::optional<TimelineFormat> timeline_format_from_string(std::string_view s) {
  if (s == "csv") return TimelineFormat::kCsv;
  if (s == "jsonl" || s == "json-lines") return TimelineFormat::kJsonLines;
  return std::nullopt;
}

std::string export_timeline(const Timeline& tl, TimelineFormat format) {
  if (tl.ticks.empty()) throw ContractError("cannot export an empty timeline");
  std::ostringstream out;
  if (format == TimelineFormat::kCsv) {
    out << "t_ms";
    for (const auto& n : tl.nodes) out << ",cpu_" << n;
    out << ",rtt_ms,placement,action\n";
    for (const auto& t : tl.ticks) {
      out << t.t_ms;
      for (double c : t.cpu_percent) out << ',' << fmt_double(c);
      out << ',' << (t.rtt_ms ? fmt_double(*t.rtt_ms) : "");
      out << ',' << t.placement.value_or("");
      out << ',' << t.action << '\n';
    }
    return out.str();
  }
  for (const auto& t : tl.ticks) {
    nlohmann::ordered_json j;
    j["t_ms"] = t.t_ms;
    nlohmann::ordered_json cpu = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < tl.nodes.size(); ++i) {
      cpu[tl.nodes[i]] = t.cpu_percent[i];
    }
    j["cpu_percent"] = std::move(cpu);
    j["rtt_ms"] = t.rtt_ms ? nlohmann::ordered_json(*t.rtt_ms)
                           : nlohmann::ordered_json(nullptr);
    j["placement"] = t.placement ? nlohmann::ordered_json(*t.placement)
                                 : nlohmann::ordered_json(nullptr);
    j["action"] = t.action;
    out << j.dump() << '\n';
  }
  return out.str();
}

Timeline import_timeline(std::string_view text, TimelineFormat format) {
  Timeline tl;
  const auto lines = lines_of(text);
  if (format == TimelineFormat::kCsv) {
    if (lines.empty()) throw ParseError("empty timeline", 1);
    const auto header = split(lines[0], ',');
    if (header.size() < 4 || header.front() != "t_ms" ||
        header[header.size() - 3] != "rtt_ms" ||
        header[header.size() - 2] != "placement" || header.back() != "action") {
      throw ParseError("unexpected timeline header", 1);
    }
    for (std::size_t i = 1; i + 3 < header.size(); ++i) {
      if (header[i].rfind("cpu_", 0) != 0) {
        throw ParseError("unexpected column '" + header[i] + "'", 1);
      }
      tl.nodes.push_back(header[i].substr(4));
    }
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
      if (lines[ln].empty()) continue;
      const int line_no = static_cast<int>(ln + 1);
      const auto f = split(lines[ln], ',');
      if (f.size() != header.size()) throw ParseError("wrong column count", line_no);
      Tick t;
      t.t_ms = static_cast<std::int64_t>(parse_double(f[0], line_no));
      for (std::size_t i = 1; i + 3 < f.size(); ++i) {
        t.cpu_percent.push_back(parse_double(f[i], line_no));
      }
      const auto& rtt = f[f.size() - 3];
      if (!rtt.empty()) t.rtt_ms = parse_double(rtt, line_no);
      const auto& placement = f[f.size() - 2];
      if (!placement.empty()) t.placement = placement;
      t.action = f.back();
      tl.ticks.push_back(std::move(t));
    }
    return tl;
  }
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(lines[ln]);
      Tick t;
      t.t_ms = j.at("t_ms").get<std::int64_t>();
      std::vector<NodeId> nodes;
      for (const auto& [node, cpu] : j.at("cpu_percent").items()) {
        nodes.push_back(node);
        t.cpu_percent.push_back(cpu.get<double>());
      }
      if (tl.ticks.empty()) {
        tl.nodes = nodes;
      } else if (nodes != tl.nodes) {
        throw ParseError("node set changed", static_cast<int>(ln + 1));
      }
      if (!j.at("rtt_ms").is_null()) t.rtt_ms = j["rtt_ms"].get<double>();
      if (!j.at("placement").is_null()) {
        t.placement = j["placement"].get<std::string>();
      }
      t.action = j.at("action").get<std::string>();
      tl.ticks.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), static_cast<int>(ln + 1));
    }
  }
  return tl;
}

std::string export_decision_log(const Timeline& tl) {
  std::string out;
  for (const auto& d : tl.decisions) {
    out += to_json_line(d);
    out += '\n';
  }
  return out;
}

}  // namespace intent_orch
