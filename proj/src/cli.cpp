#include "intent_orch/cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "intent_orch/errors.hpp"
#include "intent_orch/metrics.hpp"
#include "intent_orch/probe.hpp"
#include "intent_orch/report.hpp"
#include "intent_orch/scenario.hpp"

namespace intent_orch::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << data;
}

// Which of the five input documents a file holds, judged by its keys.
enum class DocKind { kIntent, kConfig, kDeployment, kTopology, kScenario };

DocKind detect_kind(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1, source);
  }
  if (!root.IsMap()) throw ParseError("document root must be a mapping", 1, source);
  if (root["conditions"]) return DocKind::kIntent;
  if (root["events"]) return DocKind::kScenario;
  if (root["nodes"]) return DocKind::kTopology;
  if (root["cpu_demand"] || root["image_ref"]) return DocKind::kDeployment;
  return DocKind::kConfig;
}

const char* kind_name(DocKind k) {
  switch (k) {
    case DocKind::kIntent:
      return "intent";
    case DocKind::kConfig:
      return "config";
    case DocKind::kDeployment:
      return "deployment";
    case DocKind::kTopology:
      return "topology";
    case DocKind::kScenario:
      return "scenario";
  }
  return "?";
}

nlohmann::ordered_json sample_json(const MetricSample& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["labels"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.labels) j["labels"][k] = v;
  switch (s.special) {
    case SpecialValue::kPosInf:
      j["value"] = "+Inf";
      break;
    case SpecialValue::kNegInf:
      j["value"] = "-Inf";
      break;
    case SpecialValue::kNaN:
      j["value"] = "NaN";
      break;
    case SpecialValue::kNone:
      j["value"] = s.value;
      break;
  }
  j["timestamp_ms"] = s.timestamp_ms ? nlohmann::ordered_json(*s.timestamp_ms)
                                     : nlohmann::ordered_json(nullptr);
  return j;
}

void configure_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_color_mt("intent-orch");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("INTENT_ORCH_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

}  // namespace

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  Scenario scenario;
  try {
    auto config = parse_orchestrator_config(read_file(opts.config), opts.config);
    auto intent = parse_intent(read_file(opts.intent), opts.intent);
    auto deployment =
        parse_deployment(read_file(opts.deployment), opts.deployment);
    auto topology = parse_topology(read_file(opts.topology), opts.topology);
    if (opts.seed) config.rng_seed = *opts.seed;
    scenario = parse_scenario(read_file(opts.scenario), std::move(topology),
                              std::move(config), std::move(intent),
                              std::move(deployment), opts.scenario);
    if (opts.tick_ms) {
      if (*opts.tick_ms <= 0) throw ValidationError("--tick-ms must be > 0");
      scenario.tick_ms = *opts.tick_ms;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  const auto format = timeline_format_from_string(opts.format);
  if (!format) {
    err << "error: unknown format '" << opts.format << "'\n";
    return kInputError;
  }

  try {
    const auto timeline = run_scenario(scenario);
    std::filesystem::create_directories(opts.out_dir);
    const std::filesystem::path dir(opts.out_dir);
    const auto timeline_path =
        dir / (*format == TimelineFormat::kCsv ? "timeline.csv" : "timeline.jsonl");
    write_file(timeline_path, export_timeline(timeline, *format));
    write_file(dir / "decisions.jsonl", export_decision_log(timeline));
    out << "placement:";
    for (const auto& n : timeline.placement_sequence()) out << ' ' << n;
    out << "\ntimeline: " << timeline_path.string()
        << "\ndecisions: " << (dir / "decisions.jsonl").string() << "\n";
    if (timeline.fatal_error) {
      err << "fatal: " << *timeline.fatal_error << "\n";
      return kRuntimeError;
    }
  } catch (const std::exception& e) {
    err << "fatal: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}

int cmd_validate(const std::vector<std::string>& paths, std::ostream& out,
                 std::ostream& err) {
  if (paths.empty()) {
    err << "error: no files given\n";
    return kInputError;
  }
  struct Loaded {
    std::string path;
    std::string text;
    DocKind kind;
  };
  std::vector<Loaded> docs;
  bool ok = true;
  for (const auto& p : paths) {
    try {
      auto text = read_file(p);
      const auto kind = detect_kind(text, p);
      docs.push_back({p, std::move(text), kind});
    } catch (const ParseError& e) {
      err << "error: " << e.what() << "\n";
      ok = false;
    }
  }
  // Topologies first so scenarios can be checked against them.
  std::optional<Topology> topology;
  for (const auto& d : docs) {
    if (d.kind != DocKind::kTopology) continue;
    try {
      auto t = parse_topology(d.text, d.path);
      if (!topology) topology = std::move(t);
      out << d.path << ": ok (topology)\n";
    } catch (const ParseError& e) {
      err << "error: " << e.what() << "\n";
      ok = false;
    }
  }
  for (const auto& d : docs) {
    try {
      switch (d.kind) {
        case DocKind::kTopology:
          continue;
        case DocKind::kIntent:
          parse_intent(d.text, d.path);
          break;
        case DocKind::kConfig:
          parse_orchestrator_config(d.text, d.path);
          break;
        case DocKind::kDeployment:
          parse_deployment(d.text, d.path);
          break;
        case DocKind::kScenario:
          parse_scenario_script(d.text, topology ? &*topology : nullptr, d.path);
          break;
      }
      out << d.path << ": ok (" << kind_name(d.kind) << ")\n";
    } catch (const ParseError& e) {
      err << "error: " << e.what() << "\n";
      ok = false;
    }
  }
  return ok ? kOk : kInputError;
}

int cmd_parse_metrics(const std::string& path, std::ostream& out,
                      std::ostream& err) {
  try {
    const auto samples = parse_exposition(read_file(path));
    for (const auto& s : samples) out << sample_json(s).dump() << "\n";
  } catch (const ParseError& e) {
    err << "error: " << (e.source().empty() ? path + ":" : "") << e.what()
        << "\n";
    return kInputError;
  }
  return kOk;
}

int cmd_probe(const std::string& host, int port, int runs, int timeout_ms,
              std::ostream& out, std::ostream& err) {
  if (port < 1 || port > 65535 || runs < 1 || timeout_ms < 1) {
    err << "error: port must be 1..65535, runs and timeout must be >= 1\n";
    return kInputError;
  }
  try {
    const double ms =
        measure_rtt(host, static_cast<std::uint16_t>(port), runs,
                    std::chrono::milliseconds(timeout_ms));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", ms);
    out << buf << "\n";
  } catch (const ProbeError& e) {
    err << "error: " << e.what() << "\n";
    for (const auto& f : e.failures()) err << "  " << f << "\n";
    return kRuntimeError;
  }
  return kOk;
}

int cmd_report(const std::string& timeline_path, const std::string& out_path,
               const std::optional<std::string>& format, std::ostream& out,
               std::ostream& err) {
  std::optional<TimelineFormat> fmt;
  if (format) {
    fmt = timeline_format_from_string(*format);
  } else {
    const auto ext = std::filesystem::path(timeline_path).extension();
    fmt = ext == ".jsonl" ? TimelineFormat::kJsonLines : TimelineFormat::kCsv;
  }
  if (!fmt) {
    err << "error: unknown format '" << *format << "'\n";
    return kInputError;
  }
  Timeline timeline;
  try {
    timeline = import_timeline(read_file(timeline_path), *fmt);
    if (timeline.ticks.empty()) {
      throw ParseError("timeline has no ticks", 0, timeline_path);
    }
  } catch (const ParseError& e) {
    err << "error: " << (e.source().empty() ? timeline_path + ": " : "")
        << e.what() << "\n";
    return kInputError;
  }
  try {
    write_file(out_path, render_svg(timeline));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  out << out_path << "\n";
  return kOk;
}

int main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err) {
  configure_logging();
  CLI::App app{"Intent-based application relocation orchestrator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Replay a scenario on the simulator");
  run_cmd->add_option("--config", run.config, "Orchestrator config")->required();
  run_cmd->add_option("--intent", run.intent, "Intent document")->required();
  run_cmd->add_option("--deployment", run.deployment, "App deployment")->required();
  run_cmd->add_option("--topology", run.topology, "Cluster topology")->required();
  run_cmd->add_option("--scenario", run.scenario, "Scenario script")->required();
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  run_cmd->add_option("--seed", run.seed, "Override the config rng_seed");
  run_cmd->add_option("--tick-ms", run.tick_ms, "Override the scenario tick");
  run_cmd->add_option("--format", run.format, "Timeline format: csv|jsonl");

  std::vector<std::string> validate_paths;
  auto* validate_cmd = app.add_subcommand("validate", "Parse-check input documents");
  validate_cmd->add_option("paths", validate_paths)->required();

  std::string metrics_path;
  auto* metrics_cmd =
      app.add_subcommand("parse-metrics", "Parse an exposition-format file");
  metrics_cmd->add_option("file", metrics_path)->required();

  std::string probe_host;
  int probe_port = 0;
  int probe_runs = 5;
  int probe_timeout = 1000;
  auto* probe_cmd = app.add_subcommand("probe", "Median TCP connect time");
  probe_cmd->add_option("host", probe_host)->required();
  probe_cmd->add_option("port", probe_port)->required();
  probe_cmd->add_option("--runs", probe_runs);
  probe_cmd->add_option("--timeout-ms", probe_timeout);

  std::string report_in;
  std::string report_out = "timeline.svg";
  std::optional<std::string> report_format;
  auto* report_cmd = app.add_subcommand("report", "Plot a timeline to SVG");
  report_cmd->add_option("timeline", report_in)->required();
  report_cmd->add_option("-o,--out", report_out);
  report_cmd->add_option("--format", report_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  if (*run_cmd) return cmd_run(run, out, err);
  if (*validate_cmd) return cmd_validate(validate_paths, out, err);
  if (*metrics_cmd) return cmd_parse_metrics(metrics_path, out, err);
  if (*probe_cmd) {
    return cmd_probe(probe_host, probe_port, probe_runs, probe_timeout, out, err);
  }
  if (*report_cmd) {
    return cmd_report(report_in, report_out, report_format, out, err);
  }
  return kInputError;
}

}  // namespace intent_orch::cli
