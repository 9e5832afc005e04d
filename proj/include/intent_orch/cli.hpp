#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace intent_orch::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kRuntimeError = 3 };

struct RunOptions {
  std::string config;
  std::string intent;
  std::string deployment;
  std::string topology;
  std::string scenario;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> tick_ms;
  std::string format = "csv";
};

/// Replays the scenario; writes <out>/timeline.{csv,jsonl} and
/// <out>/decisions.jsonl.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

/// Parse-only check; document kind is inferred from its top-level keys.
int cmd_validate(const std::vector<std::string>& paths, std::ostream& out,
                 std::ostream& err);

/// One JSON object per sample line.
int cmd_parse_metrics(const std::string& path, std::ostream& out,
                      std::ostream& err);

/// Prints the median TCP connect time in ms with three decimals.
int cmd_probe(const std::string& host, int port, int runs, int timeout_ms,
              std::ostream& out, std::ostream& err);

/// Renders a timeline (CSV or JSON lines, by --format or extension) to SVG.
int cmd_report(const std::string& timeline_path, const std::string& out_path,
               const std::optional<std::string>& format, std::ostream& out,
               std::ostream& err);

/// Full argv dispatch, used by the binary and by golden tests.
int main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err);

}  // namespace intent_orch::cli
