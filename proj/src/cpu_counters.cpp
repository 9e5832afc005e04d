#include <algorithm>
#include <charconv>

#include "intent_orch/errors.hpp"
#include "intent_orch/metrics.hpp"

namespace intent_orch {

double cpu_percent_from_counters(const CpuCounterWindow& w) {
  if (w.t1_ms <= w.t0_ms) {
    throw UnavailableError("counter window must satisfy t1 > t0");
  }
  if (w.at_t0.size() != w.at_t1.size() || w.at_t0.empty()) {
    throw UnavailableError("core set changed between scrapes");
  }
  double busy = 0.0;
  double idle = 0.0;
  for (std::size_t i = 0; i < w.at_t0.size(); ++i) {
    const auto& a = w.at_t0[i];
    const auto& b = w.at_t1[i];
    if (b.busy_s < a.busy_s || b.idle_s < a.idle_s) {
      throw UnavailableError("counter reset detected on core " +
                             std::to_string(i));
    }
    busy += b.busy_s - a.busy_s;
    idle += b.idle_s - a.idle_s;
  }
  const double total = busy + idle;
  if (total <= 0.0) throw UnavailableError("zero counter delta");
  return std::clamp(100.0 * busy / total, 0.0, 100.0);
}

std::vector<CoreCounters> cpu_counters_from_samples(
    const std::vector<MetricSample>& samples) {
  struct Keyed {
    std::string cpu;
    CoreCounters counters;
  };
  std::vector<Keyed> cores;
  for (const auto& s : samples) {
    if (s.name != "node_cpu_seconds_total" || s.special != SpecialValue::kNone) {
      continue;
    }
    const auto cpu = s.labels.find("cpu");
    const auto mode = s.labels.find("mode");
    if (cpu == s.labels.end() || mode == s.labels.end()) continue;
    auto it = std::find_if(cores.begin(), cores.end(),
                           [&](const Keyed& k) { return k.cpu == cpu->second; });
    if (it == cores.end()) {
      cores.push_back({cpu->second, {}});
      it = std::prev(cores.end());
    }
    (mode->second == "idle" ? it->counters.idle_s : it->counters.busy_s) +=
        s.value;
  }
  // Numeric labels sort numerically ("2" < "10"), anything else lexically.
  auto key = [](const std::string& s) {
    long n = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    const bool numeric = ec == std::errc() && end == s.data() + s.size();
    return std::make_tuple(!numeric, numeric ? n : 0L, s);
  };
  std::sort(cores.begin(), cores.end(), [&](const Keyed& a, const Keyed& b) {
    return key(a.cpu) < key(b.cpu);
  });
  std::vector<CoreCounters> out;
  out.reserve(cores.size());
  for (auto& k : cores) out.push_back(k.counters);
  return out;
}

}  // namespace intent_orch
