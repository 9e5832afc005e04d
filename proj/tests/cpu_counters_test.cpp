#include <gtest/gtest.h>

#include "intent_orch/errors.hpp"
#include "intent_orch/metrics.hpp"

namespace intent_orch {
namespace {

TEST(CpuPercent, TwoCoreHandArithmetic) {
  // 10 s window, 2 cores: 12 s busy and 8 s idle in total -> 12 / 20.
  CpuCounterWindow w{0, 10000, {{100, 200}, {50, 300}}, {{107, 203}, {55, 305}}};
  EXPECT_DOUBLE_EQ(cpu_percent_from_counters(w), 60.0);
}

TEST(CpuPercent, IdleMachine) {
  CpuCounterWindow w{0, 5000, {{10, 10}}, {{10, 15}}};
  EXPECT_DOUBLE_EQ(cpu_percent_from_counters(w), 0.0);
}

TEST(CpuPercent, SaturatedMachine) {
  CpuCounterWindow w{0, 5000, {{10, 10}}, {{15, 10}}};
  EXPECT_DOUBLE_EQ(cpu_percent_from_counters(w), 100.0);
}

TEST(CpuPercent, Unavailable) {
  // counter reset
  EXPECT_THROW(cpu_percent_from_counters({0, 1000, {{10, 10}}, {{1, 12}}}),
               UnavailableError);
  // zero delta
  EXPECT_THROW(cpu_percent_from_counters({0, 1000, {{10, 10}}, {{10, 10}}}),
               UnavailableError);
  // t1 <= t0
  EXPECT_THROW(cpu_percent_from_counters({1000, 1000, {{1, 1}}, {{2, 2}}}),
               UnavailableError);
  // core set changed
  EXPECT_THROW(cpu_percent_from_counters({0, 1000, {{1, 1}}, {{2, 2}, {1, 1}}}),
               UnavailableError);
}

TEST(CpuCounters, FromNodeExporterSamples) {
  const auto samples = parse_exposition(
      "node_cpu_seconds_total{cpu=\"10\",mode=\"idle\"} 5\n"
      "node_cpu_seconds_total{cpu=\"2\",mode=\"idle\"} 100\n"
      "node_cpu_seconds_total{cpu=\"2\",mode=\"user\"} 30\n"
      "node_cpu_seconds_total{cpu=\"2\",mode=\"system\"} 12\n"
      "node_cpu_seconds_total{cpu=\"10\",mode=\"user\"} 1\n"
      "node_load1 3\n");
  const auto cores = cpu_counters_from_samples(samples);
  ASSERT_EQ(cores.size(), 2u);
  EXPECT_DOUBLE_EQ(cores[0].busy_s, 42);  // cpu 2 sorts before cpu 10
  EXPECT_DOUBLE_EQ(cores[0].idle_s, 100);
  EXPECT_DOUBLE_EQ(cores[1].busy_s, 1);
  EXPECT_DOUBLE_EQ(cores[1].idle_s, 5);
}

}  // namespace
}  // namespace intent_orch
