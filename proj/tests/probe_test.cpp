#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "intent_orch/errors.hpp"
#include "intent_orch/probe.hpp"
#include "test_support.hpp"

namespace intent_orch {
namespace {

using namespace std::chrono_literals;

// Connector that "takes" the next scripted duration; a negative entry fails.
Connector scripted(testing::ManualClock& clock,
                   std::vector<std::chrono::milliseconds> durations) {
  auto next = std::make_shared<std::size_t>(0);
  return [&clock, durations, next](const std::string&, std::uint16_t,
                                   std::chrono::milliseconds) {
    const auto d = durations.at((*next)++);
    if (d < 0ms) throw std::runtime_error("refused");
    clock.advance(d);
  };
}

TEST(Median, OddAndEven) {
  EXPECT_DOUBLE_EQ(median({3.0, 100.0, 4.0}), 4.0);
  EXPECT_DOUBLE_EQ(median({1.0, 2.0, 3.0, 10.0}), 2.5);
  EXPECT_THROW(median({}), ContractError);
}

TEST(MeasureRtt, FakeClockReturnsMedianOfInjectedDurations) {
  testing::ManualClock clock;
  EXPECT_DOUBLE_EQ(
      measure_rtt("ue", 80, 3, 1000ms, clock, scripted(clock, {3ms, 100ms, 4ms})),
      4.0);
}

TEST(MeasureRtt, FailedRunsExcluded) {
  testing::ManualClock clock;
  EXPECT_DOUBLE_EQ(
      measure_rtt("ue", 80, 3, 1000ms, clock, scripted(clock, {7ms, -1ms, 9ms})),
      8.0);
}

TEST(MeasureRtt, AllFailedCarriesReasons) {
  testing::ManualClock clock;
  try {
    measure_rtt("ue", 80, 3, 100ms, clock, scripted(clock, {-1ms, -1ms, -1ms}));
    FAIL() << "expected ProbeError";
  } catch (const ProbeError& e) {
    ASSERT_EQ(e.failures().size(), 3u);
    EXPECT_NE(e.failures()[0].find("refused"), std::string::npos);
  }
}

TEST(MeasureRtt, RunsMustBePositive) {
  EXPECT_THROW(measure_rtt("127.0.0.1", 1, 0, 100ms), ContractError);
}

TEST(MeasureRtt, LoopbackListener) {
  testing::LoopbackListener listener;
  const double ms = measure_rtt("127.0.0.1", listener.port(), 5, 1000ms);
  EXPECT_TRUE(std::isfinite(ms));
  EXPECT_GT(ms, 0.0);
  EXPECT_LT(ms, 1000.0);
}

TEST(MeasureRtt, ClosedPortFails) {
  const auto port = testing::unused_port();
  try {
    measure_rtt("127.0.0.1", port, 3, 500ms);
    FAIL() << "expected ProbeError";
  } catch (const ProbeError& e) {
    EXPECT_EQ(e.failures().size(), 3u);
  }
}

}  // namespace
}  // namespace intent_orch
