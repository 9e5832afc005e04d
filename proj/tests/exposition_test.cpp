#include <gtest/gtest.h>

#include <cmath>

#include "intent_orch/errors.hpp"
#include "intent_orch/metrics.hpp"

namespace intent_orch {
namespace {

TEST(ParseExposition, CounterWithLabels) {
  const auto samples =
      parse_exposition("node_cpu_seconds_total{cpu=\"0\",mode=\"idle\"} 1234.5\n");
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].name, "node_cpu_seconds_total");
  EXPECT_EQ(samples[0].labels.at("cpu"), "0");
  EXPECT_EQ(samples[0].labels.at("mode"), "idle");
  EXPECT_DOUBLE_EQ(samples[0].value, 1234.5);
  EXPECT_FALSE(samples[0].timestamp_ms.has_value());
}

TEST(ParseExposition, Timestamp) {
  const auto samples = parse_exposition("up 1 1700000000000");
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].timestamp_ms, 1700000000000);
  EXPECT_TRUE(samples[0].labels.empty());
}

TEST(ParseExposition, UnterminatedLabelValue) {
  try {
    parse_exposition("metric{label=\"a} 1");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(ParseExposition, CommentsAndBlankLines) {
  const auto text =
      "# HELP node_load1 1m load average.\n"
      "# TYPE node_load1 gauge\n"
      "\n"
      "node_load1 0.42\n"
      "# a free-form comment\n"
      "   node_load5 0.3\n";
  const auto samples = parse_exposition(text);
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[0].name, "node_load1");
  EXPECT_EQ(samples[1].name, "node_load5");
}

TEST(ParseExposition, EscapesInLabelValues) {
  const auto samples = parse_exposition(
      R"(msg{text="say \"hi\"\\n",nl="a\nb"} 3)");
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].labels.at("text"), "say \"hi\"\\n");
  EXPECT_EQ(samples[0].labels.at("nl"), "a\nb");
}

TEST(ParseExposition, SpecialValues) {
  const auto samples = parse_exposition(
      "a +Inf\nb -Inf\nc NaN\nd{le=\"+Inf\"} 7\n");
  ASSERT_EQ(samples.size(), 4u);
  EXPECT_EQ(samples[0].special, SpecialValue::kPosInf);
  EXPECT_TRUE(std::isinf(samples[0].value) && samples[0].value > 0);
  EXPECT_EQ(samples[1].special, SpecialValue::kNegInf);
  EXPECT_EQ(samples[2].special, SpecialValue::kNaN);
  EXPECT_TRUE(std::isnan(samples[2].value));
  EXPECT_EQ(samples[3].special, SpecialValue::kNone);
}

TEST(ParseExposition, HistogramSeriesAreplainSamples) {
  const auto text =
      "# TYPE req_seconds histogram\n"
      "req_seconds_bucket{le=\"0.1\"} 3\n"
      "req_seconds_bucket{le=\"+Inf\"} 5\n"
      "req_seconds_sum 0.7\n"
      "req_seconds_count 5\n";
  EXPECT_EQ(parse_exposition(text).size(), 4u);
}

TEST(ParseExposition, ReportsFirstErrorLine) {
  const auto text = "ok_metric 1\nok_metric 2\n9bad 3\nalso{bad 4\n";
  try {
    parse_exposition(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ParseExposition, CrLfLineEndings) {
  const auto samples = parse_exposition("a 1\r\nb 2\r\n");
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_DOUBLE_EQ(samples[1].value, 2);
}

TEST(SerializeExposition, RoundTripsTrickyValues) {
  std::vector<MetricSample> samples = {
      {"gnb_ul_bitrate", {{"cell", "1"}}, 1e-300, SpecialValue::kNone, -5},
      {"x:y", {{"q", "\\\"\n"}}, 0.1 + 0.2, SpecialValue::kNone, std::nullopt},
      {"z", {}, std::nan(""), SpecialValue::kNaN, 0},
  };
  EXPECT_EQ(parse_exposition(serialize_exposition(samples)), samples);
}

TEST(MetricNames, Grammar) {
  EXPECT_TRUE(is_valid_metric_name("node_cpu_seconds_total"));
  EXPECT_TRUE(is_valid_metric_name(":recording:rule"));
  EXPECT_FALSE(is_valid_metric_name("0abc"));
  EXPECT_FALSE(is_valid_metric_name(""));
  EXPECT_TRUE(is_valid_label_name("_x1"));
  EXPECT_FALSE(is_valid_label_name("a:b"));
}

}  // namespace
}  // namespace intent_orch
