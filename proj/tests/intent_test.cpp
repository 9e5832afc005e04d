#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "intent_orch/errors.hpp"
#include "intent_orch/intent.hpp"

namespace intent_orch {
namespace {

constexpr const char* kDemoIntent = R"(
app_id: nginx-app
conditions:
  - metric: rtt_ue_to_app_ms
    op: lt
    threshold: 25
  - metric: node_cpu_percent
    op: lt
    threshold: 60
node_priority: [master]
)";

Intent demo_intent() { return parse_intent(kDemoIntent); }

TEST(ParseIntent, DemoIntent) {
  const auto intent = demo_intent();
  EXPECT_EQ(intent.app_id, "nginx-app");
  ASSERT_EQ(intent.conditions.size(), 2u);
  EXPECT_EQ(intent.conditions[0],
            (Condition{MetricKind::kRttUeToApp, Comparator::kLt, 25.0}));
  EXPECT_EQ(intent.conditions[1],
            (Condition{MetricKind::kNodeCpu, Comparator::kLt, 60.0}));
  EXPECT_EQ(intent.node_priority, std::vector<NodeId>{"master"});
  EXPECT_FALSE(intent.check_interval_s.has_value());
}

TEST(ParseIntent, AcceptsJsonRendering) {
  const auto json = R"({"app_id": "nginx-app",
    "conditions": [{"metric": "rtt_ue_to_app_ms", "op": "lt", "threshold": 25},
                   {"metric": "node_cpu_percent", "op": "lt", "threshold": 60}],
    "node_priority": ["master"]})";
  EXPECT_EQ(parse_intent(json), demo_intent());
}

TEST(ParseIntent, EmptyConditionsRejected) {
  EXPECT_THROW(parse_intent("app_id: a\nconditions: []\n"), ValidationError);
}

TEST(ParseIntent, DuplicateMetricRejected) {
  const auto text = R"(app_id: a
conditions:
  - {metric: node_cpu_percent, op: lt, threshold: 60}
  - {metric: node_cpu_percent, op: gt, threshold: 5}
)";
  try {
    parse_intent(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(ParseIntent, ValidationErrors) {
  const char* bad[] = {
      "app_id: a\nconditions: [{metric: jitter_ms, op: lt, threshold: 1}]\n",
      "app_id: a\nconditions: [{metric: node_cpu_percent, op: ne, threshold: 1}]\n",
      "app_id: a\nconditions: [{metric: node_cpu_percent, op: lt, threshold: -1}]\n",
      "app_id: a\nconditions: [{metric: node_cpu_percent, op: lt, threshold: .nan}]\n",
      "app_id: a\nconditions: [{metric: node_cpu_percent, op: lt, threshold: 1}]\ncheck_interval_s: 0\n",
      "app_id: a\nconditions: [{metric: node_cpu_percent, op: lt, threshold: 1}]\nnode_priority: [m, m]\n",
      "app_id: a\nconditions: [{metric: node_cpu_percent, op: lt, threshold: 1}]\nsurprise: 1\n",
      "conditions: [{metric: node_cpu_percent, op: lt, threshold: 1}]\n",
  };
  for (const char* text : bad) {
    EXPECT_THROW(parse_intent(text), ValidationError) << text;
  }
}

TEST(ParseIntent, SyntaxErrorCarriesLine) {
  try {
    parse_intent("app_id: a\nconditions: [\n  {metric: x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 0);
  }
}

TEST(EvaluateCondition, StrictBoundaries) {
  const Condition rtt{MetricKind::kRttUeToApp, Comparator::kLt, 25};
  const Condition cpu{MetricKind::kNodeCpu, Comparator::kLt, 60};
  EXPECT_TRUE(evaluate_condition(rtt, 24.999).fulfilled);
  EXPECT_FALSE(evaluate_condition(rtt, 25.0).fulfilled);
  EXPECT_FALSE(evaluate_condition(cpu, 60.0).fulfilled);
}

TEST(EvaluateCondition, NonFiniteRejected) {
  const Condition c{MetricKind::kNodeCpu, Comparator::kLt, 60};
  EXPECT_THROW(evaluate_condition(c, std::numeric_limits<double>::quiet_NaN()),
               EvaluationError);
  EXPECT_THROW(evaluate_condition(c, std::numeric_limits<double>::infinity()),
               EvaluationError);
}

// Each comparator is fulfilled at its own threshold iff it admits equality.
TEST(EvaluateCondition, EqualityAdmittedOnlyByInclusiveComparators) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 1000.0);
  for (int i = 0; i < 200; ++i) {
    const double t = dist(rng);
    for (auto op : {Comparator::kLt, Comparator::kLe, Comparator::kGt,
                    Comparator::kGe}) {
      const bool admits = op == Comparator::kLe || op == Comparator::kGe;
      EXPECT_EQ(evaluate_condition({MetricKind::kNodeCpu, op, t}, t).fulfilled,
                admits);
    }
  }
}

TEST(EvaluateIntent, AllFulfilled) {
  const auto eval = evaluate_intent(demo_intent(), "master", {10.0, 40.0});
  EXPECT_TRUE(eval.all_fulfilled);
  EXPECT_EQ(eval.statuses.size(), 2u);
  EXPECT_EQ(eval.first_violation(), nullptr);
}

TEST(EvaluateIntent, DelayedRttViolates) {
  // 8 ms base RTT plus the 20 ms injected interface delay.
  const double rtt = 8.0 + 20.0;
  const auto eval = evaluate_intent(demo_intent(), "master", {rtt, 40.0});
  EXPECT_FALSE(eval.all_fulfilled);
  ASSERT_NE(eval.first_violation(), nullptr);
  EXPECT_EQ(eval.first_violation()->condition.metric, MetricKind::kRttUeToApp);
  EXPECT_DOUBLE_EQ(eval.statuses[0].observed, 28.0);
  EXPECT_TRUE(eval.statuses[1].fulfilled);
}

TEST(EvaluateIntent, MissingMetricNamed) {
  try {
    evaluate_intent(demo_intent(), "master", {10.0, std::nullopt});
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("node_cpu_percent"), std::string::npos);
  }
}

// all_fulfilled is the conjunction of per-condition results; enumerate
// observed values on and around every threshold.
TEST(EvaluateIntent, ConjunctionExhaustive) {
  const double points[] = {0.0, 24.0, 25.0, 26.0, 59.0, 60.0, 61.0, 100.0};
  for (auto rtt_op : {Comparator::kLt, Comparator::kLe, Comparator::kGt, Comparator::kGe}) {
    for (auto cpu_op : {Comparator::kLt, Comparator::kLe, Comparator::kGt, Comparator::kGe}) {
      Intent intent{"a",
                    {{MetricKind::kRttUeToApp, rtt_op, 25},
                     {MetricKind::kNodeCpu, cpu_op, 60}},
                    {},
                    {}};
      for (double rtt : points) {
        for (double cpu : points) {
          const auto eval = evaluate_intent(intent, "n", {rtt, cpu});
          const bool expected = compare(rtt_op, rtt, 25) && compare(cpu_op, cpu, 60);
          EXPECT_EQ(eval.all_fulfilled, expected);
          EXPECT_EQ(eval, evaluate_intent(intent, "n", {rtt, cpu}));
        }
      }
    }
  }
}

TEST(ParseConfig, Defaults) {
  const auto cfg = parse_orchestrator_config("backend: simulator\n");
  EXPECT_EQ(cfg.rng_seed, 0u);
  EXPECT_DOUBLE_EQ(cfg.cpu_tie_epsilon, 5.0);
  EXPECT_TRUE(cfg.return_to_priority);
  EXPECT_EQ(cfg.cooldown_cycles, 1);
  EXPECT_DOUBLE_EQ(cfg.check_interval_default_s, 1.0);
}

TEST(ParseConfig, Invalid) {
  EXPECT_THROW(parse_orchestrator_config("cooldown_cycles: -1\n"), ValidationError);
  EXPECT_THROW(parse_orchestrator_config("cpu_tie_epsilon: 101\n"), ValidationError);
  EXPECT_THROW(parse_orchestrator_config("rng_seed: -3\n"), ValidationError);
  EXPECT_THROW(parse_orchestrator_config("backend: k3s\n"), ValidationError);
  EXPECT_THROW(parse_orchestrator_config("check_interval_s: 0\n"), ValidationError);
}

TEST(ParseConfig, CredentialsAreOpaque) {
  const auto cfg = parse_orchestrator_config(
      "credentials:\n  token: abc\n  kubeconfig: /x\nrng_seed: 18446744073709551615\n");
  EXPECT_EQ(cfg.credentials.at("token"), "abc");
  EXPECT_EQ(cfg.rng_seed, 18446744073709551615ull);
}

TEST(CheckInterval, IntentWins) {
  OrchestratorConfig cfg;
  cfg.check_interval_default_s = 2.0;
  auto intent = demo_intent();
  EXPECT_DOUBLE_EQ(effective_check_interval_s(intent, cfg), 2.0);
  intent.check_interval_s = 0.5;
  EXPECT_DOUBLE_EQ(effective_check_interval_s(intent, cfg), 0.5);
}

TEST(ParseDeployment, Representative) {
  const auto d = parse_deployment("app_id: nginx-app\ncpu_demand: 10\nservice_port: 80\n");
  EXPECT_EQ(d.app_id, "nginx-app");
  EXPECT_DOUBLE_EQ(d.cpu_demand, 10.0);
  EXPECT_EQ(d.service_port, 80);
  EXPECT_EQ(parse_deployment(serialize(d)), d);
}

TEST(ParseDeployment, Invalid) {
  EXPECT_THROW(parse_deployment("app_id: a\ncpu_demand: 120\n"), ValidationError);
  EXPECT_THROW(parse_deployment("app_id: a\ncpu_demand: 1\nservice_port: 0\n"),
               ValidationError);
  EXPECT_THROW(parse_deployment("app_id: a\n"), ValidationError);
}

// Random well-formed documents survive serialize -> parse unchanged.
TEST(DocumentRoundTrip, RandomIntentsConfigsDeployments) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> real(0.0, 500.0);
  std::uniform_int_distribution<int> small(0, 4);
  const Comparator ops[] = {Comparator::kLt, Comparator::kLe, Comparator::kGt,
                            Comparator::kGe};
  for (int i = 0; i < 200; ++i) {
    Intent intent;
    intent.app_id = "app-" + std::to_string(i);
    intent.conditions.push_back({MetricKind::kRttUeToApp, ops[small(rng) % 4], real(rng)});
    if (small(rng) % 2 == 0) {
      intent.conditions.push_back({MetricKind::kNodeCpu, ops[small(rng) % 4], real(rng) / 5});
    }
    for (int n = small(rng); n > 0; --n) intent.node_priority.push_back("node-" + std::to_string(n));
    if (small(rng) > 2) intent.check_interval_s = real(rng) + 0.001;
    EXPECT_EQ(parse_intent(serialize(intent)), intent) << serialize(intent);

    OrchestratorConfig cfg;
    cfg.rng_seed = rng();
    cfg.cpu_tie_epsilon = real(rng) / 5;
    cfg.return_to_priority = small(rng) % 2 == 0;
    cfg.cooldown_cycles = small(rng);
    cfg.check_interval_default_s = real(rng) + 0.5;
    cfg.backend_kind = small(rng) % 2 ? BackendKind::kExternal : BackendKind::kSimulator;
    if (small(rng) % 2) cfg.credentials["token"] = "t" + std::to_string(i);
    EXPECT_EQ(parse_orchestrator_config(serialize(cfg)), cfg) << serialize(cfg);

    AppDeployment d{"app-" + std::to_string(i), small(rng) % 2 ? "nginx:1.23" : "",
                    real(rng) / 5, static_cast<std::uint16_t>(1 + rng() % 65535)};
    EXPECT_EQ(parse_deployment(serialize(d)), d) << serialize(d);
  }
}

}  // namespace
}  // namespace intent_orch
