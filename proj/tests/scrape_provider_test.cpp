#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

#include "intent_orch/errors.hpp"
#include "intent_orch/scrape_provider.hpp"

namespace intent_orch {
namespace {

// Exporter stub on an ephemeral loopback port. Each scrape reports one core
// that was busy 60% of the time since the previous scrape.
class StubExporter {
 public:
  explicit StubExporter(int status = 200) {
    server_.Get("/metrics", [this, status](const httplib::Request&,
                                           httplib::Response& res) {
      const int n = scrapes_++;
      res.status = status;
      res.set_content(
          "# TYPE node_cpu_seconds_total counter\n"
          "node_cpu_seconds_total{cpu=\"0\",mode=\"idle\"} " +
              std::to_string(100 + 4 * n) +
              "\n"
              "node_cpu_seconds_total{cpu=\"0\",mode=\"user\"} " +
              std::to_string(50 + 6 * n) + "\n",
          "text/plain");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubExporter() {
    server_.stop();
    thread_.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/metrics";
  }
  int scrapes() const { return scrapes_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> scrapes_{0};
};

ScrapeOptions fake_options(std::int64_t& now) {
  ScrapeOptions o;
  o.rtt_probe = [](const RttTarget& t) { return t.port == 1 ? 6.5 : 8.0; };
  o.now_ms = [&now] { return now; };
  o.http_timeout = std::chrono::milliseconds(1000);
  return o;
}

TEST(ScrapeProvider, FirstSnapshotHasNoCpuSecondDoes) {
  StubExporter exporter;
  std::int64_t now = 0;
  ScrapeProvider provider({{"edge", exporter.url()}}, {{"edge", {"ue", 1}}},
                          fake_options(now));
  EXPECT_EQ(provider.list_nodes(), std::vector<NodeId>{"edge"});

  auto first = provider.snapshot("edge");
  EXPECT_FALSE(first.cpu_percent.has_value());
  EXPECT_DOUBLE_EQ(*first.rtt_ue_to_app_ms, 6.5);

  now = 10000;  // 6 s busy, 4 s idle in 10 s
  auto second = provider.snapshot("edge");
  ASSERT_TRUE(second.cpu_percent.has_value());
  EXPECT_NEAR(*second.cpu_percent, 60.0, 1e-9);
  EXPECT_EQ(second.capture_time_ms, 10000);
}

TEST(ScrapeProvider, HttpErrorIsIsolatedToItsNode) {
  StubExporter good;
  StubExporter bad(503);
  std::int64_t now = 0;
  ScrapeProvider provider({{"a", good.url()}, {"b", bad.url()}},
                          {{"a", {"ue", 1}}, {"b", {"ue", 2}}},
                          fake_options(now));
  EXPECT_THROW(provider.snapshot("b"), UnavailableError);
  EXPECT_NO_THROW(provider.snapshot("a"));
}

TEST(ScrapeProvider, UnreachableEndpointIsUnavailable) {
  std::int64_t now = 0;
  auto o = fake_options(now);
  o.http_timeout = std::chrono::milliseconds(200);
  ScrapeProvider provider({{"a", "http://127.0.0.1:1/metrics"}},
                          {{"a", {"ue", 1}}}, o);
  EXPECT_THROW(provider.snapshot("a"), UnavailableError);
}

TEST(ScrapeProvider, RttProbeFailureIsUnavailable) {
  StubExporter exporter;
  std::int64_t now = 0;
  auto o = fake_options(now);
  o.rtt_probe = [](const RttTarget&) -> double {
    throw ProbeError("all failed", {});
  };
  ScrapeProvider provider({{"a", exporter.url()}}, {{"a", {"ue", 1}}}, o);
  EXPECT_THROW(provider.snapshot("a"), UnavailableError);
}

TEST(ScrapeProvider, MissingRttTargetRejected) {
  EXPECT_THROW(ScrapeProvider({{"a", "http://x/metrics"}}, {}), ContractError);
}

}  // namespace
}  // namespace intent_orch
