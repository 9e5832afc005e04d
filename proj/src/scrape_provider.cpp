#include "intent_orch/scrape_provider.hpp"

#include <httplib.h>

#include "intent_orch/errors.hpp"
#include "intent_orch/probe.hpp"

namespace intent_orch {

namespace {

struct Url {
  std::string origin;  // scheme://host:port
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, "/metrics"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ScrapeProvider::ScrapeProvider(std::map<NodeId, std::string> endpoints,
                               std::map<NodeId, RttTarget> rtt_targets,
                               ScrapeOptions options)
    : options_(std::move(options)) {
  if (endpoints.size() != rtt_targets.size()) {
    throw ContractError("every node needs both an endpoint and an RTT target");
  }
  for (auto& [id, endpoint] : endpoints) {
    auto target = rtt_targets.find(id);
    if (target == rtt_targets.end()) {
      throw ContractError("node '" + id + "' has no RTT target");
    }
    auto state = std::make_unique<NodeState>();
    state->endpoint = std::move(endpoint);
    state->rtt_target = target->second;
    nodes_.emplace(id, std::move(state));
  }
  if (!options_.rtt_probe) {
    options_.rtt_probe = [runs = options_.rtt_runs,
                          timeout = options_.rtt_timeout](const RttTarget& t) {
      return measure_rtt(t.host, t.port, runs, timeout);
    };
  }
  if (!options_.now_ms) {
    options_.now_ms = [] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
  }
}

std::vector<NodeId> ScrapeProvider::list_nodes() const {
  std::vector<NodeId> ids;
  for (const auto& [id, _] : nodes_) ids.push_back(id);
  return ids;
}

std::string ScrapeProvider::fetch(const std::string& endpoint) const {
  const auto url = split_url(endpoint);
  httplib::Client client(url.origin);
  const auto secs = options_.http_timeout.count() / 1000;
  const auto usecs = (options_.http_timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  auto res = client.Get(url.path);
  if (!res) {
    throw UnavailableError("scrape of " + endpoint +
                           " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw UnavailableError("scrape of " + endpoint + " returned HTTP " +
                           std::to_string(res->status));
  }
  return res->body;
}

NodeMetrics ScrapeProvider::snapshot(const NodeId& node_id) {
  auto it = nodes_.find(node_id);
  if (it == nodes_.end()) throw UnavailableError("unknown node " + node_id);
  NodeState& node = *it->second;
  std::lock_guard lock(node.mu);

  const auto body = fetch(node.endpoint);
  const auto now = options_.now_ms();
  std::vector<MetricSample> samples;
  try {
    samples = parse_exposition(body);
  } catch (const ParseError& e) {
    throw UnavailableError("bad payload from " + node.endpoint + ": " +
                           e.what());
  }
  auto counters = cpu_counters_from_samples(samples);

  NodeMetrics m;
  m.node_id = node_id;
  m.capture_time_ms = now;
  if (node.last_time_ms && now > *node.last_time_ms) {
    try {
      m.cpu_percent = cpu_percent_from_counters(
          {*node.last_time_ms, now, node.last_counters, counters});
    } catch (const UnavailableError&) {
      // Reset or idle window: the new scrape becomes the next baseline.
    }
  }
  node.last_time_ms = now;
  node.last_counters = std::move(counters);

  try {
    m.rtt_ue_to_app_ms = options_.rtt_probe(node.rtt_target);
  } catch (const std::exception& e) {
    throw UnavailableError("RTT probe for " + node_id + " failed: " + e.what());
  }
  return m;
}

}  // namespace intent_orch
