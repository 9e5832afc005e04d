#include "intent_orch/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "intent_orch/errors.hpp"

namespace intent_orch {

namespace {

constexpr double kWidth = 900;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kPanelHeight = 180;
constexpr double kGap = 40;
constexpr double kStripHeight = 24;

constexpr std::array<const char*, 6> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Panel {
  double top;
  double y_max;
  double t_min;
  double t_max;

  double x(double t) const {
    const double span = std::max(1.0, t_max - t_min);
    return kLeft + (t - t_min) / span * (kWidth - kLeft - kRight);
  }
  double y(double v) const {
    return top + kPanelHeight - std::clamp(v / y_max, 0.0, 1.0) * kPanelHeight;
  }
};

void axes(std::string& svg, const Panel& p, const std::string& label) {
  svg += fmt::format(
      R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#999"/>)"
      "\n",
      kLeft, p.top, kWidth - kLeft - kRight, kPanelHeight);
  svg += fmt::format(
      R"(<text x="{}" y="{}" font-size="12" font-family="sans-serif">{}</text>)"
      "\n",
      kLeft, p.top - 6, escape(label));
  for (int i = 0; i <= 4; ++i) {
    const double v = p.y_max * i / 4;
    svg += fmt::format(
        R"(<text x="{}" y="{}" font-size="10" text-anchor="end" font-family="sans-serif">{:g}</text>)"
        "\n",
        kLeft - 4, p.y(v) + 3, v);
  }
}

}  // namespace

std::string render_svg(const Timeline& tl) {
  if (tl.ticks.empty()) throw ContractError("cannot plot an empty timeline");
  const double t_min = static_cast<double>(tl.ticks.front().t_ms);
  const double t_max = static_cast<double>(tl.ticks.back().t_ms);

  double rtt_max = 1.0;
  for (const auto& t : tl.ticks) {
    if (t.rtt_ms) rtt_max = std::max(rtt_max, *t.rtt_ms);
  }
  rtt_max = std::ceil(rtt_max * 1.2 / 5.0) * 5.0;

  const Panel cpu{30, 100, t_min, t_max};
  const Panel rtt{cpu.top + kPanelHeight + kGap, rtt_max, t_min, t_max};
  const double strip_top = rtt.top + kPanelHeight + kGap;
  const double height = strip_top + kStripHeight + 50;

  std::string svg = fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)"
      "\n",
      kWidth, height, kWidth, height);
  svg += R"(<rect width="100%" height="100%" fill="white"/>)"
         "\n";

  axes(svg, cpu, "Node CPU usage (%)");
  for (std::size_t n = 0; n < tl.nodes.size(); ++n) {
    std::string points;
    for (const auto& t : tl.ticks) {
      points += fmt::format("{:.2f},{:.2f} ", cpu.x(double(t.t_ms)),
                            cpu.y(t.cpu_percent[n]));
    }
    const char* color = kPalette[n % kPalette.size()];
    svg += fmt::format(
        R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)"
        "\n",
        color, points);
    svg += fmt::format(
        R"(<text x="{}" y="{}" font-size="11" fill="{}" font-family="sans-serif">{}</text>)"
        "\n",
        kLeft + 180 + 110 * n, cpu.top - 6, color, escape(tl.nodes[n]));
  }

  axes(svg, rtt, "UE to APP RTT (ms)");
  std::string segment;
  auto flush = [&] {
    if (!segment.empty()) {
      svg += fmt::format(
          R"(<polyline fill="none" stroke="#333" stroke-width="1.5" points="{}"/>)"
          "\n",
          segment);
      segment.clear();
    }
  };
  for (const auto& t : tl.ticks) {
    if (!t.rtt_ms) {
      flush();
      continue;
    }
    segment +=
        fmt::format("{:.2f},{:.2f} ", rtt.x(double(t.t_ms)), rtt.y(*t.rtt_ms));
  }
  flush();

  svg += fmt::format(
      R"(<text x="{}" y="{}" font-size="12" font-family="sans-serif">APP placement</text>)"
      "\n",
      kLeft, strip_top - 6);
  for (std::size_t i = 0; i + 1 < tl.ticks.size(); ++i) {
    const auto& t = tl.ticks[i];
    if (!t.placement) continue;
    const auto it = std::find(tl.nodes.begin(), tl.nodes.end(), *t.placement);
    const auto n = static_cast<std::size_t>(it - tl.nodes.begin());
    const double x0 = cpu.x(double(t.t_ms));
    const double x1 = cpu.x(double(tl.ticks[i + 1].t_ms));
    svg += fmt::format(
        R"(<rect x="{:.2f}" y="{}" width="{:.2f}" height="{}" fill="{}"/>)"
        "\n",
        x0, strip_top, x1 - x0, kStripHeight, kPalette[n % kPalette.size()]);
  }
  svg += fmt::format(
      R"(<text x="{}" y="{}" font-size="11" text-anchor="middle" font-family="sans-serif">time (s)</text>)"
      "\n",
      (kLeft + kWidth - kRight) / 2, strip_top + kStripHeight + 30);
  for (int i = 0; i <= 6; ++i) {
    const double t = t_min + (t_max - t_min) * i / 6;
    svg += fmt::format(
        R"(<text x="{:.2f}" y="{}" font-size="10" text-anchor="middle" font-family="sans-serif">{:g}</text>)"
        "\n",
        cpu.x(t), strip_top + kStripHeight + 14, t / 1000.0);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace intent_orch
