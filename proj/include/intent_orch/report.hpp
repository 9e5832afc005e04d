#pragma once

#include <string>

#include "intent_orch/scenario.hpp"

namespace intent_orch {

/// Static SVG with three stacked panels: per-node CPU, the app's RTT, and a
/// placement strip. Meant for eyeballing a replay, not for measurements.
std::string render_svg(const Timeline& timeline);

}  // namespace intent_orch
