#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "crowdsim/agent.hpp"
#include "crowdsim/worldmap.hpp"

namespace crowdsim {

inline constexpr const char* kCalmColor = "#2b8cbe";
inline constexpr const char* kPanicColor = "#e34a33";

// SVG snapshot in world units (1 user unit = 1 m). Agents are the only
// <circle> elements; walls, doors and attractors use rects and polygons.
std::string render_frame(const World& world, std::span<const Agent> agents, std::int64_t tick);

}  // namespace crowdsim
