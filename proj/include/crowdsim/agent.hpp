#pragma once

#include <cstdint>
#include <optional>

#include "crowdsim/traits.hpp"
#include "crowdsim/vec2.hpp"

namespace crowdsim {

struct Agent {
    // Fields read for every neighbor come first, to share a cache line.
    int id = 0;
    std::optional<std::int64_t> evacuated_at;  // tick of the exit crossing
    Vec2 pos;
    Vec2 vel;
    Vec2 heading{1.0, 0.0};  // unit length
    Traits traits;
    PsychState psych;
    int exit_portal = -1;                      // portal crossed on evacuation
    int room_id = 0;                           // last room whose free cell held the agent
    int doorway = -1;                          // portal of the last door cell stood in

    bool live() const { return !evacuated_at.has_value(); }
    double speed() const { return length(vel); }
};

}  // namespace crowdsim
