#pragma once

// Resolves socio-psychological traits into motion parameters and goals.

#include "crowdsim/agent.hpp"
#include "crowdsim/perception.hpp"
#include "crowdsim/traits.hpp"
#include "crowdsim/worldmap.hpp"

namespace crowdsim {

// Distance at which an agent starts steering around an oncoming neighbor.
//
//              Patient  Impatient
//   Narrow       1.0       1.5
//   Average      1.5       2.0
//   Broad        2.0       2.5
double avoidance_distance(const Traits& traits);

inline constexpr double kPanicSpeedFactor = 1.15;

// Calm agents walk at v_pref; panicked ones at 1.15 * v_pref, capped at v_max.
double desired_speed(const Traits& traits, Situation situation);

// Agents within this distance of their painting for kPaintingDwell seconds
// count it as visited.
inline constexpr double kPaintingVisitRadius = 1.0;
inline constexpr double kPaintingDwell = 1.0;

// Advances the painting dwell timer; marks the painting visited and clears the
// goal once the dwell time is reached. Returns true on a new visit.
bool update_painting_visit(PsychState& psych, Vec2 pos, const World& world, double dt);

// Steering point for passing through `portal` from `room`: the door point on
// this side until the agent is lined up with the doorway and at most 1.5 cells
// in front of it (or standing in it), then the point on the far side. Exits
// lead to the door cell itself.
Vec2 portal_waypoint(const World& world, int portal, int room, Vec2 pos);

// Exit portal with the best first path from `room`, or -1 when none is reachable.
int nearest_exit(const World& world, int room);

// Chooses E(t) for the agent. Throws NoGoalAvailable when nothing is known,
// nothing is visible and there is no previous goal to keep.
Goal select_goal(const Agent& agent, const World& world, const Percept& percept);

// Raises panic; drops painting goals. Idempotent.
PsychState on_alarm(PsychState state);

}  // namespace crowdsim
