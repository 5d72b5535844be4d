#include "crowdsim/psyche.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <tuple>

#include "crowdsim/error.hpp"

namespace crowdsim {

double avoidance_distance(const Traits& traits) {
    // Rows: Narrow, Average, Broad. Columns: Patient, Impatient.
    static constexpr std::array<std::array<double, 2>, 3> kTable{{{1.0, 1.5}, {1.5, 2.0}, {2.0, 2.5}}};
    return kTable[static_cast<std::size_t>(traits.personal_space_class)][static_cast<std::size_t>(traits.patience)];
}

double desired_speed(const Traits& traits, Situation situation) {
    if (situation == Situation::Calm) return traits.v_pref;
    return std::min(kPanicSpeedFactor * traits.v_pref, traits.v_max);
}

bool update_painting_visit(PsychState& psych, Vec2 pos, const World& world, double dt) {
    const Goal& goal = psych.current_goal;
    if (goal.kind != GoalKind::Painting) {
        psych.dwell_time = 0.0;
        return false;
    }
    const Attractor& painting = world.attractors[static_cast<std::size_t>(goal.target_id)];
    if (distance(pos, painting.position) > kPaintingVisitRadius) {
        psych.dwell_time = 0.0;
        return false;
    }
    psych.dwell_time += dt;
    // Dwell accumulates in dt steps; allow for the rounding of the sum.
    if (psych.dwell_time < kPaintingDwell - 1e-9) return false;
    psych.mark_visited(goal.target_id);
    psych.dwell_time = 0.0;
    psych.current_goal = Goal{};
    return true;
}

Vec2 portal_waypoint(const World& world, int portal, int room, Vec2 pos) {
    const Portal& p = world.graph.portals[static_cast<std::size_t>(portal)];
    const int near_id = world.door_point(portal, room);
    if (near_id < 0) return world.graph.portal_center(portal);
    const Vec2 near = world.attractors[static_cast<std::size_t>(near_id)].position;

    // Crossing starts once the agent is lined up with the doorway and no more
    // than one cell in front of it; aiming through earlier cuts the door jamb.
    const double cs = world.map().cell_size;
    const Vec2 normal{static_cast<double>(p.toward_b.x), static_cast<double>(p.toward_b.y)};
    const Vec2 lateral{-normal.y, normal.x};
    const Vec2 center = world.graph.portal_center(portal);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const CellCoord& c : p.cells) {
        const double t = dot(Vec2{(c.x + 0.5) * cs, (c.y + 0.5) * cs} - center, lateral);
        lo = std::min(lo, t - 0.5 * cs);
        hi = std::max(hi, t + 0.5 * cs);
    }
    const double along = std::abs(dot(pos - center, normal));
    const double across = dot(pos - center, lateral);
    bool crossing = along <= 1.5 * cs && across >= lo && across <= hi;
    if (const auto cell = try_cell_at(pos, world.map())) {
        crossing = crossing || world.portal_of_cell[world.map().index(cell->x, cell->y)] == portal;
    }
    if (!crossing) return near;
    if (p.is_exit) return world.graph.portal_center(portal);
    const int far_id = world.door_point(portal, world.graph.other_side(portal, room));
    return world.attractors[static_cast<std::size_t>(far_id)].position;
}

int nearest_exit(const World& world, int room) {
    if (room < 1 || room > world.room_count()) return -1;
    return world.room_nearest_exit[static_cast<std::size_t>(room - 1)];
}

namespace {

// Steering point toward `target` in `target_room`, routed through doors.
std::optional<Vec2> route_to(const World& world, int room, int target_room, Vec2 target, Vec2 pos) {
    if (room == target_room) return target;
    const int portal = world.next_portal(room, target_room);
    if (portal < 0) return std::nullopt;
    return portal_waypoint(world, portal, room, pos);
}

std::optional<Goal> exit_path_goal(const Agent& agent, const World& world) {
    const int exit = nearest_exit(world, agent.room_id);
    if (exit < 0) return std::nullopt;
    const int first = world.paths.paths(agent.room_id, exit).front().front();
    return Goal{GoalKind::ExitPortal, portal_waypoint(world, first, agent.room_id, agent.pos), exit};
}

std::optional<Goal> painting_goal(const Agent& agent, const World& world) {
    std::optional<Goal> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int id : world.painting_attractors) {
        if (agent.psych.has_visited(id)) continue;
        const Attractor& a = world.attractors[static_cast<std::size_t>(id)];
        const double d = distance(agent.pos, a.position);
        // Ids ascend, so strict comparison keeps the lowest id on ties.
        if (d >= best_d) continue;
        const auto target = route_to(world, agent.room_id, a.room_id, a.position, agent.pos);
        if (!target) continue;
        best_d = d;
        best = Goal{GoalKind::Painting, *target, id};
    }
    return best;
}

std::optional<Goal> follow_goal(const Agent& agent, const Percept& percept) {
    for (const SeenAgent& s : percept.visible_agents) {
        if (s.role == Role::Guide && s.room_id == agent.room_id) {
            return Goal{GoalKind::FollowAgent, s.position, s.id};
        }
    }
    return std::nullopt;
}

// Nearest visible exit, else the nearest visible door point on this side of its
// door; the door just used is a last resort.
std::optional<Goal> visible_door_goal(const Agent& agent, const World& world, const Percept& percept) {
    for (const SeenAttractor& s : percept.visible_attractors) {
        const Attractor& a = world.attractors[static_cast<std::size_t>(s.id)];
        if (a.kind != AttractorKind::DoorPoint || a.room_id != agent.room_id || !a.is_exit) continue;
        return Goal{GoalKind::ExitPortal, portal_waypoint(world, a.portal_id, agent.room_id, agent.pos), a.portal_id};
    }
    std::optional<int> fallback;
    for (const SeenAttractor& s : percept.visible_attractors) {
        const Attractor& a = world.attractors[static_cast<std::size_t>(s.id)];
        if (a.kind != AttractorKind::DoorPoint || a.room_id != agent.room_id) continue;
        if (a.portal_id == agent.psych.last_portal) {
            if (!fallback) fallback = a.portal_id;
            continue;
        }
        return Goal{GoalKind::ExitPortal, portal_waypoint(world, a.portal_id, agent.room_id, agent.pos), a.portal_id};
    }
    if (fallback) {
        return Goal{GoalKind::ExitPortal, portal_waypoint(world, *fallback, agent.room_id, agent.pos), *fallback};
    }
    return std::nullopt;
}

std::optional<Goal> retained_goal(const Agent& agent, const World& world) {
    const Goal& prev = agent.psych.current_goal;
    switch (prev.kind) {
        case GoalKind::FollowAgent:
            // Head for where the guide was last seen, then give up.
            if (distance(agent.pos, prev.target) <= world.map().cell_size) return std::nullopt;
            return prev;
        case GoalKind::ExitPortal: {
            const Portal& p = world.graph.portals[static_cast<std::size_t>(prev.target_id)];
            const bool incident = p.room_a == agent.room_id || p.room_b == agent.room_id;
            if (!incident || prev.target_id == agent.psych.last_portal) return std::nullopt;
            return Goal{GoalKind::ExitPortal, portal_waypoint(world, prev.target_id, agent.room_id, agent.pos),
                        prev.target_id};
        }
        default:
            return std::nullopt;
    }
}

[[noreturn]] void no_goal(const Agent& agent) {
    throw Error(ErrorCode::NoGoalAvailable, "agent " + std::to_string(agent.id) + " has no known or visible goal");
}

}  // namespace

Goal select_goal(const Agent& agent, const World& world, const Percept& percept) {
    if (agent.psych.situation == Situation::Calm) {
        if (auto g = painting_goal(agent, world)) return *g;
        if (auto g = exit_path_goal(agent, world)) return *g;
        if (agent.psych.current_goal.kind != GoalKind::None) return agent.psych.current_goal;
        no_goal(agent);
    }

    const Traits& t = agent.traits;
    if (t.role == Role::Follower) {
        if (auto g = follow_goal(agent, percept)) return *g;
    }
    const bool knows_paths = t.role == Role::Guide || t.knowledge == Knowledge::Complete;
    if (knows_paths) {
        if (auto g = exit_path_goal(agent, world)) return *g;
    }
    if (auto g = visible_door_goal(agent, world, percept)) return *g;
    if (auto g = retained_goal(agent, world)) return *g;
    no_goal(agent);
}

PsychState on_alarm(PsychState state) {
    state.situation = Situation::Panic;
    if (state.current_goal.kind == GoalKind::Painting) state.current_goal = Goal{};
    state.dwell_time = 0.0;
    return state;
}

}  // namespace crowdsim
