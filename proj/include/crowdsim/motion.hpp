#pragma once

// Social forces, rule-based heading overrides and the explicit Euler step.

#include <optional>
#include <span>

#include "crowdsim/perception.hpp"
#include "crowdsim/traits.hpp"
#include "crowdsim/worldmap.hpp"

namespace crowdsim {

struct MotionParams {
    double tau = 0.5;     // relaxation time, s
    double A_goal = 2.0;  // N
    double B_goal = 2.0;  // m
    double R_goal = 10.0; // m
    double A_rep = 25.0;  // N
    double B_rep = 0.08;  // m
    double k_body = 120.0;// N/m
    double A_obs = 25.0;  // N
    double B_obs = 0.08;  // m
    double A_flw = 5.0;   // N
    double r_1 = 0.6;     // m
    double r_2 = 3.0;     // m
    int n_min = 3;
    double mass = 80.0;   // kg
    double delta_theta_small = 0.26;  // rad
    double delta_theta_large = 0.52;  // rad
};

void validate(const MotionParams& params);

struct ForceBreakdown {
    Vec2 advance;
    Vec2 goal_attr;
    Vec2 occupant_attr;
    Vec2 occupant_rep;
    Vec2 obstacle_rep;
    Vec2 total;
};

inline constexpr double kArrivalRadius = 0.05;  // m
inline constexpr double kMovingSpeed = 0.1;     // m/s, slower neighbors are ignored by the follow rule

// mass * (target_speed * e - vel) / tau toward the goal; zero once within 5 cm.
Vec2 advance_force(Vec2 pos, Vec2 vel, Vec2 goal, double target_speed, const MotionParams& params);

// Relaxation toward standing still, used when an agent has no goal.
Vec2 braking_force(Vec2 vel, const MotionParams& params);

// v_max for a panicked agent with no one and no obstacle in view (walls of
// the building do not count), desired_speed otherwise.
double acceleration_boost(Situation situation, const Percept& percept, const Traits& traits);

// Follow-the-majority pull for panicked agents.
Vec2 occupant_attractive_force(Situation situation, Vec2 pos, const Percept& percept, const MotionParams& params);

Vec2 goal_attractive_force(Vec2 pos, Vec2 attractor, const MotionParams& params);

struct Body {
    int id = 0;
    Vec2 pos;
    double personal_space = 0.0;
    double influence = 0.0;
};

// Force on `i` from `j`. Psychological repulsion once the influence radii
// overlap, plus a contact spring once personal spaces overlap. Coincident
// bodies are pushed apart along a direction hashed from the id pair.
Vec2 occupant_repulsive_force(const Body& i, const Body& j, const MotionParams& params);

// The contact spring alone; acts whatever the direction of `j`.
Vec2 body_contact_force(const Body& i, const Body& j, const MotionParams& params);

// Whether the psychological repulsion of a neighbor applies to an agent
// heading for `goal`: it must be in view and no farther from the goal than the
// agent is. Without a goal every visible neighbor counts.
bool yields_to(Vec2 pos, const std::optional<Vec2>& goal, Vec2 other, bool visible);

// Unit vector for the (i, j) pair; negated for (j, i).
Vec2 coincident_direction(int i, int j);

Vec2 obstacle_repulsive_force(Vec2 pos, double personal_space, std::span<const SeenWall> walls,
                              const MotionParams& params);

struct AvoidanceTurn {
    Vec2 heading;       // overridden unit heading
    int threat_id = -1;
    double angle = 0.0; // signed rotation applied, rad
};

// Closest distance between two constant-velocity motions over [0, horizon].
double miss_distance(Vec2 pos_i, Vec2 vel_i, Vec2 pos_j, Vec2 vel_j, double horizon);

// Heading override when a visible neighbor inside the avoidance distance is on
// a collision course within the prediction horizon.
std::optional<AvoidanceTurn> rule_avoid(Vec2 pos, Vec2 vel, Vec2 heading, const Traits& traits,
                                        const Percept& percept, const MotionParams& params);

struct Kinematics {
    Vec2 pos;
    Vec2 vel;
    Vec2 heading{1.0, 0.0};
};

// Minimum clearance kept between a projected position and a blocking cell.
inline constexpr double kWallMargin = 1e-5;

// Moves `pos` out of blocking cells onto the nearest open point; the velocity
// component pointing into the wall is removed. Returns true if it had to act.
bool resolve_wall_penetration(const GridMap& map, Vec2 previous, Vec2& pos, Vec2& vel);

// Explicit Euler. The override rotates the updated velocity, the speed is then
// clamped to v_max, and the wall guard runs on the new position.
// Throws NonFiniteForce.
Kinematics integrate(const Kinematics& state, Vec2 force, const std::optional<Vec2>& heading_override, double dt,
                     double v_max, const MotionParams& params, const GridMap& map);

}  // namespace crowdsim
