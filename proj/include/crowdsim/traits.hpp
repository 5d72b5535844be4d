#pragma once

// Socio-psychological state carried by every agent.

#include <string_view>
#include <vector>

#include "crowdsim/vec2.hpp"

namespace crowdsim {

enum class PersonalSpace { Narrow, Average, Broad };
enum class Patience { Patient, Impatient };
enum class Role { Guide, Follower, Independent };
enum class Knowledge { Complete, Partial };
enum class Situation { Calm, Panic };

std::string_view to_string(PersonalSpace v);
std::string_view to_string(Patience v);
std::string_view to_string(Role v);
std::string_view to_string(Knowledge v);
std::string_view to_string(Situation v);

inline constexpr double kDefaultPreferredSpeed = 1.34;  // m/s
inline constexpr double kDefaultMaxSpeed = 3.0;         // m/s
inline constexpr double kInfluenceMargin = 0.5;         // influence radius beyond personal space, m

double personal_space_radius(PersonalSpace cls);

struct Traits {
    PersonalSpace personal_space_class = PersonalSpace::Average;
    double personal_space_radius = 0.45;
    Patience patience = Patience::Patient;
    Role role = Role::Independent;
    Knowledge knowledge = Knowledge::Complete;
    double influence_radius = 0.95;
    double v_pref = kDefaultPreferredSpeed;
    double v_max = kDefaultMaxSpeed;

    bool operator==(const Traits&) const = default;
};

// Traits with radii resolved from the personal-space class.
Traits make_traits(PersonalSpace cls, Patience patience, Role role = Role::Independent,
                   Knowledge knowledge = Knowledge::Complete, double v_pref = kDefaultPreferredSpeed,
                   double v_max = kDefaultMaxSpeed);

// Throws SchemaError when the radius/speed orderings do not hold.
void validate(const Traits& traits);

enum class GoalKind { None, Painting, ExitPortal, FollowAgent };
std::string_view to_string(GoalKind v);

struct Goal {
    GoalKind kind = GoalKind::None;
    Vec2 target;         // E(t): the point the agent currently steers toward
    int target_id = -1;  // painting attractor, portal, or followed agent id

    bool operator==(const Goal&) const = default;
};

struct PsychState {
    Situation situation = Situation::Calm;
    Goal current_goal;
    std::vector<int> visited_paintings;  // attractor ids, ascending
    double impatience_timer = 0.0;       // seconds blocked; reserved
    double dwell_time = 0.0;             // seconds spent near the current painting
    int last_portal = -1;                // portal most recently stepped through

    bool has_visited(int painting) const;
    void mark_visited(int painting);

    bool operator==(const PsychState&) const = default;
};

}  // namespace crowdsim
