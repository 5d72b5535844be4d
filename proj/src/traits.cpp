#include "crowdsim/traits.hpp"

#include <algorithm>
#include <cmath>

#include "crowdsim/error.hpp"

namespace crowdsim {

std::string_view to_string(PersonalSpace v) {
    switch (v) {
        case PersonalSpace::Narrow: return "Narrow";
        case PersonalSpace::Average: return "Average";
        case PersonalSpace::Broad: return "Broad";
    }
    return "?";
}

std::string_view to_string(Patience v) { return v == Patience::Patient ? "Patient" : "Impatient"; }

std::string_view to_string(Role v) {
    switch (v) {
        case Role::Guide: return "Guide";
        case Role::Follower: return "Follower";
        case Role::Independent: return "Independent";
    }
    return "?";
}

std::string_view to_string(Knowledge v) { return v == Knowledge::Complete ? "Complete" : "Partial"; }
std::string_view to_string(Situation v) { return v == Situation::Calm ? "Calm" : "Panic"; }

std::string_view to_string(GoalKind v) {
    switch (v) {
        case GoalKind::None: return "None";
        case GoalKind::Painting: return "Painting";
        case GoalKind::ExitPortal: return "ExitPortal";
        case GoalKind::FollowAgent: return "FollowAgent";
    }
    return "?";
}

double personal_space_radius(PersonalSpace cls) {
    switch (cls) {
        case PersonalSpace::Narrow: return 0.3;
        case PersonalSpace::Average: return 0.45;
        case PersonalSpace::Broad: return 0.6;
    }
    return 0.45;
}

Traits make_traits(PersonalSpace cls, Patience patience, Role role, Knowledge knowledge, double v_pref,
                   double v_max) {
    Traits t;
    t.personal_space_class = cls;
    t.personal_space_radius = personal_space_radius(cls);
    t.influence_radius = t.personal_space_radius + kInfluenceMargin;
    t.patience = patience;
    t.role = role;
    t.knowledge = knowledge;
    t.v_pref = v_pref;
    t.v_max = v_max;
    return t;
}

void validate(const Traits& t) {
    if (!(t.personal_space_radius > 0.0 && t.personal_space_radius <= t.influence_radius)) {
        throw Error(ErrorCode::SchemaError, "traits need 0 < personal_space_radius <= influence_radius");
    }
    if (!(t.v_pref > 0.0 && t.v_pref <= t.v_max) || !std::isfinite(t.v_max)) {
        throw Error(ErrorCode::SchemaError, "traits need 0 < v_pref <= v_max");
    }
}

bool PsychState::has_visited(int painting) const {
    return std::binary_search(visited_paintings.begin(), visited_paintings.end(), painting);
}

void PsychState::mark_visited(int painting) {
    const auto it = std::lower_bound(visited_paintings.begin(), visited_paintings.end(), painting);
    if (it == visited_paintings.end() || *it != painting) visited_paintings.insert(it, painting);
}

}  // namespace crowdsim
