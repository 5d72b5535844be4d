#include "crowdsim/motion.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "crowdsim/error.hpp"
#include "crowdsim/psyche.hpp"

namespace crowdsim {

void validate(const MotionParams& p) {
    const double positive[] = {p.tau,   p.A_goal, p.B_goal, p.R_goal, p.A_rep, p.B_rep, p.k_body,
                               p.A_obs, p.B_obs,  p.A_flw,  p.r_1,    p.r_2,   p.mass,  p.delta_theta_small,
                               p.delta_theta_large};
    for (double v : positive) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::SchemaError, "motion parameters must be positive");
    }
    if (p.n_min < 1) throw Error(ErrorCode::SchemaError, "motion.n_min must be at least 1");
    if (!(p.r_1 < p.r_2)) throw Error(ErrorCode::SchemaError, "motion.r_1 must be below motion.r_2");
    if (!(p.delta_theta_small < p.delta_theta_large)) {
        throw Error(ErrorCode::SchemaError, "motion.delta_theta_small must be below motion.delta_theta_large");
    }
}

Vec2 advance_force(Vec2 pos, Vec2 vel, Vec2 goal, double target_speed, const MotionParams& params) {
    const Vec2 to_goal = goal - pos;
    const double d = length(to_goal);
    if (d < kArrivalRadius) return {};
    const Vec2 e = to_goal / d;
    return (e * target_speed - vel) * (params.mass / params.tau);
}

Vec2 braking_force(Vec2 vel, const MotionParams& params) { return vel * (-params.mass / params.tau); }

double acceleration_boost(Situation situation, const Percept& percept, const Traits& traits) {
    if (situation == Situation::Panic && percept.is_clear()) return traits.v_max;
    return desired_speed(traits, situation);
}

Vec2 occupant_attractive_force(Situation situation, Vec2 pos, const Percept& percept, const MotionParams& params) {
    if (situation != Situation::Panic) return {};
    Vec2 heading_sum;
    int count = 0;
    double nearest = std::numeric_limits<double>::infinity();
    for (const SeenAgent& s : percept.visible_agents) {
        const double d = distance(pos, s.position);
        if (d > params.r_2) continue;
        const double speed = length(s.velocity);
        if (speed <= kMovingSpeed) continue;
        heading_sum += s.velocity / speed;
        nearest = std::min(nearest, d);
        ++count;
    }
    if (count < params.n_min || nearest < params.r_1) return {};
    return normalized(heading_sum) * params.A_flw;
}

Vec2 goal_attractive_force(Vec2 pos, Vec2 attractor, const MotionParams& params) {
    const Vec2 to = attractor - pos;
    const double d = length(to);
    if (d < kArrivalRadius || d > params.R_goal) return {};
    return to / d * (params.A_goal * std::exp(-d / params.B_goal));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Vec2 coincident_direction(int i, int j) {
    const auto lo = static_cast<std::uint32_t>(std::min(i, j));
    const auto hi = static_cast<std::uint32_t>(std::max(i, j));
    const std::uint64_t h = splitmix64((static_cast<std::uint64_t>(lo) << 32) | hi);
    const double angle = static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
    const Vec2 u{std::cos(angle), std::sin(angle)};
    return i < j ? u : -u;
}

Vec2 occupant_repulsive_force(const Body& i, const Body& j, const MotionParams& params) {
    const Vec2 offset = i.pos - j.pos;
    const double d = length(offset);
    const double r_ij = i.influence + j.influence;
    if (d >= r_ij) return {};
    const Vec2 n = d < kCoincidentEpsilon ? coincident_direction(i.id, j.id) : offset / d;
    const double psych = params.A_rep * std::exp((r_ij - d) / params.B_rep);
    const double contact = params.k_body * std::max(0.0, i.personal_space + j.personal_space - d);
    return n * (psych + contact);
}

Vec2 body_contact_force(const Body& i, const Body& j, const MotionParams& params) {
    const Vec2 offset = i.pos - j.pos;
    const double d = length(offset);
    const double overlap = i.personal_space + j.personal_space - d;
    if (overlap <= 0.0) return {};
    const Vec2 n = d < kCoincidentEpsilon ? coincident_direction(i.id, j.id) : offset / d;
    return n * (params.k_body * overlap);
}

bool yields_to(Vec2 pos, const std::optional<Vec2>& goal, Vec2 other, bool visible) {
    if (!visible) return false;
    return !goal || length_sq(other - *goal) <= length_sq(pos - *goal);
}

Vec2 obstacle_repulsive_force(Vec2 pos, double personal_space, std::span<const SeenWall> walls,
                              const MotionParams& params) {
    Vec2 total;
    const double cutoff = personal_space + 3.0 * params.B_obs;
    for (const SeenWall& w : walls) {
        const Vec2 away = pos - w.nearest;
        const double d = length(away);
        if (d >= cutoff || d < kCoincidentEpsilon) continue;
        total += away / d * (params.A_obs * std::exp((personal_space - d) / params.B_obs));
    }
    return total;
}

double miss_distance(Vec2 pos_i, Vec2 vel_i, Vec2 pos_j, Vec2 vel_j, double horizon) {
    const Vec2 p = pos_j - pos_i;
    const Vec2 v = vel_j - vel_i;
    const double vv = length_sq(v);
    double t = 0.0;
    if (vv > 0.0) t = std::clamp(-dot(p, v) / vv, 0.0, horizon);
    return length(p + v * t);
}

std::optional<AvoidanceTurn> rule_avoid(Vec2 pos, Vec2 vel, Vec2 heading, const Traits& traits,
                                        const Percept& percept, const MotionParams& params) {
    const double speed = length(vel);
    if (speed < 1e-6) return std::nullopt;
    const double trigger = avoidance_distance(traits);
    const double horizon = trigger / speed;
    for (const SeenAgent& s : percept.visible_agents) {
        if (s.distance > trigger) break;
        const Vec2 rel_p = s.position - pos;
        const Vec2 rel_v = s.velocity - vel;
        if (dot(rel_p, rel_v) >= 0.0) continue;  // not closing in
        const double clearance = traits.personal_space_radius + s.personal_space_radius;
        if (miss_distance(pos, vel, s.position, s.velocity, horizon) >= clearance) continue;

        const double turn = traits.personal_space_class == PersonalSpace::Narrow ? params.delta_theta_small
                                                                                  : params.delta_theta_large;
        const Vec2 left = rotated(heading, turn);
        const Vec2 right = rotated(heading, -turn);
        const double miss_left = miss_distance(pos, left * speed, s.position, s.velocity, horizon);
        const double miss_right = miss_distance(pos, right * speed, s.position, s.velocity, horizon);
        if (miss_right > miss_left) return AvoidanceTurn{right, s.id, -turn};
        return AvoidanceTurn{left, s.id, turn};
    }
    return std::nullopt;
}

bool resolve_wall_penetration(const GridMap& map, Vec2 previous, Vec2& pos, Vec2& vel) {
    const double cs = map.cell_size;
    const int cx = static_cast<int>(std::floor(pos.x / cs));
    const int cy = static_cast<int>(std::floor(pos.y / cs));
    if (!blocks_motion(map, cx, cy)) return false;

    constexpr int kSearch = 2;
    double best = std::numeric_limits<double>::infinity();
    Vec2 target;
    for (int y = cy - kSearch; y <= cy + kSearch; ++y) {
        for (int x = cx - kSearch; x <= cx + kSearch; ++x) {
            if (blocks_motion(map, x, y)) continue;
            const Vec2 p{std::clamp(pos.x, x * cs + kWallMargin, (x + 1) * cs - kWallMargin),
                         std::clamp(pos.y, y * cs + kWallMargin, (y + 1) * cs - kWallMargin)};
            const double d = distance(p, pos);
            if (d < best) {
                best = d;
                target = p;
            }
        }
    }
    if (!std::isfinite(best)) {
        pos = previous;
        vel = {};
        return true;
    }
    const Vec2 into_wall = normalized(pos - target);
    const double vn = dot(vel, into_wall);
    if (vn > 0.0) vel -= into_wall * vn;
    pos = target;
    return true;
}

Kinematics integrate(const Kinematics& state, Vec2 force, const std::optional<Vec2>& heading_override, double dt,
                     double v_max, const MotionParams& params, const GridMap& map) {
    if (!is_finite(force)) throw Error(ErrorCode::NonFiniteForce, "force is not finite");
    Kinematics next;
    next.vel = state.vel + force * (dt / params.mass);
    double speed = length(next.vel);
    if (heading_override) next.vel = *heading_override * speed;
    if (speed > v_max) {
        next.vel *= v_max / speed;
        speed = v_max;
    }
    next.pos = state.pos + next.vel * dt;
    resolve_wall_penetration(map, state.pos, next.pos, next.vel);

    const double moved = length(next.vel);
    if (moved > 1e-9) {
        next.heading = next.vel / moved;
    } else if (heading_override) {
        next.heading = *heading_override;
    } else {
        next.heading = state.heading;
    }
    return next;
}

}  // namespace crowdsim
