#pragma once

// Sensing: uniform-grid neighbor index plus the forward field-of-view filter.

#include <cstdint>
#include <span>
#include <vector>

#include "crowdsim/agent.hpp"
#include "crowdsim/worldmap.hpp"

namespace crowdsim {

struct PerceptionParams {
    double sense_range = 5.0;        // m
    double fov_cos_threshold = 0.0;  // cos of the half-angle; 0 gives a 180 degree field
};

void validate(const PerceptionParams& params);

// Inclusive range predicate shared by the index and the brute-force reference.
inline bool within_range(Vec2 a, Vec2 b, double r) { return length_sq(a - b) <= r * r; }

// Agents bucketed by floor(position / cell_size). Evacuated agents are left out.
class SpatialIndex {
public:
    SpatialIndex() = default;

    double cell_size() const { return cell_size_; }
    std::uint64_t tick() const { return tick_; }
    std::size_t size() const { return slots_.size(); }

    // Appends the slots (positions in the indexed agent span) of every indexed
    // agent within r of p, ascending.
    void query(Vec2 p, double r, std::vector<std::size_t>& out) const;

    // Bucket coordinate that holds `slot`, for diagnostics and tests.
    CellCoord bucket_of(std::size_t slot) const;
    std::size_t bucket_population(CellCoord bucket) const;

    friend SpatialIndex rebuild_index(std::span<const Agent> agents, double index_cell_size, std::uint64_t tick);

private:
    CellCoord bucket_for(Vec2 p) const;

    double cell_size_ = 1.0;
    std::uint64_t tick_ = 0;
    int origin_x_ = 0;
    int origin_y_ = 0;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<std::uint32_t> bucket_start_;  // nx * ny + 1 offsets into slots_
    std::vector<std::size_t> slots_;           // grouped by bucket, ascending inside each
    std::vector<Vec2> positions_;              // by slot
    std::vector<std::uint32_t> bucket_of_slot_;
};

SpatialIndex rebuild_index(std::span<const Agent> agents, double index_cell_size, std::uint64_t tick = 0);

// O(n) scan over all live agents; the reference the index is checked against.
void brute_force_query(std::span<const Agent> agents, Vec2 p, double r, std::vector<std::size_t>& out);

// dot(heading, normalize(target - self)) > threshold, strictly.
// Throws DegenerateTarget when target and self coincide within 1e-9 m.
bool in_fov(Vec2 heading, Vec2 self_pos, Vec2 target_pos, double fov_cos_threshold = 0.0);

inline constexpr double kCoincidentEpsilon = 1e-9;

struct SeenAgent {
    int id = 0;
    std::size_t slot = 0;
    Vec2 position;
    Vec2 velocity;
    double distance = 0.0;
    double personal_space_radius = 0.0;
    double influence_radius = 0.0;
    Role role = Role::Independent;
    Situation situation = Situation::Calm;
    int room_id = 0;
};

struct SeenWall {
    CellCoord cell;
    Vec2 nearest;  // closest point of the cell square to the agent
    double distance = 0.0;
    bool obstacle = false;  // part of a free-standing obstacle rather than the building shell
};

struct SeenAttractor {
    int id = 0;
    double distance = 0.0;
};

struct Percept {
    std::vector<SeenAgent> visible_agents;      // ascending distance, then id
    std::vector<SeenWall> visible_walls;        // ascending distance, then row-major cell
    std::vector<SeenAttractor> visible_attractors;
    std::uint64_t snapshot_tick = 0;

    bool is_empty() const { return visible_agents.empty() && visible_walls.empty(); }
    // Nobody and no free-standing obstacle in view; building walls may be.
    bool is_clear() const;
};

// Builds the percept for agents[self] from candidate neighbor slots (any
// superset of the agents within sense range, as returned by an index query).
Percept perceive_candidates(std::size_t self, std::span<const Agent> agents, std::span<const std::size_t> candidates,
                            const World& world, const PerceptionParams& params, std::uint64_t snapshot_tick = 0);

Percept perceive(std::size_t self, std::span<const Agent> agents, const World& world, const SpatialIndex& index,
                 const PerceptionParams& params);

// Constant-velocity extrapolation.
inline Vec2 predict(Vec2 position, Vec2 velocity, double horizon) { return position + velocity * horizon; }

}  // namespace crowdsim
