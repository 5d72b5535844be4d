#include "crowdsim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "crowdsim/error.hpp"

namespace crowdsim {

void validate(const PerceptionParams& params) {
    if (!(params.sense_range > 0.0) || !std::isfinite(params.sense_range)) {
        throw Error(ErrorCode::SchemaError, "perception.sense_range must be positive");
    }
    if (!(params.fov_cos_threshold >= 0.0 && params.fov_cos_threshold < 1.0)) {
        throw Error(ErrorCode::SchemaError, "perception.fov_cos_threshold must lie in [0, 1)");
    }
}

CellCoord SpatialIndex::bucket_for(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_size_)), static_cast<int>(std::floor(p.y / cell_size_))};
}

SpatialIndex rebuild_index(std::span<const Agent> agents, double index_cell_size, std::uint64_t tick) {
    SpatialIndex idx;
    idx.cell_size_ = index_cell_size;
    idx.tick_ = tick;
    idx.positions_.resize(agents.size());

    int min_x = std::numeric_limits<int>::max();
    int min_y = std::numeric_limits<int>::max();
    int max_x = std::numeric_limits<int>::min();
    int max_y = std::numeric_limits<int>::min();
    std::size_t live = 0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        idx.positions_[i] = agents[i].pos;
        if (!agents[i].live()) continue;
        const CellCoord b = idx.bucket_for(agents[i].pos);
        min_x = std::min(min_x, b.x);
        min_y = std::min(min_y, b.y);
        max_x = std::max(max_x, b.x);
        max_y = std::max(max_y, b.y);
        ++live;
    }
    idx.bucket_of_slot_.assign(agents.size(), std::numeric_limits<std::uint32_t>::max());
    if (live == 0) {
        idx.bucket_start_.assign(1, 0);
        return idx;
    }
    idx.origin_x_ = min_x;
    idx.origin_y_ = min_y;
    idx.nx_ = max_x - min_x + 1;
    idx.ny_ = max_y - min_y + 1;
    const std::size_t buckets = static_cast<std::size_t>(idx.nx_) * static_cast<std::size_t>(idx.ny_);

    // Counting sort by bucket; slots stay ascending within a bucket.
    idx.bucket_start_.assign(buckets + 1, 0);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (!agents[i].live()) continue;
        const CellCoord b = idx.bucket_for(agents[i].pos);
        const auto flat = static_cast<std::uint32_t>((b.y - min_y) * idx.nx_ + (b.x - min_x));
        idx.bucket_of_slot_[i] = flat;
        ++idx.bucket_start_[flat + 1];
    }
    for (std::size_t b = 0; b < buckets; ++b) idx.bucket_start_[b + 1] += idx.bucket_start_[b];
    idx.slots_.resize(live);
    std::vector<std::uint32_t> fill(idx.bucket_start_.begin(), idx.bucket_start_.end() - 1);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (!agents[i].live()) continue;
        idx.slots_[fill[idx.bucket_of_slot_[i]]++] = i;
    }
    return idx;
}

void SpatialIndex::query(Vec2 p, double r, std::vector<std::size_t>& out) const {
    if (slots_.empty()) return;
    const CellCoord lo = bucket_for({p.x - r, p.y - r});
    const CellCoord hi = bucket_for({p.x + r, p.y + r});
    const int x0 = std::max(lo.x - origin_x_, 0);
    const int y0 = std::max(lo.y - origin_y_, 0);
    const int x1 = std::min(hi.x - origin_x_, nx_ - 1);
    const int y1 = std::min(hi.y - origin_y_, ny_ - 1);
    const std::size_t first = out.size();
    for (int by = y0; by <= y1; ++by) {
        for (int bx = x0; bx <= x1; ++bx) {
            const auto flat = static_cast<std::size_t>(by * nx_ + bx);
            for (auto k = bucket_start_[flat]; k < bucket_start_[flat + 1]; ++k) {
                const std::size_t slot = slots_[k];
                if (within_range(positions_[slot], p, r)) out.push_back(slot);
            }
        }
    }
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

CellCoord SpatialIndex::bucket_of(std::size_t slot) const {
    const auto flat = bucket_of_slot_.at(slot);
    if (flat == std::numeric_limits<std::uint32_t>::max()) return {std::numeric_limits<int>::min(), 0};
    return {static_cast<int>(flat) % nx_ + origin_x_, static_cast<int>(flat) / nx_ + origin_y_};
}

std::size_t SpatialIndex::bucket_population(CellCoord bucket) const {
    const int bx = bucket.x - origin_x_;
    const int by = bucket.y - origin_y_;
    if (bx < 0 || by < 0 || bx >= nx_ || by >= ny_) return 0;
    const auto flat = static_cast<std::size_t>(by * nx_ + bx);
    return bucket_start_[flat + 1] - bucket_start_[flat];
}

void brute_force_query(std::span<const Agent> agents, Vec2 p, double r, std::vector<std::size_t>& out) {
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].live() && within_range(agents[i].pos, p, r)) out.push_back(i);
    }
}

bool in_fov(Vec2 heading, Vec2 self_pos, Vec2 target_pos, double fov_cos_threshold) {
    const Vec2 offset = target_pos - self_pos;
    const double len = length(offset);
    if (len < kCoincidentEpsilon) throw Error(ErrorCode::DegenerateTarget, "FOV target coincides with the observer");
    // Scaling the threshold instead of normalizing the offset keeps the sign of
    // the dot product exact at the boundary.
    return dot(heading, offset) > fov_cos_threshold * len;
}

namespace {

bool visible_point(Vec2 heading, Vec2 self, Vec2 target, double d, const PerceptionParams& params) {
    return d >= kCoincidentEpsilon && d <= params.sense_range &&
           dot(heading, target - self) > params.fov_cos_threshold * d;
}

}  // namespace

bool Percept::is_clear() const {
    return visible_agents.empty() &&
           std::none_of(visible_walls.begin(), visible_walls.end(), [](const SeenWall& w) { return w.obstacle; });
}

Percept perceive_candidates(std::size_t self, std::span<const Agent> agents, std::span<const std::size_t> candidates,
                            const World& world, const PerceptionParams& params, std::uint64_t snapshot_tick) {
    Percept out;
    out.snapshot_tick = snapshot_tick;
    const Agent& me = agents[self];
    const GridMap& map = world.map();

    struct Key {
        double distance;
        int id;
        std::size_t slot;
    };
    std::vector<Key> keys;
    keys.reserve(candidates.size());
    for (std::size_t slot : candidates) {
        if (slot == self) continue;
        const Agent& other = agents[slot];
        if (!other.live()) continue;
        const double d = distance(me.pos, other.pos);
        if (!visible_point(me.heading, me.pos, other.pos, d, params)) continue;
        keys.push_back({d, other.id, slot});
    }
    std::sort(keys.begin(), keys.end(),
              [](const Key& a, const Key& b) { return std::tie(a.distance, a.id) < std::tie(b.distance, b.id); });
    out.visible_agents.reserve(keys.size());
    for (const Key& k : keys) {
        const Agent& other = agents[k.slot];
        out.visible_agents.push_back({other.id, k.slot, other.pos, other.vel, k.distance, other.traits.personal_space_radius,
                                      other.traits.influence_radius, other.traits.role, other.psych.situation,
                                      other.room_id});
    }

    const double cs = map.cell_size;
    const double r = params.sense_range;
    const int x0 = std::max(0, static_cast<int>(std::floor((me.pos.x - r) / cs)));
    const int y0 = std::max(0, static_cast<int>(std::floor((me.pos.y - r) / cs)));
    const int x1 = std::min(map.width - 1, static_cast<int>(std::floor((me.pos.x + r) / cs)));
    const int y1 = std::min(map.height - 1, static_cast<int>(std::floor((me.pos.y + r) / cs)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (map.at(x, y) != RawCell::Wall) continue;
            const Vec2 nearest{std::clamp(me.pos.x, x * cs, (x + 1) * cs), std::clamp(me.pos.y, y * cs, (y + 1) * cs)};
            const double d = distance(me.pos, nearest);
            if (!visible_point(me.heading, me.pos, nearest, d, params)) continue;
            out.visible_walls.push_back({{x, y}, nearest, d, world.obstacle_cell[map.index(x, y)] != 0});
        }
    }
    // Scan order is row-major, so a stable sort leaves equidistant cells in that order.
    std::stable_sort(out.visible_walls.begin(), out.visible_walls.end(),
                     [](const SeenWall& a, const SeenWall& b) { return a.distance < b.distance; });

    for (const Attractor& a : world.attractors) {
        const double d = distance(me.pos, a.position);
        if (!visible_point(me.heading, me.pos, a.position, d, params)) continue;
        out.visible_attractors.push_back({a.id, d});
    }
    std::stable_sort(out.visible_attractors.begin(), out.visible_attractors.end(),
                     [](const SeenAttractor& a, const SeenAttractor& b) { return a.distance < b.distance; });
    return out;
}

Percept perceive(std::size_t self, std::span<const Agent> agents, const World& world, const SpatialIndex& index,
                 const PerceptionParams& params) {
    std::vector<std::size_t> candidates;
    index.query(agents[self].pos, params.sense_range, candidates);
    return perceive_candidates(self, agents, candidates, world, params, index.tick());
}

}  // namespace crowdsim
