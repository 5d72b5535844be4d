#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "crowdsim/simulation.hpp"

namespace crowdsim {

Metrics compute_metrics(const TrajectoryLog& log, const World& world, double dt) {
    Metrics m;
    m.population = log.population;
    m.rule_avoid_triggers = log.rule_avoid_triggers;
    m.evacuation_time.assign(static_cast<std::size_t>(log.population), std::nullopt);

    std::map<int, std::vector<std::int64_t>> exits_by_portal;
    for (const Portal& p : world.graph.portals) {
        if (p.is_exit) exits_by_portal[p.id];
    }
    for (const Event& e : log.events) {
        if (e.kind != EventKind::Evacuated) continue;
        if (e.agent_id >= 0 && e.agent_id < log.population) {
            m.evacuation_time[static_cast<std::size_t>(e.agent_id)] = static_cast<double>(e.tick) * dt;
        }
        ++m.total_evacuated;
        exits_by_portal[e.portal_id].push_back(e.tick);
    }

    const double duration = static_cast<double>(log.ticks) * dt;
    const auto window = std::max<std::int64_t>(1, std::llround(1.0 / dt));
    for (auto& [portal, ticks] : exits_by_portal) {
        ExitFlow flow;
        flow.portal_id = portal;
        flow.evacuated = static_cast<int>(ticks.size());
        if (duration > 0.0) flow.mean_flow = flow.evacuated / duration;
        std::sort(ticks.begin(), ticks.end());
        std::size_t lo = 0;
        for (std::size_t hi = 0; hi < ticks.size(); ++hi) {
            while (ticks[hi] - ticks[lo] >= window) ++lo;
            flow.max_flow = std::max(flow.max_flow, static_cast<double>(hi - lo + 1) / (window * dt));
        }
        m.exit_flows.push_back(flow);
    }

    const GridMap& map = world.map();
    const double cell_area = map.cell_size * map.cell_size;
    const double exit_area = 0.5 * std::numbers::pi * kExitDensityRadius * kExitDensityRadius;
    std::vector<Vec2> exit_centers;
    for (const Portal& p : world.graph.portals) {
        if (p.is_exit) exit_centers.push_back(world.graph.portal_center(p.id));
    }

    std::vector<int> occupancy(map.cells.size(), 0);
    std::vector<int> near_exit(exit_centers.size(), 0);
    std::vector<std::size_t> touched;
    auto flush = [&] {
        for (std::size_t c : touched) {
            m.peak_density = std::max(m.peak_density, occupancy[c] / cell_area);
            occupancy[c] = 0;
        }
        touched.clear();
        for (int& n : near_exit) {
            m.peak_exit_density = std::max(m.peak_exit_density, n / exit_area);
            n = 0;
        }
    };
    std::int64_t current = log.records.empty() ? 0 : log.records.front().tick;
    for (const TrajectoryRecord& r : log.records) {
        if (r.tick != current) {
            flush();
            current = r.tick;
        }
        if (const auto c = try_cell_at(r.pos, map)) {
            const std::size_t idx = map.index(c->x, c->y);
            if (occupancy[idx]++ == 0) touched.push_back(idx);
        }
        for (std::size_t e = 0; e < exit_centers.size(); ++e) {
            if (within_range(r.pos, exit_centers[e], kExitDensityRadius)) ++near_exit[e];
        }
    }
    flush();
    return m;
}

}  // namespace crowdsim
