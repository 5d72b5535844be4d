#include <algorithm>
#include <deque>
#include <queue>

#include "crowdsim/error.hpp"
#include "crowdsim/worldmap.hpp"

namespace crowdsim {

PathTable::PathTable(int room_count, std::vector<int> exit_portals, int alternatives)
    : room_count_(room_count), alternatives_(alternatives), exit_portals_(std::move(exit_portals)) {
    entries_.resize(static_cast<std::size_t>(room_count_) * exit_portals_.size());
}

std::size_t PathTable::slot(int room, int exit_portal) const {
    const auto it = std::find(exit_portals_.begin(), exit_portals_.end(), exit_portal);
    if (room < 1 || room > room_count_ || it == exit_portals_.end()) {
        throw Error(ErrorCode::OutOfBounds, "no path table entry for room " + std::to_string(room) +
                                                " and exit portal " + std::to_string(exit_portal));
    }
    return static_cast<std::size_t>(room - 1) * exit_portals_.size() +
           static_cast<std::size_t>(it - exit_portals_.begin());
}

const std::vector<PortalPath>& PathTable::paths(int room, int exit_portal) const {
    return entries_[slot(room, exit_portal)];
}

std::vector<PortalPath>& PathTable::mutable_paths(int room, int exit_portal) {
    return entries_[slot(room, exit_portal)];
}

double path_metric(const CellPortalGraph& graph, int room, const PortalPath& path) {
    double total = 0.0;
    Vec2 at = graph.room(room).centroid;
    for (int pid : path) {
        const Vec2 door = graph.portal_center(pid);
        total += distance(at, door);
        at = door;
    }
    return total;
}

namespace {

struct Partial {
    PortalPath portals;
    int room = 0;
    double metric = 0.0;
    Vec2 at;
    std::vector<bool> visited;  // rooms on the path, indexed by room id
};

// Orders the priority queue so the smallest (hops, metric, ids) pops first.
struct Later {
    bool operator()(const Partial& a, const Partial& b) const {
        if (a.portals.size() != b.portals.size()) return a.portals.size() > b.portals.size();
        if (a.metric != b.metric) return a.metric > b.metric;
        return a.portals > b.portals;
    }
};

bool reachable(const CellPortalGraph& graph, int from_room, int target_room) {
    std::vector<bool> seen(graph.rooms.size() + 1, false);
    std::deque<int> queue{from_room};
    seen[static_cast<std::size_t>(from_room)] = true;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        if (u == target_room) return true;
        for (int pid : graph.room(u).portals) {
            if (graph.portals[static_cast<std::size_t>(pid)].is_exit) continue;
            const int v = graph.other_side(pid, u);
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                queue.push_back(v);
            }
        }
    }
    return false;
}

// Best-first enumeration of loop-free room walks. Keys only grow when a path is
// extended, so complete paths leave the queue in key order.
std::vector<PortalPath> k_best_paths(const CellPortalGraph& graph, int room, int exit_portal,
                                     int alternatives) {
    std::vector<PortalPath> found;
    const Portal& exit = graph.portals[static_cast<std::size_t>(exit_portal)];
    if (alternatives <= 0 || !reachable(graph, room, exit.room_a)) return found;

    std::priority_queue<Partial, std::vector<Partial>, Later> open;
    Partial start;
    start.room = room;
    start.at = graph.room(room).centroid;
    start.visited.assign(graph.rooms.size() + 1, false);
    start.visited[static_cast<std::size_t>(room)] = true;
    open.push(std::move(start));

    while (!open.empty() && static_cast<int>(found.size()) < alternatives) {
        Partial cur = open.top();
        open.pop();
        if (!cur.portals.empty() && cur.portals.back() == exit_portal) {
            found.push_back(std::move(cur.portals));
            continue;
        }
        for (int pid : graph.room(cur.room).portals) {
            const Portal& p = graph.portals[static_cast<std::size_t>(pid)];
            if (p.is_exit && pid != exit_portal) continue;
            const int next = p.is_exit ? kOutsideRoom : graph.other_side(pid, cur.room);
            if (!p.is_exit && cur.visited[static_cast<std::size_t>(next)]) continue;
            Partial ext = cur;
            const Vec2 door = graph.portal_center(pid);
            ext.metric += distance(cur.at, door);
            ext.at = door;
            ext.portals.push_back(pid);
            ext.room = next;
            if (!p.is_exit) ext.visited[static_cast<std::size_t>(next)] = true;
            open.push(std::move(ext));
        }
    }
    return found;
}

}  // namespace

PathTable precompute_exit_paths(const CellPortalGraph& graph, int alternatives) {
    std::vector<int> exits;
    for (const Portal& p : graph.portals) {
        if (p.is_exit) exits.push_back(p.id);
    }
    if (exits.empty()) throw Error(ErrorCode::NoExits, "building has no exit portal");

    PathTable table(static_cast<int>(graph.rooms.size()), exits, alternatives);
    for (const RoomNode& room : graph.rooms) {
        for (int e : exits) table.mutable_paths(room.id, e) = k_best_paths(graph, room.id, e, alternatives);
    }
    return table;
}

}  // namespace crowdsim
