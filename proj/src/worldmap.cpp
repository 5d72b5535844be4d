#include "crowdsim/worldmap.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "crowdsim/error.hpp"

namespace crowdsim {

namespace {

constexpr std::string_view kCellSizeKey = "cellsize=";

std::string coord_str(int x, int y) {
    return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

double parse_cell_size(std::string_view value) {
    std::string owned(value);
    std::size_t used = 0;
    double cs = 0.0;
    try {
        cs = std::stod(owned, &used);
    } catch (const std::exception&) {
        throw Error(ErrorCode::UnknownGlyph, "malformed cellsize header '" + owned + "'");
    }
    if (used != owned.size() || !(cs > 0.0) || !std::isfinite(cs)) {
        throw Error(ErrorCode::UnknownGlyph, "malformed cellsize header '" + owned + "'");
    }
    return cs;
}

}  // namespace

char glyph_of(RawCell cell) {
    switch (cell) {
        case RawCell::Wall: return '#';
        case RawCell::Free: return '.';
        case RawCell::Door: return 'D';
        case RawCell::ExitDoor: return 'E';
        case RawCell::Painting: return 'P';
    }
    return '?';
}

GridMap parse_grid(std::string_view text) {
    GridMap map;
    if (text.starts_with(kCellSizeKey)) {
        const auto eol = text.find('\n');
        const auto header = text.substr(0, eol);
        map.cell_size = parse_cell_size(header.substr(kCellSizeKey.size()));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    }
    if (text.empty()) throw Error(ErrorCode::TooSmall, "map text is empty");

    // A single trailing newline terminates the last row.
    if (text.back() == '\n') text.remove_suffix(1);

    int row = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto eol = text.find('\n', start);
        const auto line = text.substr(start, eol == std::string_view::npos ? std::string_view::npos : eol - start);
        if (row == 0) {
            map.width = static_cast<int>(line.size());
        } else if (static_cast<int>(line.size()) != map.width) {
            throw Error(ErrorCode::RaggedInput, "row " + std::to_string(row) + " has " + std::to_string(line.size()) +
                                                    " cells, expected " + std::to_string(map.width));
        }
        for (std::size_t col = 0; col < line.size(); ++col) {
            RawCell cell{};
            switch (line[col]) {
                case '#': cell = RawCell::Wall; break;
                case '.': cell = RawCell::Free; break;
                case 'D': cell = RawCell::Door; break;
                case 'E': cell = RawCell::ExitDoor; break;
                case 'P': cell = RawCell::Painting; break;
                default: {
                    const auto c = static_cast<unsigned char>(line[col]);
                    throw Error(ErrorCode::UnknownGlyph, "glyph 0x" + [&] {
                        std::ostringstream os;
                        os << std::hex << static_cast<int>(c);
                        return os.str();
                    }() + " at " + coord_str(static_cast<int>(col), row));
                }
            }
            map.cells.push_back(cell);
        }
        ++row;
        if (eol == std::string_view::npos) break;
        start = eol + 1;
    }
    map.height = row;
    if (map.width < 3 || map.height < 3) {
        throw Error(ErrorCode::TooSmall,
                    "map is " + std::to_string(map.width) + "x" + std::to_string(map.height) + ", minimum 3x3");
    }
    return map;
}

std::string serialize_grid(const GridMap& map) {
    std::string out;
    if (map.cell_size != kDefaultCellSize) {
        std::ostringstream os;
        os.precision(17);
        os << kCellSizeKey << map.cell_size << '\n';
        out = os.str();
    }
    out.reserve(out.size() + map.cells.size() + static_cast<std::size_t>(map.height));
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) out.push_back(glyph_of(map.at(x, y)));
        out.push_back('\n');
    }
    return out;
}

bool blocks_motion(const GridMap& map, int x, int y) {
    if (!map.in_bounds(x, y)) return true;
    const RawCell c = map.at(x, y);
    return c == RawCell::Wall || c == RawCell::Painting;
}

LabeledGrid label_rooms(const GridMap& map) {
    LabeledGrid lg;
    lg.map = map;
    lg.labels.assign(map.cells.size(), kWallLabel);
    for (std::size_t i = 0; i < map.cells.size(); ++i) {
        const RawCell c = map.cells[i];
        if (c == RawCell::Door || c == RawCell::ExitDoor) lg.labels[i] = kDoorLabel;
    }

    constexpr std::array<CellCoord, 4> kSteps{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
    std::deque<CellCoord> frontier;
    int next_id = 0;
    // Seeds are taken in row-major order, so the first room is the one holding
    // the top-left-most free cell.
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const auto seed = map.index(x, y);
            if (map.cells[seed] != RawCell::Free || lg.labels[seed] != kWallLabel) continue;
            ++next_id;
            lg.labels[seed] = next_id;
            frontier.push_back({x, y});
            while (!frontier.empty()) {
                const CellCoord c = frontier.front();
                frontier.pop_front();
                for (const auto& s : kSteps) {
                    const int nx = c.x + s.x;
                    const int ny = c.y + s.y;
                    if (!map.in_bounds(nx, ny)) continue;
                    const auto ni = map.index(nx, ny);
                    if (map.cells[ni] != RawCell::Free || lg.labels[ni] != kWallLabel) continue;
                    lg.labels[ni] = next_id;
                    frontier.push_back({nx, ny});
                }
            }
        }
    }
    if (next_id == 0) throw Error(ErrorCode::NoFreeCells, "map has no free cell");
    lg.room_count = next_id;
    return lg;
}

int CellPortalGraph::other_side(int portal, int room) const {
    const Portal& p = portals[static_cast<std::size_t>(portal)];
    if (p.room_a == room) return p.room_b;
    if (p.room_b == room) return p.room_a;
    return -1;
}

Vec2 CellPortalGraph::portal_center(int portal) const {
    const CellCoord c = portals[static_cast<std::size_t>(portal)].cell;
    return {(c.x + 0.5) * cell_size, (c.y + 0.5) * cell_size};
}

namespace {

// How one door cell connects the rooms around it.
struct DoorClass {
    enum Kind { Portal, SameRoom, Unconnected } kind = Unconnected;
    int room_a = 0;
    int room_b = 0;
    bool is_exit = false;
    CellCoord toward_b;

    bool joins_same(const DoorClass& o) const {
        return kind == Portal && o.kind == Portal && room_a == o.room_a && room_b == o.room_b &&
               is_exit == o.is_exit && toward_b == o.toward_b;
    }
};

// Label of the neighbor, or nullopt for the grid boundary.
std::optional<int> side_label(const LabeledGrid& lg, int x, int y) {
    if (!lg.map.in_bounds(x, y)) return std::nullopt;
    return lg.label(x, y);
}

DoorClass classify_door(const LabeledGrid& lg, int x, int y) {
    const bool exit_door = lg.map.at(x, y) == RawCell::ExitDoor;
    // Axis 0 is north/south, axis 1 is west/east; `lo` is the north or west side.
    constexpr std::array<CellCoord, 2> kAxes{{{0, 1}, {1, 0}}};
    std::vector<DoorClass> qualifying;
    bool any_room = false;
    bool same_room = false;
    for (const auto& axis : kAxes) {
        const auto lo = side_label(lg, x - axis.x, y - axis.y);
        const auto hi = side_label(lg, x + axis.x, y + axis.y);
        const bool lo_room = lo && *lo > 0;
        const bool hi_room = hi && *hi > 0;
        any_room = any_room || lo_room || hi_room;
        if (exit_door) {
            const bool lo_closed = !lo || *lo == kWallLabel;
            const bool hi_closed = !hi || *hi == kWallLabel;
            if (lo_room && hi_closed) {
                qualifying.push_back({DoorClass::Portal, *lo, kOutsideRoom, true, axis});
            } else if (hi_room && lo_closed) {
                qualifying.push_back({DoorClass::Portal, *hi, kOutsideRoom, true, {-axis.x, -axis.y}});
            } else if (lo_room && hi_room && *lo == *hi) {
                same_room = true;
            }
        } else if (lo_room && hi_room) {
            if (*lo == *hi) {
                same_room = true;
            } else if (*lo < *hi) {
                qualifying.push_back({DoorClass::Portal, *lo, *hi, false, axis});
            } else {
                qualifying.push_back({DoorClass::Portal, *hi, *lo, false, {-axis.x, -axis.y}});
            }
        }
    }
    if (qualifying.size() > 1) {
        throw Error(ErrorCode::AmbiguousDoor, "door at " + coord_str(x, y) + " connects rooms along both axes");
    }
    if (qualifying.size() == 1) return qualifying.front();
    if (!any_room) throw Error(ErrorCode::DanglingDoor, "door at " + coord_str(x, y) + " touches no room");
    DoorClass dc;
    dc.kind = same_room ? DoorClass::SameRoom : DoorClass::Unconnected;
    return dc;
}

}  // namespace

CellPortalGraph build_portal_graph(const LabeledGrid& lg) {
    const GridMap& map = lg.map;
    CellPortalGraph g;
    g.cell_size = map.cell_size;
    g.rooms.resize(static_cast<std::size_t>(lg.room_count));
    for (int id = 1; id <= lg.room_count; ++id) g.rooms[static_cast<std::size_t>(id - 1)].id = id;

    std::vector<Vec2> centroid_sum(g.rooms.size());
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const int l = lg.label(x, y);
            if (l <= 0) continue;
            auto& room = g.rooms[static_cast<std::size_t>(l - 1)];
            room.cells.push_back({x, y});
            centroid_sum[static_cast<std::size_t>(l - 1)] += map.cell_center({x, y});
        }
    }
    for (std::size_t r = 0; r < g.rooms.size(); ++r) {
        g.rooms[r].centroid = centroid_sum[r] / static_cast<double>(g.rooms[r].cells.size());
    }

    // Classify every door cell in row-major scan order.
    std::vector<std::optional<DoorClass>> cls(map.cells.size());
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            if (lg.label(x, y) != kDoorLabel) continue;
            DoorClass dc = classify_door(lg, x, y);
            if (dc.kind == DoorClass::SameRoom) {
                g.warnings.push_back("door at " + coord_str(x, y) + " has the same room on both sides; dropped");
            } else if (dc.kind == DoorClass::Unconnected) {
                g.warnings.push_back("door at " + coord_str(x, y) + " does not join two rooms; dropped");
            }
            cls[map.index(x, y)] = dc;
        }
    }

    // Merge collinear runs: neighbors along the door line (perpendicular to the
    // crossing direction) that join the same rooms the same way.
    std::vector<int> owner(map.cells.size(), -1);
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const auto i = map.index(x, y);
            if (!cls[i] || cls[i]->kind != DoorClass::Portal || owner[i] >= 0) continue;
            const DoorClass& dc = *cls[i];
            Portal p;
            p.id = static_cast<int>(g.portals.size());
            p.room_a = dc.room_a;
            p.room_b = dc.room_b;
            p.is_exit = dc.is_exit;
            p.toward_b = dc.toward_b;
            const CellCoord along{std::abs(dc.toward_b.y), std::abs(dc.toward_b.x)};
            // Row-major scan guarantees (x, y) is the first cell of its run.
            for (CellCoord c{x, y}; map.in_bounds(c.x, c.y); c = {c.x + along.x, c.y + along.y}) {
                const auto ci = map.index(c.x, c.y);
                if (!cls[ci] || !cls[ci]->joins_same(dc) || owner[ci] >= 0) break;
                owner[ci] = p.id;
                p.cells.push_back(c);
            }
            p.cell = p.cells[(p.cells.size() - 1) / 2];
            g.portals.push_back(std::move(p));
        }
    }
    for (const Portal& p : g.portals) {
        g.rooms[static_cast<std::size_t>(p.room_a - 1)].portals.push_back(p.id);
        if (!p.is_exit) g.rooms[static_cast<std::size_t>(p.room_b - 1)].portals.push_back(p.id);
    }
    return g;
}

std::vector<Attractor> place_attractors(const LabeledGrid& lg, const CellPortalGraph& graph) {
    const GridMap& map = lg.map;
    std::vector<Attractor> out;
    for (const Portal& p : graph.portals) {
        const CellCoord a_side{p.cell.x - p.toward_b.x, p.cell.y - p.toward_b.y};
        Attractor a;
        a.id = static_cast<int>(out.size());
        a.position = map.cell_center(a_side);
        a.kind = AttractorKind::DoorPoint;
        a.room_id = p.room_a;
        a.is_exit = p.is_exit;
        a.portal_id = p.id;
        a.source = p.cell;
        out.push_back(a);
        if (!p.is_exit) {
            const CellCoord b_side{p.cell.x + p.toward_b.x, p.cell.y + p.toward_b.y};
            a.id = static_cast<int>(out.size());
            a.position = map.cell_center(b_side);
            a.room_id = p.room_b;
            out.push_back(a);
        }
    }
    constexpr std::array<CellCoord, 4> kSteps{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            if (map.at(x, y) != RawCell::Painting) continue;
            std::optional<CellCoord> spot;
            for (const auto& s : kSteps) {
                if (map.in_bounds(x + s.x, y + s.y) && lg.label(x + s.x, y + s.y) > 0) {
                    spot = CellCoord{x + s.x, y + s.y};
                    break;
                }
            }
            if (!spot) throw Error(ErrorCode::OrphanPainting, "painting at " + coord_str(x, y) + " faces no free cell");
            Attractor a;
            a.id = static_cast<int>(out.size());
            a.position = map.cell_center(*spot);
            a.kind = AttractorKind::PaintingPoint;
            a.room_id = lg.label(spot->x, spot->y);
            a.source = {x, y};
            out.push_back(a);
        }
    }
    return out;
}

std::optional<CellCoord> try_cell_at(Vec2 pos, const GridMap& map) noexcept {
    const double fx = std::floor(pos.x / map.cell_size);
    const double fy = std::floor(pos.y / map.cell_size);
    if (!(fx >= 0.0 && fy >= 0.0 && fx < map.width && fy < map.height)) return std::nullopt;
    return CellCoord{static_cast<int>(fx), static_cast<int>(fy)};
}

CellHit cell_at(Vec2 pos, const LabeledGrid& lg) {
    const auto c = try_cell_at(pos, lg.map);
    if (!c) {
        std::ostringstream os;
        os << "position (" << pos.x << ", " << pos.y << ") lies outside the grid";
        throw Error(ErrorCode::OutOfBounds, os.str());
    }
    return {*c, lg.label(c->x, c->y)};
}

int World::next_portal(int from_room, int to_room) const {
    const int n = room_count();
    if (from_room < 1 || to_room < 1 || from_room > n || to_room > n) return -1;
    return route_table[static_cast<std::size_t>(from_room - 1) * static_cast<std::size_t>(n) +
                       static_cast<std::size_t>(to_room - 1)];
}

int World::door_point(int portal, int room) const {
    for (int id : portal_attractors[static_cast<std::size_t>(portal)]) {
        if (attractors[static_cast<std::size_t>(id)].room_id == room) return id;
    }
    return -1;
}

World compile_world(const GridMap& map, int alternatives) {
    World w;
    w.grid = label_rooms(map);
    w.graph = build_portal_graph(w.grid);
    w.attractors = place_attractors(w.grid, w.graph);
    w.paths = precompute_exit_paths(w.graph, alternatives);

    w.portal_of_cell.assign(map.cells.size(), -1);
    w.portal_attractors.resize(w.graph.portals.size());
    for (const Portal& p : w.graph.portals) {
        for (const CellCoord& c : p.cells) w.portal_of_cell[map.index(c.x, c.y)] = p.id;
    }
    for (const Attractor& a : w.attractors) {
        if (a.kind == AttractorKind::DoorPoint) {
            w.portal_attractors[static_cast<std::size_t>(a.portal_id)].push_back(a.id);
        } else {
            w.painting_attractors.push_back(a.id);
        }
        w.graph.rooms[static_cast<std::size_t>(a.room_id - 1)].attractors.push_back(a.id);
    }

    // Room-to-room first hops by BFS over interior portals, lowest portal id first.
    const int n = w.grid.room_count;
    w.route_table.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
    std::vector<int> first(static_cast<std::size_t>(n + 1));
    std::deque<int> queue;
    for (int src = 1; src <= n; ++src) {
        std::fill(first.begin(), first.end(), -2);
        first[static_cast<std::size_t>(src)] = -1;
        queue.assign(1, src);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int pid : w.graph.room(u).portals) {
                const Portal& p = w.graph.portals[static_cast<std::size_t>(pid)];
                if (p.is_exit) continue;
                const int v = w.graph.other_side(pid, u);
                if (first[static_cast<std::size_t>(v)] != -2) continue;
                first[static_cast<std::size_t>(v)] = u == src ? pid : first[static_cast<std::size_t>(u)];
                queue.push_back(v);
            }
        }
        for (int dst = 1; dst <= n; ++dst) {
            const int f = first[static_cast<std::size_t>(dst)];
            w.route_table[static_cast<std::size_t>(src - 1) * static_cast<std::size_t>(n) +
                          static_cast<std::size_t>(dst - 1)] = f >= 0 ? f : -1;
        }
    }

    // Blocking components, 8-connected; those touching the border are building walls.
    w.obstacle_cell.assign(map.cells.size(), 0);
    std::vector<char> seen(map.cells.size(), 0);
    std::vector<CellCoord> component;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            if (seen[map.index(x, y)] || !blocks_motion(map, x, y)) continue;
            component.assign(1, {x, y});
            seen[map.index(x, y)] = 1;
            bool border = false;
            for (std::size_t head = 0; head < component.size(); ++head) {
                const CellCoord c = component[head];
                border = border || c.x == 0 || c.y == 0 || c.x == map.width - 1 || c.y == map.height - 1;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = c.x + dx;
                        const int ny = c.y + dy;
                        if (!map.in_bounds(nx, ny) || seen[map.index(nx, ny)] || !blocks_motion(map, nx, ny)) continue;
                        seen[map.index(nx, ny)] = 1;
                        component.push_back({nx, ny});
                    }
                }
            }
            if (border) continue;
            for (const CellCoord& c : component) w.obstacle_cell[map.index(c.x, c.y)] = 1;
        }
    }

    w.room_nearest_exit.assign(static_cast<std::size_t>(n), -1);
    for (int room = 1; room <= n; ++room) {
        std::size_t best_hops = 0;
        double best_metric = 0.0;
        for (int e : w.paths.exit_portals()) {
            const auto& paths = w.paths.paths(room, e);
            if (paths.empty()) continue;
            const std::size_t hops = paths.front().size();
            const double metric = path_metric(w.graph, room, paths.front());
            int& slot = w.room_nearest_exit[static_cast<std::size_t>(room - 1)];
            if (slot < 0 || std::tie(hops, metric) < std::tie(best_hops, best_metric)) {
                slot = e;
                best_hops = hops;
                best_metric = metric;
            }
        }
    }
    return w;
}

}  // namespace crowdsim
