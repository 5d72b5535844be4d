#pragma once

// Seeded input generators and brute-force oracles shared by the unit tests and
// the acceptance runner. Nothing here calls into the code under test except to
// read plain data back.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "crowdsim/error.hpp"
#include "crowdsim/worldmap.hpp"

namespace testing {

using namespace crowdsim;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return real(0.0, 1.0) < p; }
    Vec2 point(double lo, double hi) { return {real(lo, hi), real(lo, hi)}; }
    Vec2 unit() {
        const double a = real(0.0, 6.283185307179586);
        return {std::cos(a), std::sin(a)};
    }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline std::string to_text(const std::vector<std::string>& rows, double cell_size = kDefaultCellSize) {
    std::string s;
    if (cell_size != kDefaultCellSize) s = "cellsize=" + std::to_string(cell_size) + "\n";
    for (const auto& r : rows) s += r + "\n";
    return s;
}

// Walled rectangle with an exit on the east wall at row `exit_row`.
inline std::vector<std::string> box(int w, int h, int exit_row = -1) {
    std::vector<std::string> rows(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), '.'));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) rows[y][x] = '#';
        }
    }
    if (exit_row >= 0) rows[exit_row][w - 1] = 'E';
    return rows;
}

// Glyph soup: any mix of cells, including ones that fail portal classification.
inline std::vector<std::string> random_soup(Gen& g, int w, int h) {
    std::vector<std::string> rows(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), '.'));
    for (auto& r : rows) {
        for (char& c : r) {
            const double u = g.real(0.0, 1.0);
            c = u < 0.55 ? '.' : u < 0.85 ? '#' : u < 0.95 ? 'D' : 'E';
        }
    }
    rows[static_cast<std::size_t>(g.integer(0, h - 1))][static_cast<std::size_t>(g.integer(0, w - 1))] = '.';
    return rows;
}

// Building: outer wall, full-length interior wall lines splitting it into a
// grid of rooms, doors through the lines, exits on the outer wall and a few
// free-standing pillars.
struct BuildingSpec {
    int width = 20;
    int height = 20;
    int max_splits = 2;       // interior lines per axis
    double door_chance = 0.7; // per wall segment between two rooms
    double wide_door = 0.3;   // chance a door spans two cells
    double exit_chance = 0.3; // per outer wall segment
    double pillar_chance = 0.02;
};

inline std::vector<std::string> random_building(Gen& g, const BuildingSpec& spec) {
    const int w = spec.width;
    const int h = spec.height;
    auto rows = box(w, h);
    auto pick_lines = [&](int extent) {
        std::vector<int> lines{0};
        const int n = g.integer(0, spec.max_splits);
        for (int k = 0; k < n; ++k) {
            const int at = g.integer(3, extent - 4);
            bool ok = true;
            for (int l : lines) ok = ok && std::abs(l - at) >= 3;
            ok = ok && std::abs(extent - 1 - at) >= 3;
            if (ok) lines.push_back(at);
        }
        lines.push_back(extent - 1);
        std::sort(lines.begin(), lines.end());
        return lines;
    };
    const auto xs = pick_lines(w);
    const auto ys = pick_lines(h);
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        for (int y = 0; y < h; ++y) rows[y][xs[i]] = '#';
    }
    for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
        for (int x = 0; x < w; ++x) rows[ys[i]][x] = '#';
    }
    // Doors on segments strictly between line crossings.
    auto door_in = [&](int fixed, int from, int to, bool vertical_line, char glyph, double chance) {
        if (to - from < 2 || !g.chance(chance)) return;
        const int at = g.integer(from + 1, to - 1);
        const bool wide = to - from >= 3 && at + 1 < to && g.chance(spec.wide_door);
        for (int k = 0; k <= (wide ? 1 : 0); ++k) {
            if (vertical_line) {
                rows[at + k][fixed] = glyph;
            } else {
                rows[fixed][at + k] = glyph;
            }
        }
    };
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const bool outer = i == 0 || i + 1 == xs.size();
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            door_in(xs[i], ys[j], ys[j + 1], true, outer ? 'E' : 'D', outer ? spec.exit_chance : spec.door_chance);
        }
    }
    for (std::size_t j = 0; j < ys.size(); ++j) {
        const bool outer = j == 0 || j + 1 == ys.size();
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            door_in(ys[j], xs[i], xs[i + 1], false, outer ? 'E' : 'D', outer ? spec.exit_chance : spec.door_chance);
        }
    }
    // Pillars keep two cells away from every line so doors stay well formed.
    auto near_line = [&](int x, int y) {
        for (int l : xs) {
            if (std::abs(x - l) <= 1) return true;
        }
        for (int l : ys) {
            if (std::abs(y - l) <= 1) return true;
        }
        return false;
    };
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            if (!near_line(x, y) && g.chance(spec.pillar_chance)) rows[y][x] = '#';
        }
    }
    return rows;
}

// Connected components of free cells by union-find, numbered by the row-major
// position of each component's first cell.
inline std::vector<int> component_oracle(const std::vector<std::string>& rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows[0].size());
    std::vector<int> parent(static_cast<std::size_t>(w * h));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (rows[y][x] != '.') continue;
            if (x + 1 < w && rows[y][x + 1] == '.') unite(y * w + x, y * w + x + 1);
            if (y + 1 < h && rows[y + 1][x] == '.') unite(y * w + x, (y + 1) * w + x);
        }
    }
    std::vector<int> labels(static_cast<std::size_t>(w * h), 0);
    std::map<int, int> number;
    for (int i = 0; i < w * h; ++i) {
        const char c = rows[i / w][i % w];
        if (c == 'D' || c == 'E') labels[i] = -1;
        if (c != '.') continue;
        const int root = find(i);
        auto it = number.find(root);
        if (it == number.end()) it = number.emplace(root, static_cast<int>(number.size()) + 1).first;
        labels[i] = it->second;
    }
    return labels;
}

// What portal construction should produce: either the error for the first
// offending door cell in row-major order, or the portal count after merging
// collinear runs of door cells that join the same rooms the same way.
struct PortalOracle {
    std::optional<ErrorCode> error;
    int portals = 0;
    int exits = 0;
    int dropped = 0;  // doors that join nothing
};

inline PortalOracle portal_oracle(const std::vector<std::string>& rows, const std::vector<int>& labels) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows[0].size());
    auto lab = [&](int x, int y) -> std::optional<int> {
        if (x < 0 || y < 0 || x >= w || y >= h) return std::nullopt;
        return labels[y * w + x];
    };
    // Key per door cell: (room_a, room_b, exit, crossing dx, crossing dy).
    using Key = std::tuple<int, int, bool, int, int>;
    std::map<int, Key> key;
    PortalOracle out;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const char c = rows[y][x];
            if (c != 'D' && c != 'E') continue;
            std::vector<Key> found;
            bool touches_room = false;
            const int axes[2][2] = {{0, 1}, {1, 0}};
            for (const auto& ax : axes) {
                const auto lo = lab(x - ax[0], y - ax[1]);
                const auto hi = lab(x + ax[0], y + ax[1]);
                const bool lr = lo && *lo > 0;
                const bool hr = hi && *hi > 0;
                touches_room = touches_room || lr || hr;
                if (c == 'E') {
                    const bool lc = !lo || *lo == 0;
                    const bool hc = !hi || *hi == 0;
                    if (lr && hc) found.emplace_back(*lo, 0, true, ax[0], ax[1]);
                    if (hr && lc) found.emplace_back(*hi, 0, true, -ax[0], -ax[1]);
                } else if (lr && hr && *lo != *hi) {
                    if (*lo < *hi) {
                        found.emplace_back(*lo, *hi, false, ax[0], ax[1]);
                    } else {
                        found.emplace_back(*hi, *lo, false, -ax[0], -ax[1]);
                    }
                }
            }
            if (found.size() > 1) {
                out.error = ErrorCode::AmbiguousDoor;
                return out;
            }
            if (found.empty() && !touches_room) {
                out.error = ErrorCode::DanglingDoor;
                return out;
            }
            if (found.empty()) {
                ++out.dropped;
                continue;
            }
            key[y * w + x] = found.front();
        }
    }
    // Runs: a door cell starts a new portal unless its predecessor along the
    // door line carries the same key.
    for (const auto& [cell, k] : key) {
        const int x = cell % w;
        const int y = cell / w;
        const int along_x = std::abs(std::get<4>(k));
        const int along_y = std::abs(std::get<3>(k));
        const int px = x - along_x;
        const int py = y - along_y;
        const auto prev = px >= 0 && py >= 0 ? key.find(py * w + px) : key.end();
        if (prev != key.end() && prev->second == k) continue;
        ++out.portals;
        if (std::get<2>(k)) ++out.exits;
    }
    return out;
}

// Room adjacency through interior portals, rooms numbered 1..n.
inline std::vector<std::vector<int>> room_adjacency(const CellPortalGraph& g) {
    std::vector<std::vector<int>> adj(g.rooms.size() + 1);
    for (const Portal& p : g.portals) {
        if (p.is_exit) continue;
        adj[static_cast<std::size_t>(p.room_a)].push_back(p.room_b);
        adj[static_cast<std::size_t>(p.room_b)].push_back(p.room_a);
    }
    return adj;
}

// Fewest portals from `room` to outside through `exit`; nullopt if unreachable.
inline std::optional<int> bfs_hops(const CellPortalGraph& g, int room, int exit) {
    const auto adj = room_adjacency(g);
    std::vector<int> dist(g.rooms.size() + 1, -1);
    std::vector<int> queue{room};
    dist[static_cast<std::size_t>(room)] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    const int target = g.portals[static_cast<std::size_t>(exit)].room_a;
    if (dist[static_cast<std::size_t>(target)] < 0) return std::nullopt;
    return dist[static_cast<std::size_t>(target)] + 1;
}

// Every loop-free portal sequence from `room` out through `exit`, by DFS.
inline std::vector<std::vector<int>> all_simple_paths(const CellPortalGraph& g, int room, int exit) {
    std::vector<std::vector<int>> out;
    std::vector<int> path;
    std::vector<bool> on(g.rooms.size() + 1, false);
    auto dfs = [&](auto&& self, int u) -> void {
        on[static_cast<std::size_t>(u)] = true;
        for (int pid : g.room(u).portals) {
            const Portal& p = g.portals[static_cast<std::size_t>(pid)];
            path.push_back(pid);
            if (p.is_exit) {
                if (pid == exit) out.push_back(path);
            } else {
                const int v = p.room_a == u ? p.room_b : p.room_a;
                if (!on[static_cast<std::size_t>(v)]) self(self, v);
            }
            path.pop_back();
        }
        on[static_cast<std::size_t>(u)] = false;
    };
    dfs(dfs, room);
    return out;
}

// Checks one stored path; returns an empty string when it is well formed.
inline std::string path_problem(const CellPortalGraph& g, int room, int exit, const std::vector<int>& path) {
    if (path.empty()) return "empty path";
    if (path.back() != exit) return "does not end at the exit";
    if (!g.portals[static_cast<std::size_t>(exit)].is_exit) return "last portal is not an exit";
    std::set<int> seen_portals;
    std::set<int> seen_rooms{room};
    int at = room;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const Portal& p = g.portals[static_cast<std::size_t>(path[k])];
        if (!seen_portals.insert(p.id).second) return "repeats a portal";
        if (p.room_a != at && p.room_b != at) return "consecutive portals share no room";
        if (p.is_exit && k + 1 != path.size()) return "passes through an exit";
        if (!p.is_exit) {
            at = p.room_a == at ? p.room_b : p.room_a;
            if (!seen_rooms.insert(at).second) return "revisits a room";
        }
    }
    return {};
}

}  // namespace testing
