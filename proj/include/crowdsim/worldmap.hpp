#pragma once

// Floor-plan compilation: ASCII grid -> labeled rooms -> cell-and-portal graph
// -> attraction points -> precomputed alternative exit paths.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crowdsim/vec2.hpp"

namespace crowdsim {

enum class RawCell : std::uint8_t { Wall, Free, Door, ExitDoor, Painting };

struct CellCoord {
    int x = 0;
    int y = 0;
    constexpr auto operator<=>(const CellCoord&) const = default;
};

inline constexpr double kDefaultCellSize = 0.5;

struct GridMap {
    int width = 0;
    int height = 0;
    double cell_size = kDefaultCellSize;  // meters per cell side
    std::vector<RawCell> cells;           // row-major, width * height

    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    RawCell at(int x, int y) const { return cells[index(x, y)]; }
    Vec2 cell_center(CellCoord c) const { return {(c.x + 0.5) * cell_size, (c.y + 0.5) * cell_size}; }
    double extent_x() const { return width * cell_size; }
    double extent_y() const { return height * cell_size; }
};

// Glyphs: '#' wall, '.' free, 'D' door, 'E' exit door, 'P' painting (hung on a wall cell).
// An optional first line "cellsize=<meters>" overrides the 0.5 m default.
GridMap parse_grid(std::string_view text);
std::string serialize_grid(const GridMap& map);
char glyph_of(RawCell cell);

// Blocking cells: walls, paintings and anything outside the grid.
bool blocks_motion(const GridMap& map, int x, int y);

inline constexpr int kWallLabel = 0;
inline constexpr int kDoorLabel = -1;

struct LabeledGrid {
    GridMap map;
    std::vector<int> labels;  // 0 wall/painting, -1 door/exit, >0 room id
    int room_count = 0;

    int label(int x, int y) const { return labels[map.index(x, y)]; }
};

LabeledGrid label_rooms(const GridMap& map);

inline constexpr int kOutsideRoom = 0;

struct Portal {
    int id = 0;
    CellCoord cell;                // representative door cell (middle of the run)
    std::vector<CellCoord> cells;  // every door cell merged into this portal, row-major
    int room_a = 0;
    int room_b = 0;                // kOutsideRoom for exits
    bool is_exit = false;
    CellCoord toward_b;            // unit grid step crossing the door from room_a to room_b
};

struct RoomNode {
    int id = 0;
    std::vector<CellCoord> cells;
    std::vector<int> attractors;
    std::vector<int> portals;  // incident portal ids, ascending
    Vec2 centroid;
};

struct CellPortalGraph {
    std::vector<RoomNode> rooms;  // rooms[id - 1]
    std::vector<Portal> portals;  // portals[id]
    std::vector<std::string> warnings;
    double cell_size = kDefaultCellSize;

    const RoomNode& room(int id) const { return rooms[static_cast<std::size_t>(id - 1)]; }
    // The room across `portal` from `room`, or kOutsideRoom for an exit.
    int other_side(int portal, int room) const;
    // World position of a portal's representative door cell center.
    Vec2 portal_center(int portal) const;
};

CellPortalGraph build_portal_graph(const LabeledGrid& lg);

enum class AttractorKind { DoorPoint, PaintingPoint };

struct Attractor {
    int id = 0;
    Vec2 position;
    AttractorKind kind = AttractorKind::DoorPoint;
    int room_id = 0;
    bool is_exit = false;
    int portal_id = -1;  // DoorPoint only
    CellCoord source;    // door or painting cell the point belongs to
};

// Door points come first in portal order (room_a side, then room_b side),
// followed by painting points in row-major order of their painting cells.
std::vector<Attractor> place_attractors(const LabeledGrid& lg, const CellPortalGraph& graph);

inline constexpr int kDefaultPathAlternatives = 3;

using PortalPath = std::vector<int>;

class PathTable {
public:
    PathTable() = default;
    PathTable(int room_count, std::vector<int> exit_portals, int alternatives);

    int alternatives() const { return alternatives_; }
    int room_count() const { return room_count_; }
    const std::vector<int>& exit_portals() const { return exit_portals_; }

    // Paths from `room` to `exit_portal`, ascending by hop count; empty when unreachable.
    const std::vector<PortalPath>& paths(int room, int exit_portal) const;
    std::vector<PortalPath>& mutable_paths(int room, int exit_portal);

private:
    std::size_t slot(int room, int exit_portal) const;

    int room_count_ = 0;
    int alternatives_ = 0;
    std::vector<int> exit_portals_;
    std::vector<std::vector<PortalPath>> entries_;
};

// Up to `alternatives` loop-free portal sequences per (room, exit), ordered by
// hop count, then walking length from the room centroid through the door
// cells, then portal ids lexicographically.
PathTable precompute_exit_paths(const CellPortalGraph& graph, int alternatives = kDefaultPathAlternatives);

// Walking length used as the secondary path ordering key.
double path_metric(const CellPortalGraph& graph, int room, const PortalPath& path);

struct CellHit {
    CellCoord cell;
    int label = 0;
};

// Half-open cells: pos in [i*cs, (i+1)*cs). Throws OutOfBounds.
CellHit cell_at(Vec2 pos, const LabeledGrid& lg);
std::optional<CellCoord> try_cell_at(Vec2 pos, const GridMap& map) noexcept;

// Everything the simulation needs about the building, compiled once.
struct World {
    LabeledGrid grid;
    CellPortalGraph graph;
    std::vector<Attractor> attractors;
    PathTable paths;

    std::vector<int> portal_of_cell;                 // per cell: portal id or -1
    std::vector<std::vector<int>> portal_attractors; // per portal: door point ids (room_a side first)
    std::vector<int> painting_attractors;            // ids of painting points

    const GridMap& map() const { return grid.map; }
    int room_count() const { return grid.room_count; }

    // First portal on a fewest-hop route between two rooms (exits excluded);
    // -1 when from == to or the target room is unreachable.
    int next_portal(int from_room, int to_room) const;
    // Door point of `portal` lying in `room`, or -1.
    int door_point(int portal, int room) const;

    // Per cell: 1 for blocking cells of a free-standing obstacle (a blocking
    // component that does not reach the map border), 0 otherwise.
    std::vector<char> obstacle_cell;

    std::vector<int> route_table;       // room_count^2, row = from_room - 1
    std::vector<int> room_nearest_exit; // per room: exit whose first path is best, or -1
};

World compile_world(const GridMap& map, int alternatives = kDefaultPathAlternatives);

}  // namespace crowdsim
