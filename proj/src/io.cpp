#include "crowdsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "crowdsim/error.hpp"

namespace crowdsim {

using nlohmann::ordered_json;

namespace {

ordered_json xy(Vec2 v) { return ordered_json::array({v.x, v.y}); }
ordered_json xy(CellCoord c) { return ordered_json::array({c.x, c.y}); }

ordered_json cells_json(const std::vector<CellCoord>& cells) {
    ordered_json out = ordered_json::array();
    for (const CellCoord& c : cells) out.push_back(xy(c));
    return out;
}

std::string_view to_string(AttractorKind k) { return k == AttractorKind::DoorPoint ? "DoorPoint" : "PaintingPoint"; }

}  // namespace

ordered_json world_to_json(const World& world) {
    const GridMap& map = world.map();
    ordered_json doc;

    ordered_json rows = ordered_json::array();
    const std::string text = serialize_grid(map);
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind("cellsize=", 0) != 0) rows.push_back(line);
    }
    doc["grid"] = {{"width", map.width}, {"height", map.height}, {"cell_size", map.cell_size}, {"rows", rows}};

    ordered_json labels = ordered_json::array();
    for (int y = 0; y < map.height; ++y) {
        ordered_json row = ordered_json::array();
        for (int x = 0; x < map.width; ++x) row.push_back(world.grid.label(x, y));
        labels.push_back(row);
    }
    doc["labels"] = labels;

    ordered_json rooms = ordered_json::array();
    for (const RoomNode& r : world.graph.rooms) {
        rooms.push_back({{"id", r.id},
                         {"cells", cells_json(r.cells)},
                         {"attractors", r.attractors},
                         {"portals", r.portals},
                         {"centroid", xy(r.centroid)}});
    }
    doc["rooms"] = rooms;

    ordered_json portals = ordered_json::array();
    for (const Portal& p : world.graph.portals) {
        portals.push_back({{"id", p.id},
                           {"cell", xy(p.cell)},
                           {"cells", cells_json(p.cells)},
                           {"room_a", p.room_a},
                           {"room_b", p.room_b},
                           {"is_exit", p.is_exit}});
    }
    doc["portals"] = portals;

    ordered_json attractors = ordered_json::array();
    for (const Attractor& a : world.attractors) {
        ordered_json j{{"id", a.id},
                       {"position", xy(a.position)},
                       {"kind", to_string(a.kind)},
                       {"room_id", a.room_id},
                       {"is_exit", a.is_exit}};
        if (a.kind == AttractorKind::DoorPoint) j["portal_id"] = a.portal_id;
        attractors.push_back(j);
    }
    doc["attractors"] = attractors;

    ordered_json table = ordered_json::array();
    for (int room = 1; room <= world.room_count(); ++room) {
        for (int exit : world.paths.exit_portals()) {
            table.push_back({{"room_id", room}, {"exit_portal_id", exit}, {"paths", world.paths.paths(room, exit)}});
        }
    }
    doc["path_table"] = {{"alternatives", world.paths.alternatives()}, {"entries", table}};
    doc["warnings"] = world.graph.warnings;
    return doc;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
    out << kTrajectoryHeader << '\n';
    char line[256];
    for (const TrajectoryRecord& r : log.records) {
        const int n = std::snprintf(line, sizeof line, "%lld,%d,%.6f,%.6f,%.6f,%.6f,%s,%d\n",
                                    static_cast<long long>(r.tick), r.agent_id, r.pos.x, r.pos.y, r.vel.x, r.vel.y,
                                    r.situation == Situation::Panic ? "Panic" : "Calm", r.room_id);
        out.write(line, n);
    }
}

std::string trajectory_csv(const TrajectoryLog& log) {
    std::ostringstream out;
    write_trajectory_csv(out, log);
    return out.str();
}

std::vector<CsvRecord> read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader) {
        throw Error(ErrorCode::SchemaError, "trajectory: missing header");
    }
    std::vector<CsvRecord> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        CsvRecord r;
        long long tick = 0;
        char situation[16] = {};
        const int got = std::sscanf(line.c_str(), "%lld,%d,%lf,%lf,%lf,%lf,%15[^,],%d", &tick, &r.agent_id, &r.pos.x,
                                    &r.pos.y, &r.vel.x, &r.vel.y, situation, &r.room_id);
        if (got != 8) throw Error(ErrorCode::SchemaError, "trajectory: malformed row " + std::to_string(row));
        r.tick = tick;
        const std::string s = situation;
        if (s == "Panic") {
            r.situation = Situation::Panic;
        } else if (s != "Calm") {
            throw Error(ErrorCode::SchemaError, "trajectory: bad situation on row " + std::to_string(row));
        }
        out.push_back(r);
    }
    return out;
}

ordered_json metrics_to_json(const Metrics& m, Termination status, std::int64_t ticks) {
    ordered_json times = ordered_json::array();
    for (const auto& t : m.evacuation_time) times.push_back(t ? ordered_json(*t) : ordered_json(nullptr));
    ordered_json flows = ordered_json::array();
    for (const ExitFlow& f : m.exit_flows) {
        flows.push_back({{"portal_id", f.portal_id},
                         {"evacuated", f.evacuated},
                         {"mean_flow", f.mean_flow},
                         {"max_flow", f.max_flow}});
    }
    return {{"status", status == Termination::AllEvacuated ? "AllEvacuated" : "Timeout"},
            {"ticks", ticks},
            {"population", m.population},
            {"total_evacuated", m.total_evacuated},
            {"evacuation_time", times},
            {"exit_flows", flows},
            {"peak_density", m.peak_density},
            {"peak_exit_density", m.peak_exit_density},
            {"rule_avoid_triggers", m.rule_avoid_triggers}};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorCode::FileNotFound, "write failed for " + path);
}

}  // namespace crowdsim
