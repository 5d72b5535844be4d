#pragma once

// Serialized forms: compiled world JSON, trajectory CSV, metrics JSON.

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "crowdsim/simulation.hpp"
#include "crowdsim/worldmap.hpp"

namespace crowdsim {

// {grid, labels, rooms, portals, attractors, path_table}; coordinates in meters.
nlohmann::ordered_json world_to_json(const World& world);

inline constexpr const char* kTrajectoryHeader = "tick,agent_id,x,y,vx,vy,situation,room_id";

// One row per record, floats with 6 decimals, LF line endings.
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);
std::string trajectory_csv(const TrajectoryLog& log);

struct CsvRecord {
    std::int64_t tick = 0;
    int agent_id = 0;
    Vec2 pos;
    Vec2 vel;
    Situation situation = Situation::Calm;
    int room_id = 0;
};

// Parses what write_trajectory_csv produced. Throws SchemaError.
std::vector<CsvRecord> read_trajectory_csv(std::istream& in);

nlohmann::ordered_json metrics_to_json(const Metrics& metrics, Termination status, std::int64_t ticks);

std::string read_text_file(const std::string& path);  // throws FileNotFound
void write_text_file(const std::string& path, const std::string& text);

}  // namespace crowdsim
