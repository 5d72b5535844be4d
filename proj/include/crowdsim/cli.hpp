#pragma once

// Subcommands behind the crowdsim executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace crowdsim {

struct RunOptions {
    std::string map;
    std::string scenario;
    std::string out_dir;
    std::optional<std::int64_t> ticks;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    std::optional<double> alarm_at;  // seconds
    std::optional<std::int64_t> frames_every;
};

struct RunArtifacts {
    std::string trajectory;
    std::string metrics;
    std::vector<std::string> frames;
};

// Writes <out>/trajectory.csv, <out>/metrics.json and, when requested,
// <out>/frames/frame_<tick>.svg for every positive tick divisible by N.
// Returns 0 on AllEvacuated or Timeout (with a warning), 1 on errors.
int run_command(const RunOptions& options, std::ostream& out, std::ostream& err, RunArtifacts* artifacts = nullptr);

int compile_command(const std::string& map_path, const std::string& out_file, std::ostream& out, std::ostream& err);

// Labeling and portal diagnostics; 0 when the map compiles, 1 otherwise.
int validate_command(const std::string& map_path, std::ostream& out, std::ostream& err);

}  // namespace crowdsim
