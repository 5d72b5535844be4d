#include "crowdsim/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>

#include "crowdsim/error.hpp"
#include "crowdsim/io.hpp"
#include "crowdsim/render.hpp"
#include "crowdsim/scenario.hpp"

namespace crowdsim {

namespace fs = std::filesystem;

namespace {

World load_world(const std::string& map_path) { return compile_world(parse_grid(read_text_file(map_path))); }

std::string frame_name(std::int64_t tick) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06lld.svg", static_cast<long long>(tick));
    return buf;
}

}  // namespace

int run_command(const RunOptions& options, std::ostream& out, std::ostream& err, RunArtifacts* artifacts) {
    try {
        Scenario scenario = load_scenario(options.scenario);
        if (options.dt) scenario.dt = *options.dt;
        if (options.ticks) scenario.max_ticks = *options.ticks;
        if (options.seed) scenario.seed = *options.seed;
        if (options.alarm_at) scenario.alarm_time = *options.alarm_at;
        if (options.frames_every && *options.frames_every <= 0) {
            throw Error(ErrorCode::SchemaError, "--frames-every must be positive");
        }
        const std::string map_path = options.map.empty() ? scenario.resolved_map : options.map;
        if (map_path.empty()) throw Error(ErrorCode::SchemaError, "map: no map given");

        const World world = load_world(map_path);
        const SimConfig config = to_sim_config(scenario);

        std::vector<std::pair<std::int64_t, std::string>> frames;
        TickObserver observer;
        if (options.frames_every) {
            const std::int64_t every = *options.frames_every;
            observer = [&](const Simulation& sim) {
                if (sim.tick() > 0 && sim.tick() % every == 0) {
                    frames.emplace_back(sim.tick(), render_frame(world, sim.agents(), sim.tick()));
                }
            };
        }
        const RunResult result = run(world, config, observer);

        const fs::path dir(options.out_dir);
        fs::create_directories(dir);
        RunArtifacts written;
        written.trajectory = (dir / "trajectory.csv").string();
        written.metrics = (dir / "metrics.json").string();
        write_text_file(written.trajectory, trajectory_csv(result.log));
        write_text_file(written.metrics, metrics_to_json(result.metrics, result.status, result.ticks).dump(2) + "\n");
        if (!frames.empty()) {
            fs::create_directories(dir / "frames");
            for (const auto& [tick, svg] : frames) {
                written.frames.push_back((dir / "frames" / frame_name(tick)).string());
                write_text_file(written.frames.back(), svg);
            }
        }

        out << "ticks " << result.ticks << ", evacuated " << result.metrics.total_evacuated << "/"
            << result.metrics.population << "\n";
        if (result.status == Termination::Timeout) {
            err << "warning: timeout after " << result.ticks << " ticks with "
                << result.metrics.population - result.metrics.total_evacuated << " agents still inside\n";
        }
        if (artifacts) *artifacts = std::move(written);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int compile_command(const std::string& map_path, const std::string& out_file, std::ostream& out, std::ostream& err) {
    try {
        const World world = load_world(map_path);
        write_text_file(out_file, world_to_json(world).dump(2) + "\n");
        for (const std::string& w : world.graph.warnings) err << "warning: " << w << "\n";
        out << "rooms " << world.room_count() << ", portals " << world.graph.portals.size() << ", attractors "
            << world.attractors.size() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int validate_command(const std::string& map_path, std::ostream& out, std::ostream& err) {
    try {
        const World world = load_world(map_path);
        const GridMap& map = world.map();
        out << "grid " << map.width << "x" << map.height << ", cell size " << map.cell_size << " m\n";
        out << "rooms " << world.room_count() << "\n";
        for (const RoomNode& r : world.graph.rooms) {
            out << "  room " << r.id << ": " << r.cells.size() << " cells, " << r.portals.size() << " portals\n";
        }
        out << "portals " << world.graph.portals.size() << "\n";
        for (const Portal& p : world.graph.portals) {
            out << "  portal " << p.id << " at (" << p.cell.x << "," << p.cell.y << "), " << p.cells.size()
                << " cells: room " << p.room_a << " -> ";
            if (p.is_exit) {
                out << "OUTSIDE (exit)\n";
            } else {
                out << "room " << p.room_b << "\n";
            }
        }
        for (int room = 1; room <= world.room_count(); ++room) {
            if (world.room_nearest_exit[static_cast<std::size_t>(room - 1)] >= 0) continue;
            out << "  room " << room << " has no path to an exit\n";
        }
        for (const std::string& w : world.graph.warnings) out << "warning: " << w << "\n";
        out << "ok\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace crowdsim
