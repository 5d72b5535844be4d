#pragma once

// Sense-Decide-Act tick loop, alarm handling, evacuation bookkeeping.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "crowdsim/agent.hpp"
#include "crowdsim/motion.hpp"
#include "crowdsim/perception.hpp"
#include "crowdsim/worldmap.hpp"

namespace crowdsim {

// Per-axis population fractions; each axis must sum to 1.
struct TraitFractions {
    std::array<double, 3> personal_space{0.25, 0.5, 0.25};  // Narrow, Average, Broad
    std::array<double, 2> patience{0.5, 0.5};               // Patient, Impatient
    std::array<double, 3> role{0.1, 0.2, 0.7};              // Guide, Follower, Independent
    std::array<double, 2> knowledge{0.8, 0.2};              // Complete, Partial

    bool operator==(const TraitFractions&) const = default;
};

// An explicitly listed agent; a missing position is sampled like the rest.
struct AgentSpec {
    std::optional<Vec2> position;
    Traits traits;
    Situation situation = Situation::Calm;

    bool operator==(const AgentSpec&) const = default;
};

// Serial loop with brute-force neighbor search, or OpenMP over the spatial index.
enum class StepMode { Reference, Parallel };

struct SimConfig {
    double dt = 0.05;
    std::int64_t max_ticks = 6000;
    std::uint64_t rng_seed = 1;
    std::optional<std::int64_t> alarm_tick;
    PerceptionParams perception;
    MotionParams motion;
    int population = 0;
    TraitFractions fractions;
    std::vector<AgentSpec> agents;  // when non-empty, replaces `population`
    StepMode mode = StepMode::Parallel;
    int threads = 0;                // 0 leaves the OpenMP default
};

void validate(const SimConfig& config);

enum class EventKind { Alarm, Evacuated };

struct Event {
    std::int64_t tick = 0;
    EventKind kind = EventKind::Alarm;
    int agent_id = -1;
    int portal_id = -1;

    bool operator==(const Event&) const = default;
};

struct TrajectoryRecord {
    std::int64_t tick = 0;
    int agent_id = 0;
    Vec2 pos;
    Vec2 vel;
    Situation situation = Situation::Calm;
    int room_id = 0;  // label of the occupied cell: room id, or -1 in a doorway
};

struct TrajectoryLog {
    double dt = 0.05;
    int population = 0;
    std::int64_t ticks = 0;  // last tick simulated
    std::vector<TrajectoryRecord> records;  // (tick, agent id) ascending
    std::vector<Event> events;
    std::int64_t rule_avoid_triggers = 0;
};

struct ExitFlow {
    int portal_id = -1;
    int evacuated = 0;
    double mean_flow = 0.0;  // agents/s over the whole run
    double max_flow = 0.0;   // agents/s in the busiest 1 s window
};

inline constexpr double kExitDensityRadius = 2.0;  // m, half-disc in front of an exit

struct Metrics {
    std::vector<std::optional<double>> evacuation_time;  // by agent id, seconds
    int population = 0;
    int total_evacuated = 0;
    std::vector<ExitFlow> exit_flows;
    double peak_density = 0.0;       // agents/m^2 in the fullest grid cell
    double peak_exit_density = 0.0;  // agents/m^2 within kExitDensityRadius of an exit
    std::int64_t rule_avoid_triggers = 0;
};

Metrics compute_metrics(const TrajectoryLog& log, const World& world, double dt);

// Seeded trait sampling and rejection-sampled placement in free cells.
// Throws SpawnFailure after 1000 attempts for one agent.
std::vector<Agent> spawn_population(const World& world, const SimConfig& config);

inline constexpr int kSpawnAttempts = 1000;

struct StepResult {
    std::vector<Agent> agents;  // next-tick state, same slots as the input
    std::vector<Event> events;  // sorted by agent id
    std::int64_t rule_avoid_triggers = 0;
    // Tick of the snapshot every percept was built from; all equal by construction.
    std::uint64_t min_snapshot = 0;
    std::uint64_t max_snapshot = 0;
};

// Advances `agents` (the tick - 1 snapshot) to `tick`. Phases: index,
// perceive, decide, forces + integrate, evacuation. Only the owning agent's
// next slot is written in the per-agent phases.
StepResult step(const World& world, std::span<const Agent> agents, const SimConfig& config, std::int64_t tick);

// Applies on_alarm to every live agent. Returns false if everyone live was
// already panicked.
bool trigger_alarm(std::span<Agent> agents);

class Simulation {
public:
    Simulation(const World& world, SimConfig config);
    Simulation(const World& world, SimConfig config, std::vector<Agent> agents);

    std::int64_t tick() const { return tick_; }
    std::span<const Agent> agents() const { return agents_; }
    const TrajectoryLog& log() const { return log_; }
    const SimConfig& config() const { return config_; }
    const World& world() const { return world_; }
    std::size_t live_count() const;
    bool all_evacuated() const { return live_count() == 0; }

    // Raises the alarm now; a repeat call records nothing.
    void trigger_alarm();
    // Advances one tick, firing the scheduled alarm first when due.
    std::vector<Event> step();

private:
    void record_tick();

    const World& world_;
    SimConfig config_;
    std::vector<Agent> agents_;
    std::int64_t tick_ = 0;
    bool alarm_raised_ = false;
    TrajectoryLog log_;
};

enum class Termination { AllEvacuated, Timeout };

struct RunResult {
    TrajectoryLog log;
    Metrics metrics;
    Termination status = Termination::Timeout;
    std::int64_t ticks = 0;
};

using TickObserver = std::function<void(const Simulation&)>;

// Spawns the population and steps until everyone is out or max_ticks is hit.
// The observer sees the state after every tick, including tick 0.
RunResult run(const World& world, const SimConfig& config, const TickObserver& observer = {});

}  // namespace crowdsim
