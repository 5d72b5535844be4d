#include "crowdsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crowdsim/error.hpp"
#include "crowdsim/psyche.hpp"

namespace crowdsim {

void validate(const SimConfig& config) {
    if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw Error(ErrorCode::SchemaError, "dt must be positive");
    if (config.max_ticks <= 0) throw Error(ErrorCode::SchemaError, "max_ticks must be positive");
    if (config.population < 0) throw Error(ErrorCode::SchemaError, "population must be non-negative");
    if (config.alarm_tick && *config.alarm_tick < 0) throw Error(ErrorCode::SchemaError, "alarm tick is negative");
    validate(config.perception);
    validate(config.motion);
    for (const AgentSpec& spec : config.agents) validate(spec.traits);
}

namespace {

// Portable uniform draws on top of the standard 64-bit Mersenne Twister, whose
// output sequence is fixed by the standard (the distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

    template <std::size_t N>
    std::size_t pick(const std::array<double, N>& weights) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < N; ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return N - 1;
    }

private:
    std::mt19937_64 engine_;
};

Traits sample_traits(Rng& rng, const TraitFractions& f) {
    const auto cls = static_cast<PersonalSpace>(rng.pick(f.personal_space));
    const auto patience = static_cast<Patience>(rng.pick(f.patience));
    const auto role = static_cast<Role>(rng.pick(f.role));
    const auto knowledge = static_cast<Knowledge>(rng.pick(f.knowledge));
    return make_traits(cls, patience, role, knowledge);
}

bool overlaps(const std::vector<Agent>& placed, Vec2 p, double radius) {
    for (const Agent& a : placed) {
        if (distance(a.pos, p) < radius + a.traits.personal_space_radius) return true;
    }
    return false;
}

int room_of(const World& world, Vec2 p) {
    const auto c = try_cell_at(p, world.map());
    return c ? world.grid.label(c->x, c->y) : kWallLabel;
}

}  // namespace

std::vector<Agent> spawn_population(const World& world, const SimConfig& config) {
    Rng rng(config.rng_seed);
    std::vector<AgentSpec> specs = config.agents;
    if (specs.empty()) {
        specs.resize(static_cast<std::size_t>(config.population));
        for (AgentSpec& s : specs) s.traits = sample_traits(rng, config.fractions);
    }

    const GridMap& map = world.map();
    std::vector<CellCoord> free_cells;
    for (const RoomNode& room : world.graph.rooms) free_cells.insert(free_cells.end(), room.cells.begin(), room.cells.end());
    std::sort(free_cells.begin(), free_cells.end(),
              [](CellCoord a, CellCoord b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });

    std::vector<Agent> agents;
    agents.reserve(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const AgentSpec& spec = specs[i];
        Agent a;
        a.id = static_cast<int>(i);
        a.traits = spec.traits;
        a.psych.situation = spec.situation;
        const double r = spec.traits.personal_space_radius;
        if (spec.position) {
            if (room_of(world, *spec.position) <= 0) {
                throw Error(ErrorCode::SpawnFailure, "agent " + std::to_string(i) + " is not placed in a free cell");
            }
            a.pos = *spec.position;
        } else {
            bool placed = false;
            for (int attempt = 0; attempt < kSpawnAttempts && !placed; ++attempt) {
                const CellCoord c = free_cells[rng.below(free_cells.size())];
                const Vec2 p{(c.x + rng.uniform()) * map.cell_size, (c.y + rng.uniform()) * map.cell_size};
                if (overlaps(agents, p, r)) continue;
                a.pos = p;
                placed = true;
            }
            if (!placed) {
                throw Error(ErrorCode::SpawnFailure, "could not place agent " + std::to_string(i) + " after " +
                                                         std::to_string(kSpawnAttempts) + " attempts");
            }
        }
        const double angle = rng.uniform() * 2.0 * std::numbers::pi;
        a.heading = {std::cos(angle), std::sin(angle)};
        a.room_id = room_of(world, a.pos);
        agents.push_back(std::move(a));
    }
    return agents;
}

bool trigger_alarm(std::span<Agent> agents) {
    bool changed = false;
    for (Agent& a : agents) {
        if (!a.live()) continue;
        PsychState next = on_alarm(a.psych);
        if (next != a.psych) {
            changed = changed || a.psych.situation != Situation::Panic;
            a.psych = std::move(next);
        }
    }
    return changed;
}

namespace {

constexpr double kExploreLookahead = 0.5;  // m beyond personal space

struct Decision {
    double target_speed = 0.0;
    std::optional<Vec2> heading_override;
    std::optional<double> avoid_turn;  // offset from the force-driven direction, rad
};

// Per-thread buffers for one agent's perceive, decide and move phases.
struct Scratch {
    std::vector<std::size_t> neighbors;
    Percept percept;
    Decision decision;
};

void decide_agent(std::size_t i, std::span<const Agent> cur, const World& world, const SimConfig& config,
                  Scratch& ws, Agent& next) {
    const Agent& me = cur[i];
    const Percept& percept = ws.percept;
    update_painting_visit(next.psych, me.pos, world, config.dt);
    try {
        next.psych.current_goal = select_goal(next, world, percept);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoGoalAvailable) throw;
        next.psych.current_goal = Goal{};
    }
    Decision& d = ws.decision;
    d = Decision{};
    d.target_speed = acceleration_boost(next.psych.situation, percept, me.traits);
    if (const auto turn = rule_avoid(me.pos, me.vel, me.heading, me.traits, percept, config.motion)) {
        d.heading_override = turn->heading;
        d.avoid_turn = turn->angle;
    } else if (next.psych.current_goal.kind == GoalKind::None && next.psych.situation == Situation::Panic) {
        // Lost agents walk straight ahead and veer left along walls until a door
        // or a guide comes into view.
        const double clearance = me.traits.personal_space_radius + kExploreLookahead;
        if (!percept.visible_walls.empty() && percept.visible_walls.front().distance < clearance) {
            d.heading_override = rotated(me.heading, config.motion.delta_theta_large);
        }
    }
}

void move_agent(std::size_t i, std::span<const Agent> cur, const World& world, const SimConfig& config,
                const Scratch& ws, Agent& next) {
    const Agent& me = cur[i];
    const MotionParams& mp = config.motion;
    const Percept& percept = ws.percept;
    const Decision& d = ws.decision;
    const Goal& goal = next.psych.current_goal;

    ForceBreakdown f;
    if (goal.kind != GoalKind::None) {
        f.advance = advance_force(me.pos, me.vel, goal.target, d.target_speed, mp);
        f.goal_attr = goal_attractive_force(me.pos, goal.target, mp);
    } else if (next.psych.situation == Situation::Panic) {
        f.advance = advance_force(me.pos, me.vel, me.pos + me.heading, d.target_speed, mp);
    } else {
        f.advance = braking_force(me.vel, mp);
    }
    f.occupant_attr = occupant_attractive_force(next.psych.situation, me.pos, percept, mp);
    const Body self{me.id, me.pos, me.traits.personal_space_radius, me.traits.influence_radius};
    std::vector<std::size_t> visible;
    visible.reserve(percept.visible_agents.size());
    for (const SeenAgent& s : percept.visible_agents) visible.push_back(s.slot);
    std::sort(visible.begin(), visible.end());
    const std::optional<Vec2> aim =
        goal.kind != GoalKind::None ? std::optional<Vec2>(goal.target) : std::nullopt;
    for (std::size_t slot : ws.neighbors) {
        if (slot == i) continue;
        const Agent& other = cur[slot];
        // Both pair forces vanish beyond the summed influence radii.
        if (length(me.pos - other.pos) >= me.traits.influence_radius + other.traits.influence_radius) continue;
        const Body body{other.id, other.pos, other.traits.personal_space_radius, other.traits.influence_radius};
        const bool seen = std::binary_search(visible.begin(), visible.end(), slot);
        bool yields = yields_to(me.pos, aim, other.pos, seen);
        if (yields && me.id < other.id) {
            // Two agents giving way to each other would stand off forever.
            const Goal& og = other.psych.current_goal;
            const std::optional<Vec2> other_aim =
                og.kind != GoalKind::None ? std::optional<Vec2>(og.target) : std::nullopt;
            const bool seen_back = within_range(other.pos, me.pos, config.perception.sense_range) &&
                                   in_fov(other.heading, other.pos, me.pos, config.perception.fov_cos_threshold);
            yields = !yields_to(other.pos, other_aim, me.pos, seen_back);
        }
        f.occupant_rep += yields ? occupant_repulsive_force(self, body, mp) : body_contact_force(self, body, mp);
    }
    f.obstacle_rep = obstacle_repulsive_force(me.pos, me.traits.personal_space_radius, percept.visible_walls, mp);
    f.total = f.advance + f.goal_attr + f.occupant_attr + f.occupant_rep + f.obstacle_rep;

    const Kinematics k =
        integrate({me.pos, me.vel, me.heading}, f.total, d.heading_override, config.dt, me.traits.v_max, mp, world.map());
    next.pos = k.pos;
    next.vel = k.vel;
    next.heading = k.heading;

    if (const auto c = try_cell_at(next.pos, world.map())) {
        const auto cell = world.map().index(c->x, c->y);
        const int label = world.grid.labels[cell];
        if (label > 0) {
            if (label != next.room_id) {
                next.psych.last_portal = next.doorway;
                next.room_id = label;
            }
        } else if (world.portal_of_cell[cell] >= 0) {
            next.doorway = world.portal_of_cell[cell];
        }
    }
}


// Perceive, decide and move for one agent. They read only the previous snapshot and its own
// percept, and writes only the agent's next slot.
template <typename Query>
void process_agent(std::size_t i, std::span<const Agent> cur, const World& world, const SimConfig& config,
                   double reach, std::uint64_t snapshot, const Query& query, Scratch& ws, Agent& next,
                   std::uint64_t& seen_tick, char& avoided) {
    ws.neighbors.clear();
    query(cur[i].pos, reach, ws.neighbors);
    ws.percept = perceive_candidates(i, cur, ws.neighbors, world, config.perception, snapshot);
    seen_tick = ws.percept.snapshot_tick;
    decide_agent(i, cur, world, config, ws, next);
    avoided = ws.decision.avoid_turn.has_value();
    move_agent(i, cur, world, config, ws, next);
}

}  // namespace

StepResult step(const World& world, std::span<const Agent> agents, const SimConfig& config, std::int64_t tick) {
    StepResult out;
    out.agents.assign(agents.begin(), agents.end());
    const std::size_t n = agents.size();
    const auto snapshot = static_cast<std::uint64_t>(tick - 1);

    double max_influence = 0.0;
    for (const Agent& a : agents) {
        if (a.live()) max_influence = std::max(max_influence, a.traits.influence_radius);
    }
    const double reach = std::max(config.perception.sense_range, 2.0 * max_influence);

    std::vector<std::uint64_t> seen_tick(n, snapshot);
    std::vector<char> avoided(n, 0);
    std::vector<char> failed(n, 0);
    std::vector<std::string> failures(n);

    auto guarded = [&](std::size_t i, auto&& body) {
        if (!agents[i].live()) return;
        try {
            body();
        } catch (const std::exception& e) {
            failed[i] = 1;
            failures[i] = e.what();
        }
    };

    if (config.mode == StepMode::Reference) {
        auto query = [&](Vec2 p, double r, std::vector<std::size_t>& o) { brute_force_query(agents, p, r, o); };
        Scratch ws;
        for (std::size_t i = 0; i < n; ++i) {
            guarded(i, [&] {
                process_agent(i, agents, world, config, reach, snapshot, query, ws, out.agents[i], seen_tick[i], avoided[i]);
            });
        }
    } else {
        // Buckets as wide as the sense range: a query touches at most 3x3 of them.
        const SpatialIndex index = rebuild_index(agents, config.perception.sense_range, snapshot);
        auto query = [&](Vec2 p, double r, std::vector<std::size_t>& o) { index.query(p, r, o); };
        const auto count = static_cast<std::ptrdiff_t>(n);
#ifdef _OPENMP
        const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#endif
#pragma omp parallel num_threads(threads)
        {
            Scratch ws;
#pragma omp for schedule(static)
            for (std::ptrdiff_t k = 0; k < count; ++k) {
                const auto i = static_cast<std::size_t>(k);
                guarded(i, [&] {
                    process_agent(i, agents, world, config, reach, snapshot, query, ws, out.agents[i], seen_tick[i],
                                  avoided[i]);
                });
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!failed[i]) continue;
        const bool non_finite = failures[i].starts_with(to_string(ErrorCode::NonFiniteForce));
        throw Error(non_finite ? ErrorCode::NonFiniteForce : ErrorCode::SchemaError,
                    "agent " + std::to_string(agents[i].id) + ": " + failures[i]);
    }

    out.min_snapshot = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < n; ++i) {
        if (!agents[i].live()) continue;
        out.min_snapshot = std::min(out.min_snapshot, seen_tick[i]);
        out.max_snapshot = std::max(out.max_snapshot, seen_tick[i]);
        out.rule_avoid_triggers += avoided[i];
    }
    if (out.min_snapshot > out.max_snapshot) out.min_snapshot = out.max_snapshot = snapshot;

    // Evacuation: stepping onto an exit door cell.
    const GridMap& map = world.map();
    for (Agent& a : out.agents) {
        if (!a.live()) continue;
        const auto c = try_cell_at(a.pos, map);
        if (!c || map.at(c->x, c->y) != RawCell::ExitDoor) continue;
        a.evacuated_at = tick;
        a.exit_portal = world.portal_of_cell[map.index(c->x, c->y)];
        out.events.push_back({tick, EventKind::Evacuated, a.id, a.exit_portal});
    }
    std::sort(out.events.begin(), out.events.end(),
              [](const Event& x, const Event& y) { return std::tie(x.tick, x.agent_id) < std::tie(y.tick, y.agent_id); });
    return out;
}

Simulation::Simulation(const World& world, SimConfig config)
    : Simulation(world, config, (validate(config), spawn_population(world, config))) {}

Simulation::Simulation(const World& world, SimConfig config, std::vector<Agent> agents)
    : world_(world), config_(std::move(config)), agents_(std::move(agents)) {
    validate(config_);
    log_.dt = config_.dt;
    log_.population = static_cast<int>(agents_.size());
    record_tick();
}

std::size_t Simulation::live_count() const {
    return static_cast<std::size_t>(std::count_if(agents_.begin(), agents_.end(), [](const Agent& a) { return a.live(); }));
}

void Simulation::trigger_alarm() {
    if (alarm_raised_) return;
    alarm_raised_ = true;
    crowdsim::trigger_alarm(agents_);
    log_.events.push_back({tick_, EventKind::Alarm, -1, -1});
}

std::vector<Event> Simulation::step() {
    if (config_.alarm_tick && *config_.alarm_tick == tick_) trigger_alarm();
    StepResult r = crowdsim::step(world_, agents_, config_, tick_ + 1);
    agents_ = std::move(r.agents);
    ++tick_;
    log_.ticks = tick_;
    log_.rule_avoid_triggers += r.rule_avoid_triggers;
    log_.events.insert(log_.events.end(), r.events.begin(), r.events.end());
    record_tick();
    return std::move(r.events);
}

void Simulation::record_tick() {
    for (const Agent& a : agents_) {
        if (!a.live()) continue;
        log_.records.push_back({tick_, a.id, a.pos, a.vel, a.psych.situation, room_of(world_, a.pos)});
    }
}

RunResult run(const World& world, const SimConfig& config, const TickObserver& observer) {
    Simulation sim(world, config);
    if (observer) observer(sim);
    while (!sim.all_evacuated() && sim.tick() < config.max_ticks) {
        sim.step();
        if (observer) observer(sim);
    }
    RunResult out;
    out.status = sim.all_evacuated() ? Termination::AllEvacuated : Termination::Timeout;
    out.ticks = sim.tick();
    out.log = sim.log();
    out.metrics = compute_metrics(out.log, world, config.dt);
    return out;
}

}  // namespace crowdsim
