#pragma once

// Scenario files: JSON run configuration with strict validation.

#include <optional>
#include <string>

#include "json.hpp"

#include "crowdsim/simulation.hpp"

namespace crowdsim {

struct Scenario {
    std::string map;           // as written in the file; "" when absent
    std::string resolved_map;  // relative to the scenario file's directory
    int population = 0;
    std::vector<AgentSpec> agents;
    TraitFractions fractions;
    MotionParams motion;
    PerceptionParams perception;
    double dt = 0.05;
    std::int64_t max_ticks = 6000;
    std::uint64_t seed = 1;
    std::optional<double> alarm_time;  // seconds
    StepMode mode = StepMode::Parallel;
    int threads = 0;
};

inline constexpr double kFractionTolerance = 1e-9;

// Throws FileNotFound, SchemaError (message starts with the field path) or
// FractionSumError.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const nlohmann::json& doc, const std::string& base_dir = "");

// Every field, defaults included.
nlohmann::ordered_json scenario_to_json(const Scenario& s);

// Nearest tick, halves rounded up.
std::int64_t alarm_tick_for(double seconds, double dt);

SimConfig to_sim_config(const Scenario& s);

}  // namespace crowdsim
