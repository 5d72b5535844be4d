#include "crowdsim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "crowdsim/error.hpp"
#include "crowdsim/io.hpp"

namespace crowdsim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::SchemaError, path + ": " + what);
}

void only_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) schema(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) schema(path.empty() ? key : path + "." + key, "unknown field");
    }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& v, const std::string& path) {
    if (!v.is_number()) schema(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) schema(path, "must be finite");
    return d;
}

std::int64_t integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema(path, "expected an integer");
    return v.get<std::int64_t>();
}

template <typename Enum, std::size_t N>
Enum choice(const json& v, const std::string& path, const std::array<Enum, N>& options) {
    if (!v.is_string()) schema(path, "expected a string");
    const std::string s = v.get<std::string>();
    for (Enum e : options) {
        if (to_string(e) == s) return e;
    }
    schema(path, "unknown value \"" + s + "\"");
}

constexpr std::array kSpaces{PersonalSpace::Narrow, PersonalSpace::Average, PersonalSpace::Broad};
constexpr std::array kPatience{Patience::Patient, Patience::Impatient};
constexpr std::array kRoles{Role::Guide, Role::Follower, Role::Independent};
constexpr std::array kKnowledge{Knowledge::Complete, Knowledge::Partial};
constexpr std::array kSituations{Situation::Calm, Situation::Panic};

template <typename Enum, std::size_t N>
bool fill_axis(const json& obj, const std::string& path, const std::array<Enum, N>& names,
               std::array<double, N>& axis) {
    bool any = false;
    for (Enum e : names) any = any || obj.contains(std::string(to_string(e)));
    if (!any) return false;
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const std::string key(to_string(names[i]));
        axis[i] = obj.contains(key) ? number(obj.at(key), join(path, key)) : 0.0;
        if (axis[i] < 0.0) schema(join(path, key), "must be non-negative");
        sum += axis[i];
    }
    if (std::abs(sum - 1.0) > kFractionTolerance) {
        std::string names_list;
        for (Enum e : names) names_list += (names_list.empty() ? "" : "/") + std::string(to_string(e));
        throw Error(ErrorCode::FractionSumError,
                    path + ": " + names_list + " fractions sum to " + std::to_string(sum) + ", expected 1");
    }
    return true;
}

TraitFractions parse_fractions(const json& obj, const std::string& path) {
    only_keys(obj, path,
              {"Narrow", "Average", "Broad", "Patient", "Impatient", "Guide", "Follower", "Independent", "Complete",
               "Partial"});
    TraitFractions f;
    fill_axis(obj, path, kSpaces, f.personal_space);
    fill_axis(obj, path, kPatience, f.patience);
    fill_axis(obj, path, kRoles, f.role);
    fill_axis(obj, path, kKnowledge, f.knowledge);
    return f;
}

AgentSpec parse_agent(const json& obj, const std::string& path) {
    only_keys(obj, path,
              {"position", "personal_space", "patience", "role", "knowledge", "v_pref", "v_max", "situation"});
    AgentSpec spec;
    if (obj.contains("position")) {
        const json& p = obj.at("position");
        if (!p.is_array() || p.size() != 2) schema(join(path, "position"), "expected [x, y]");
        spec.position = Vec2{number(p[0], join(path, "position[0]")), number(p[1], join(path, "position[1]"))};
    }
    const auto cls = obj.contains("personal_space") ? choice(obj.at("personal_space"), join(path, "personal_space"), kSpaces)
                                                    : PersonalSpace::Average;
    const auto patience =
        obj.contains("patience") ? choice(obj.at("patience"), join(path, "patience"), kPatience) : Patience::Patient;
    const auto role = obj.contains("role") ? choice(obj.at("role"), join(path, "role"), kRoles) : Role::Independent;
    const auto knowledge =
        obj.contains("knowledge") ? choice(obj.at("knowledge"), join(path, "knowledge"), kKnowledge) : Knowledge::Complete;
    const double v_pref = obj.contains("v_pref") ? number(obj.at("v_pref"), join(path, "v_pref")) : kDefaultPreferredSpeed;
    const double v_max = obj.contains("v_max") ? number(obj.at("v_max"), join(path, "v_max")) : kDefaultMaxSpeed;
    spec.traits = make_traits(cls, patience, role, knowledge, v_pref, v_max);
    try {
        validate(spec.traits);
    } catch (const Error& e) {
        schema(path, e.what());
    }
    if (obj.contains("situation")) spec.situation = choice(obj.at("situation"), join(path, "situation"), kSituations);
    return spec;
}

#define CROWDSIM_PARAM(obj, path, target, field)                            \
    if ((obj).contains(#field)) (target).field = number((obj).at(#field), join(path, #field))

MotionParams parse_motion(const json& obj, const std::string& path) {
    only_keys(obj, path,
              {"tau", "A_goal", "B_goal", "R_goal", "A_rep", "B_rep", "k_body", "A_obs", "B_obs", "A_flw", "r_1", "r_2",
               "n_min", "mass", "delta_theta_small", "delta_theta_large"});
    MotionParams m;
    CROWDSIM_PARAM(obj, path, m, tau);
    CROWDSIM_PARAM(obj, path, m, A_goal);
    CROWDSIM_PARAM(obj, path, m, B_goal);
    CROWDSIM_PARAM(obj, path, m, R_goal);
    CROWDSIM_PARAM(obj, path, m, A_rep);
    CROWDSIM_PARAM(obj, path, m, B_rep);
    CROWDSIM_PARAM(obj, path, m, k_body);
    CROWDSIM_PARAM(obj, path, m, A_obs);
    CROWDSIM_PARAM(obj, path, m, B_obs);
    CROWDSIM_PARAM(obj, path, m, A_flw);
    CROWDSIM_PARAM(obj, path, m, r_1);
    CROWDSIM_PARAM(obj, path, m, r_2);
    CROWDSIM_PARAM(obj, path, m, mass);
    CROWDSIM_PARAM(obj, path, m, delta_theta_small);
    CROWDSIM_PARAM(obj, path, m, delta_theta_large);
    if (obj.contains("n_min")) m.n_min = static_cast<int>(integer(obj.at("n_min"), join(path, "n_min")));
    try {
        validate(m);
    } catch (const Error& e) {
        schema(path, e.what());
    }
    return m;
}

PerceptionParams parse_perception(const json& obj, const std::string& path) {
    only_keys(obj, path, {"sense_range", "fov_cos_threshold"});
    PerceptionParams p;
    CROWDSIM_PARAM(obj, path, p, sense_range);
    CROWDSIM_PARAM(obj, path, p, fov_cos_threshold);
    try {
        validate(p);
    } catch (const Error& e) {
        schema(path, e.what());
    }
    return p;
}

#undef CROWDSIM_PARAM

}  // namespace

Scenario parse_scenario(const json& doc, const std::string& base_dir) {
    only_keys(doc, "",
              {"map", "population", "agents", "fractions", "motion", "perception", "dt", "max_ticks", "seed",
               "alarm_time", "mode", "threads"});
    Scenario s;
    if (doc.contains("map")) {
        if (!doc.at("map").is_string()) schema("map", "expected a string");
        s.map = doc.at("map").get<std::string>();
        const std::filesystem::path p(s.map);
        s.resolved_map = p.is_absolute() || base_dir.empty() ? s.map : (std::filesystem::path(base_dir) / p).string();
    }
    if (doc.contains("agents")) {
        const json& list = doc.at("agents");
        if (!list.is_array()) schema("agents", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            s.agents.push_back(parse_agent(list[i], "agents[" + std::to_string(i) + "]"));
        }
    }
    if (doc.contains("population")) {
        const std::int64_t n = integer(doc.at("population"), "population");
        if (n < 0) schema("population", "must be non-negative");
        if (!s.agents.empty() && n != static_cast<std::int64_t>(s.agents.size())) {
            schema("population", "disagrees with the length of agents");
        }
        s.population = static_cast<int>(n);
    } else {
        s.population = static_cast<int>(s.agents.size());
    }
    if (doc.contains("fractions")) s.fractions = parse_fractions(doc.at("fractions"), "fractions");
    if (doc.contains("motion")) s.motion = parse_motion(doc.at("motion"), "motion");
    if (doc.contains("perception")) s.perception = parse_perception(doc.at("perception"), "perception");
    if (doc.contains("dt")) {
        s.dt = number(doc.at("dt"), "dt");
        if (s.dt <= 0.0) schema("dt", "must be positive");
    }
    if (doc.contains("max_ticks")) {
        s.max_ticks = integer(doc.at("max_ticks"), "max_ticks");
        if (s.max_ticks <= 0) schema("max_ticks", "must be positive");
    }
    if (doc.contains("seed")) {
        const json& v = doc.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            schema("seed", "expected a non-negative integer");
        }
        s.seed = v.get<std::uint64_t>();
    }
    if (doc.contains("alarm_time") && !doc.at("alarm_time").is_null()) {
        s.alarm_time = number(doc.at("alarm_time"), "alarm_time");
        if (*s.alarm_time < 0.0) schema("alarm_time", "must be non-negative");
    }
    if (doc.contains("mode")) {
        const json& v = doc.at("mode");
        if (v == "parallel") {
            s.mode = StepMode::Parallel;
        } else if (v == "reference") {
            s.mode = StepMode::Reference;
        } else {
            schema("mode", "expected \"parallel\" or \"reference\"");
        }
    }
    if (doc.contains("threads")) {
        const std::int64_t t = integer(doc.at("threads"), "threads");
        if (t < 0) schema("threads", "must be non-negative");
        s.threads = static_cast<int>(t);
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    const std::string text = read_text_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, "<root>: " + std::string(e.what()));
    }
    return parse_scenario(doc, std::filesystem::path(path).parent_path().string());
}

ordered_json scenario_to_json(const Scenario& s) {
    ordered_json doc;
    if (!s.map.empty()) doc["map"] = s.map;
    doc["population"] = s.population;
    if (!s.agents.empty()) {
        ordered_json list = ordered_json::array();
        for (const AgentSpec& a : s.agents) {
            ordered_json j;
            if (a.position) j["position"] = {a.position->x, a.position->y};
            j["personal_space"] = to_string(a.traits.personal_space_class);
            j["patience"] = to_string(a.traits.patience);
            j["role"] = to_string(a.traits.role);
            j["knowledge"] = to_string(a.traits.knowledge);
            j["v_pref"] = a.traits.v_pref;
            j["v_max"] = a.traits.v_max;
            j["situation"] = to_string(a.situation);
            list.push_back(j);
        }
        doc["agents"] = list;
    }
    ordered_json f;
    for (std::size_t i = 0; i < kSpaces.size(); ++i) f[std::string(to_string(kSpaces[i]))] = s.fractions.personal_space[i];
    for (std::size_t i = 0; i < kPatience.size(); ++i) f[std::string(to_string(kPatience[i]))] = s.fractions.patience[i];
    for (std::size_t i = 0; i < kRoles.size(); ++i) f[std::string(to_string(kRoles[i]))] = s.fractions.role[i];
    for (std::size_t i = 0; i < kKnowledge.size(); ++i) f[std::string(to_string(kKnowledge[i]))] = s.fractions.knowledge[i];
    doc["fractions"] = f;
    const MotionParams& m = s.motion;
    doc["motion"] = {{"tau", m.tau},     {"A_goal", m.A_goal}, {"B_goal", m.B_goal}, {"R_goal", m.R_goal},
                     {"A_rep", m.A_rep}, {"B_rep", m.B_rep},   {"k_body", m.k_body}, {"A_obs", m.A_obs},
                     {"B_obs", m.B_obs}, {"A_flw", m.A_flw},   {"r_1", m.r_1},       {"r_2", m.r_2},
                     {"n_min", m.n_min}, {"mass", m.mass},     {"delta_theta_small", m.delta_theta_small},
                     {"delta_theta_large", m.delta_theta_large}};
    doc["perception"] = {{"sense_range", s.perception.sense_range},
                         {"fov_cos_threshold", s.perception.fov_cos_threshold}};
    doc["dt"] = s.dt;
    doc["max_ticks"] = s.max_ticks;
    doc["seed"] = s.seed;
    doc["alarm_time"] = s.alarm_time ? ordered_json(*s.alarm_time) : ordered_json(nullptr);
    doc["mode"] = s.mode == StepMode::Parallel ? "parallel" : "reference";
    doc["threads"] = s.threads;
    return doc;
}

std::int64_t alarm_tick_for(double seconds, double dt) {
    // The slack keeps exact halves such as 0.125 s / 0.05 s from rounding down.
    return static_cast<std::int64_t>(std::floor(seconds / dt + 0.5 + 1e-9));
}

SimConfig to_sim_config(const Scenario& s) {
    SimConfig c;
    c.dt = s.dt;
    c.max_ticks = s.max_ticks;
    c.rng_seed = s.seed;
    if (s.alarm_time) c.alarm_tick = alarm_tick_for(*s.alarm_time, s.dt);
    c.perception = s.perception;
    c.motion = s.motion;
    c.population = s.population;
    c.fractions = s.fractions;
    c.agents = s.agents;
    c.mode = s.mode;
    c.threads = s.threads;
    return c;
}

}  // namespace crowdsim
