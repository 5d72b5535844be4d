#include <iostream>

#include "CLI11.hpp"

#include "crowdsim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Crowd evacuation simulator"};
    app.require_subcommand(1);

    crowdsim::RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write trajectory, metrics and frames");
    run_cmd->add_option("--map", run.map, "ASCII floor plan")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--scenario", run.scenario, "Scenario JSON")->required();
    run_cmd->add_option("--out", run.out_dir, "Output directory")->required();
    run_cmd->add_option("--ticks", run.ticks, "Maximum ticks");
    run_cmd->add_option("--dt", run.dt, "Time step in seconds");
    run_cmd->add_option("--seed", run.seed, "RNG seed");
    run_cmd->add_option("--alarm-at", run.alarm_at, "Alarm time in seconds");
    run_cmd->add_option("--frames-every", run.frames_every, "Write an SVG frame every N ticks");

    std::string compile_map, compile_out;
    auto* compile_cmd = app.add_subcommand("compile", "Emit the compiled world as JSON");
    compile_cmd->add_option("--map", compile_map, "ASCII floor plan")->required();
    compile_cmd->add_option("--out", compile_out, "Output JSON file")->required();

    std::string validate_map;
    auto* validate_cmd = app.add_subcommand("validate", "Check a floor plan and print room and portal diagnostics");
    validate_cmd->add_option("--map", validate_map, "ASCII floor plan")->required();

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) return crowdsim::run_command(run, std::cout, std::cerr);
    if (*compile_cmd) return crowdsim::compile_command(compile_map, compile_out, std::cout, std::cerr);
    return crowdsim::validate_command(validate_map, std::cout, std::cerr);
}
