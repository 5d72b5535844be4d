// Per-tick cost of the serial brute-force reference against the indexed OpenMP step.

#include <string>

#include <benchmark/benchmark.h>

#include "crowdsim/simulation.hpp"

using namespace crowdsim;

namespace {

// 50 m x 50 m hall at 0.5 m cells, one exit on the east wall.
const World& hall() {
    static const World w = [] {
        std::string text;
        for (int y = 0; y < 100; ++y) {
            for (int x = 0; x < 100; ++x) {
                const bool edge = x == 0 || y == 0 || x == 99 || y == 99;
                text += edge ? (x == 99 && y == 50 ? 'E' : '#') : '.';
            }
            text += '\n';
        }
        return compile_world(parse_grid(text));
    }();
    return w;
}

void run_ticks(benchmark::State& state, StepMode mode) {
    SimConfig c;
    c.population = static_cast<int>(state.range(0));
    c.mode = mode;
    const std::vector<Agent> start = spawn_population(hall(), c);
    std::int64_t tick = 0;
    std::vector<Agent> agents = start;
    for (auto _ : state) {
        StepResult r = step(hall(), agents, c, ++tick);
        agents = std::move(r.agents);
        benchmark::DoNotOptimize(agents.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StepReference(benchmark::State& state) { run_ticks(state, StepMode::Reference); }
void BM_StepParallel(benchmark::State& state) { run_ticks(state, StepMode::Parallel); }

}  // namespace

BENCHMARK(BM_StepReference)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepParallel)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
