// Timing comparison of the serial and OpenMP drivers for the two hot paths:
// building the evolution blocks and simulating paths. Run manually; not part
// of the test suite.

#include <chrono>
#include <cstdio>

#include "mcomp/corpus.hpp"
#include "mcomp/evolution.hpp"
#include "mcomp/montecarlo.hpp"

using namespace mcomp;

namespace {

template <class F>
double time_ms(F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
  Scenario s = demo_scenario(4096);
  const ProcessSpec* specs[] = {&s.x, &s.y};
  const TimeGrid grid = TimeGrid::make(s.horizon, s.grid_steps, specs);

  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial ms", "openmp ms", "speedup");

  {
    EvolutionSystem serial, parallel;
    const double ts = time_ms([&] { serial = build_evolution(s.x, grid, 1e-12, Exec::serial); });
    const double tp = time_ms([&] { parallel = build_evolution(s.x, grid, 1e-12, Exec::parallel); });
    const bool same = serial.blocks() == parallel.blocks();
    std::printf("%-28s %10.1f %10.1f %7.2fx  %s\n", "build_evolution (m=4096)", ts, tp,
                ts / tp, same ? "bitwise equal" : "MISMATCH");
  }

  {
    std::vector<Path> serial, parallel;
    const double ts = time_ms([&] { serial = simulate(s.x, 200000, 1, Exec::serial); });
    const double tp = time_ms([&] { parallel = simulate(s.x, 200000, 1, Exec::parallel); });
    bool same = serial.size() == parallel.size();
    for (std::size_t p = 0; same && p < serial.size(); ++p)
      same = serial[p].times == parallel[p].times && serial[p].states == parallel[p].states;
    std::printf("%-28s %10.1f %10.1f %7.2fx  %s\n", "simulate (200k paths)", ts, tp,
                ts / tp, same ? "bitwise equal" : "MISMATCH");
  }

  return 0;
}
