#pragma once
// Deterministic scenario corpus for the soundness battery: unstructured
// random pairs (certificates must never contradict the oracle), ordered
// birth-death pairs (certificates must appear and flip under swapping), and
// special constructions (identical pairs, support violations, pure-jump and
// mixed-jump pairs, kernel-condition failures).

#include <cstdint>
#include <vector>

#include "mcomp/scenario.hpp"

namespace mcomp {

inline constexpr std::uint64_t kCorpusMasterSeed = 0x6d636f6d7031ULL;

std::vector<Scenario> soundness_corpus(std::size_t count,
                                       std::uint64_t master_seed = kCorpusMasterSeed);

// The bundled demonstration pairs.
// Two-state chain: X jumps up at rate 2 / down at rate 1, Y at 1 / 1, start
// in the low state, f the indicator of the high state.
Scenario demo_scenario(int grid_steps = 1024);
// Same chain with a piecewise rate switch for X at t = 1/2 (generator sides
// differ at the breakpoint).
Scenario demo_piecewise_scenario(int grid_steps = 1024);
// No continuous motion; two scheduled jumps through ordered kernels.
Scenario purejump_scenario(int grid_steps = 256);

}  // namespace mcomp
