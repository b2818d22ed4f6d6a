#pragma once

#include "trendsim/model.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace fixtures {

// Three elements: input A, B trend-regulated by A, C level-regulated by A.
// A starts at 0.6, is toggled to 0.8 at step 2 and to 0.2 at step 3.
inline constexpr double kTrioTrendWeight = 0.5;
inline constexpr double kTrioLevelWeight = 0.5;
trendsim::Model trio_model();

enum class ToyScenario { regular, or_, and_, not_, target };
std::string_view scenario_name(ToyScenario scenario);

// cause -> problem <- intervention, problem -> outcome, all with 11 levels.
// Inputs: cause 0.6 at t=5, 0.7 at t=15, 0 at t=20; intervention 0.8 at t=18.
// outcome starts at 1.0. The cause -> outcome edge of OR is level-based in every mode.
inline constexpr double kToyLevelWeight = 0.25;
inline constexpr double kToyTrendWeight = 0.5;
inline constexpr double kToyOrCauseWeight = 1.0;
inline constexpr std::size_t kToySteps = 50;
inline constexpr std::size_t kToyRuns = 200;
trendsim::Model toy_model(ToyScenario scenario, trendsim::Mode mode);

// 31 elements, 49 regulator->target arcs (one self-loop), hybrid weights 0.25 / 0.5,
// inputs driven by random-walk toggles over 170 steps.
inline constexpr std::size_t kBenchNodes = 31;
inline constexpr std::size_t kBenchArcs = 49;
inline constexpr std::size_t kBenchInputs = 8;
inline constexpr std::size_t kBenchSteps = 170;
inline constexpr std::uint64_t kBenchSeed = 20240531;
trendsim::Model benchmark_model(std::uint64_t seed = kBenchSeed);

// Arc count of a model: one per (tail, hyperedge).
std::size_t arc_count(const trendsim::Model& model);

}  // namespace fixtures
