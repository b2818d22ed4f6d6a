#pragma once

#include "trendsim/dynamics.hpp"
#include "trendsim/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace trendsim {

/// The one generator used by every run. std::mt19937_64 is fully specified by the
/// standard, so streams are identical across platforms and standard libraries.
using Rng = std::mt19937_64;
inline constexpr std::string_view kRngName = "mt19937_64";

/// Unbiased draw from [0, bound) by rejection; independent of any std distribution.
[[nodiscard]] std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

struct Simultaneous {
    friend bool operator==(const Simultaneous&, const Simultaneous&) = default;
};

/// Updates one element per step, cycling through `order`.
struct SequentialFixed {
    std::vector<std::string> order;
    friend bool operator==(const SequentialFixed&, const SequentialFixed&) = default;
};

/// Updates one element per step, drawn uniformly from the update pool.
struct RandomSequential {
    friend bool operator==(const RandomSequential&, const RandomSequential&) = default;
};

struct UpdateGroup {
    std::string name;
    std::vector<std::string> members;
    friend bool operator==(const UpdateGroup&, const UpdateGroup&) = default;
};

/// Each step draws one group uniformly (with replacement) and updates its members together.
struct GroupUpdate {
    std::vector<UpdateGroup> groups;
    friend bool operator==(const GroupUpdate&, const GroupUpdate&) = default;
};

using Scheme = std::variant<Simultaneous, SequentialFixed, RandomSequential, GroupUpdate>;

/// "simultaneous", "seq-fixed", "rsb" or "group".
[[nodiscard]] std::string_view scheme_name(const Scheme& scheme);

/// Scheme with names resolved against a model.
struct ResolvedScheme {
    enum class Kind { simultaneous, sequential_fixed, random_sequential, group };
    Kind kind = Kind::random_sequential;
    std::vector<ElementId> pool;                 // order for sequential_fixed
    std::vector<std::vector<ElementId>> groups;  // group members
};

/// Throws InputError unless SequentialFixed orders and group partitions cover the
/// update pool exactly once.
[[nodiscard]] ResolvedScheme resolve_scheme(const CompiledModel& model, const Scheme& scheme);

struct SimulationConfig {
    Scheme scheme = RandomSequential{};
    std::size_t steps = 1;
    std::size_t runs = 1;
    std::uint64_t base_seed = 0;
    std::size_t record_every = 1;
};

/// Seed of the i-th run of an ensemble.
[[nodiscard]] constexpr std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run_index) noexcept {
    return base_seed + static_cast<std::uint64_t>(run_index);
}

/// Reusable per-run buffers.
struct StepScratch {
    std::vector<int> pending;
};

/// Executes step `t` (t >= 1): toggles scheduled at t first, then the scheme's updates.
void step(const CompiledModel& model, const ResolvedScheme& scheme, SimState& state, Rng& rng, std::size_t t,
          StepScratch& scratch, std::vector<SaturationEvent>* events = nullptr);

/// Levels recorded at steps 0, record_every, 2*record_every, ... <= steps.
struct RunTrace {
    std::uint64_t seed = 0;
    std::size_t element_count = 0;
    std::vector<std::size_t> steps;
    std::vector<int> levels;  // row-major: rows x element_count
    std::vector<SaturationEvent> saturation;

    [[nodiscard]] std::size_t rows() const noexcept { return steps.size(); }
    [[nodiscard]] int level(std::size_t row, ElementId element) const noexcept {
        return levels[row * element_count + index_of(element)];
    }

    friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// The state a run starts from: initial levels with step-0 toggles folded in, all trends zero.
[[nodiscard]] SimState run_start_state(const CompiledModel& model);

[[nodiscard]] RunTrace run_once(const CompiledModel& model, const ResolvedScheme& scheme,
                                const SimulationConfig& config, std::uint64_t seed);
[[nodiscard]] RunTrace run_once(const CompiledModel& model, const SimulationConfig& config, std::uint64_t seed);

struct Ensemble {
    std::vector<RunTrace> runs;
};

/// Calls `body(i)` for every run index, on up to `jobs` threads. Exceptions are rethrown.
void for_each_run(std::size_t runs, unsigned jobs, const std::function<void(std::size_t)>& body);

/// Run i uses seed base_seed + i; results are ordered by run index.
[[nodiscard]] Ensemble simulate(const CompiledModel& model, const SimulationConfig& config, unsigned jobs = 1);

}  // namespace trendsim
