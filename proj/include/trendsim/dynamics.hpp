#pragma once

#include "trendsim/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace trendsim {

/// Quantization treats |B|·(L-1) values within this many level units above an integer
/// as that integer, so floating-point noise like 0.9 - 0.6 = 0.30000000000000004 does
/// not round up to an extra level.
inline constexpr double kQuantizeSlack = 1e-9;

struct BalanceResult {
    double value = 0.0;        // level_part + trend_part
    double level_part = 0.0;   // signed sum of level terms
    double trend_part = 0.0;   // signed sum of trend terms
    std::vector<double> terms;  // signed contribution of each incoming hyperedge, in incoming() order
};

/// Product over tails of level_weight * value(regulator). Unsigned.
[[nodiscard]] double level_term(const CompiledModel& model, std::span<const CompiledTail> tails,
                                const SimState& state) noexcept;

/// Product over tails of trend_weight * (current value - last value seen by the target).
[[nodiscard]] double trend_term(const CompiledModel& model, std::span<const CompiledTail> tails,
                                const SimState& state) noexcept;

/// Net change of `regulator` since `target` last updated.
[[nodiscard]] double observed_trend(const CompiledModel& model, const SimState& state, ElementId target,
                                    ElementId regulator);

[[nodiscard]] bool gate_open(const CompiledEdge& edge, const SimState& state) noexcept;

/// Signed sum of hyperedge contributions for a regulated element.
[[nodiscard]] BalanceResult balancing(const CompiledModel& model, ElementId target, const SimState& state);

/// balancing().value without the per-term breakdown.
[[nodiscard]] double balance_value(const CompiledModel& model, ElementId target, const SimState& state) noexcept;

/// Signed number of grid steps: sign(B) * ceil(|B| * (L-1)).
[[nodiscard]] std::int64_t quantize_steps(double balance, int levels) noexcept;

/// Grid delta sign(B) * ceil(|B| / q) * q with q = 1/(L-1). Unclamped.
[[nodiscard]] double quantize(double balance, int levels) noexcept;

enum class Boundary { lower, upper };

[[nodiscard]] std::string_view to_string(Boundary boundary);

struct SaturationEvent {
    ElementId element{};
    std::size_t step = 0;
    Boundary boundary = Boundary::upper;

    friend bool operator==(const SaturationEvent&, const SaturationEvent&) = default;
};

struct UpdateResult {
    int previous_level = 0;
    int level = 0;
    std::optional<Boundary> clamped;  // set when overflow was discarded
};

/// Applies the quantized balancing update to one element, clamps to [0, 1] and refreshes
/// the element's trend memory so that every trend it observes afterwards is zero.
UpdateResult update_element(const CompiledModel& model, SimState& state, ElementId target,
                            std::vector<SaturationEvent>* events = nullptr);

/// Updates several elements against one shared snapshot, then commits them together.
/// Each target remembers its regulators as they were in the snapshot (its own entry
/// takes the new level), so changes committed in this same step are observed later.
void update_together(const CompiledModel& model, SimState& state, std::span<const ElementId> targets,
                     std::vector<int>& scratch, std::vector<SaturationEvent>* events = nullptr);

}  // namespace trendsim
