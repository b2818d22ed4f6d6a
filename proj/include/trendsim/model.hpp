#pragma once

#include "trendsim/diagnostic.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trendsim {

enum class Sign { positive, negative };
enum class Mode { level, trend, hybrid };

[[nodiscard]] std::string_view to_string(Sign sign);
[[nodiscard]] std::string_view to_string(Mode mode);

/// Overwrite of an element's level at a given simulation step.
struct Toggle {
    std::size_t step = 0;
    int level = 0;

    friend bool operator==(const Toggle&, const Toggle&) = default;
};

using ToggleSequence = std::vector<Toggle>;

struct Element {
    std::string name;
    int levels = 2;
    int initial_level = 0;
    ToggleSequence toggles;

    friend bool operator==(const Element&, const Element&) = default;
};

struct Tail {
    std::string regulator;
    double level_weight = 0.0;
    double trend_weight = 0.0;

    friend bool operator==(const Tail&, const Tail&) = default;
};

/// The hyperedge only contributes while `element` sits exactly at `level`.
struct Gate {
    std::string element;
    int level = 0;

    friend bool operator==(const Gate&, const Gate&) = default;
};

struct Hyperedge {
    std::string target;
    Sign sign = Sign::positive;
    Mode mode = Mode::level;
    std::vector<Tail> tails;
    std::optional<Gate> gate;

    friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
};

/// Authoring form of a model. Names are unresolved until validate_model().
struct Model {
    std::string name;
    std::vector<Element> elements;
    std::vector<Hyperedge> hyperedges;

    friend bool operator==(const Model&, const Model&) = default;
};

/// Nonempty and drawn from [A-Za-z0-9_].
[[nodiscard]] bool is_valid_name(std::string_view name) noexcept;

/// k / (L - 1).
[[nodiscard]] double level_value(int level, int levels) noexcept;

enum class ElementId : std::uint32_t {};

[[nodiscard]] constexpr std::size_t index_of(ElementId id) noexcept { return static_cast<std::size_t>(id); }
[[nodiscard]] constexpr ElementId element_id(std::size_t index) noexcept {
    return static_cast<ElementId>(static_cast<std::uint32_t>(index));
}

struct CompiledTail {
    ElementId regulator{};
    double level_weight = 0.0;
    double trend_weight = 0.0;
    std::uint32_t slot = 0;  // index into SimState::last_seen
};

struct CompiledGate {
    ElementId element{};
    int level = 0;
};

struct CompiledEdge {
    ElementId target{};
    Sign sign = Sign::positive;
    Mode mode = Mode::level;
    std::uint32_t first_tail = 0;
    std::uint32_t tail_count = 0;
    std::optional<CompiledGate> gate;
    std::size_t source_index = 0;  // position in Model::hyperedges
};

struct ScheduledToggle {
    std::size_t step = 0;
    ElementId element{};
    int level = 0;
};

/// Validated, index-resolved model. Immutable and safe to share between runs.
class CompiledModel {
public:
    [[nodiscard]] const Model& source() const noexcept { return source_; }
    [[nodiscard]] const std::string& name() const noexcept { return source_.name; }

    [[nodiscard]] std::size_t element_count() const noexcept { return source_.elements.size(); }
    [[nodiscard]] const std::string& element_name(ElementId id) const { return source_.elements[index_of(id)].name; }
    [[nodiscard]] std::optional<ElementId> find(std::string_view name) const;
    [[nodiscard]] ElementId at(std::string_view name) const;  // throws InputError

    [[nodiscard]] int levels(ElementId id) const noexcept { return levels_[index_of(id)]; }
    [[nodiscard]] int initial_level(ElementId id) const noexcept { return source_.elements[index_of(id)].initial_level; }
    [[nodiscard]] double value(ElementId id, int level) const noexcept {
        return values_[value_offset_[index_of(id)] + static_cast<std::size_t>(level)];
    }

    [[nodiscard]] bool is_regulated(ElementId id) const noexcept { return edge_offset_[index_of(id) + 1] > edge_offset_[index_of(id)]; }

    /// Regulated elements in declaration order.
    [[nodiscard]] std::span<const ElementId> update_pool() const noexcept { return pool_; }

    [[nodiscard]] std::span<const CompiledEdge> incoming(ElementId target) const noexcept {
        const auto i = index_of(target);
        return std::span(edges_).subspan(edge_offset_[i], edge_offset_[i + 1] - edge_offset_[i]);
    }
    [[nodiscard]] std::span<const CompiledTail> tails(const CompiledEdge& edge) const noexcept {
        return std::span(tails_).subspan(edge.first_tail, edge.tail_count);
    }

    /// Distinct regulators of `target`; the i-th one owns trend-memory slot first_slot(target) + i.
    [[nodiscard]] std::span<const ElementId> regulators(ElementId target) const noexcept {
        const auto i = index_of(target);
        return std::span(slot_regulator_).subspan(slot_offset_[i], slot_offset_[i + 1] - slot_offset_[i]);
    }
    [[nodiscard]] std::uint32_t first_slot(ElementId target) const noexcept { return slot_offset_[index_of(target)]; }
    [[nodiscard]] std::size_t memory_size() const noexcept { return slot_regulator_.size(); }
    [[nodiscard]] std::optional<std::uint32_t> slot_of(ElementId target, ElementId regulator) const;

    /// All toggles, ordered by step and then by element declaration order.
    [[nodiscard]] std::span<const ScheduledToggle> toggles() const noexcept { return toggles_; }
    [[nodiscard]] std::span<const ScheduledToggle> toggles_at(std::size_t step) const noexcept;

private:
    friend struct ModelCompiler;

    Model source_;
    std::unordered_map<std::string, ElementId> by_name_;
    std::vector<int> levels_;
    std::vector<std::size_t> value_offset_;
    std::vector<double> values_;
    std::vector<ElementId> pool_;
    std::vector<std::size_t> edge_offset_;  // size element_count + 1
    std::vector<CompiledEdge> edges_;
    std::vector<CompiledTail> tails_;
    std::vector<std::uint32_t> slot_offset_;  // size element_count + 1
    std::vector<ElementId> slot_regulator_;
    std::vector<ScheduledToggle> toggles_;
};

struct ValidationResult {
    std::optional<CompiledModel> model;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool ok() const noexcept { return model.has_value(); }
};

/// Checks every structural invariant. Dangling names and out-of-range levels are errors;
/// weights above 1 are warnings.
[[nodiscard]] ValidationResult validate_model(const Model& model);

/// validate_model() that throws InputError when the model has errors.
[[nodiscard]] CompiledModel compile_model(const Model& model);

/// Current level of every element plus trend memory. `last_seen[slot]` is the level a
/// regulator had when its regulated element was last updated.
struct SimState {
    std::vector<int> levels;
    std::vector<int> last_seen;
    std::size_t step = 0;

    friend bool operator==(const SimState&, const SimState&) = default;
};

/// Every element at its initial level, every trend zero, step 0.
[[nodiscard]] SimState initial_state(const CompiledModel& model);

/// Re-snapshots trend memory from the current levels so that every trend reads zero.
void reset_trend_memory(const CompiledModel& model, SimState& state);

/// Overwrites one element's level. Trend memory is left untouched, so regulated
/// elements observe the jump as a trend at their next update.
void apply_toggle(const CompiledModel& model, SimState& state, ElementId element, int level);

/// Applies all toggles scheduled for `step`, in declaration order.
void apply_toggles_at(const CompiledModel& model, SimState& state, std::size_t step);

}  // namespace trendsim
