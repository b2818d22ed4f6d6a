#include "trendsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trendsim {

namespace {

// Past this many grid steps every update saturates anyway.
constexpr double kMaxSteps = 1e15;

struct Parts {
    double level = 0.0;
    double trend = 0.0;
};

template <typename OnTerm>
Parts accumulate(const CompiledModel& model, ElementId target, const SimState& state, OnTerm&& on_term) noexcept {
    Parts parts;
    for (const auto& edge : model.incoming(target)) {
        if (!gate_open(edge, state)) {
            on_term(0.0);
            continue;
        }
        const auto tails = model.tails(edge);
        const double s = edge.sign == Sign::positive ? 1.0 : -1.0;
        double lv = 0.0;
        double tr = 0.0;
        if (edge.mode != Mode::trend) {
            lv = s * level_term(model, tails, state);
            parts.level += lv;
        }
        if (edge.mode != Mode::level) {
            tr = s * trend_term(model, tails, state);
            parts.trend += tr;
        }
        on_term(lv + tr);
    }
    return parts;
}

int clamp_level(std::int64_t raw, int levels, std::optional<Boundary>& clamped) noexcept {
    if (raw < 0) {
        clamped = Boundary::lower;
        return 0;
    }
    if (raw > levels - 1) {
        clamped = Boundary::upper;
        return levels - 1;
    }
    return static_cast<int>(raw);
}

}  // namespace

double level_term(const CompiledModel& model, std::span<const CompiledTail> tails, const SimState& state) noexcept {
    double product = 1.0;
    for (const auto& tail : tails) {
        product *= tail.level_weight * model.value(tail.regulator, state.levels[index_of(tail.regulator)]);
    }
    return product;
}

double trend_term(const CompiledModel& model, std::span<const CompiledTail> tails, const SimState& state) noexcept {
    double product = 1.0;
    for (const auto& tail : tails) {
        const double now = model.value(tail.regulator, state.levels[index_of(tail.regulator)]);
        const double then = model.value(tail.regulator, state.last_seen[tail.slot]);
        product *= tail.trend_weight * (now - then);
    }
    return product;
}

double observed_trend(const CompiledModel& model, const SimState& state, ElementId target, ElementId regulator) {
    const auto slot = model.slot_of(target, regulator);
    if (!slot) {
        throw std::invalid_argument("'" + model.element_name(regulator) + "' does not regulate '" +
                                    model.element_name(target) + "'");
    }
    return model.value(regulator, state.levels[index_of(regulator)]) - model.value(regulator, state.last_seen[*slot]);
}

bool gate_open(const CompiledEdge& edge, const SimState& state) noexcept {
    return !edge.gate || state.levels[index_of(edge.gate->element)] == edge.gate->level;
}

BalanceResult balancing(const CompiledModel& model, ElementId target, const SimState& state) {
    BalanceResult result;
    result.terms.reserve(model.incoming(target).size());
    const Parts parts = accumulate(model, target, state, [&](double term) { result.terms.push_back(term); });
    result.level_part = parts.level;
    result.trend_part = parts.trend;
    result.value = parts.level + parts.trend;
    return result;
}

double balance_value(const CompiledModel& model, ElementId target, const SimState& state) noexcept {
    const Parts parts = accumulate(model, target, state, [](double) {});
    return parts.level + parts.trend;
}

std::int64_t quantize_steps(double balance, int levels) noexcept {
    if (balance == 0.0 || std::isnan(balance)) {
        return 0;
    }
    const double scaled = std::min(std::abs(balance) * static_cast<double>(levels - 1), kMaxSteps);
    const auto steps = static_cast<std::int64_t>(std::max(0.0, std::ceil(scaled - kQuantizeSlack)));
    return balance < 0.0 ? -steps : steps;
}

double quantize(double balance, int levels) noexcept {
    return static_cast<double>(quantize_steps(balance, levels)) / static_cast<double>(levels - 1);
}

std::string_view to_string(Boundary boundary) {
    return boundary == Boundary::lower ? "lower" : "upper";
}

UpdateResult update_element(const CompiledModel& model, SimState& state, ElementId target,
                            std::vector<SaturationEvent>* events) {
    const auto i = index_of(target);
    const int levels = model.levels(target);
    UpdateResult result;
    result.previous_level = state.levels[i];
    const std::int64_t raw = result.previous_level + quantize_steps(balance_value(model, target, state), levels);
    result.level = clamp_level(raw, levels, result.clamped);
    state.levels[i] = result.level;

    const auto regs = model.regulators(target);
    const auto base = model.first_slot(target);
    for (std::size_t k = 0; k < regs.size(); ++k) {
        state.last_seen[base + k] = state.levels[index_of(regs[k])];
    }
    if (result.clamped && events) {
        events->push_back(SaturationEvent{target, state.step, *result.clamped});
    }
    return result;
}

void update_together(const CompiledModel& model, SimState& state, std::span<const ElementId> targets,
                     std::vector<int>& scratch, std::vector<SaturationEvent>* events) {
    scratch.resize(targets.size());
    for (std::size_t n = 0; n < targets.size(); ++n) {
        const ElementId target = targets[n];
        const int levels = model.levels(target);
        std::optional<Boundary> clamped;
        const std::int64_t raw =
            state.levels[index_of(target)] + quantize_steps(balance_value(model, target, state), levels);
        scratch[n] = clamp_level(raw, levels, clamped);
        if (clamped && events) {
            events->push_back(SaturationEvent{target, state.step, *clamped});
        }
    }
    // Snapshot memory before committing so concurrent changes stay visible as trends.
    for (std::size_t n = 0; n < targets.size(); ++n) {
        const ElementId target = targets[n];
        const auto regs = model.regulators(target);
        const auto base = model.first_slot(target);
        for (std::size_t k = 0; k < regs.size(); ++k) {
            state.last_seen[base + k] = regs[k] == target ? scratch[n] : state.levels[index_of(regs[k])];
        }
    }
    for (std::size_t n = 0; n < targets.size(); ++n) {
        state.levels[index_of(targets[n])] = scratch[n];
    }
}

}  // namespace trendsim
