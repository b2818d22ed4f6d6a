#include "trendsim/model.hpp"

#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace trendsim {

std::string_view to_string(Sign sign) {
    return sign == Sign::positive ? "pos" : "neg";
}

std::string_view to_string(Mode mode) {
    switch (mode) {
    case Mode::level:
        return "level";
    case Mode::trend:
        return "trend";
    case Mode::hybrid:
        return "hybrid";
    }
    return "level";
}

bool is_valid_name(std::string_view name) noexcept {
    if (name.empty()) {
        return false;
    }
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

double level_value(int level, int levels) noexcept {
    return static_cast<double>(level) / static_cast<double>(levels - 1);
}

std::optional<ElementId> CompiledModel::find(std::string_view name) const {
    const auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) {
        return std::nullopt;
    }
    return it->second;
}

ElementId CompiledModel::at(std::string_view name) const {
    if (auto id = find(name)) {
        return *id;
    }
    throw InputError("unknown element '" + std::string(name) + "'");
}

std::optional<std::uint32_t> CompiledModel::slot_of(ElementId target, ElementId regulator) const {
    const auto regs = regulators(target);
    const auto it = std::find(regs.begin(), regs.end(), regulator);
    if (it == regs.end()) {
        return std::nullopt;
    }
    return first_slot(target) + static_cast<std::uint32_t>(it - regs.begin());
}

std::span<const ScheduledToggle> CompiledModel::toggles_at(std::size_t step) const noexcept {
    const auto lo = std::lower_bound(toggles_.begin(), toggles_.end(), step,
                                     [](const ScheduledToggle& t, std::size_t s) { return t.step < s; });
    auto hi = lo;
    while (hi != toggles_.end() && hi->step == step) {
        ++hi;
    }
    return {lo, hi};
}

namespace {

std::string element_location(const Element& e, std::size_t index) {
    if (e.name.empty()) {
        return "element #" + std::to_string(index + 1);
    }
    return "element '" + e.name + "'";
}

std::string edge_location(const Hyperedge& h, std::size_t index) {
    return "hyperedge " + std::to_string(index + 1) + " (target=" + h.target + ")";
}

}  // namespace

struct ModelCompiler {
    static ValidationResult run(const Model& model) {
        ValidationResult result;
        auto& diags = result.diagnostics;

        auto element_error = [&](std::size_t i, std::string message) {
            auto d = make_error(std::move(message), element_location(model.elements[i], i));
            d.element_index = i;
            diags.push_back(std::move(d));
        };
        auto edge_diag = [&](std::size_t i, Severity severity, std::string message) {
            auto d = make_error(std::move(message), edge_location(model.hyperedges[i], i));
            d.severity = severity;
            d.hyperedge_index = i;
            diags.push_back(std::move(d));
        };

        if (!model.name.empty() && !is_valid_name(model.name)) {
            diags.push_back(make_error("model name '" + model.name + "' must match [A-Za-z0-9_]+", "model"));
        }

        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < model.elements.size(); ++i) {
            const auto& e = model.elements[i];
            if (!is_valid_name(e.name)) {
                element_error(i, "invalid element name '" + e.name + "' (expected [A-Za-z0-9_]+)");
            } else if (!index.emplace(e.name, i).second) {
                element_error(i, "duplicate element name '" + e.name + "'");
            }
            if (e.levels < 2) {
                element_error(i, "levels must be at least 2 (got " + std::to_string(e.levels) + ")");
                continue;
            }
            if (e.initial_level < 0 || e.initial_level >= e.levels) {
                element_error(i, "initial level " + std::to_string(e.initial_level) + " out of range [0, " +
                                     std::to_string(e.levels - 1) + "]");
            }
            for (std::size_t k = 0; k < e.toggles.size(); ++k) {
                const auto& t = e.toggles[k];
                if (t.level < 0 || t.level >= e.levels) {
                    element_error(i, "toggle level " + std::to_string(t.level) + " at step " + std::to_string(t.step) +
                                         " out of range [0, " + std::to_string(e.levels - 1) + "]");
                }
                if (k > 0 && t.step <= e.toggles[k - 1].step) {
                    element_error(i, "toggle steps must be strictly increasing (step " + std::to_string(t.step) +
                                         " follows step " + std::to_string(e.toggles[k - 1].step) + ")");
                }
            }
        }

        auto lookup = [&](const std::string& name) -> std::optional<std::size_t> {
            const auto it = index.find(name);
            if (it == index.end()) {
                return std::nullopt;
            }
            return it->second;
        };

        for (std::size_t i = 0; i < model.hyperedges.size(); ++i) {
            const auto& h = model.hyperedges[i];
            if (!lookup(h.target)) {
                edge_diag(i, Severity::error, "unknown element '" + h.target + "' as target");
            }
            if (h.tails.empty()) {
                edge_diag(i, Severity::error, "empty tail list");
            }
            for (const auto& tail : h.tails) {
                if (!lookup(tail.regulator)) {
                    edge_diag(i, Severity::error, "unknown element '" + tail.regulator + "' in tails");
                }
                for (const double w : {tail.level_weight, tail.trend_weight}) {
                    if (!std::isfinite(w) || w < 0.0) {
                        edge_diag(i, Severity::error,
                                  "weight on '" + tail.regulator + "' must be a finite nonnegative number");
                    } else if (w > 1.0) {
                        edge_diag(i, Severity::warning,
                                  "weight " + text::shortest(w) + " on '" + tail.regulator +
                                      "' exceeds 1; saturation becomes likely");
                    }
                }
            }
            if (h.gate) {
                const auto g = lookup(h.gate->element);
                if (!g) {
                    edge_diag(i, Severity::error, "unknown element '" + h.gate->element + "' in gate");
                } else {
                    const int levels = model.elements[*g].levels;
                    if (h.gate->level < 0 || h.gate->level >= levels) {
                        edge_diag(i, Severity::error,
                                  "gate level " + std::to_string(h.gate->level) + " out of range for '" +
                                      h.gate->element + "'");
                    }
                }
            }
        }

        if (has_errors(diags)) {
            return result;
        }
        result.model = compile(model, index);
        return result;
    }

    static CompiledModel compile(const Model& model, const std::unordered_map<std::string, std::size_t>& index) {
        CompiledModel c;
        c.source_ = model;
        const std::size_t n = model.elements.size();
        auto id_of = [&](const std::string& name) { return element_id(index.at(name)); };

        for (const auto& [name, i] : index) {
            c.by_name_.emplace(name, element_id(i));
        }

        c.levels_.reserve(n);
        c.value_offset_.reserve(n);
        for (const auto& e : model.elements) {
            c.levels_.push_back(e.levels);
            c.value_offset_.push_back(c.values_.size());
            for (int k = 0; k < e.levels; ++k) {
                c.values_.push_back(level_value(k, e.levels));
            }
        }

        // Group hyperedges by target, keeping declaration order within each target.
        std::vector<std::vector<std::size_t>> by_target(n);
        for (std::size_t i = 0; i < model.hyperedges.size(); ++i) {
            by_target[index.at(model.hyperedges[i].target)].push_back(i);
        }

        c.edge_offset_.assign(n + 1, 0);
        c.slot_offset_.assign(n + 1, 0);
        for (std::size_t t = 0; t < n; ++t) {
            c.edge_offset_[t] = c.edges_.size();
            c.slot_offset_[t] = static_cast<std::uint32_t>(c.slot_regulator_.size());
            const auto slot_base = c.slot_regulator_.size();
            for (const std::size_t hi : by_target[t]) {
                const auto& h = model.hyperedges[hi];
                CompiledEdge edge;
                edge.target = element_id(t);
                edge.sign = h.sign;
                edge.mode = h.mode;
                edge.first_tail = static_cast<std::uint32_t>(c.tails_.size());
                edge.tail_count = static_cast<std::uint32_t>(h.tails.size());
                edge.source_index = hi;
                if (h.gate) {
                    edge.gate = CompiledGate{id_of(h.gate->element), h.gate->level};
                }
                for (const auto& tail : h.tails) {
                    const ElementId reg = id_of(tail.regulator);
                    const auto begin = c.slot_regulator_.begin() + static_cast<std::ptrdiff_t>(slot_base);
                    auto it = std::find(begin, c.slot_regulator_.end(), reg);
                    std::size_t slot = 0;
                    if (it == c.slot_regulator_.end()) {
                        slot = c.slot_regulator_.size();
                        c.slot_regulator_.push_back(reg);
                    } else {
                        slot = static_cast<std::size_t>(it - c.slot_regulator_.begin());
                    }
                    c.tails_.push_back(
                        CompiledTail{reg, tail.level_weight, tail.trend_weight, static_cast<std::uint32_t>(slot)});
                }
                c.edges_.push_back(edge);
            }
            if (!by_target[t].empty()) {
                c.pool_.push_back(element_id(t));
            }
        }
        c.edge_offset_[n] = c.edges_.size();
        c.slot_offset_[n] = static_cast<std::uint32_t>(c.slot_regulator_.size());

        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& t : model.elements[i].toggles) {
                c.toggles_.push_back(ScheduledToggle{t.step, element_id(i), t.level});
            }
        }
        std::stable_sort(c.toggles_.begin(), c.toggles_.end(),
                         [](const ScheduledToggle& a, const ScheduledToggle& b) { return a.step < b.step; });
        return c;
    }
};

ValidationResult validate_model(const Model& model) {
    return ModelCompiler::run(model);
}

CompiledModel compile_model(const Model& model) {
    auto result = validate_model(model);
    if (!result.ok()) {
        std::string message = "invalid model";
        for (const auto& d : result.diagnostics) {
            if (d.severity == Severity::error) {
                message += "\n  " + format_diagnostic(d);
            }
        }
        throw InputError(message, std::move(result.diagnostics));
    }
    return std::move(*result.model);
}

SimState initial_state(const CompiledModel& model) {
    SimState state;
    state.levels.resize(model.element_count());
    for (std::size_t i = 0; i < model.element_count(); ++i) {
        state.levels[i] = model.initial_level(element_id(i));
    }
    state.last_seen.resize(model.memory_size());
    reset_trend_memory(model, state);
    state.step = 0;
    return state;
}

void reset_trend_memory(const CompiledModel& model, SimState& state) {
    for (const ElementId target : model.update_pool()) {
        const auto regs = model.regulators(target);
        const auto base = model.first_slot(target);
        for (std::size_t k = 0; k < regs.size(); ++k) {
            state.last_seen[base + k] = state.levels[index_of(regs[k])];
        }
    }
}

void apply_toggle(const CompiledModel& model, SimState& state, ElementId element, int level) {
    if (index_of(element) >= model.element_count()) {
        throw std::out_of_range("toggle references an element outside the model");
    }
    if (level < 0 || level >= model.levels(element)) {
        throw std::out_of_range("toggle level " + std::to_string(level) + " out of range for '" +
                                model.element_name(element) + "'");
    }
    state.levels[index_of(element)] = level;
}

void apply_toggles_at(const CompiledModel& model, SimState& state, std::size_t step) {
    for (const auto& t : model.toggles_at(step)) {
        state.levels[index_of(t.element)] = t.level;
    }
}

}  // namespace trendsim
