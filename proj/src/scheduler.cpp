#include "trendsim/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

namespace trendsim {

std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    // Reject the low (2^64 mod bound) outputs so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) {
            return x % bound;
        }
    }
}

std::string_view scheme_name(const Scheme& scheme) {
    struct Visitor {
        std::string_view operator()(const Simultaneous&) const { return "simultaneous"; }
        std::string_view operator()(const SequentialFixed&) const { return "seq-fixed"; }
        std::string_view operator()(const RandomSequential&) const { return "rsb"; }
        std::string_view operator()(const GroupUpdate&) const { return "group"; }
    };
    return std::visit(Visitor{}, scheme);
}

namespace {

std::vector<ElementId> resolve_names(const CompiledModel& model, const std::vector<std::string>& names,
                                     std::string_view what, std::unordered_set<std::uint32_t>& seen) {
    std::vector<ElementId> ids;
    ids.reserve(names.size());
    for (const auto& name : names) {
        const auto id = model.find(name);
        if (!id) {
            throw InputError(std::string(what) + ": unknown element '" + name + "'");
        }
        if (!model.is_regulated(*id)) {
            throw InputError(std::string(what) + ": '" + name + "' has no regulators and is never updated");
        }
        if (!seen.insert(static_cast<std::uint32_t>(*id)).second) {
            throw InputError(std::string(what) + ": '" + name + "' listed more than once");
        }
        ids.push_back(*id);
    }
    return ids;
}

void require_cover(const CompiledModel& model, const std::unordered_set<std::uint32_t>& seen, std::string_view what) {
    for (const ElementId id : model.update_pool()) {
        if (!seen.count(static_cast<std::uint32_t>(id))) {
            throw InputError(std::string(what) + ": regulated element '" + model.element_name(id) +
                             "' is missing");
        }
    }
}

}  // namespace

ResolvedScheme resolve_scheme(const CompiledModel& model, const Scheme& scheme) {
    ResolvedScheme resolved;
    const auto pool = model.update_pool();
    if (std::holds_alternative<Simultaneous>(scheme)) {
        resolved.kind = ResolvedScheme::Kind::simultaneous;
        resolved.pool.assign(pool.begin(), pool.end());
    } else if (std::holds_alternative<RandomSequential>(scheme)) {
        resolved.kind = ResolvedScheme::Kind::random_sequential;
        resolved.pool.assign(pool.begin(), pool.end());
    } else if (const auto* seq = std::get_if<SequentialFixed>(&scheme)) {
        resolved.kind = ResolvedScheme::Kind::sequential_fixed;
        std::unordered_set<std::uint32_t> seen;
        resolved.pool = resolve_names(model, seq->order, "update order", seen);
        require_cover(model, seen, "update order");
    } else {
        const auto& group = std::get<GroupUpdate>(scheme);
        resolved.kind = ResolvedScheme::Kind::group;
        std::unordered_set<std::uint32_t> seen;
        for (const auto& g : group.groups) {
            if (g.members.empty()) {
                throw InputError("update group '" + g.name + "' is empty");
            }
            resolved.groups.push_back(resolve_names(model, g.members, "update group '" + g.name + "'", seen));
        }
        require_cover(model, seen, "update groups");
    }
    return resolved;
}

void step(const CompiledModel& model, const ResolvedScheme& scheme, SimState& state, Rng& rng, std::size_t t,
          StepScratch& scratch, std::vector<SaturationEvent>* events) {
    state.step = t;
    apply_toggles_at(model, state, t);
    switch (scheme.kind) {
    case ResolvedScheme::Kind::simultaneous:
        update_together(model, state, scheme.pool, scratch.pending, events);
        break;
    case ResolvedScheme::Kind::sequential_fixed:
        if (!scheme.pool.empty()) {
            update_element(model, state, scheme.pool[(t - 1) % scheme.pool.size()], events);
        }
        break;
    case ResolvedScheme::Kind::random_sequential:
        if (!scheme.pool.empty()) {
            update_element(model, state, scheme.pool[uniform_index(rng, scheme.pool.size())], events);
        }
        break;
    case ResolvedScheme::Kind::group:
        if (!scheme.groups.empty()) {
            const auto& members = scheme.groups[uniform_index(rng, scheme.groups.size())];
            update_together(model, state, members, scratch.pending, events);
        }
        break;
    }
}

SimState run_start_state(const CompiledModel& model) {
    SimState state = initial_state(model);
    if (!model.toggles_at(0).empty()) {
        apply_toggles_at(model, state, 0);
        reset_trend_memory(model, state);
    }
    return state;
}

RunTrace run_once(const CompiledModel& model, const ResolvedScheme& scheme, const SimulationConfig& config,
                  std::uint64_t seed) {
    const std::size_t every = std::max<std::size_t>(config.record_every, 1);
    const std::size_t n = model.element_count();

    RunTrace trace;
    trace.seed = seed;
    trace.element_count = n;
    const std::size_t rows = config.steps / every + 1;
    trace.steps.reserve(rows);
    trace.levels.reserve(rows * n);

    Rng rng(seed);
    StepScratch scratch;
    SimState state = run_start_state(model);

    auto record = [&](std::size_t t) {
        trace.steps.push_back(t);
        trace.levels.insert(trace.levels.end(), state.levels.begin(), state.levels.end());
    };
    record(0);
    for (std::size_t t = 1; t <= config.steps; ++t) {
        step(model, scheme, state, rng, t, scratch, &trace.saturation);
        if (t % every == 0) {
            record(t);
        }
    }
    return trace;
}

RunTrace run_once(const CompiledModel& model, const SimulationConfig& config, std::uint64_t seed) {
    return run_once(model, resolve_scheme(model, config.scheme), config, seed);
}

void for_each_run(std::size_t runs, unsigned jobs, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1u), runs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < runs; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                for (std::size_t i = next++; i < runs; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next = runs;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

Ensemble simulate(const CompiledModel& model, const SimulationConfig& config, unsigned jobs) {
    if (config.runs == 0) {
        throw InputError("run count must be at least 1");
    }
    const ResolvedScheme scheme = resolve_scheme(model, config.scheme);
    Ensemble ensemble;
    ensemble.runs.resize(config.runs);
    for_each_run(config.runs, jobs, [&](std::size_t i) {
        ensemble.runs[i] = run_once(model, scheme, config, run_seed(config.base_seed, i));
    });
    return ensemble;
}

}  // namespace trendsim
