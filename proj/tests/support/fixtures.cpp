#include "fixtures.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <utility>

namespace fixtures {

using namespace trendsim;

Model trio_model() {
    Model m;
    m.name = "trio";
    m.elements = {
        Element{"A", 11, 6, {{2, 8}, {3, 2}}},
        Element{"B", 11, 5, {}},
        Element{"C", 11, 0, {}},
    };
    m.hyperedges = {
        Hyperedge{"B", Sign::positive, Mode::trend, {Tail{"A", 0.0, kTrioTrendWeight}}, std::nullopt},
        Hyperedge{"C", Sign::positive, Mode::level, {Tail{"A", kTrioLevelWeight, 0.0}}, std::nullopt},
    };
    return m;
}

std::string_view scenario_name(ToyScenario scenario) {
    switch (scenario) {
    case ToyScenario::regular:
        return "regular";
    case ToyScenario::or_:
        return "or";
    case ToyScenario::and_:
        return "and";
    case ToyScenario::not_:
        return "not";
    case ToyScenario::target:
        return "target";
    }
    return "regular";
}

Model toy_model(ToyScenario scenario, Mode mode) {
    Model m;
    m.name = "toy_" + std::string(scenario_name(scenario)) + "_" + std::string(to_string(mode));
    m.elements = {
        Element{"cause", 11, 0, {{5, 6}, {15, 7}, {20, 0}}},
        Element{"intervention", 11, 0, {{18, 8}}},
        Element{"problem", 11, 0, {}},
        Element{"outcome", 11, 10, {}},
    };
    m.hyperedges = {
        Hyperedge{"problem", Sign::positive, Mode::level, {Tail{"cause", 1.0, 0.0}}, std::nullopt},
        Hyperedge{"problem", Sign::negative, Mode::level, {Tail{"intervention", 1.0, 0.0}}, std::nullopt},
    };

    const double wv = mode == Mode::trend ? 0.0 : kToyLevelWeight;
    const double wt = mode == Mode::level ? 0.0 : kToyTrendWeight;
    const Tail problem{"problem", wv, wt};
    const Tail cause{"cause", wv, wt};
    switch (scenario) {
    case ToyScenario::regular:
        m.hyperedges.push_back(Hyperedge{"outcome", Sign::negative, mode, {problem}, std::nullopt});
        break;
    case ToyScenario::or_:
        m.hyperedges.push_back(Hyperedge{"outcome", Sign::negative, mode, {problem}, std::nullopt});
        m.hyperedges.push_back(
            Hyperedge{"outcome", Sign::negative, Mode::level, {Tail{"cause", kToyOrCauseWeight, 0.0}}, std::nullopt});
        break;
    case ToyScenario::and_:
        m.hyperedges.push_back(Hyperedge{"outcome", Sign::negative, mode, {problem, cause}, std::nullopt});
        break;
    case ToyScenario::not_:
        m.hyperedges.push_back(Hyperedge{"outcome", Sign::positive, mode, {problem}, std::nullopt});
        break;
    case ToyScenario::target:
        m.hyperedges.push_back(Hyperedge{"outcome", Sign::negative, mode, {problem, cause}, Gate{"cause", 7}});
        break;
    }
    return m;
}

Model benchmark_model(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

    Model m;
    m.name = "random31";
    for (std::size_t i = 0; i < kBenchNodes; ++i) {
        const std::string name = (i < kBenchInputs ? "in" : "n") + std::to_string(i);
        m.elements.push_back(Element{name, 11, static_cast<int>(pick(11)), {}});
    }

    // Every non-input gets one arc from an earlier element, so inputs reach the whole graph.
    std::set<std::pair<std::size_t, std::size_t>> arcs;  // (regulator, target)
    for (std::size_t t = kBenchInputs; t < kBenchNodes; ++t) {
        arcs.emplace(pick(t), t);
    }
    const std::size_t self = kBenchInputs + pick(kBenchNodes - kBenchInputs);
    arcs.emplace(self, self);
    while (arcs.size() < kBenchArcs) {
        const std::size_t target = kBenchInputs + pick(kBenchNodes - kBenchInputs);
        const std::size_t reg = pick(kBenchNodes);
        if (reg != target) {
            arcs.emplace(reg, target);
        }
    }
    for (const auto& [reg, target] : arcs) {
        const Sign sign = pick(3) == 0 ? Sign::negative : Sign::positive;
        m.hyperedges.push_back(Hyperedge{m.elements[target].name, sign, Mode::hybrid,
                                         {Tail{m.elements[reg].name, 0.25, 0.5}}, std::nullopt});
    }

    for (std::size_t i = 0; i < kBenchInputs; ++i) {
        auto& e = m.elements[i];
        int level = e.initial_level;
        for (std::size_t t = 1; t < kBenchSteps; ++t) {
            if (pick(4) != 0) {
                continue;
            }
            const int next = std::clamp(level + static_cast<int>(pick(5)) - 2, 0, 10);
            if (next != level) {
                level = next;
                e.toggles.push_back(Toggle{t, level});
            }
        }
    }
    return m;
}

std::size_t arc_count(const Model& model) {
    std::size_t n = 0;
    for (const auto& h : model.hyperedges) {
        n += h.tails.size();
    }
    return n;
}

}  // namespace fixtures
