#include "fixtures.hpp"
#include "random_model.hpp"
#include "reference.hpp"

#include "trendsim/scheduler.hpp"

#include <catch_amalgamated.hpp>

#include <atomic>
#include <set>

using namespace trendsim;

namespace {

Model chain() {
    Model m;
    m.name = "chain";
    m.elements = {Element{"in", 11, 0, {{2, 6}, {5, 1}}}, Element{"a", 11, 5, {}}, Element{"b", 11, 5, {}},
                  Element{"c", 11, 5, {}}};
    m.hyperedges = {
        Hyperedge{"a", Sign::positive, Mode::hybrid, {Tail{"in", 0.25, 0.5}}, std::nullopt},
        Hyperedge{"b", Sign::negative, Mode::trend, {Tail{"a", 0.0, 0.5}}, std::nullopt},
        Hyperedge{"c", Sign::positive, Mode::level, {Tail{"b", 0.3, 0.0}, Tail{"a", 0.9, 0.0}}, std::nullopt},
        Hyperedge{"c", Sign::negative, Mode::level, {Tail{"c", 0.2, 0.0}}, std::nullopt},
    };
    return m;
}

std::size_t changed(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        n += a[i] != b[i];
    }
    return n;
}

}  // namespace

TEST_CASE("uniform_index stays in range and covers every value") {
    Rng rng(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto x = uniform_index(rng, 5);
        REQUIRE(x < 5);
        seen.insert(x);
    }
    CHECK(seen.size() == 5);
    CHECK(uniform_index(rng, 1) == 0);
}

TEST_CASE("mt19937_64 matches the standard's reference output") {
    // The 10000th output of a default-constructed mt19937_64 is fixed by the standard.
    std::mt19937_64 rng;
    rng.discard(9999);
    CHECK(rng() == 9981545732273789042ull);
    CHECK(kRngName == "mt19937_64");
}

TEST_CASE("resolve_scheme checks orders and groups against the update pool") {
    const auto model = compile_model(chain());
    CHECK(resolve_scheme(model, RandomSequential{}).pool.size() == 3);
    CHECK(resolve_scheme(model, Simultaneous{}).pool.size() == 3);
    CHECK(resolve_scheme(model, SequentialFixed{{"c", "a", "b"}}).pool[0] == model.at("c"));
    CHECK_THROWS_WITH(resolve_scheme(model, SequentialFixed{{"a", "b"}}), Catch::Matchers::ContainsSubstring("'c' is missing"));
    CHECK_THROWS_WITH(resolve_scheme(model, SequentialFixed{{"a", "b", "c", "a"}}),
                      Catch::Matchers::ContainsSubstring("more than once"));
    CHECK_THROWS_WITH(resolve_scheme(model, SequentialFixed{{"a", "b", "c", "in"}}),
                      Catch::Matchers::ContainsSubstring("never updated"));
    CHECK_THROWS_WITH(resolve_scheme(model, SequentialFixed{{"a", "b", "zzz"}}),
                      Catch::Matchers::ContainsSubstring("unknown element 'zzz'"));
    const auto g = resolve_scheme(model, GroupUpdate{{{"g1", {"a", "c"}}, {"g2", {"b"}}}});
    CHECK(g.groups.size() == 2);
    CHECK_THROWS_AS(resolve_scheme(model, GroupUpdate{{{"g1", {"a", "c"}}, {"g2", {}}, {"g3", {"b"}}}}), InputError);
    CHECK_THROWS_AS(resolve_scheme(model, GroupUpdate{{{"g1", {"a", "c"}}, {"g2", {"b", "a"}}}}), InputError);
    CHECK(scheme_name(GroupUpdate{}) == "group");
    CHECK(scheme_name(SequentialFixed{}) == "seq-fixed");
}

TEST_CASE("one element changes per sequential step unless a toggle fires") {
    const auto model = compile_model(chain());
    for (const Scheme& scheme : {Scheme{RandomSequential{}}, Scheme{SequentialFixed{{"a", "b", "c"}}}}) {
        const auto resolved = resolve_scheme(model, scheme);
        Rng rng(3);
        StepScratch scratch;
        auto state = run_start_state(model);
        for (std::size_t t = 1; t <= 40; ++t) {
            const auto before = state.levels;
            step(model, resolved, state, rng, t, scratch);
            const bool toggled = !model.toggles_at(t).empty();
            CHECK(changed(before, state.levels) <= (toggled ? 2u : 1u));
            CHECK(state.step == t);
        }
    }
}

TEST_CASE("seq-fixed cycles through its order") {
    const auto model = compile_model(chain());
    const auto resolved = resolve_scheme(model, SequentialFixed{{"b", "a", "c"}});
    reference::Simulator ref(chain());
    Rng rng(0);
    StepScratch scratch;
    auto state = run_start_state(model);
    const std::vector<std::string> order{"b", "a", "c"};
    for (std::size_t t = 1; t <= 12; ++t) {
        step(model, resolved, state, rng, t, scratch);
        ref.step(t, {order[(t - 1) % 3]});
        for (std::size_t e = 0; e < model.element_count(); ++e) {
            CHECK(state.levels[e] == ref.state().level.at(model.element_name(element_id(e))));
        }
    }
}

TEST_CASE("toggles are visible to updates in the same step") {
    Model m;
    m.elements = {Element{"in", 11, 0, {{1, 10}}}, Element{"x", 11, 0, {}}};
    m.hyperedges = {Hyperedge{"x", Sign::positive, Mode::level, {Tail{"in", 0.5, 0.0}}, std::nullopt}};
    const auto model = compile_model(m);
    const auto resolved = resolve_scheme(model, RandomSequential{});
    Rng rng(0);
    StepScratch scratch;
    auto state = run_start_state(model);
    step(model, resolved, state, rng, 1, scratch);
    CHECK(state.levels[1] == 5);
}

TEST_CASE("a simultaneous step with zero balancing is a fixed point") {
    Model m;
    m.elements = {Element{"a", 11, 0, {}}, Element{"b", 11, 3, {}}, Element{"c", 11, 9, {}}};
    m.hyperedges = {
        Hyperedge{"b", Sign::positive, Mode::level, {Tail{"a", 1.0, 0.0}}, std::nullopt},
        Hyperedge{"c", Sign::negative, Mode::trend, {Tail{"b", 0.0, 1.0}}, std::nullopt},
    };
    const auto model = compile_model(m);
    const auto resolved = resolve_scheme(model, Simultaneous{});
    Rng rng(0);
    StepScratch scratch;
    auto state = run_start_state(model);
    const auto before = state;
    step(model, resolved, state, rng, 1, scratch);
    CHECK(state.levels == before.levels);
    CHECK(state.last_seen == before.last_seen);
}

TEST_CASE("simultaneous and group steps agree with the reference") {
    const auto m = chain();
    const auto model = compile_model(m);
    const auto resolved = resolve_scheme(model, Simultaneous{});
    reference::Simulator ref(m);
    Rng rng(0);
    StepScratch scratch;
    auto state = run_start_state(model);
    for (std::size_t t = 1; t <= 10; ++t) {
        step(model, resolved, state, rng, t, scratch);
        ref.toggle(t);
        ref.update_all({"a", "b", "c"});
        for (std::size_t e = 0; e < model.element_count(); ++e) {
            CHECK(state.levels[e] == ref.state().level.at(model.element_name(element_id(e))));
        }
    }
}

TEST_CASE("run_once") {
    const auto model = compile_model(chain());
    SimulationConfig config;
    config.steps = 30;

    SECTION("T = 0 records only the start state") {
        config.steps = 0;
        const auto trace = run_once(model, config, 1);
        CHECK(trace.rows() == 1);
        CHECK(trace.steps == std::vector<std::size_t>{0});
    }
    SECTION("same seed, same trace") {
        CHECK(run_once(model, config, 9) == run_once(model, config, 9));
    }
    SECTION("different seeds usually differ") {
        CHECK_FALSE(run_once(model, config, 1).levels == run_once(model, config, 2).levels);
    }
    SECTION("record_every thins the rows") {
        config.record_every = 7;
        const auto thin = run_once(model, config, 4);
        CHECK(thin.steps == std::vector<std::size_t>{0, 7, 14, 21, 28});
        config.record_every = 1;
        const auto full = run_once(model, config, 4);
        for (std::size_t r = 0; r < thin.rows(); ++r) {
            for (std::size_t e = 0; e < model.element_count(); ++e) {
                CHECK(thin.level(r, element_id(e)) == full.level(thin.steps[r], element_id(e)));
            }
        }
    }
    SECTION("step-0 toggles set the start state with zero trends") {
        Model m;
        m.elements = {Element{"in", 11, 0, {{0, 8}}}, Element{"x", 11, 5, {}}};
        m.hyperedges = {Hyperedge{"x", Sign::positive, Mode::trend, {Tail{"in", 0.0, 1.0}}, std::nullopt}};
        const auto c = compile_model(m);
        const auto trace = run_once(c, config, 0);
        CHECK(trace.level(0, c.at("in")) == 8);
        CHECK(trace.level(trace.rows() - 1, c.at("x")) == 5);
    }
    SECTION("levels always stay on the grid") {
        const auto trace = run_once(model, config, 5);
        for (std::size_t r = 0; r < trace.rows(); ++r) {
            for (std::size_t e = 0; e < model.element_count(); ++e) {
                const int k = trace.level(r, element_id(e));
                CHECK(k >= 0);
                CHECK(k < model.levels(element_id(e)));
            }
        }
    }
}

TEST_CASE("the NOT scenario keeps a saturated level outcome at its maximum") {
    const auto model = compile_model(fixtures::toy_model(fixtures::ToyScenario::not_, Mode::level));
    SimulationConfig config;
    config.steps = fixtures::kToySteps;
    for (std::uint64_t seed : {0ull, 1ull, 77ull, 123456789ull}) {
        const auto trace = run_once(model, config, seed);
        for (std::size_t r = 0; r < trace.rows(); ++r) {
            CHECK(trace.level(r, model.at("outcome")) == 10);
        }
    }
}

TEST_CASE("simulate") {
    const auto model = compile_model(chain());
    SimulationConfig config;
    config.steps = 25;
    config.runs = 12;
    config.base_seed = 100;

    const auto serial = simulate(model, config, 1);
    REQUIRE(serial.runs.size() == 12);
    for (std::size_t i = 0; i < serial.runs.size(); ++i) {
        CHECK(serial.runs[i].seed == 100 + i);
        CHECK(serial.runs[i] == run_once(model, config, 100 + i));
    }
    SECTION("thread count does not change results") {
        CHECK(simulate(model, config, 4).runs == serial.runs);
    }
    SECTION("a run does not depend on how many runs there are") {
        config.runs = 3;
        const auto few = simulate(model, config, 2);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(few.runs[i] == serial.runs[i]);
        }
    }
    SECTION("one run equals run_once at the base seed") {
        config.runs = 1;
        CHECK(simulate(model, config).runs.front() == run_once(model, config, 100));
    }
}

TEST_CASE("for_each_run visits every index once and propagates exceptions") {
    std::vector<std::atomic<int>> hits(50);
    for_each_run(50, 4, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) {
        CHECK(h == 1);
    }
    CHECK_THROWS_AS(for_each_run(20, 3,
                                 [](std::size_t i) {
                                     if (i == 11) {
                                         throw std::runtime_error("boom");
                                     }
                                 }),
                    std::runtime_error);
}

TEST_CASE("RSB matches the reference fed with the same choices") {
    gen::Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = gen::random_model(rng);
        const auto model = compile_model(m);
        SimulationConfig config;
        config.steps = 20;
        const auto trace = run_once(model, config, static_cast<std::uint64_t>(trial));

        reference::Simulator ref(m);
        Rng choices(static_cast<std::uint64_t>(trial));
        const auto pool = model.update_pool();
        for (std::size_t t = 1; t <= config.steps; ++t) {
            ref.step(t, {model.element_name(pool[uniform_index(choices, pool.size())])});
            for (std::size_t e = 0; e < model.element_count(); ++e) {
                REQUIRE(trace.level(t, element_id(e)) == ref.state().level.at(model.element_name(element_id(e))));
            }
        }
    }
}
