#include "fixtures.hpp"

#include "trendsim/dynamics.hpp"
#include "trendsim/model.hpp"

#include <catch_amalgamated.hpp>

using namespace trendsim;

namespace {

Model two_element() {
    Model m;
    m.name = "pair";
    m.elements = {Element{"a", 11, 5, {}}, Element{"b", 11, 0, {}}};
    m.hyperedges = {Hyperedge{"b", Sign::positive, Mode::hybrid, {Tail{"a", 0.5, 0.5}}, std::nullopt}};
    return m;
}

bool mentions(const std::vector<Diagnostic>& diags, std::string_view needle, Severity severity = Severity::error) {
    for (const auto& d : diags) {
        if (d.severity == severity && d.message.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("level values sit on the uniform grid") {
    CHECK(level_value(0, 11) == 0.0);
    CHECK(level_value(10, 11) == 1.0);
    CHECK(level_value(5, 11) == 0.5);
    CHECK(level_value(1, 2) == 1.0);
    for (int k = 0; k < 7; ++k) {
        CHECK(level_value(k, 7) == static_cast<double>(k) / 6.0);
    }
}

TEST_CASE("element names are restricted to [A-Za-z0-9_]") {
    CHECK(is_valid_name("cause"));
    CHECK(is_valid_name("SARS_CoV_2"));
    CHECK(is_valid_name("n31"));
    CHECK_FALSE(is_valid_name(""));
    CHECK_FALSE(is_valid_name("a-b"));
    CHECK_FALSE(is_valid_name("a b"));
    CHECK_FALSE(is_valid_name("caf\xc3\xa9"));
}

TEST_CASE("the three-element trend example validates") {
    const auto result = validate_model(fixtures::trio_model());
    REQUIRE(result.ok());
    CHECK(result.diagnostics.empty());
    const auto& m = *result.model;
    CHECK(m.element_count() == 3);
    CHECK_FALSE(m.is_regulated(m.at("A")));
    CHECK(m.is_regulated(m.at("B")));
    CHECK(m.is_regulated(m.at("C")));
    REQUIRE(m.update_pool().size() == 2);
    CHECK(m.update_pool()[0] == m.at("B"));
    CHECK(m.update_pool()[1] == m.at("C"));
}

TEST_CASE("validation errors") {
    SECTION("dangling target") {
        auto m = two_element();
        m.hyperedges[0].target = "ghost";
        const auto r = validate_model(m);
        CHECK_FALSE(r.ok());
        CHECK(mentions(r.diagnostics, "unknown element 'ghost'"));
        REQUIRE(r.diagnostics[0].hyperedge_index);
        CHECK(*r.diagnostics[0].hyperedge_index == 0);
    }
    SECTION("dangling tail") {
        auto m = two_element();
        m.hyperedges[0].tails[0].regulator = "ghost";
        CHECK(mentions(validate_model(m).diagnostics, "unknown element 'ghost'"));
    }
    SECTION("dangling gate") {
        auto m = two_element();
        m.hyperedges[0].gate = Gate{"ghost", 1};
        CHECK(mentions(validate_model(m).diagnostics, "unknown element 'ghost'"));
    }
    SECTION("gate level out of range") {
        auto m = two_element();
        m.hyperedges[0].gate = Gate{"a", 11};
        CHECK(mentions(validate_model(m).diagnostics, "gate level 11 out of range"));
    }
    SECTION("duplicate element") {
        auto m = two_element();
        m.elements[1].name = "a";
        CHECK(mentions(validate_model(m).diagnostics, "duplicate element name 'a'"));
    }
    SECTION("too few levels") {
        auto m = two_element();
        m.elements[0].levels = 1;
        CHECK(mentions(validate_model(m).diagnostics, "levels must be at least 2"));
    }
    SECTION("initial level out of range") {
        auto m = two_element();
        m.elements[0].initial_level = 11;
        CHECK(mentions(validate_model(m).diagnostics, "initial level 11 out of range"));
    }
    SECTION("toggle level out of range") {
        auto m = two_element();
        m.elements[0].toggles = {{3, 12}};
        CHECK(mentions(validate_model(m).diagnostics, "toggle level 12"));
    }
    SECTION("toggle steps must increase") {
        auto m = two_element();
        m.elements[0].toggles = {{3, 1}, {3, 2}};
        CHECK(mentions(validate_model(m).diagnostics, "strictly increasing"));
    }
    SECTION("empty tail list") {
        auto m = two_element();
        m.hyperedges[0].tails.clear();
        CHECK(mentions(validate_model(m).diagnostics, "tail"));
        CHECK_FALSE(validate_model(m).ok());
    }
    SECTION("negative weight") {
        auto m = two_element();
        m.hyperedges[0].tails[0].trend_weight = -0.1;
        CHECK_FALSE(validate_model(m).ok());
    }
    SECTION("compile_model throws with the diagnostics attached") {
        auto m = two_element();
        m.hyperedges[0].target = "ghost";
        try {
            (void)compile_model(m);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(has_errors(e.diagnostics()));
        }
    }
}

TEST_CASE("weights above one are a warning, not an error") {
    auto m = two_element();
    m.hyperedges[0].tails[0].level_weight = 1.5;
    const auto r = validate_model(m);
    CHECK(r.ok());
    CHECK(mentions(r.diagnostics, "1.5", Severity::warning));
    CHECK_FALSE(has_errors(r.diagnostics));
}

TEST_CASE("self-edges are allowed") {
    auto m = two_element();
    m.hyperedges.push_back(Hyperedge{"b", Sign::negative, Mode::level, {Tail{"b", 0.1, 0.0}}, std::nullopt});
    const auto r = validate_model(m);
    REQUIRE(r.ok());
    const auto& c = *r.model;
    CHECK(c.slot_of(c.at("b"), c.at("b")).has_value());
}

TEST_CASE("initial state") {
    const auto model = compile_model(two_element());
    const auto state = initial_state(model);
    CHECK(state.step == 0);
    CHECK(model.value(model.at("a"), state.levels[0]) == 0.5);
    CHECK(observed_trend(model, state, model.at("b"), model.at("a")) == 0.0);
    CHECK(initial_state(model) == state);

    SECTION("inputs only: empty trend memory") {
        Model inputs;
        inputs.elements = {Element{"x", 3, 1, {}}, Element{"y", 5, 4, {}}};
        const auto c = compile_model(inputs);
        CHECK(c.memory_size() == 0);
        CHECK(initial_state(c).last_seen.empty());
        CHECK(c.update_pool().empty());
    }
}

TEST_CASE("toggles overwrite one level and leave trend memory alone") {
    const auto model = compile_model(two_element());
    auto state = initial_state(model);
    const auto before = state;
    apply_toggle(model, state, model.at("a"), 6);
    CHECK(model.value(model.at("a"), state.levels[0]) == Catch::Approx(0.6));
    CHECK(state.last_seen == before.last_seen);
    CHECK(state.levels[1] == before.levels[1]);
    CHECK(observed_trend(model, state, model.at("b"), model.at("a")) == Catch::Approx(0.1));

    SECTION("toggling to the current level is a no-op") {
        auto again = state;
        apply_toggle(model, again, model.at("a"), 6);
        CHECK(again == state);
    }
    SECTION("regulated elements may be toggled") {
        apply_toggle(model, state, model.at("b"), 10);
        CHECK(state.levels[1] == 10);
    }
    SECTION("out of range levels are rejected") {
        CHECK_THROWS_AS(apply_toggle(model, state, model.at("a"), 11), std::out_of_range);
        CHECK_THROWS_AS(apply_toggle(model, state, model.at("a"), -1), std::out_of_range);
    }
}

TEST_CASE("scheduled toggles are grouped by step in declaration order") {
    Model m;
    m.elements = {Element{"x", 11, 0, {{1, 2}, {4, 3}}}, Element{"y", 11, 0, {{1, 7}}}};
    const auto c = compile_model(m);
    const auto at1 = c.toggles_at(1);
    REQUIRE(at1.size() == 2);
    CHECK(at1[0].element == c.at("x"));
    CHECK(at1[1].element == c.at("y"));
    CHECK(c.toggles_at(2).empty());
    CHECK(c.toggles_at(4).size() == 1);

    auto state = initial_state(c);
    apply_toggles_at(c, state, 1);
    CHECK(state.levels == std::vector<int>{2, 7});
}

TEST_CASE("trend memory has one slot per distinct regulator") {
    Model m;
    m.elements = {Element{"a", 3, 0, {}}, Element{"b", 3, 0, {}}, Element{"t", 3, 0, {}}};
    m.hyperedges = {
        Hyperedge{"t", Sign::positive, Mode::trend, {Tail{"a", 0, 1}, Tail{"b", 0, 1}}, std::nullopt},
        Hyperedge{"t", Sign::negative, Mode::trend, {Tail{"a", 0, 1}}, std::nullopt},
    };
    const auto c = compile_model(m);
    CHECK(c.memory_size() == 2);
    CHECK(c.regulators(c.at("t")).size() == 2);
    CHECK_FALSE(c.slot_of(c.at("t"), c.at("t")).has_value());
}
