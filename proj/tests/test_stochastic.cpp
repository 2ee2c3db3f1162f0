#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "greenberg/stochastic.hpp"

using namespace greenberg;

namespace {

SimModel model_from(std::vector<int> class_exps, std::vector<int> norm_exps,
                    DrawPolicy policy = DrawPolicy::Single) {
    SimModel m;
    m.p = 3;
    m.class_part = AbelianPGroup(3, std::move(class_exps));
    m.norm_part = AbelianPGroup(3, std::move(norm_exps));
    m.policy = policy;
    return m;
}

}  // namespace

TEST_CASE("make_model valuation bookkeeping") {
    FieldInstance inst;
    inst.p = 3;
    inst.s_count = 1;
    inst.ck = AbelianPGroup(3, {2});
    inst.rk = AbelianPGroup(3, {3});
    inst.rk_nr = AbelianPGroup(3, {1});
    inst.tk = AbelianPGroup(3, {3, 2});  // order 3^5
    const auto model = make_model(inst);
    CHECK(model.junk_valuation == 2);
    CHECK(model.class_part == inst.ck);
    CHECK(model.norm_part == inst.rk_nr);

    inst.ck = AbelianPGroup(3, {});
    inst.rk = AbelianPGroup(3, {});
    inst.rk_nr = AbelianPGroup(3, {});
    inst.tk = AbelianPGroup(3, {});
    CHECK(make_model(inst).empty());

    inst.ck = AbelianPGroup(3, {2});
    inst.tk = AbelianPGroup(3, {2});
    inst.rk_nr = AbelianPGroup(3, {1});
    inst.rk = AbelianPGroup(3, {1});
    CHECK_THROWS_AS(make_model(inst), std::invalid_argument);  // negative junk
}

TEST_CASE("draw_step case analysis") {
    SplitMix64 rng(7);

    SUBCASE("full state only yields the idle case") {
        auto model = model_from({1}, {1});
        SimState state = initial_state(model);
        state.h_class = subgroup_generated(model.class_part,
                                           {Element(model.class_part, {1})});
        state.h_norm = subgroup_generated(model.norm_part, {Element(model.norm_part, {1})});
        for (int i = 0; i < 50; ++i) CHECK(draw_step(model, state, rng) == CaseLabel::Idle);
    }

    SUBCASE("trivial class part forces norm growth on a nonzero draw") {
        auto model = model_from({}, {1});
        SimState state = initial_state(model);
        for (int guard = 0; guard < 1000 && !state.terminal(); ++guard) {
            const auto label = draw_step(model, state, rng);
            CHECK(label != CaseLabel::ClassGrowth);
            if (label == CaseLabel::NormGrowth) CHECK(state.h_norm.is_whole_group());
        }
        CHECK(state.terminal());
    }

    SUBCASE("class case takes precedence") {
        auto model = model_from({1}, {1});
        // Run many draws and check the classification invariant: a growth of
        // the class subgroup never happens while the drawn class is old.
        SimState state = initial_state(model);
        int class_growths = 0;
        for (int i = 0; i < 200; ++i) {
            const auto before = state.h_class.order();
            const auto label = draw_step(model, state, rng);
            if (label == CaseLabel::ClassGrowth) {
                ++class_growths;
                CHECK(state.h_class.order() > before);
            } else {
                CHECK(state.h_class.order() == before);
            }
        }
        CHECK(class_growths == 1);  // Z/3 grows exactly once
    }
}

TEST_CASE("run_trial growth accounting") {
    SplitMix64 rng(99);
    auto model = model_from({1, 1}, {2});
    for (int t = 0; t < 50; ++t) {
        const auto result = run_trial(model, rng);
        CHECK_FALSE(result.diverged);
        CHECK(result.b >= 1);
        // Growth events are bounded by the valuations.
        CHECK(result.case_counts[0] <= model.class_part.order_valuation());
        CHECK(result.case_counts[1] <= model.norm_part.order_valuation());
        CHECK(result.case_counts[0] + result.case_counts[1] + result.case_counts[2] ==
              result.b);
    }
}

TEST_CASE("monte_carlo reference laws") {
    SUBCASE("empty model concentrates at zero") {
        const auto dist = monte_carlo(model_from({}, {}), 1000, 42);
        REQUIRE(dist.histogram.size() == 1);
        CHECK(dist.histogram[0].first == 0);
        CHECK(dist.histogram[0].second == 1000);
        CHECK(dist.prob_b_le_1 == 1.0);
    }

    SUBCASE("norm-only Z/3 is geometric with mean 3/2") {
        const auto dist = monte_carlo(model_from({}, {1}), 100000, 7);
        CHECK(std::abs(dist.mean - 1.5) < 0.05);
        // P(b = k) = (1/3)^{k-1} * 2/3.
        double expected1 = 2.0 / 3.0;
        const auto& h = dist.histogram;
        REQUIRE(h.front().first == 1);
        CHECK(std::abs(static_cast<double>(h.front().second) / 100000.0 - expected1) < 0.01);
    }

    SUBCASE("class-only Z/3 matches by model symmetry") {
        const auto dist = monte_carlo(model_from({1}, {}), 100000, 7);
        CHECK(std::abs(dist.mean - 1.5) < 0.05);
    }

    SUBCASE("class-only Z/3+Z/3 has mean 21/8") {
        const auto dist = monte_carlo(model_from({1, 1}, {}), 100000, 11);
        CHECK(std::abs(dist.mean - 21.0 / 8.0) < 0.05);
    }
}

TEST_CASE("monte_carlo determinism across pool sizes") {
    const auto model = model_from({1}, {2});
    setenv("GREENBERG_LAB_THREADS", "1", 1);
    const auto one = monte_carlo(model, 20000, 2024);
    setenv("GREENBERG_LAB_THREADS", "8", 1);
    const auto eight = monte_carlo(model, 20000, 2024);
    unsetenv("GREENBERG_LAB_THREADS");
    const auto def = monte_carlo(model, 20000, 2024);
    CHECK(one.histogram == eight.histogram);
    CHECK(one.histogram == def.histogram);
    CHECK(one.mean == eight.mean);
}

TEST_CASE("exact_expected_steps reference values") {
    CHECK(exact_expected_steps(model_from({}, {})) == 0);
    CHECK(exact_expected_steps(model_from({}, {1})) == Rational(3, 2));
    CHECK(exact_expected_steps(model_from({1}, {})) == Rational(3, 2));
    // trivial -> rank 1 -> full: E = 9/8 + 3/2 = 21/8.
    CHECK(exact_expected_steps(model_from({1, 1}, {})) == Rational(21, 8));
    CHECK_THROWS_AS(exact_expected_steps(model_from({3, 2}, {1})), std::length_error);
}

TEST_CASE("monte carlo agrees with the exact oracle") {
    const auto model = model_from({1}, {2});
    const auto exact = static_cast<double>(exact_expected_steps(model));
    const auto dist = monte_carlo(model, 20000, 5);
    const double se = std::sqrt(dist.variance / 20000.0);
    CHECK(std::abs(dist.mean - exact) <= 3 * se);
}

TEST_CASE("saturate policy still terminates with valid accounting") {
    SplitMix64 rng(3);
    auto model = model_from({2, 1}, {1}, DrawPolicy::Saturate);
    for (int t = 0; t < 30; ++t) {
        const auto result = run_trial(model, rng);
        CHECK_FALSE(result.diverged);
        CHECK(result.b >= 1);
        CHECK(result.case_counts[0] <= model.class_part.order_valuation());
        CHECK(result.case_counts[1] <= model.norm_part.order_valuation());
    }
}
