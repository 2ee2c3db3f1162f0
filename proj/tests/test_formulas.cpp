#include <doctest.h>

#include <array>

#include "greenberg/formulas.hpp"
#include "greenberg/rng.hpp"

using namespace greenberg;

namespace {

FieldInstance basic_instance() {
    FieldInstance inst;
    inst.label = "synthetic";
    inst.p = 3;
    inst.s_count = 2;
    inst.ck = AbelianPGroup(3, {2});
    inst.tk = AbelianPGroup(3, {3, 2});
    inst.rk = AbelianPGroup(3, {3});
    inst.rk_nr = AbelianPGroup(3, {1});
    return inst;
}

}  // namespace

TEST_CASE("chevalley_order") {
    CHECK(chevalley_order(2, 1, 2, 1) == 2);
    for (int n = 0; n < 5; ++n) CHECK(chevalley_order(0, n, 1, 0) == 0);
    CHECK(chevalley_order(2, 2, 2, 0) == 4);
    CHECK_THROWS_AS(chevalley_order(0, 1, 1, 2), std::invalid_argument);
}

TEST_CASE("step_quotient_order") {
    const auto stop = step_quotient_order(2, 2, 1, 2, 1);
    CHECK(stop.total() == 0);
    CHECK(stop.class_factor == 0);
    CHECK(stop.norm_factor == 0);

    const auto q = step_quotient_order(2, 1, 1, 2, 0);
    CHECK(q.class_factor == 1);
    CHECK(q.norm_factor == 1);
    CHECK(q.total() == 2);

    CHECK_THROWS_AS(step_quotient_order(1, 2, 1, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(step_quotient_order(2, 0, 1, 2, 3), std::invalid_argument);
}

TEST_CASE("step quotient at i=0 reproduces the ambiguous class number") {
    SplitMix64 rng(31337);
    for (int trial = 0; trial < 500; ++trial) {
        const int ck = static_cast<int>(rng.below(8));
        const int n = static_cast<int>(rng.below(5));
        const int s = 1 + static_cast<int>(rng.below(4));
        const int idx = static_cast<int>(rng.below(n * (s - 1) + 1));
        CHECK(step_quotient_order(ck, 0, n, s, idx).total() == chevalley_order(ck, n, s, idx));
    }
}

TEST_CASE("genus_order") {
    FieldInstance inst = basic_instance();
    inst.ck = AbelianPGroup(3, {});
    inst.rk_nr = AbelianPGroup(3, {});
    CHECK(genus_order(inst) == 0);
    inst.ck = AbelianPGroup(3, {2});
    inst.rk_nr = AbelianPGroup(3, {3});
    CHECK(genus_order(inst) == 5);
    inst.rk_nr = AbelianPGroup(3, {1});
    CHECK(genus_order(inst) == 3);
}

TEST_CASE("rebase_invariants") {
    CHECK(rebase_invariants(1, 0, 2, 3, 3) == InvariantTriple{1, 0, 5});
    CHECK(rebase_invariants(0, 1, 0, 1, 3) == InvariantTriple{0, 3, 0});
    CHECK(rebase_invariants(0, 0, 0, 7, 5) == InvariantTriple{0, 0, 0});
}

TEST_CASE("rebase_invariants composes") {
    SplitMix64 rng(515);
    for (int trial = 0; trial < 200; ++trial) {
        const int lambda = static_cast<int>(rng.below(5));
        const int mu = static_cast<int>(rng.below(3));
        const int nu = static_cast<int>(rng.below(9)) - 4;
        const int n0 = static_cast<int>(rng.below(4));
        const int n1 = static_cast<int>(rng.below(4));
        const auto once = rebase_invariants(lambda, mu, nu, n0, 3);
        const auto twice = rebase_invariants(once.lambda, once.mu, once.nu, n1, 3);
        CHECK(twice == rebase_invariants(lambda, mu, nu, n0 + n1, 3));
    }
}

TEST_CASE("iwasawa_fit reference cases") {
    // The order valuations 2, 4, 5 force mu = -1/4: no integral fit.
    const auto nofit = iwasawa_fit({2, 4, 5}, 3);
    CHECK(nofit.status == IwasawaFit::Status::NoFit);

    const auto fit = iwasawa_fit({1, 2, 3}, 3);
    REQUIRE(fit.status == IwasawaFit::Status::ExactFit);
    CHECK(fit.invariants == InvariantTriple{1, 0, 1});

    const auto zero = iwasawa_fit({0, 0, 0}, 3);
    REQUIRE(zero.status == IwasawaFit::Status::ExactFit);
    CHECK(zero.invariants == InvariantTriple{0, 0, 0});

    CHECK(iwasawa_fit({1, 2}, 3).status == IwasawaFit::Status::Underdetermined);
}

TEST_CASE("iwasawa_fit round-trips generated invariants") {
    SplitMix64 rng(909);
    const std::array<i64, 3> primes{2, 3, 5};
    for (int trial = 0; trial < 200; ++trial) {
        const i64 p = primes[rng.below(3)];
        const int lambda = static_cast<int>(rng.below(11));
        const int mu = static_cast<int>(rng.below(11));
        int nu = static_cast<int>(rng.below(41)) - 20;
        // Orders are valuations of group orders, hence non-negative.
        if (mu + nu < 0) nu = -mu;
        std::vector<int> vals;
        for (int n = 0; n < 4; ++n)
            vals.push_back(static_cast<int>(lambda * n + mu * checked_pow(p, n) + nu));
        const auto fit = iwasawa_fit(vals, p);
        REQUIRE(fit.status == IwasawaFit::Status::ExactFit);
        CHECK(fit.invariants == InvariantTriple{lambda, mu, nu});
    }
}

TEST_CASE("auto_rebase_fit finds the smallest viable base") {
    // From n=1 on, the valuations 4, 5, 6 fit (lambda, mu, nu) = (1, 0, 4)
    // in rebased coordinates; the full window 2, 4, 5, 6 does not fit.
    const auto rebased = auto_rebase_fit({2, 4, 5, 6}, 3);
    REQUIRE(rebased.n0.has_value());
    CHECK(*rebased.n0 == 1);
    CHECK(rebased.fit.status == IwasawaFit::Status::ExactFit);
    CHECK(rebased.fit.invariants == InvariantTriple{1, 0, 4});

    const auto nowhere = auto_rebase_fit({2, 4, 5}, 3);
    CHECK_FALSE(nowhere.n0.has_value());
}

TEST_CASE("check_theorem_bounds") {
    FieldInstance inst = basic_instance();

    SUBCASE("all-zero tower passes") {
        inst.ck = AbelianPGroup(3, {});
        inst.rk_nr = AbelianPGroup(3, {});
        inst.tk = AbelianPGroup(3, {});
        inst.rk = AbelianPGroup(3, {});
        inst.invariants = FieldInstance::Invariants{0, 0, 0};
        for (int n = 0; n < 3; ++n) inst.layers.push_back({n, std::nullopt, 0, 0});
        const auto report = check_theorem_bounds(inst);
        CHECK(report.all_ok());
        CHECK(report.b1_zero_equivalence == BoundReport::Verdict::Holds);
    }

    SUBCASE("constant tower with nu=1 passes at V=1") {
        inst.ck = AbelianPGroup(3, {1});
        inst.tk = AbelianPGroup(3, {1});
        inst.rk = AbelianPGroup(3, {});
        inst.rk_nr = AbelianPGroup(3, {});
        inst.invariants = FieldInstance::Invariants{0, 0, 1};
        for (int n = 0; n < 3; ++n) inst.layers.push_back({n, std::nullopt, 1, 1});
        const auto report = check_theorem_bounds(inst);
        CHECK(report.all_ok());
        for (const auto& l : report.layers) {
            CHECK(l.lower_ok);
            CHECK(l.upper_ok);  // 1 <= 1 <= 1
        }
    }

    SUBCASE("decreasing b flags monotonicity") {
        inst.invariants = FieldInstance::Invariants{0, 0, 2};
        inst.layers.push_back({0, std::nullopt, 2, 2});
        inst.layers.push_back({1, std::nullopt, 2, 1});
        const auto report = check_theorem_bounds(inst);
        CHECK_FALSE(report.monotonic_ok);
        CHECK_FALSE(report.all_ok());
    }
}

TEST_CASE("check_greenberg_equivalences") {
    FieldInstance inst = basic_instance();

    SUBCASE("constant orders with trivial R_k^nr") {
        inst.rk_nr = AbelianPGroup(3, {});
        for (int n = 0; n < 3; ++n) inst.layers.push_back({n, std::nullopt, 2, std::nullopt});
        const auto report = check_greenberg_equivalences(inst);
        CHECK(report.constant_orders == BoundReport::Verdict::Holds);
        CHECK(report.invariant_and_rnr_trivial == BoundReport::Verdict::Holds);
        CHECK_FALSE(report.any_violation());
    }

    SUBCASE("strictly increasing orders violate (ii)") {
        for (int n = 0; n < 3; ++n) inst.layers.push_back({n, std::nullopt, 2 + n, std::nullopt});
        const auto report = check_greenberg_equivalences(inst);
        CHECK(report.constant_orders == BoundReport::Verdict::Violated);
        CHECK(report.norms_isomorphisms == BoundReport::Verdict::Violated);
    }

    SUBCASE("nontrivial R_k^nr with constant orders flags (iii)") {
        for (int n = 0; n < 3; ++n) inst.layers.push_back({n, std::nullopt, 2, std::nullopt});
        const auto report = check_greenberg_equivalences(inst);
        CHECK(report.constant_orders == BoundReport::Verdict::Holds);
        CHECK(report.invariant_and_rnr_trivial == BoundReport::Verdict::Violated);
    }
}

TEST_CASE("stabilization_analysis") {
    SUBCASE("all quotients trivial gives c = rho = 0") {
        std::vector<LayerSteps> traces{{0, {}}, {1, {}}};
        const auto report = stabilization_analysis(traces);
        CHECK(report.c_estimate == 0);
        CHECK(report.rho_estimate == 0);
        CHECK(report.consistent);
    }

    SUBCASE("stationary limit of a level sequence") {
        // Orders 3, 9, 9, 9 over n, i.e. valuations 1, 2, 2, 2.
        std::vector<LayerSteps> traces;
        traces.push_back({0, {{1, std::nullopt, std::nullopt}}});
        traces.push_back({1, {{2, std::nullopt, std::nullopt}}});
        traces.push_back({2, {{2, std::nullopt, std::nullopt}}});
        traces.push_back({3, {{2, std::nullopt, std::nullopt}}});
        const auto report = stabilization_analysis(traces);
        REQUIRE(report.per_step.size() == 1);
        CHECK(report.per_step[0].limit_val == 2);
        CHECK(report.per_step[0].stationary);
        CHECK(report.consistent);
    }

    SUBCASE("decreasing n-sequence is flagged") {
        std::vector<LayerSteps> traces;
        traces.push_back({0, {{2, std::nullopt, std::nullopt}}});
        traces.push_back({1, {{1, std::nullopt, std::nullopt}}});
        const auto report = stabilization_analysis(traces);
        CHECK_FALSE(report.consistent);
    }

    SUBCASE("factor split tail") {
        std::vector<LayerSteps> traces;
        traces.push_back({0, {{2, 1, 1}, {1, 1, 0}}});
        traces.push_back({1, {{2, 1, 1}, {1, 1, 0}}});
        const auto report = stabilization_analysis(traces);
        CHECK(report.factors_present);
        CHECK(report.c_estimate == 1);
        CHECK(report.rho_estimate == 0);
    }
}

TEST_CASE("FieldInstance validation") {
    FieldInstance inst = basic_instance();
    CHECK_NOTHROW(inst.validate());
    inst.tk = AbelianPGroup(3, {1});  // smaller than ck
    CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
    inst = basic_instance();
    inst.rk_nr = AbelianPGroup(3, {2, 2});  // bigger than rk
    CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
}
