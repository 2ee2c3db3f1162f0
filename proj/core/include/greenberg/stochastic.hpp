#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "greenberg/formulas.hpp"
#include "greenberg/pgroup.hpp"
#include "greenberg/rng.hpp"

namespace greenberg {

using Rational = boost::multiprecision::cpp_rational;

enum class DrawPolicy { Single, Saturate };

enum class CaseLabel {
    ClassGrowth,  // (a): the drawn class leaves the current class subgroup
    NormGrowth,   // (b)(i): the class is old but the regulator image is new
    Idle,         // (b)(ii): nothing grows, the "bad case"
};

/// The draw space T_k modeled as class_part x norm_part x junk. The junk
/// factor (W_k and the ramified regulator part) never moves the state, so
/// only its valuation is kept.
struct SimModel {
    i64 p = 2;
    AbelianPGroup class_part;  // C_k
    AbelianPGroup norm_part;   // R_k^nr
    int junk_valuation = 0;    // v_p(#T_k / (#C_k * #R_k^nr))
    DrawPolicy policy = DrawPolicy::Single;
    int max_steps = 10000;

    bool empty() const { return class_part.trivial() && norm_part.trivial(); }
};

SimModel make_model(const FieldInstance& inst, DrawPolicy policy = DrawPolicy::Single,
                    int max_steps = 10000);

struct SimState {
    Subgroup h_class;
    Subgroup h_norm;
    int step = 0;
    std::array<i64, 3> case_counts{};  // indexed by CaseLabel

    bool terminal() const { return h_class.is_whole_group() && h_norm.is_whole_group(); }
};

SimState initial_state(const SimModel& model);

/// One uniform draw (c, r) and the case classification of the §-style
/// analysis; the class case takes precedence. Mutates the state.
CaseLabel draw_step(const SimModel& model, SimState& state, SplitMix64& rng);

struct TrialResult {
    int b = 0;
    bool diverged = false;
    std::array<i64, 3> case_counts{};
};

TrialResult run_trial(const SimModel& model, SplitMix64& rng);

struct BDistribution {
    i64 trials = 0;
    std::vector<std::pair<int, i64>> histogram;  // (b, count), ascending b
    double mean = 0.0;
    double variance = 0.0;
    double prob_b_le_1 = 0.0;
    i64 divergence_count = 0;
};

/// Deterministic for fixed (model, trials, seed): trial t always uses the
/// substream derived from (seed, t), independent of the thread pool.
/// GREENBERG_LAB_THREADS caps the pool (default: machine parallelism).
BDistribution monte_carlo(const SimModel& model, i64 trials, std::uint64_t seed);

/// Exact expected number of draws until absorption (policy single), solved
/// on the lattice of subgroup pairs. Throws std::length_error when
/// #class_part * #norm_part exceeds max_lattice_order.
Rational exact_expected_steps(const SimModel& model, i64 max_lattice_order = 81);

}  // namespace greenberg
