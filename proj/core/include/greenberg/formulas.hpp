#pragma once

#include <optional>
#include <string>
#include <vector>

#include "greenberg/pgroup.hpp"

namespace greenberg {

/// Ingested arithmetic data for a pair (k, p). All group orders are handled
/// as p-adic valuations; structures are carried where subgroup lattices
/// matter.
struct FieldInstance {
    struct Layer {
        int n = 0;
        std::optional<AbelianPGroup> class_group;  // structure, when known
        int order_valuation = 0;                   // v_p of the layer class group
        std::optional<int> b;                      // algorithm length, when known
    };
    struct Invariants {
        int lambda = 0;
        int mu = 0;
        int nu = 0;
    };

    std::string label;
    i64 p = 2;
    int s_count = 1;  // number of p-places
    AbelianPGroup ck, tk, rk, rk_nr;
    std::optional<int> wk_valuation;
    std::optional<std::vector<int>> wk_exponents;  // retained for re-emission
    std::vector<Layer> layers;
    std::optional<Invariants> invariants;

    /// Checks the structural invariants (throws std::invalid_argument):
    /// #Rk_nr | #Rk, v(#Tk) >= v(#Ck), v(#Tk) >= v(#Rk), lambda/mu >= 0,
    /// layers sorted by n, s_count >= 1.
    void validate() const;
};

/// Ambiguous class number: v_p of #C_{k_n}^{G_n} =
/// ck_val + n*(s_count - 1) - unit_norm_index_val. Throws on a negative
/// result (the value is a group order).
int chevalley_order(int ck_val, int n, int s_count, int unit_norm_index_val);

struct StepQuotientOrder {
    int class_factor = 0;
    int norm_factor = 0;
    int total() const { return class_factor + norm_factor; }
};

/// Order of one filtration quotient, split into its class and norm factors.
StepQuotientOrder step_quotient_order(int ck_val, int norm_image_val, int n,
                                      int s_count, int lambda_index_val);

int genus_order(const FieldInstance& inst);

struct InvariantTriple {
    int lambda = 0;
    int mu = 0;
    int nu = 0;
    bool operator==(const InvariantTriple&) const = default;
};

/// Invariants after moving the base field up n0 layers:
/// (lambda, p^{n0} * mu, nu + lambda * n0).
InvariantTriple rebase_invariants(int lambda, int mu, int nu, int n0, i64 p);

struct FitBounds {
    int lambda_max = 10;
    int mu_max = 10;
    int nu_abs_max = 20;
};

struct IwasawaFit {
    enum class Status { ExactFit, NoFit, Underdetermined };
    Status status = Status::Underdetermined;
    InvariantTriple invariants;  // meaningful only for ExactFit
    int window_start = 0;        // first layer index n used
    int window_size = 0;
};

/// Exhaustive search for (lambda, mu, nu) with
/// v_p(#C_{k_n}) = lambda*n + mu*p^n + nu on every provided layer.
/// order_vals[i] is the valuation at layer n = n_start + i.
IwasawaFit iwasawa_fit(const std::vector<int>& order_vals, i64 p, int n_start = 0,
                       const FitBounds& bounds = {});

struct RebaseFit {
    std::optional<int> n0;  // smallest shift admitting an exact fit
    IwasawaFit fit;         // the fit at that shift (or the last attempt)
};

/// Sliding-window mode: smallest shift n0 such that the layers from n0 on,
/// re-indexed from the new base field, admit an exact fit.
RebaseFit auto_rebase_fit(const std::vector<int>& order_vals, i64 p, int n_start = 0,
                          const FitBounds& bounds = {});

struct BoundReport {
    struct LayerVerdict {
        int n = 0;
        int b = 0;
        int formula_val = 0;  // lambda*n + mu*p^n + nu
        bool lower_ok = true;  // b_n <= formula_val
        bool upper_ok = true;  // formula_val <= V * b_n
    };
    std::vector<LayerVerdict> layers;
    bool monotonic_ok = true;
    std::vector<int> monotonic_violations;  // layer indices n where b decreased
    enum class Verdict { Holds, Violated, Undecidable };
    Verdict b1_zero_equivalence = Verdict::Undecidable;
    std::vector<std::string> warnings;
    bool all_ok() const;
};

/// Checks the two inequalities b_n <= lambda*n + mu*p^n + nu <= V*b_n with
/// V = v_p(#C_k * #R_k^nr), monotonicity of b, and the b_1 = 0 equivalence.
/// Uses inst.invariants if present, otherwise fits the layer orders.
BoundReport check_theorem_bounds(const FieldInstance& inst);

struct EquivalenceReport {
    using Verdict = BoundReport::Verdict;
    Verdict norms_isomorphisms = Verdict::Undecidable;   // (i)
    Verdict constant_orders = Verdict::Undecidable;      // (ii)
    Verdict invariant_and_rnr_trivial = Verdict::Undecidable;  // (iii)
    Verdict b_at_most_one = Verdict::Undecidable;        // (b)
    std::vector<std::string> notes;
    bool any_violation() const;
};

/// Evaluates the testable equivalent forms of lambda = mu = 0 on the data.
EquivalenceReport check_greenberg_equivalences(const FieldInstance& inst);

/// Per-layer step data for the fixed-i stabilization analysis. A step may
/// carry its class/norm factor split when known.
struct LayerSteps {
    struct Step {
        int quotient_val = 0;
        std::optional<int> class_val;
        std::optional<int> norm_val;
    };
    int n = 0;
    std::vector<Step> steps;
};

struct StabilizationReport {
    struct PerStep {
        int i = 0;
        std::vector<int> over_n;  // quotient valuations per layer, ascending n
        int limit_val = 0;        // value at the deepest layer
        bool stationary = false;  // last two layers agree
        bool nondecreasing = true;
        std::optional<int> class_limit;
        std::optional<int> norm_limit;
    };
    std::vector<PerStep> per_step;
    int c_estimate = 0;    // class part of the stationary tail
    int rho_estimate = 0;  // norm part of the stationary tail
    bool factors_present = false;
    bool consistent = true;  // false if some n-sequence decreases
};

/// Fixed-i view across layers: each quotient-order n-sequence must be
/// non-decreasing; reports stationary values and the (c, rho) tail estimate.
StabilizationReport stabilization_analysis(const std::vector<LayerSteps>& traces);

}  // namespace greenberg
