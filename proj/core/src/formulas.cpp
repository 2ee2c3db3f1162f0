#include "greenberg/formulas.hpp"

#include <algorithm>

namespace greenberg {

void FieldInstance::validate() const {
    if (s_count < 1) throw std::invalid_argument("s_count must be >= 1");
    if (ck.p != p || tk.p != p || rk.p != p || rk_nr.p != p)
        throw std::invalid_argument("all group structures must share the instance prime");
    if (rk_nr.order_valuation() > rk.order_valuation())
        throw std::invalid_argument("#Rk_nr must divide #Rk");
    if (tk.order_valuation() < ck.order_valuation())
        throw std::invalid_argument("v_p(#Tk) must be >= v_p(#Ck)");
    if (tk.order_valuation() < rk.order_valuation())
        throw std::invalid_argument("v_p(#Tk) must be >= v_p(#Rk)");
    if (invariants && (invariants->lambda < 0 || invariants->mu < 0))
        throw std::invalid_argument("lambda and mu must be >= 0");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].order_valuation < 0)
            throw std::invalid_argument("layer order valuation must be >= 0");
        if (i > 0 && layers[i].n <= layers[i - 1].n)
            throw std::invalid_argument("layers must be strictly increasing in n");
        if (layers[i].class_group &&
            layers[i].class_group->order_valuation() != layers[i].order_valuation)
            throw std::invalid_argument("layer structure does not match its order valuation");
    }
}

int chevalley_order(int ck_val, int n, int s_count, int unit_norm_index_val) {
    if (ck_val < 0 || n < 0 || s_count < 1 || unit_norm_index_val < 0)
        throw std::invalid_argument("chevalley_order: arguments out of range");
    const int v = ck_val + n * (s_count - 1) - unit_norm_index_val;
    if (v < 0)
        throw std::invalid_argument("chevalley_order: negative valuation, inconsistent input");
    return v;
}

StepQuotientOrder step_quotient_order(int ck_val, int norm_image_val, int n,
                                      int s_count, int lambda_index_val) {
    if (norm_image_val > ck_val)
        throw std::invalid_argument("norm image cannot exceed #C_k");
    if (lambda_index_val > n * (s_count - 1))
        throw std::invalid_argument("norm index cannot exceed the ramification term");
    if (norm_image_val < 0 || lambda_index_val < 0 || n < 0 || s_count < 1)
        throw std::invalid_argument("step_quotient_order: arguments out of range");
    return {ck_val - norm_image_val, n * (s_count - 1) - lambda_index_val};
}

int genus_order(const FieldInstance& inst) {
    return inst.ck.order_valuation() + inst.rk_nr.order_valuation();
}

InvariantTriple rebase_invariants(int lambda, int mu, int nu, int n0, i64 p) {
    if (n0 < 0) throw std::invalid_argument("rebase shift must be >= 0");
    const i64 scaled = checked_mul(checked_pow(p, n0), mu);
    if (scaled > INT32_MAX) throw std::overflow_error("rebased mu exceeds integer range");
    return {lambda, static_cast<int>(scaled), nu + lambda * n0};
}

namespace {

// lambda*n + mu*p^n + nu, or nullopt on overflow past the data range.
std::optional<i64> iwasawa_value(int lambda, int mu, int nu, int n, i64 p) {
    try {
        return checked_add(checked_add(checked_mul(lambda, n), checked_mul(mu, checked_pow(p, n))),
                           nu);
    } catch (const std::overflow_error&) {
        return std::nullopt;
    }
}

}  // namespace

IwasawaFit iwasawa_fit(const std::vector<int>& order_vals, i64 p, int n_start,
                       const FitBounds& bounds) {
    IwasawaFit fit;
    fit.window_start = n_start;
    fit.window_size = static_cast<int>(order_vals.size());
    if (order_vals.size() < 3) {
        fit.status = IwasawaFit::Status::Underdetermined;
        return fit;
    }
    for (int lambda = 0; lambda <= bounds.lambda_max; ++lambda)
        for (int mu = 0; mu <= bounds.mu_max; ++mu)
            for (int nu = -bounds.nu_abs_max; nu <= bounds.nu_abs_max; ++nu) {
                bool ok = true;
                for (std::size_t i = 0; i < order_vals.size() && ok; ++i) {
                    const auto v = iwasawa_value(lambda, mu, nu, n_start + static_cast<int>(i), p);
                    ok = v && *v == order_vals[i];
                }
                if (ok) {
                    fit.status = IwasawaFit::Status::ExactFit;
                    fit.invariants = {lambda, mu, nu};
                    return fit;
                }
            }
    fit.status = IwasawaFit::Status::NoFit;
    return fit;
}

RebaseFit auto_rebase_fit(const std::vector<int>& order_vals, i64 p, int n_start,
                          const FitBounds& bounds) {
    RebaseFit result;
    for (std::size_t shift = 0; shift + 3 <= order_vals.size(); ++shift) {
        std::vector<int> window(order_vals.begin() + static_cast<long>(shift), order_vals.end());
        // Layers re-indexed from the new base field k_{n_start + shift}.
        IwasawaFit fit = iwasawa_fit(window, p, 0, bounds);
        fit.window_start = n_start + static_cast<int>(shift);
        result.fit = fit;
        if (fit.status == IwasawaFit::Status::ExactFit) {
            result.n0 = n_start + static_cast<int>(shift);
            return result;
        }
    }
    return result;
}

bool BoundReport::all_ok() const {
    if (!monotonic_ok) return false;
    if (b1_zero_equivalence == Verdict::Violated) return false;
    for (const auto& l : layers)
        if (!l.lower_ok || !l.upper_ok) return false;
    return true;
}

BoundReport check_theorem_bounds(const FieldInstance& inst) {
    BoundReport report;

    std::optional<InvariantTriple> inv;
    if (inst.invariants)
        inv = InvariantTriple{inst.invariants->lambda, inst.invariants->mu, inst.invariants->nu};
    else {
        std::vector<int> vals;
        for (const auto& l : inst.layers) vals.push_back(l.order_valuation);
        if (!inst.layers.empty()) {
            const IwasawaFit fit = iwasawa_fit(vals, inst.p, inst.layers.front().n);
            if (fit.status == IwasawaFit::Status::ExactFit)
                inv = fit.invariants;
            else
                report.warnings.push_back("no exact Iwasawa fit on the provided layers");
        }
    }

    const int genus_val = genus_order(inst);

    // (ii) monotonicity of b over the layers that carry it.
    std::optional<int> prev_b;
    for (const auto& layer : inst.layers) {
        if (!layer.b) continue;
        if (prev_b && *layer.b < *prev_b) {
            report.monotonic_ok = false;
            report.monotonic_violations.push_back(layer.n);
        }
        prev_b = *layer.b;
    }

    // (i) the two inequalities, per layer with b present.
    if (inv) {
        for (const auto& layer : inst.layers) {
            if (!layer.b) continue;
            const auto fval = iwasawa_value(inv->lambda, inv->mu, inv->nu, layer.n, inst.p);
            if (!fval) {
                report.warnings.push_back("formula value overflow at layer " +
                                          std::to_string(layer.n));
                continue;
            }
            BoundReport::LayerVerdict v;
            v.n = layer.n;
            v.b = *layer.b;
            v.formula_val = static_cast<int>(*fval);
            v.lower_ok = v.b <= v.formula_val;
            v.upper_ok = v.formula_val <= genus_val * v.b;
            report.layers.push_back(v);
        }
        // (iii) b_1 = 0  <=>  lambda = mu = nu = 0.
        const auto b1 = std::find_if(inst.layers.begin(), inst.layers.end(),
                                     [](const auto& l) { return l.n == 1 && l.b; });
        if (b1 != inst.layers.end()) {
            const bool zero_b1 = *b1->b == 0;
            const bool zero_inv = inv->lambda == 0 && inv->mu == 0 && inv->nu == 0;
            report.b1_zero_equivalence = (zero_b1 == zero_inv)
                                             ? BoundReport::Verdict::Holds
                                             : BoundReport::Verdict::Violated;
        }
    } else {
        report.warnings.push_back("invariants unavailable; inequality checks skipped");
    }
    return report;
}

bool EquivalenceReport::any_violation() const {
    return norms_isomorphisms == Verdict::Violated || constant_orders == Verdict::Violated ||
           invariant_and_rnr_trivial == Verdict::Violated || b_at_most_one == Verdict::Violated;
}

EquivalenceReport check_greenberg_equivalences(const FieldInstance& inst) {
    using Verdict = BoundReport::Verdict;
    EquivalenceReport report;

    const int ck_val = inst.ck.order_valuation();

    if (!inst.layers.empty()) {
        const bool constant = std::all_of(inst.layers.begin(), inst.layers.end(), [&](const auto& l) {
            return l.order_valuation == ck_val;
        });
        report.constant_orders = constant ? Verdict::Holds : Verdict::Violated;

        // (i) Norms being isomorphisms forces constant orders; the maps
        // themselves are not part of the data, so only a violation of the
        // order condition is decisive.
        if (!constant) {
            report.norms_isomorphisms = Verdict::Violated;
            report.notes.push_back("layer orders vary: norm maps cannot all be isomorphisms");
        } else {
            report.norms_isomorphisms = Verdict::Undecidable;
            report.notes.push_back("constant layer orders are consistent with norm isomorphisms");
        }

        if (constant && inst.rk_nr.trivial())
            report.invariant_and_rnr_trivial = Verdict::Holds;
        else if (!constant || !inst.rk_nr.trivial())
            report.invariant_and_rnr_trivial = Verdict::Violated;
        if (constant && !inst.rk_nr.trivial())
            report.notes.push_back("constant orders but R_k^nr nontrivial: condition (iii) fails");
    } else {
        report.notes.push_back("no layer data: order conditions undecidable");
    }

    bool any_b = false, all_le_one = true;
    for (const auto& l : inst.layers)
        if (l.b) {
            any_b = true;
            if (*l.b > 1) all_le_one = false;
        }
    if (any_b)
        report.b_at_most_one = all_le_one ? Verdict::Holds : Verdict::Violated;

    return report;
}

StabilizationReport stabilization_analysis(const std::vector<LayerSteps>& traces) {
    if (traces.size() < 2)
        throw std::invalid_argument("stabilization analysis needs at least two layers");
    std::vector<LayerSteps> sorted = traces;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.n < b.n; });

    std::size_t max_steps = 0;
    for (const auto& t : sorted) max_steps = std::max(max_steps, t.steps.size());

    StabilizationReport report;
    for (std::size_t i = 0; i < max_steps; ++i) {
        StabilizationReport::PerStep per;
        per.i = static_cast<int>(i);
        bool all_factors = true;
        for (const auto& t : sorted) {
            // Past the end of a layer's trace the quotient is trivial.
            const int v = i < t.steps.size() ? t.steps[i].quotient_val : 0;
            per.over_n.push_back(v);
            if (i >= t.steps.size() || !t.steps[i].class_val || !t.steps[i].norm_val)
                all_factors = false;
        }
        for (std::size_t j = 1; j < per.over_n.size(); ++j)
            if (per.over_n[j] < per.over_n[j - 1]) {
                per.nondecreasing = false;
                report.consistent = false;
            }
        per.limit_val = per.over_n.back();
        per.stationary = per.over_n.size() >= 2 &&
                         per.over_n[per.over_n.size() - 2] == per.over_n.back();
        if (all_factors) {
            const auto& deepest = sorted.back().steps[i];
            per.class_limit = deepest.class_val;
            per.norm_limit = deepest.norm_val;
        }
        report.per_step.push_back(std::move(per));
    }

    // Tail estimate: the per-i limits at the deepest recorded step. With all
    // quotients trivial the tail is (0, 0).
    if (!report.per_step.empty()) {
        const auto& tail = report.per_step.back();
        if (tail.class_limit && tail.norm_limit) {
            report.factors_present = true;
            report.c_estimate = *tail.class_limit;
            report.rho_estimate = *tail.norm_limit;
        } else {
            report.c_estimate = tail.limit_val;
            report.rho_estimate = 0;
        }
    }
    return report;
}

}  // namespace greenberg
