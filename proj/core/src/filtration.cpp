#include "greenberg/filtration.hpp"

#include <utility>

namespace greenberg {

GModule::GModule(AbelianPGroup g, PHom s, int layer)
    : group(std::move(g)), sigma(std::move(s)), n(layer) {
    if (sigma.source != group || sigma.target != group)
        throw std::invalid_argument("sigma must be an endomorphism of the module group");
    if (n < 0) throw std::invalid_argument("layer index must be >= 0");
    if (!hom_kernel(sigma).is_trivial())
        throw std::invalid_argument("sigma is not an automorphism");
    PHom power = sigma;
    for (int i = 0; i < n; ++i) {
        PHom next = power;
        for (i64 k = 1; k < group.p; ++k) next = next.compose(power);
        power = next;  // power = sigma^{p^{i+1}}
    }
    if (!power.is_identity_map())
        throw std::invalid_argument("sigma order does not divide p^n");
}

PHom one_minus_sigma(const GModule& m) {
    return hom_sub(PHom::identity(m.group), m.sigma);
}

Subgroup filtration_level(const GModule& m, int i) {
    if (i < 0) throw std::invalid_argument("filtration index must be >= 0");
    if (i == 0) return subgroup_generated(m.group, {});
    const PHom step = one_minus_sigma(m);
    PHom power = step;
    for (int k = 1; k < i; ++k) power = power.compose(step);
    return hom_kernel(power);
}

FiltrationTrace filtration_trace(const GModule& m) {
    FiltrationTrace trace;
    trace.total_order_val = m.group.order_valuation();

    const PHom step = one_minus_sigma(m);
    PHom power = PHom::identity(m.group);
    int prev_val = 0;  // v_p(#M^0) = 0
    int i = 0;
    // Each nontrivial quotient multiplies the level order by at least p,
    // so the loop ends after at most v_p(#M) steps.
    while (prev_val < trace.total_order_val) {
        power = step.compose(power);  // (1 - sigma)^{i+1}
        const int next_val = hom_kernel(power).order_valuation();
        trace.steps.push_back({i, prev_val, next_val - prev_val});
        prev_val = next_val;
        ++i;
    }
    trace.b = i;
    return trace;
}

PropertyReport verify_filtration_properties(const GModule& m, i64 enumeration_bound) {
    PropertyReport report;
    const FiltrationTrace trace = filtration_trace(m);
    const PHom step = one_minus_sigma(m);

    std::vector<Subgroup> levels;
    for (int i = 0; i <= trace.b; ++i) levels.push_back(filtration_level(m, i));

    // (ii) kernel characterization vs exhaustive enumeration.
    const bool enumerable = m.group.order() <= enumeration_bound;
    if (enumerable) {
        report.checks_run.push_back("kernel characterization (enumeration)");
        const auto elems = all_elements(m.group, enumeration_bound);
        for (int i = 0; i <= trace.b; ++i) {
            i64 count = 0;
            for (const auto& x : elems) {
                Element y = x;
                for (int k = 0; k < i; ++k) y = step.apply(y);
                const bool in_kernel = y.is_identity();
                if (in_kernel != levels[i].contains(x)) {
                    report.failures.push_back({i, "level membership disagrees with enumeration"});
                    break;
                }
                if (in_kernel) ++count;
            }
            if (count != levels[i].order())
                report.failures.push_back({i, "level order disagrees with enumeration"});
        }
    }

    // Nesting: level(i) subset of level(i+1), strict below b.
    report.checks_run.push_back("nesting");
    for (int i = 0; i < trace.b; ++i) {
        for (const auto& g : levels[i].generators)
            if (!levels[i + 1].contains(g))
                report.failures.push_back({i, "levels are not nested"});
        if (levels[i].order_valuation() >= levels[i + 1].order_valuation())
            report.failures.push_back({i, "level order does not strictly increase below b"});
    }

    // (i) level 1 is the fixed-point subgroup Ker(1 - sigma).
    report.checks_run.push_back("fixed points at level 1");
    if (trace.b >= 1) {
        const Subgroup fixed = hom_kernel(step);
        if (fixed.structure != levels[1].structure)
            report.failures.push_back({1, "level 1 differs from the fixed-point subgroup"});
    }

    // (iii) quotient orders non-increasing; injectivity of the induced maps.
    report.checks_run.push_back("non-increasing quotient orders");
    for (std::size_t i = 1; i < trace.steps.size(); ++i)
        if (trace.steps[i].quotient_order_val > trace.steps[i - 1].quotient_order_val)
            report.failures.push_back({static_cast<int>(i), "quotient order increased"});
    if (enumerable && trace.b >= 2) {
        report.checks_run.push_back("injectivity of induced 1-sigma maps (enumeration)");
        const auto elems = all_elements(m.group, enumeration_bound);
        for (int i = 1; i < trace.b; ++i) {
            // x in level(i+1) with (1-sigma)x in level(i-1) must lie in level(i).
            for (const auto& x : elems) {
                if (!levels[i + 1].contains(x)) continue;
                const Element y = step.apply(x);
                if (levels[i - 1].contains(y) && !levels[i].contains(x)) {
                    report.failures.push_back({i, "induced quotient map is not injective"});
                    break;
                }
            }
        }
    }

    // (iv) product formula: the quotient orders multiply to #M.
    report.checks_run.push_back("product formula");
    int sum = 0;
    for (const auto& s : trace.steps) sum += s.quotient_order_val;
    if (sum != trace.total_order_val)
        report.failures.push_back({trace.b, "quotient orders do not multiply to the module order"});

    return report;
}

}  // namespace greenberg
