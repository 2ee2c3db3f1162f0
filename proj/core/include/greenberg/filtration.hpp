#pragma once

#include <string>
#include <vector>

#include "greenberg/pgroup.hpp"

namespace greenberg {

/// A finite module over the group ring of a cyclic p-group: an abelian
/// p-group together with an automorphism sigma of order dividing p^n.
struct GModule {
    AbelianPGroup group;
    PHom sigma;
    int n;

    GModule(AbelianPGroup g, PHom s, int layer);
};

/// The map 1 - sigma.
PHom one_minus_sigma(const GModule& m);

/// Level i of the unscrewing filtration: Ker((1 - sigma)^i).
Subgroup filtration_level(const GModule& m, int i);

struct FiltrationTrace {
    struct Step {
        int i;                   // step index
        int level_order_val;     // v_p(#M^i)
        int quotient_order_val;  // v_p(#(M^{i+1}/M^i))
    };
    std::vector<Step> steps;  // one row per step 0 <= i < b
    int b = 0;
    int total_order_val = 0;  // v_p(#M)
};

FiltrationTrace filtration_trace(const GModule& m);

struct PropertyReport {
    struct Failure {
        int step;
        std::string what;
    };
    std::vector<std::string> checks_run;
    std::vector<Failure> failures;
    bool passed() const { return failures.empty(); }
};

/// Verifies the structural properties of the filtration: the kernel
/// characterization of the levels (against exhaustive enumeration when the
/// module order is at most enumeration_bound), nesting, non-increasing
/// quotient orders with injectivity of the induced 1-sigma maps, and the
/// product formula for the total order.
PropertyReport verify_filtration_properties(const GModule& m, i64 enumeration_bound = 729);

}  // namespace greenberg
