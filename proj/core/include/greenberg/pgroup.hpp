#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "greenberg/rng.hpp"

namespace greenberg {

using i64 = std::int64_t;

// Row-major integer matrix. Empty matrices are allowed; a matrix with zero
// rows carries no column count, so degenerate shapes are handled by callers.
using Matrix = std::vector<std::vector<i64>>;

// Checked 64-bit arithmetic. Desk-scale instances fit machine words; anything
// larger is rejected with std::overflow_error instead of wrapping.
i64 checked_add(i64 a, i64 b);
i64 checked_mul(i64 a, i64 b);
i64 checked_pow(i64 base, int exp);

// Reduce v into [0, m).
i64 mod_reduce(i64 v, i64 m);

/// Finite abelian p-group in invariant-factor form:
/// G ≅ ⊕_j Z/p^{e_j} with e_1 ≥ e_2 ≥ … ≥ e_r ≥ 1. r = 0 is the trivial group.
struct AbelianPGroup {
    i64 p = 2;
    std::vector<int> exponents;

    AbelianPGroup() = default;
    AbelianPGroup(i64 p_, std::vector<int> exps);

    int rank() const { return static_cast<int>(exponents.size()); }
    bool trivial() const { return exponents.empty(); }
    int order_valuation() const;
    i64 order() const;
    std::vector<i64> moduli() const;

    bool operator==(const AbelianPGroup&) const = default;
};

struct Element {
    AbelianPGroup group;
    std::vector<i64> coords;  // coord j reduced mod p^{e_j}

    Element() = default;
    Element(AbelianPGroup g, std::vector<i64> c);

    static Element identity(const AbelianPGroup& g);
    bool is_identity() const;
    Element add(const Element& other) const;
    Element scale(i64 k) const;

    bool operator==(const Element&) const = default;
};

/// Homomorphism between abelian p-groups with the same p, given by an integer
/// matrix (target rank × source rank), column j the image of the j-th source
/// generator. Construction checks well-definedness:
/// p^{e_j(source)} · column_j ≡ 0 in the target.
struct PHom {
    AbelianPGroup source;
    AbelianPGroup target;
    Matrix matrix;

    PHom(AbelianPGroup src, AbelianPGroup tgt, Matrix m);

    static PHom identity(const AbelianPGroup& g);
    static PHom zero(const AbelianPGroup& src, const AbelianPGroup& tgt);

    Element apply(const Element& x) const;
    /// this ∘ other (apply other first).
    PHom compose(const PHom& other) const;
    bool is_identity_map() const;
    bool operator==(const PHom&) const = default;
};

/// h1 - h2 entrywise (same source/target).
PHom hom_sub(const PHom& h1, const PHom& h2);

/// Smith normal form with tracked unimodular transforms:
/// row_transform · A · col_transform = diag.
struct SmithDecomposition {
    std::vector<i64> diag;  // length min(rows, cols); d_1 | d_2 | …, zeros last
    Matrix row_transform;       // L
    Matrix row_transform_inv;   // L^{-1}
    Matrix col_transform;       // R
    Matrix col_transform_inv;   // R^{-1}
};

SmithDecomposition smith_decompose(const Matrix& a);

/// Nontrivial invariant factors (diagonal entries > 1), divisibility chain.
std::vector<i64> smith_normal_form(const Matrix& a);

/// Subgroup of `parent`, stored with canonical generators realizing the
/// invariant-factor structure plus the lattice data needed for membership.
struct Subgroup {
    AbelianPGroup parent;
    std::vector<Element> generators;
    AbelianPGroup structure;

    bool contains(const Element& x) const;
    int order_valuation() const { return structure.order_valuation(); }
    i64 order() const { return structure.order(); }
    bool is_trivial() const { return structure.trivial(); }
    bool is_whole_group() const {
        return structure.order_valuation() == parent.order_valuation();
    }

    // Lattice L = span(generator coords ∪ parent moduli) ⊆ Z^r, stored via
    // SNF row transform and diagonal: x ∈ L  ⇔  (L_t x)_i ≡ 0 (mod d_i).
    Matrix lattice_row_transform;
    std::vector<i64> lattice_diag;
};

Subgroup subgroup_generated(const AbelianPGroup& g, const std::vector<Element>& gens);

/// Subgroup generated by an existing subgroup and one extra element.
Subgroup subgroup_join(const Subgroup& h, const Element& x);

AbelianPGroup quotient(const AbelianPGroup& g, const Subgroup& h);

Subgroup hom_kernel(const PHom& f);

Element uniform_element(const AbelianPGroup& g, SplitMix64& rng);

int order_valuation(const AbelianPGroup& g);

/// Full enumeration, guarded by `bound` on the group order.
std::vector<Element> all_elements(const AbelianPGroup& g, i64 bound = 1 << 20);

}  // namespace greenberg
