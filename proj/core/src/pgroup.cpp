#include "greenberg/pgroup.hpp"

#include <algorithm>
#include <cstdlib>
#include <utility>

namespace greenberg {

i64 checked_add(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("integer overflow in addition");
    return r;
}

i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("integer overflow in multiplication");
    return r;
}

i64 checked_pow(i64 base, int exp) {
    if (exp < 0) throw std::invalid_argument("negative exponent");
    i64 r = 1;
    for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

i64 mod_reduce(i64 v, i64 m) {
    if (m <= 0) throw std::invalid_argument("nonpositive modulus");
    i64 r = v % m;
    if (r < 0) r += m;
    return r;
}

namespace {

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

int valuation(i64 v, i64 p) {
    int e = 0;
    while (v % p == 0) {
        v /= p;
        ++e;
    }
    if (v != 1 && v != -1)
        throw std::invalid_argument("value is not a p-power");
    return e;
}

Matrix identity_matrix(int n) {
    Matrix m(n, std::vector<i64>(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    const int rows = static_cast<int>(a.size());
    const int inner = rows ? static_cast<int>(a[0].size()) : 0;
    const int cols = inner && !b.empty() ? static_cast<int>(b[0].size()) : 0;
    Matrix r(rows, std::vector<i64>(cols, 0));
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < inner; ++k) {
            if (a[i][k] == 0) continue;
            for (int j = 0; j < cols; ++j)
                r[i][j] = checked_add(r[i][j], checked_mul(a[i][k], b[k][j]));
        }
    return r;
}

}  // namespace

AbelianPGroup::AbelianPGroup(i64 p_, std::vector<int> exps)
    : p(p_), exponents(std::move(exps)) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    for (std::size_t j = 0; j < exponents.size(); ++j) {
        if (exponents[j] < 1)
            throw std::invalid_argument("invariant-factor exponents must be >= 1");
        if (j > 0 && exponents[j] > exponents[j - 1])
            throw std::invalid_argument("exponents must be non-increasing");
    }
}

int AbelianPGroup::order_valuation() const {
    int s = 0;
    for (int e : exponents) s += e;
    return s;
}

i64 AbelianPGroup::order() const { return checked_pow(p, order_valuation()); }

std::vector<i64> AbelianPGroup::moduli() const {
    std::vector<i64> m;
    m.reserve(exponents.size());
    for (int e : exponents) m.push_back(checked_pow(p, e));
    return m;
}

Element::Element(AbelianPGroup g, std::vector<i64> c)
    : group(std::move(g)), coords(std::move(c)) {
    if (coords.size() != group.exponents.size())
        throw std::invalid_argument("coordinate count does not match group rank");
    const auto m = group.moduli();
    for (std::size_t j = 0; j < coords.size(); ++j) coords[j] = mod_reduce(coords[j], m[j]);
}

Element Element::identity(const AbelianPGroup& g) {
    return Element(g, std::vector<i64>(g.rank(), 0));
}

bool Element::is_identity() const {
    return std::all_of(coords.begin(), coords.end(), [](i64 c) { return c == 0; });
}

Element Element::add(const Element& other) const {
    if (group != other.group) throw std::invalid_argument("element parent mismatch");
    std::vector<i64> c(coords.size());
    const auto m = group.moduli();
    for (std::size_t j = 0; j < c.size(); ++j)
        c[j] = mod_reduce(checked_add(coords[j], other.coords[j]), m[j]);
    return Element(group, std::move(c));
}

Element Element::scale(i64 k) const {
    std::vector<i64> c(coords.size());
    const auto m = group.moduli();
    for (std::size_t j = 0; j < c.size(); ++j)
        c[j] = mod_reduce(checked_mul(mod_reduce(k, m[j]), coords[j]), m[j]);
    return Element(group, std::move(c));
}

PHom::PHom(AbelianPGroup src, AbelianPGroup tgt, Matrix m)
    : source(std::move(src)), target(std::move(tgt)), matrix(std::move(m)) {
    if (source.p != target.p)
        throw std::invalid_argument("source and target must share the prime p");
    const int rt = target.rank(), rs = source.rank();
    if (static_cast<int>(matrix.size()) != rt)
        throw std::invalid_argument("matrix row count must equal target rank");
    const auto tm = target.moduli();
    const auto sm = source.moduli();
    for (int i = 0; i < rt; ++i) {
        if (static_cast<int>(matrix[i].size()) != rs)
            throw std::invalid_argument("matrix column count must equal source rank");
        for (int j = 0; j < rs; ++j) matrix[i][j] = mod_reduce(matrix[i][j], tm[i]);
    }
    // Well-definedness: column j must annihilate p^{e_j(source)}.
    for (int j = 0; j < rs; ++j)
        for (int i = 0; i < rt; ++i)
            if (mod_reduce(checked_mul(sm[j] % tm[i], matrix[i][j]), tm[i]) != 0)
                throw std::invalid_argument("ill-defined homomorphism: column " +
                                            std::to_string(j) +
                                            " does not annihilate its source modulus");
}

PHom PHom::identity(const AbelianPGroup& g) {
    return PHom(g, g, identity_matrix(g.rank()));
}

PHom PHom::zero(const AbelianPGroup& src, const AbelianPGroup& tgt) {
    return PHom(src, tgt, Matrix(tgt.rank(), std::vector<i64>(src.rank(), 0)));
}

Element PHom::apply(const Element& x) const {
    if (x.group != source) throw std::invalid_argument("element not in hom source");
    const auto tm = target.moduli();
    std::vector<i64> c(target.rank(), 0);
    for (int i = 0; i < target.rank(); ++i) {
        i64 acc = 0;
        for (int j = 0; j < source.rank(); ++j)
            acc = mod_reduce(checked_add(acc, checked_mul(matrix[i][j], x.coords[j] % tm[i])),
                             tm[i]);
        c[i] = acc;
    }
    return Element(target, std::move(c));
}

PHom PHom::compose(const PHom& other) const {
    if (other.target != source)
        throw std::invalid_argument("composition shape mismatch");
    return PHom(other.source, target, mat_mul(matrix, other.matrix));
}

bool PHom::is_identity_map() const {
    if (source != target) return false;
    const auto tm = target.moduli();
    for (int i = 0; i < target.rank(); ++i)
        for (int j = 0; j < source.rank(); ++j) {
            const i64 want = (i == j) ? 1 : 0;
            if (mod_reduce(matrix[i][j] - want, tm[i]) != 0) return false;
        }
    return true;
}

PHom hom_sub(const PHom& h1, const PHom& h2) {
    if (h1.source != h2.source || h1.target != h2.target)
        throw std::invalid_argument("hom_sub shape mismatch");
    Matrix m = h1.matrix;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j)
            m[i][j] = checked_add(m[i][j], -h2.matrix[i][j]);
    return PHom(h1.source, h1.target, std::move(m));
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

struct SnfState {
    Matrix d, l, linv, r, rinv;
    int rows, cols;

    void swap_rows(int a, int b) {
        if (a == b) return;
        std::swap(d[a], d[b]);
        std::swap(l[a], l[b]);
        for (int i = 0; i < rows; ++i) std::swap(linv[i][a], linv[i][b]);
    }
    void swap_cols(int a, int b) {
        if (a == b) return;
        for (int i = 0; i < rows; ++i) std::swap(d[i][a], d[i][b]);
        for (int i = 0; i < cols; ++i) std::swap(r[i][a], r[i][b]);
        std::swap(rinv[a], rinv[b]);
    }
    // row a += q * row b
    void add_row(int a, int b, i64 q) {
        if (q == 0) return;
        for (int j = 0; j < cols; ++j)
            d[a][j] = checked_add(d[a][j], checked_mul(q, d[b][j]));
        for (int j = 0; j < rows; ++j)
            l[a][j] = checked_add(l[a][j], checked_mul(q, l[b][j]));
        for (int i = 0; i < rows; ++i)
            linv[i][b] = checked_add(linv[i][b], checked_mul(-q, linv[i][a]));
    }
    // col a += q * col b
    void add_col(int a, int b, i64 q) {
        if (q == 0) return;
        for (int i = 0; i < rows; ++i)
            d[i][a] = checked_add(d[i][a], checked_mul(q, d[i][b]));
        for (int i = 0; i < cols; ++i)
            r[i][a] = checked_add(r[i][a], checked_mul(q, r[i][b]));
        for (int j = 0; j < cols; ++j)
            rinv[b][j] = checked_add(rinv[b][j], checked_mul(-q, rinv[a][j]));
    }
    void negate_row(int a) {
        for (int j = 0; j < cols; ++j) d[a][j] = -d[a][j];
        for (int j = 0; j < rows; ++j) l[a][j] = -l[a][j];
        for (int i = 0; i < rows; ++i) linv[i][a] = -linv[i][a];
    }
};

}  // namespace

SmithDecomposition smith_decompose(const Matrix& a) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    for (const auto& row : a)
        if (static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("ragged matrix");

    SnfState s;
    s.rows = rows;
    s.cols = cols;
    s.d = a;
    s.l = identity_matrix(rows);
    s.linv = identity_matrix(rows);
    s.r = identity_matrix(cols);
    s.rinv = identity_matrix(cols);

    const int steps = std::min(rows, cols);
    for (int t = 0; t < steps; ++t) {
        for (;;) {
            // Smallest nonzero absolute value, row-major tie-break.
            int pi = -1, pj = -1;
            for (int i = t; i < rows; ++i)
                for (int j = t; j < cols; ++j)
                    if (s.d[i][j] != 0 &&
                        (pi < 0 || std::llabs(s.d[i][j]) < std::llabs(s.d[pi][pj]))) {
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) { pi = -2; break; }
            s.swap_rows(t, pi);
            s.swap_cols(t, pj);

            bool reduced = true;
            for (int i = t + 1; i < rows; ++i) {
                if (s.d[i][t] == 0) continue;
                const i64 q = s.d[i][t] / s.d[t][t];
                s.add_row(i, t, -q);
                if (s.d[i][t] != 0) reduced = false;
            }
            for (int j = t + 1; j < cols; ++j) {
                if (s.d[t][j] == 0) continue;
                const i64 q = s.d[t][j] / s.d[t][t];
                s.add_col(j, t, -q);
                if (s.d[t][j] != 0) reduced = false;
            }
            if (!reduced) continue;

            // Enforce the divisibility chain: fold any non-divisible entry
            // of the remaining submatrix into row t and restart the step.
            bool chain_ok = true;
            for (int i = t + 1; i < rows && chain_ok; ++i)
                for (int j = t + 1; j < cols && chain_ok; ++j)
                    if (s.d[i][j] % s.d[t][t] != 0) {
                        s.add_row(t, i, 1);
                        chain_ok = false;
                    }
            if (chain_ok) break;
        }
        if (s.d[t][t] == 0) break;
        if (s.d[t][t] < 0) s.negate_row(t);
    }

    SmithDecomposition out;
    out.diag.resize(steps);
    for (int t = 0; t < steps; ++t) out.diag[t] = s.d[t][t];
    out.row_transform = std::move(s.l);
    out.row_transform_inv = std::move(s.linv);
    out.col_transform = std::move(s.r);
    out.col_transform_inv = std::move(s.rinv);
    return out;
}

std::vector<i64> smith_normal_form(const Matrix& a) {
    auto dec = smith_decompose(a);
    std::vector<i64> out;
    for (i64 d : dec.diag)
        if (d > 1) out.push_back(d);
    return out;
}

// ---------------------------------------------------------------------------
// Subgroups, quotients, kernels

namespace {

// Columns of A span the lattice L ⊆ Z^r (A must contain the moduli columns so
// that L has full rank r). Builds the Subgroup record.
Subgroup subgroup_from_lattice_columns(const AbelianPGroup& g, const Matrix& a) {
    const int r = g.rank();
    if (r == 0) {
        Subgroup s;
        s.parent = g;
        s.structure = AbelianPGroup(g.p, {});
        return s;
    }
    auto dec = smith_decompose(a);
    std::vector<i64> diag(dec.diag.begin(), dec.diag.begin() + r);
    for (i64 d : diag)
        if (d == 0) throw std::logic_error("lattice not of full rank");

    // Basis of L in Z^r: B = L^{-1} · diag(d).
    Matrix basis(r, std::vector<i64>(r, 0));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            basis[i][j] = checked_mul(dec.row_transform_inv[i][j], diag[j]);

    // Moduli lattice M in terms of B: C = diag(d)^{-1} · L · diag(moduli).
    const auto mods = g.moduli();
    Matrix rel(r, std::vector<i64>(r, 0));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const i64 num = checked_mul(dec.row_transform[i][j], mods[j]);
            if (num % diag[i] != 0) throw std::logic_error("moduli lattice not contained in span");
            rel[i][j] = num / diag[i];
        }

    // Structure of H = L/M and generators adapted to it.
    auto rel_dec = smith_decompose(rel);
    Matrix gen_mat = mat_mul(basis, rel_dec.row_transform_inv);

    std::vector<std::pair<int, Element>> typed;  // (exponent, generator)
    for (int j = 0; j < r; ++j) {
        const i64 d = rel_dec.diag[j];
        if (d <= 1) continue;
        std::vector<i64> coords(r);
        for (int i = 0; i < r; ++i) coords[i] = gen_mat[i][j];
        typed.emplace_back(valuation(d, g.p), Element(g, std::move(coords)));
    }
    std::stable_sort(typed.begin(), typed.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });

    Subgroup s;
    s.parent = g;
    std::vector<int> exps;
    for (auto& [e, gen] : typed) {
        exps.push_back(e);
        s.generators.push_back(std::move(gen));
    }
    s.structure = AbelianPGroup(g.p, std::move(exps));
    s.lattice_row_transform = std::move(dec.row_transform);
    s.lattice_diag = std::move(diag);
    return s;
}

Matrix lattice_columns(const AbelianPGroup& g, const std::vector<Element>& gens) {
    const int r = g.rank();
    const auto mods = g.moduli();
    Matrix a(r, std::vector<i64>(gens.size() + r, 0));
    for (std::size_t j = 0; j < gens.size(); ++j)
        for (int i = 0; i < r; ++i) a[i][j] = gens[j].coords[i];
    for (int i = 0; i < r; ++i) a[i][gens.size() + i] = mods[i];
    return a;
}

}  // namespace

Subgroup subgroup_generated(const AbelianPGroup& g, const std::vector<Element>& gens) {
    for (const auto& x : gens)
        if (x.group != g)
            throw std::invalid_argument("generator does not belong to the parent group");
    return subgroup_from_lattice_columns(g, lattice_columns(g, gens));
}

Subgroup subgroup_join(const Subgroup& h, const Element& x) {
    if (x.group != h.parent) throw std::invalid_argument("element/parent mismatch");
    std::vector<Element> gens = h.generators;
    gens.push_back(x);
    return subgroup_generated(h.parent, gens);
}

bool Subgroup::contains(const Element& x) const {
    if (x.group != parent) throw std::invalid_argument("element/parent mismatch");
    const int r = parent.rank();
    for (int i = 0; i < r; ++i) {
        i64 acc = 0;
        for (int j = 0; j < r; ++j)
            acc = checked_add(acc, checked_mul(lattice_row_transform[i][j], x.coords[j]));
        if (mod_reduce(acc, lattice_diag[i]) != 0) return false;
    }
    return true;
}

AbelianPGroup quotient(const AbelianPGroup& g, const Subgroup& h) {
    if (h.parent != g) throw std::invalid_argument("subgroup parent mismatch");
    std::vector<int> exps;
    for (i64 d : h.lattice_diag)
        if (d > 1) exps.push_back(valuation(d, g.p));
    std::sort(exps.rbegin(), exps.rend());
    return AbelianPGroup(g.p, std::move(exps));
}

Subgroup hom_kernel(const PHom& f) {
    const int rs = f.source.rank();
    const int rt = f.target.rank();
    if (rt == 0 || rs == 0) {
        // Trivial target: everything maps to 0.
        std::vector<Element> gens;
        const auto mods = f.source.moduli();
        for (int j = 0; j < rs; ++j) {
            std::vector<i64> c(rs, 0);
            c[j] = 1;
            gens.emplace_back(f.source, std::move(c));
        }
        if (rt != 0) gens.clear();  // rs == 0: trivial source
        return subgroup_generated(f.source, rt == 0 ? gens : std::vector<Element>{});
    }

    // Solve F x + diag(target moduli) y = 0; the x-projection of the integer
    // null space is exactly the kernel preimage in Z^{rs}.
    const auto tmods = f.target.moduli();
    Matrix a(rt, std::vector<i64>(rs + rt, 0));
    for (int i = 0; i < rt; ++i) {
        for (int j = 0; j < rs; ++j) a[i][j] = f.matrix[i][j];
        a[i][rs + i] = tmods[i];
    }
    auto dec = smith_decompose(a);
    int rank = 0;
    for (i64 d : dec.diag)
        if (d != 0) ++rank;

    std::vector<Element> gens;
    for (int j = rank; j < rs + rt; ++j) {
        std::vector<i64> c(rs);
        for (int i = 0; i < rs; ++i) c[i] = dec.col_transform[i][j];
        gens.emplace_back(f.source, std::move(c));
    }
    return subgroup_generated(f.source, gens);
}

Element uniform_element(const AbelianPGroup& g, SplitMix64& rng) {
    const auto mods = g.moduli();
    std::vector<i64> c(mods.size());
    for (std::size_t j = 0; j < c.size(); ++j)
        c[j] = static_cast<i64>(rng.below(static_cast<std::uint64_t>(mods[j])));
    return Element(g, std::move(c));
}

int order_valuation(const AbelianPGroup& g) { return g.order_valuation(); }

std::vector<Element> all_elements(const AbelianPGroup& g, i64 bound) {
    const i64 n = g.order();
    if (n > bound) throw std::invalid_argument("group too large to enumerate");
    const auto mods = g.moduli();
    std::vector<Element> out;
    out.reserve(static_cast<std::size_t>(n));
    std::vector<i64> c(mods.size(), 0);
    for (i64 k = 0; k < n; ++k) {
        out.emplace_back(g, c);
        for (std::size_t j = c.size(); j-- > 0;) {
            if (++c[j] < mods[j]) break;
            c[j] = 0;
        }
    }
    return out;
}

}  // namespace greenberg
