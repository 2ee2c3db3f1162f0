#include "greenberg/stochastic.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <thread>

namespace greenberg {

SimModel make_model(const FieldInstance& inst, DrawPolicy policy, int max_steps) {
    inst.validate();
    const int junk = inst.tk.order_valuation() - inst.ck.order_valuation() -
                     inst.rk_nr.order_valuation();
    if (junk < 0)
        throw std::invalid_argument(
            "inconsistent instance: #T_k smaller than #C_k * #R_k^nr");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    return {inst.p, inst.ck, inst.rk_nr, junk, policy, max_steps};
}

SimState initial_state(const SimModel& model) {
    SimState s;
    s.h_class = subgroup_generated(model.class_part, {});
    s.h_norm = subgroup_generated(model.norm_part, {});
    return s;
}

CaseLabel draw_step(const SimModel& model, SimState& state, SplitMix64& rng) {
    // The draws are independent and uniform; the junk component of T_k is
    // drawn implicitly and discarded since it never moves the state.
    const Element c = uniform_element(model.class_part, rng);
    const Element r = uniform_element(model.norm_part, rng);

    CaseLabel label;
    if (!state.h_class.contains(c)) {
        state.h_class = subgroup_join(state.h_class, c);
        label = CaseLabel::ClassGrowth;
    } else if (!state.h_norm.contains(r)) {
        state.h_norm = subgroup_join(state.h_norm, r);
        label = CaseLabel::NormGrowth;
    } else {
        label = CaseLabel::Idle;
    }
    ++state.case_counts[static_cast<std::size_t>(label)];
    return label;
}

TrialResult run_trial(const SimModel& model, SplitMix64& rng) {
    SimState state = initial_state(model);
    TrialResult result;
    if (state.terminal()) return result;  // empty model: b = 0

    while (state.step < model.max_steps) {
        ++state.step;
        i64 draws = 1;
        if (model.policy == DrawPolicy::Saturate)
            draws = static_cast<i64>(state.h_class.generators.size() +
                                     state.h_norm.generators.size()) +
                    1;
        for (i64 d = 0; d < draws && !state.terminal(); ++d) draw_step(model, state, rng);
        if (state.terminal()) {
            result.b = state.step;
            result.case_counts = state.case_counts;
            return result;
        }
    }
    result.b = model.max_steps;
    result.diverged = true;
    result.case_counts = state.case_counts;
    return result;
}

namespace {

int thread_pool_size() {
    if (const char* env = std::getenv("GREENBERG_LAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

BDistribution monte_carlo(const SimModel& model, i64 trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");

    const int pool = std::min<i64>(thread_pool_size(), trials);
    std::vector<std::map<int, i64>> local_hist(pool);
    std::vector<i64> local_div(pool, 0);

    auto worker = [&](int w) {
        for (i64 t = w; t < trials; t += pool) {
            SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(t));
            const TrialResult r = run_trial(model, rng);
            ++local_hist[w][r.b];
            if (r.diverged) ++local_div[w];
        }
    };
    if (pool == 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < pool; ++w) threads.emplace_back(worker, w);
        for (auto& th : threads) th.join();
    }

    std::map<int, i64> hist;
    BDistribution dist;
    dist.trials = trials;
    for (int w = 0; w < pool; ++w) {
        for (const auto& [b, count] : local_hist[w]) hist[b] += count;
        dist.divergence_count += local_div[w];
    }

    double sum = 0.0, sumsq = 0.0;
    i64 le_one = 0;
    for (const auto& [b, count] : hist) {
        dist.histogram.emplace_back(b, count);
        sum += static_cast<double>(b) * static_cast<double>(count);
        sumsq += static_cast<double>(b) * static_cast<double>(b) * static_cast<double>(count);
        if (b <= 1) le_one += count;
    }
    dist.mean = sum / static_cast<double>(trials);
    dist.variance = sumsq / static_cast<double>(trials) - dist.mean * dist.mean;
    dist.prob_b_le_1 = static_cast<double>(le_one) / static_cast<double>(trials);
    return dist;
}

// ---------------------------------------------------------------------------
// Exact absorbing-chain oracle

namespace {

// Subgroup lattice of a small group, with subgroups as sorted element-index
// sets and a join-with-element table.
struct SmallLattice {
    std::vector<Element> elements;
    std::vector<std::vector<int>> subgroups;  // sorted element indices
    // join[s][g]: index of <subgroup s, element g>
    std::vector<std::vector<int>> join;
    int full = 0;     // index of the whole group
    int trivial = 0;  // index of {0}

    explicit SmallLattice(const AbelianPGroup& g, i64 bound) {
        elements = all_elements(g, bound);
        const int n = static_cast<int>(elements.size());
        std::vector<std::vector<int>> add(n, std::vector<int>(n));
        std::map<std::vector<i64>, int> index;
        for (int i = 0; i < n; ++i) index[elements[i].coords] = i;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) add[i][j] = index.at(elements[i].add(elements[j]).coords);

        std::map<std::vector<int>, int> seen;
        auto closure = [&](std::vector<int> seed) {
            std::set<int> s(seed.begin(), seed.end());
            s.insert(0);
            for (;;) {
                std::set<int> next = s;
                for (int a : s)
                    for (int b : s) next.insert(add[a][b]);
                if (next.size() == s.size()) break;
                s = std::move(next);
            }
            return std::vector<int>(s.begin(), s.end());
        };
        auto intern = [&](const std::vector<int>& set) {
            auto [it, fresh] = seen.emplace(set, static_cast<int>(subgroups.size()));
            if (fresh) subgroups.push_back(set);
            return it->second;
        };

        trivial = intern(closure({}));
        // BFS over single-element joins reaches every subgroup; `subgroups`
        // grows while the loop runs.
        for (std::size_t s = 0; s < subgroups.size(); ++s) {
            std::vector<int> row(n);
            for (int g = 0; g < n; ++g) {
                std::vector<int> seed = subgroups[s];
                seed.push_back(g);
                row[g] = intern(closure(seed));
            }
            join.push_back(std::move(row));
        }
        for (std::size_t s = 0; s < subgroups.size(); ++s)
            if (subgroups[s].size() == static_cast<std::size_t>(n)) full = static_cast<int>(s);
    }
};

}  // namespace

Rational exact_expected_steps(const SimModel& model, i64 max_lattice_order) {
    const i64 product = checked_mul(model.class_part.order(), model.norm_part.order());
    if (product > max_lattice_order)
        throw std::length_error("subgroup lattice exceeds the configured oracle bound");
    if (model.empty()) return 0;

    const SmallLattice lc(model.class_part, max_lattice_order);
    const SmallLattice lr(model.norm_part, max_lattice_order);
    const i64 nc = static_cast<i64>(lc.elements.size());
    const i64 nr = static_cast<i64>(lr.elements.size());

    // E(s) over states s = (H_C, H_R); transitions strictly enlarge one of
    // the subgroups, so a memoized recursion in lattice order suffices.
    std::map<std::pair<int, int>, Rational> memo;
    auto expect = [&](auto&& self, int sc, int sr) -> Rational {
        if (sc == lc.full && sr == lr.full) return 0;
        const auto key = std::make_pair(sc, sr);
        if (auto it = memo.find(key); it != memo.end()) return it->second;

        const i64 hc = static_cast<i64>(lc.subgroups[sc].size());
        const i64 hr = static_cast<i64>(lr.subgroups[sr].size());
        const Rational stay = Rational(hc, nc) * Rational(hr, nr);

        Rational acc = 1;
        // Class growth: c outside H_C, any r.
        std::map<int, i64> class_dest;
        for (int g = 0; g < nc; ++g)
            if (!std::binary_search(lc.subgroups[sc].begin(), lc.subgroups[sc].end(), g))
                ++class_dest[lc.join[sc][g]];
        for (const auto& [dest, count] : class_dest)
            acc += Rational(count, nc) * self(self, dest, sr);
        // Norm growth: c inside H_C, r outside H_R.
        std::map<int, i64> norm_dest;
        for (int g = 0; g < nr; ++g)
            if (!std::binary_search(lr.subgroups[sr].begin(), lr.subgroups[sr].end(), g))
                ++norm_dest[lr.join[sr][g]];
        for (const auto& [dest, count] : norm_dest)
            acc += Rational(hc, nc) * Rational(count, nr) * self(self, sc, dest);

        Rational result = acc / (1 - stay);
        memo.emplace(key, result);
        return result;
    };
    return expect(expect, lc.trivial, lr.trivial);
}

}  // namespace greenberg
