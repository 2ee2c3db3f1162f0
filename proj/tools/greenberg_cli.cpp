// Command-line surface for the filtration, fitting, checking and simulation
// layers. Exit codes: 0 ok, 1 input error, 2 property/bound violation,
// 3 underdetermined fit, 4 oracle size limit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "greenberg/filtration.hpp"
#include "greenberg/formulas.hpp"
#include "greenberg/instance_io.hpp"
#include "greenberg/stochastic.hpp"

namespace {

using namespace greenberg;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitViolation = 2;
constexpr int kExitUnderdetermined = 3;
constexpr int kExitOracleLimit = 4;

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // LF line endings on all hosts
    if (!out) throw ParseError("cannot open CSV output: " + path);
    return out;
}

int cmd_filtrate(const std::string& module_path, bool verify, const std::string& csv_path) {
    const GModule mod = parse_module(module_path);
    const FiltrationTrace trace = filtration_trace(mod);

    std::printf("module: p=%lld exponents=[", static_cast<long long>(mod.group.p));
    for (std::size_t j = 0; j < mod.group.exponents.size(); ++j)
        std::printf("%s%d", j ? "," : "", mod.group.exponents[j]);
    std::printf("] n=%d\n", mod.n);
    std::printf("%4s %24s %26s\n", "i", "level_order_valuation", "quotient_order_valuation");
    for (const auto& step : trace.steps)
        std::printf("%4d %24d %26d\n", step.i, step.level_order_val, step.quotient_order_val);
    std::printf("b = %d, total order valuation = %d\n", trace.b, trace.total_order_val);

    if (!csv_path.empty()) {
        auto out = open_csv(csv_path);
        out << "i,level_order_valuation,quotient_order_valuation\n";
        for (const auto& step : trace.steps)
            out << step.i << ',' << step.level_order_val << ',' << step.quotient_order_val
                << '\n';
    }

    if (verify) {
        const PropertyReport report = verify_filtration_properties(mod);
        for (const auto& check : report.checks_run)
            std::printf("check: %s\n", check.c_str());
        for (const auto& failure : report.failures)
            std::printf("FAIL at step %d: %s\n", failure.step, failure.what.c_str());
        std::printf("verification: %s\n", report.passed() ? "pass" : "FAIL");
        if (!report.passed()) return kExitViolation;
    }
    return kExitOk;
}

const char* status_name(IwasawaFit::Status s) {
    switch (s) {
        case IwasawaFit::Status::ExactFit: return "exact-fit";
        case IwasawaFit::Status::NoFit: return "no-fit";
        default: return "underdetermined";
    }
}

int cmd_fit(const std::string& instance_path, const std::string& window, bool auto_rebase) {
    const FieldInstance inst = parse_instance(instance_path);

    std::vector<std::pair<int, int>> selected;
    for (const auto& layer : inst.layers) selected.emplace_back(layer.n, layer.order_valuation);
    if (!window.empty()) {
        const auto dots = window.find("..");
        if (dots == std::string::npos)
            throw ParseError("--window expects the form n0..n1");
        const int lo = std::stoi(window.substr(0, dots));
        const int hi = std::stoi(window.substr(dots + 2));
        std::erase_if(selected, [&](const auto& l) { return l.first < lo || l.first > hi; });
    }
    for (std::size_t i = 1; i < selected.size(); ++i)
        if (selected[i].first != selected[i - 1].first + 1)
            throw ParseError("fit requires consecutive layers");

    std::vector<int> vals;
    for (const auto& [n, v] : selected) vals.push_back(v);
    const int n_start = selected.empty() ? 0 : selected.front().first;

    if (auto_rebase) {
        const RebaseFit rebased = auto_rebase_fit(vals, inst.p, n_start);
        if (rebased.fit.status == IwasawaFit::Status::Underdetermined) {
            std::printf("status: underdetermined (need >= 3 layers)\n");
            return kExitUnderdetermined;
        }
        if (rebased.n0) {
            const auto& inv = rebased.fit.invariants;
            std::printf("auto-rebase: smallest n0 = %d\n", *rebased.n0);
            std::printf("status: exact-fit (from base k_%d)\n", *rebased.n0);
            std::printf("lambda = %d, mu = %d, nu = %d\n", inv.lambda, inv.mu, inv.nu);
        } else {
            std::printf("auto-rebase: no window of the data admits an exact fit\n");
        }
        return kExitOk;
    }

    const IwasawaFit fit = iwasawa_fit(vals, inst.p, n_start);
    std::printf("layers n=%d..%d\n", n_start, n_start + fit.window_size - 1);
    std::printf("status: %s\n", status_name(fit.status));
    if (fit.status == IwasawaFit::Status::ExactFit)
        std::printf("lambda = %d, mu = %d, nu = %d\n", fit.invariants.lambda,
                    fit.invariants.mu, fit.invariants.nu);
    if (fit.status == IwasawaFit::Status::Underdetermined) return kExitUnderdetermined;
    return kExitOk;
}

const char* verdict_name(BoundReport::Verdict v) {
    switch (v) {
        case BoundReport::Verdict::Holds: return "holds";
        case BoundReport::Verdict::Violated: return "VIOLATED";
        default: return "undecidable";
    }
}

int cmd_check(const std::string& instance_path) {
    const FieldInstance inst = parse_instance(instance_path);

    std::printf("genus order valuation v_p(#G_k) = %d\n", genus_order(inst));

    const BoundReport bounds = check_theorem_bounds(inst);
    for (const auto& w : bounds.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    for (const auto& layer : bounds.layers)
        std::printf("layer n=%d: b=%d, lambda*n+mu*p^n+nu=%d, lower %s, upper %s\n", layer.n,
                    layer.b, layer.formula_val, layer.lower_ok ? "ok" : "VIOLATED",
                    layer.upper_ok ? "ok" : "VIOLATED");
    std::printf("b monotonicity: %s\n", bounds.monotonic_ok ? "ok" : "VIOLATED");
    std::printf("b_1 = 0 equivalence: %s\n", verdict_name(bounds.b1_zero_equivalence));

    const EquivalenceReport equiv = check_greenberg_equivalences(inst);
    std::printf("norm maps isomorphisms (i): %s\n", verdict_name(equiv.norms_isomorphisms));
    std::printf("constant layer orders (ii): %s\n", verdict_name(equiv.constant_orders));
    std::printf("invariant classes and trivial R_k^nr (iii): %s\n",
                verdict_name(equiv.invariant_and_rnr_trivial));
    std::printf("b_n <= 1 (b): %s\n", verdict_name(equiv.b_at_most_one));
    for (const auto& note : equiv.notes) std::printf("note: %s\n", note.c_str());

    // The equivalence report is descriptive (it classifies the field); only
    // failures of the theorem's bounds make the data inconsistent.
    return bounds.all_ok() ? kExitOk : kExitViolation;
}

int cmd_simulate(const std::string& instance_path, long long trials, std::uint64_t seed,
                 const std::string& policy_name, bool oracle, const std::string& csv_path) {
    const FieldInstance inst = parse_instance(instance_path);
    DrawPolicy policy = DrawPolicy::Single;
    if (policy_name == "saturate")
        policy = DrawPolicy::Saturate;
    else if (policy_name != "single")
        throw ParseError("--policy must be 'single' or 'saturate'");

    const SimModel model = make_model(inst, policy);
    const BDistribution dist = monte_carlo(model, trials, seed);

    std::printf("model: class=[");
    for (std::size_t j = 0; j < model.class_part.exponents.size(); ++j)
        std::printf("%s%d", j ? "," : "", model.class_part.exponents[j]);
    std::printf("] norm=[");
    for (std::size_t j = 0; j < model.norm_part.exponents.size(); ++j)
        std::printf("%s%d", j ? "," : "", model.norm_part.exponents[j]);
    std::printf("] junk_valuation=%d policy=%s\n", model.junk_valuation, policy_name.c_str());
    std::printf("trials = %lld, seed = %llu\n", static_cast<long long>(dist.trials),
                static_cast<unsigned long long>(seed));
    std::printf("mean b = %.6f, variance = %.6f\n", dist.mean, dist.variance);
    std::printf("prob(b <= 1) = %.6f\n", dist.prob_b_le_1);
    std::printf("diverged trials = %lld\n", static_cast<long long>(dist.divergence_count));

    if (oracle) {
        const Rational exact = exact_expected_steps(model);
        const double approx = static_cast<double>(exact);
        std::printf("exact expected b = %s/%s (%.6f)\n",
                    boost::multiprecision::numerator(exact).str().c_str(),
                    boost::multiprecision::denominator(exact).str().c_str(), approx);
        const double se = std::sqrt(dist.variance / static_cast<double>(dist.trials));
        if (se > 0.0)
            std::printf("deviation = %.3f standard errors\n", (dist.mean - approx) / se);
        else
            std::printf("deviation = 0 (degenerate distribution)\n");
    }

    if (!csv_path.empty()) {
        auto out = open_csv(csv_path);
        out << "b,count\n";
        for (const auto& [b, count] : dist.histogram) out << b << ',' << count << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Filtration algorithms on finite abelian p-groups: traces, "
                 "Iwasawa-invariant fits, bound checks, and stochastic simulation"};
    app.require_subcommand(1);

    std::string module_path, instance_path, csv_path, window, policy = "single";
    bool verify = false, auto_rebase = false, oracle = false;
    long long trials = 10000;
    std::uint64_t seed = 0;

    auto* filtrate = app.add_subcommand("filtrate", "Compute the unscrewing filtration trace");
    filtrate->add_option("--module", module_path, "module JSON file")->required();
    filtrate->add_flag("--verify", verify, "verify the filtration properties");
    filtrate->add_option("--csv", csv_path, "write the trace as CSV");

    auto* fit = app.add_subcommand("fit", "Fit Iwasawa invariants to layer orders");
    fit->add_option("--instance", instance_path, "instance JSON file")->required();
    fit->add_option("--window", window, "layer window n0..n1");
    fit->add_flag("--auto-rebase", auto_rebase, "search the smallest rebase with an exact fit");

    auto* check = app.add_subcommand("check", "Check order bounds and equivalences");
    check->add_option("--instance", instance_path, "instance JSON file")->required();

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation of the algorithm");
    simulate->add_option("--instance", instance_path, "instance JSON file")->required();
    simulate->add_option("--trials", trials, "number of trials")->required();
    simulate->add_option("--seed", seed, "RNG seed")->required();
    simulate->add_option("--policy", policy, "draw policy: single|saturate");
    simulate->add_flag("--oracle", oracle, "compare against the exact expected value");
    simulate->add_option("--csv", csv_path, "write the b histogram as CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (filtrate->parsed()) return cmd_filtrate(module_path, verify, csv_path);
        if (fit->parsed()) return cmd_fit(instance_path, window, auto_rebase);
        if (check->parsed()) return cmd_check(instance_path);
        if (simulate->parsed())
            return cmd_simulate(instance_path, trials, seed, policy, oracle, csv_path);
    } catch (const std::length_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitOracleLimit;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitOk;
}
