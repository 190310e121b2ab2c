#include "ctsw/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ctsw/error.hpp"
#include "ctsw/oracle.hpp"

namespace ctsw {

void ExperimentConfig::validate() const {
    spec.validate();
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (alphas.empty()) throw ConfigError("at least one alpha is required");
    for (double a : alphas) {
        if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alpha values must be in [0, 1]");
    }
    if (threads < 0) throw ConfigError("threads must be non-negative");
    switcher_config(alphas.front());
}

SwitcherConfig ExperimentConfig::switcher_config(double alpha) const {
    SwitcherConfig cfg;
    cfg.predictor.alphabet = spec.alphabet;
    cfg.predictor.depth = depth;
    cfg.predictor.g = NodeHyperPrior(g);
    cfg.predictor.beta = DirichletPrior(beta);
    cfg.predictor.pad_symbol = spec.pad_symbol;
    cfg.alpha = alpha;
    cfg.prune_epsilon = prune_epsilon;
    cfg.validate();
    return cfg;
}

namespace {

enum class Curve { redundancy, tau_hat };

std::vector<CurveRow> run_curves(const ExperimentConfig& cfg, Curve curve) {
    cfg.validate();
    const std::size_t n = cfg.spec.total_length();
    const std::vector<double> entropy = per_symbol_entropy(cfg.spec);

#ifdef _OPENMP
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#endif

    std::vector<CurveRow> rows;
    rows.reserve(cfg.alphas.size() * n);
    for (double alpha : cfg.alphas) {
        const SwitcherConfig sw = cfg.switcher_config(alpha);
        std::vector<std::vector<double>> per_trial(cfg.trials, std::vector<double>(n));
        const auto trials = static_cast<std::ptrdiff_t>(cfg.trials);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (std::ptrdiff_t trial = 0; trial < trials; ++trial) {
            const auto seq = generate(cfg.spec, cfg.seed + static_cast<std::uint64_t>(trial));
            Switcher model(sw);
            auto& out = per_trial[static_cast<std::size_t>(trial)];
            for (std::size_t t = 0; t < n; ++t) {
                if (curve == Curve::tau_hat) out[t] = static_cast<double>(model.last_changepoint_estimate());
                const double p = model.advance(seq[t]);
                if (curve == Curve::redundancy) out[t] = -std::log2(p) - entropy[t];
            }
        }

        for (std::size_t t = 0; t < n; ++t) {
            double sum = 0.0;
            for (const auto& trial : per_trial) sum += trial[t];
            rows.push_back({t + 1, alpha, sum / static_cast<double>(cfg.trials)});
        }
    }
    return rows;
}

void write_curve(std::ostream& out, const std::vector<CurveRow>& rows, const char* column) {
    out << "t,alpha," << column << '\n';
    char buf[96];
    for (const CurveRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", r.t, r.alpha, r.value);
        out << buf;
    }
}

}  // namespace

std::vector<CurveRow> run_experiment_a(const ExperimentConfig& cfg) { return run_curves(cfg, Curve::redundancy); }
std::vector<CurveRow> run_experiment_b(const ExperimentConfig& cfg) { return run_curves(cfg, Curve::tau_hat); }

void write_experiment_a_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
    write_curve(out, rows, "avg_redundancy_bits");
}
void write_experiment_b_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
    write_curve(out, rows, "avg_tau_hat");
}

// ---------------------------------------------------------------------------
// Oracle check

OracleCheckReport run_oracle_check(const OracleCheckOptions& opts) {
    if (opts.n_max < 1 || opts.n_max > 12) throw ConfigError("oracle check n_max must be in [1, 12]");
    if (opts.alpha && !(*opts.alpha >= 0.0 && *opts.alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");

    const Alphabet bin(2);
    OracleCheckReport report;
    for (std::size_t i = 0; i < opts.instances; ++i) {
        const CounterRng rng(opts.seed * 1000003u + i);
        std::uint64_t c = 0;
        const int depth = static_cast<int>(i % 3);

        SwitcherConfig cfg;
        cfg.predictor.alphabet = bin;
        cfg.predictor.depth = depth;
        cfg.predictor.pad_symbol = static_cast<Symbol>(rng.bits(c++) & 1u);
        cfg.alpha = opts.alpha ? *opts.alpha : rng.uniform(c++);
        cfg.posterior_perturbation = opts.perturbation;
        cfg.predictor.g = NodeHyperPrior(rng.uniform(c++));
        cfg.predictor.beta = DirichletPrior(0.1 + 2.9 * rng.uniform(c++));

        // Random per-node overrides on every context of depth <= d.
        std::vector<Context> level{{}};
        for (int k = 0; k <= depth; ++k) {
            std::vector<Context> next;
            for (const Context& ctx : level) {
                if (k < depth) cfg.predictor.g.set(ctx, rng.uniform(c++));
                cfg.predictor.beta.set(ctx, {0.1 + 2.9 * rng.uniform(c++), 0.1 + 2.9 * rng.uniform(c++)});
                for (Symbol a = 0; a < 2; ++a) {
                    Context child = ctx;
                    child.push_back(a);
                    next.push_back(std::move(child));
                }
            }
            level = std::move(next);
        }

        const double bias = 0.1 + 0.8 * rng.uniform(c++);
        std::vector<Symbol> seq(opts.n_max);
        for (auto& s : seq) s = rng.uniform(c++) < bias ? 0 : 1;

        OracleInstanceResult result{depth, cfg.alpha, seq, 0.0, 0.0};
        Switcher model(cfg);
        double prev_log = 0.0;
        for (std::size_t t = 0; t < seq.size(); ++t) {
            const double p = model.advance(seq[t]);
            const double cur_log = oracle::log_switch_prob(std::span(seq).first(t + 1), bin, cfg.alpha, cfg.predictor.g,
                                                           cfg.predictor.beta, depth, cfg.predictor.pad_symbol);
            const double exact = std::exp(cur_log - prev_log);
            prev_log = cur_log;
            result.max_rel_deviation = std::max(result.max_rel_deviation, std::abs(p - exact) / exact);

            double mass = 0.0;
            for (const Candidate& cand : model.posterior()) mass += cand.weight;
            result.max_posterior_drift = std::max(result.max_posterior_drift, std::abs(mass - 1.0));
        }
        report.max_rel_deviation = std::max(report.max_rel_deviation, result.max_rel_deviation);
        report.instances.push_back(std::move(result));
    }
    report.passed = report.max_rel_deviation <= opts.tolerance;
    return report;
}

void write_oracle_report(std::ostream& out, const OracleCheckReport& report) {
    char buf[160];
    for (std::size_t i = 0; i < report.instances.size(); ++i) {
        const auto& r = report.instances[i];
        std::snprintf(buf, sizeof buf, "instance %zu depth=%d alpha=%.6f n=%zu max_rel_dev=%.3e\n", i, r.depth, r.alpha,
                      r.sequence.size(), r.max_rel_deviation);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%s: %zu instances, max relative deviation %.3e\n", report.passed ? "PASS" : "FAIL",
                  report.instances.size(), report.max_rel_deviation);
    out << buf;
}

// ---------------------------------------------------------------------------
// Benchmark

std::vector<Symbol> uniform_binary_sequence(std::size_t n, std::uint64_t seed) {
    const CounterRng rng(seed);
    std::vector<Symbol> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Symbol>(rng.bits(i) >> 63);
    return out;
}

namespace {

SwitcherConfig bench_config(const BenchOptions& opts) {
    SwitcherConfig cfg;
    cfg.predictor.depth = opts.depth;
    cfg.predictor.g = NodeHyperPrior(opts.g);
    cfg.predictor.beta = DirichletPrior(opts.beta);
    cfg.alpha = opts.alpha;
    cfg.prune_epsilon = opts.prune_epsilon;
    cfg.kernel = opts.kernel;
    cfg.validate();
    return cfg;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& opts) {
    const SwitcherConfig cfg = bench_config(opts);
    std::vector<BenchRow> rows;
    for (std::size_t n : opts.sizes) {
        const auto seq = uniform_binary_sequence(n, opts.seed);
        Switcher model(cfg);
        const auto start = std::chrono::steady_clock::now();
        for (Symbol x : seq) model.advance(x);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        rows.push_back({n, elapsed.count(), model.live_trees(), !opts.prune_epsilon.has_value()});
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "N,seconds,live_trees,mode\n";
    char buf[96];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%zu,%s\n", r.n, r.seconds, r.live_trees, r.exact ? "exact" : "pruned");
        out << buf;
    }
}

std::vector<double> measure_step_costs(std::size_t n, const BenchOptions& opts) {
    const SwitcherConfig cfg = bench_config(opts);
    const auto seq = uniform_binary_sequence(n, opts.seed);
    Switcher model(cfg);
    std::vector<double> costs;
    costs.reserve(n);
    for (Symbol x : seq) {
        const auto start = std::chrono::steady_clock::now();
        model.advance(x);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        costs.push_back(elapsed.count());
    }
    return costs;
}

}  // namespace ctsw
