// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ctsw/codec.hpp"
#include "ctsw/context_tree.hpp"
#include "ctsw/experiments.hpp"
#include "ctsw/oracle.hpp"
#include "ctsw/switcher.hpp"

using namespace ctsw;

namespace {

constexpr double kOracleTolerance = 1e-9;
constexpr double kPriorTolerance = 1e-10;
constexpr double kPosteriorTolerance = 1e-12;
constexpr double kMassTolerance = 1e-10;
constexpr double kOracleSeconds = 60.0;
constexpr double kCodecSlackPerSymbol = 0.001;
constexpr double kCodecSlackBits = 64.0;
constexpr std::size_t kExperimentTrials = 1000;
constexpr double kTauLow = 181.0, kTauHigh = 231.0;
constexpr double kTauLag = 20.0;
constexpr double kRatioLow = 2.0, kRatioHigh = 6.0;
constexpr double kMinRSquared = 0.9;

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double mean(const std::vector<CurveRow>& rows, double alpha, std::size_t t0, std::size_t t1) {
    double s = 0.0;
    std::size_t n = 0;
    for (const CurveRow& r : rows) {
        if (r.alpha == alpha && r.t >= t0 && r.t <= t1) {
            s += r.value;
            ++n;
        }
    }
    return s / static_cast<double>(n);
}

double at(const std::vector<CurveRow>& rows, double alpha, std::size_t t) { return mean(rows, alpha, t, t); }

// ---------------------------------------------------------------------------

double worst_drift = 0.0;

void oracle_equivalence() {
    OracleCheckOptions opts;
    opts.instances = 50;
    opts.n_max = 10;
    opts.tolerance = kOracleTolerance;
    const auto t0 = Clock::now();
    const auto r = run_oracle_check(opts);
    const double secs = seconds_since(t0);
    for (const auto& inst : r.instances) worst_drift = std::max(worst_drift, inst.max_posterior_drift);
    const bool ok = r.passed && r.instances.size() == 50 && r.max_rel_deviation <= kOracleTolerance && secs < kOracleSeconds;
    report(1, "oracle equivalence", ok,
           fmt("50 instances, max relative deviation %.3e (tol %.0e), %.1f s", r.max_rel_deviation, kOracleTolerance, secs));
}

void prior_normalization() {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Alphabet bin(2);
    double worst = 0.0;
    std::size_t model_count_d3 = 0;
    for (int d = 0; d <= 3; ++d) {
        const auto models = enumerate_models(bin, d);
        if (d == 3) model_count_d3 = models.size();
        for (int rep = 0; rep < 200; ++rep) {
            NodeHyperPrior g(u(rng));
            std::vector<Context> level{{}};
            for (int depth = 0; depth < d; ++depth) {
                std::vector<Context> next;
                for (const Context& c : level) {
                    g.set(c, u(rng));
                    for (Symbol a = 0; a < 2; ++a) {
                        Context child = c;
                        child.push_back(a);
                        next.push_back(child);
                    }
                }
                level = std::move(next);
            }
            double sum = 0.0;
            for (const auto& m : models) sum += model_prior(m, g);
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
    report(2, "prior normalization", worst <= kPriorTolerance && model_count_d3 == 26,
           fmt("d<=3, %g models at d=3, 800 random g, max |sum-1| = %.3e", double(model_count_d3), worst));
}

void posterior_normalization() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t steps = 0;
    for (int rep = 0; rep < 40; ++rep) {
        SwitcherConfig cfg;
        cfg.predictor.alphabet = Alphabet(2 + rng() % 4);
        cfg.predictor.depth = static_cast<int>(rng() % 4);
        cfg.predictor.g = NodeHyperPrior(u(rng));
        cfg.predictor.beta = DirichletPrior(0.05 + 2 * u(rng));
        cfg.predictor.pad_symbol = static_cast<Symbol>(rng() % cfg.predictor.alphabet.size());
        cfg.alpha = rep == 0 ? 0.0 : rep == 1 ? 1.0 : std::pow(u(rng), 3);
        Switcher s(cfg);
        for (int t = 0; t < 400; ++t) {
            s.advance(static_cast<Symbol>(rng() % cfg.predictor.alphabet.size()));
            double mass = 0.0;
            for (const Candidate& c : s.posterior()) mass += c.weight;
            worst_drift = std::max(worst_drift, std::abs(mass - 1.0));
            ++steps;
        }
    }
    report(3, "posterior normalization", worst_drift <= kPosteriorTolerance,
           fmt("%g switcher steps plus oracle runs, max |sum v - 1| = %.3e", double(steps), worst_drift));
}

void probability_mass() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Alphabet bin(2);
    double worst = 0.0;
    int cases = 0;
    for (int d = 0; d <= 2; ++d) {
        for (std::size_t n = 1; n <= 8; ++n) {
            for (int rep = 0; rep < 3; ++rep) {
                NodeHyperPrior g(u(rng));
                g.set({}, u(rng));
                g.set({1}, u(rng));
                const DirichletPrior beta(0.05 + 2 * u(rng));
                const double alpha = u(rng);
                const auto pad = static_cast<Symbol>(rng() % 2);
                double total = 0.0;
                for (std::size_t v = 0; v < (std::size_t{1} << n); ++v) {
                    std::vector<Symbol> seq(n);
                    for (std::size_t i = 0; i < n; ++i) seq[i] = static_cast<Symbol>((v >> i) & 1u);
                    total += oracle::exact_switch_prob(seq, bin, alpha, g, beta, d, pad);
                }
                worst = std::max(worst, std::abs(total - 1.0));
                ++cases;
            }
        }
    }
    report(4, "probability mass", worst <= kMassTolerance,
           fmt("%g configurations, n<=8, d<=2, max |sum p - 1| = %.3e", double(cases), worst));
}

void codec() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t inputs = 0, mismatches = 0, over_bound = 0;
    double worst_excess = -1e300;
    const auto t0 = Clock::now();

    auto run = [&](const std::vector<Symbol>& seq, const CodecParams& p) {
        EncodeStats stats;
        const auto bytes = encode(seq, p, &stats);
        if (decode(bytes).symbols != seq) ++mismatches;
        const double total_bits = 8.0 * static_cast<double>(bytes.size() - ContainerHeader::kSize);
        const double excess = total_bits - stats.ideal_bits - kCodecSlackPerSymbol * static_cast<double>(seq.size());
        worst_excess = std::max(worst_excess, excess);
        if (excess > kCodecSlackBits) ++over_bound;
        ++inputs;
    };

    for (int i = 0; i < 1000; ++i) {
        std::size_t n;
        if (i == 0) n = 10000;
        else if (i < 10) n = 1000 + rng() % 9001;
        else n = rng() % 1001;
        CodecParams p;
        p.alphabet_size = n > 1000 ? 2 + rng() % 3 : 2 + rng() % 7;
        p.depth = static_cast<int>(rng() % (n > 1000 ? 3 : 4));
        p.pad_symbol = static_cast<Symbol>(rng() % p.alphabet_size);
        p.alpha = i % 50 == 1 ? 0.0 : std::pow(u(rng), 3);
        p.g = u(rng);
        p.beta = 0.05 + 2 * u(rng);
        const double skew = u(rng);
        std::vector<Symbol> seq(n);
        for (auto& s : seq) s = u(rng) < skew ? 0 : static_cast<Symbol>(rng() % p.alphabet_size);
        run(seq, p);
    }

    CodecParams p;
    p.depth = 1;
    for (std::size_t n = 0; n <= 12; ++n) {
        for (std::size_t v = 0; v < (std::size_t{1} << n); ++v) {
            std::vector<Symbol> seq(n);
            for (std::size_t i = 0; i < n; ++i) seq[i] = static_cast<Symbol>((v >> i) & 1u);
            run(seq, p);
        }
    }

    report(5, "codec round trip and size", mismatches == 0 && over_bound == 0,
           fmt("%g inputs, %g mismatches, max bits over ideal+0.001N = %.2f", double(inputs), double(mismatches), worst_excess) +
               fmt(" (limit %.0f), %.1f s", kCodecSlackBits, seconds_since(t0)));
}

void experiment_a() {
    ExperimentConfig cfg;
    cfg.trials = kExperimentTrials;
    const auto t0 = Clock::now();
    const auto rows = run_experiment_a(cfg);
    bool jumps = true;
    for (double alpha : cfg.alphas) {
        for (std::size_t t : {101u, 201u}) jumps = jumps && at(rows, alpha, t) > at(rows, alpha, t - 1);
    }
    const double tail_small = mean(rows, 0.01, 281, 300);
    const double tail_large = mean(rows, 0.1, 281, 300);
    const std::string detail = std::string("jumps at 101 and 201 for all alpha: ") + (jumps ? "yes" : "no") +
             fmt("; tail mean alpha=0.01 %.4f vs alpha=0.1 %.4f; %.1f s", tail_small, tail_large, seconds_since(t0));
    report(6, "experiment A", jumps && tail_small <= tail_large, detail);
}

void experiment_b() {
    ExperimentConfig cfg;
    cfg.trials = kExperimentTrials;
    cfg.alphas = {0.01, 0.1};
    const auto t0 = Clock::now();
    const auto rows = run_experiment_b(cfg);
    const double tau_small = at(rows, 0.01, 300);
    double worst_lag = -1e300;
    for (std::size_t t = 250; t <= 300; ++t) worst_lag = std::max(worst_lag, double(t) - at(rows, 0.1, t));
    const bool ok = tau_small >= kTauLow && tau_small <= kTauHigh && worst_lag <= kTauLag;
    report(7, "experiment B", ok,
           fmt("alpha=0.01 tau(300) = %.2f; alpha=0.1 max lag t - tau over [250,300] = %.2f; %.1f s", tau_small, worst_lag,
               seconds_since(t0)));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

void complexity() {
    BenchOptions opts;
    opts.kernel = Kernel::serial;
    std::vector<double> small, large;
    for (int rep = 0; rep < 5; ++rep) {
        opts.sizes = {1000};
        small.push_back(run_bench(opts).front().seconds);
        opts.sizes = {2000};
        large.push_back(run_bench(opts).front().seconds);
    }
    const double ratio = median(large) / median(small);

    // Per-step costs, median over repeats, averaged in bins of 100 steps.
    constexpr std::size_t n = 2000, bin = 100;
    std::vector<std::vector<double>> runs;
    for (int rep = 0; rep < 5; ++rep) runs.push_back(measure_step_costs(n, opts));
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b < n / bin; ++b) {
        std::vector<double> per_run;
        for (const auto& r : runs) {
            double s = 0.0;
            for (std::size_t t = b * bin; t < (b + 1) * bin; ++t) s += r[t];
            per_run.push_back(s / bin);
        }
        xs.push_back(static_cast<double>(b * bin + bin / 2));
        ys.push_back(median(per_run));
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double r2 = sxy * sxy / (sxx * syy);
    const bool ok = ratio >= kRatioLow && ratio <= kRatioHigh && r2 >= kMinRSquared && sxy > 0;
    report(8, "complexity", ok,
           fmt("runtime ratio N=2000/N=1000 = %.2f; per-step cost linear fit R^2 = %.3f", ratio, r2));
}

}  // namespace

int main() {
    oracle_equivalence();
    prior_normalization();
    posterior_normalization();
    probability_mass();
    codec();
    experiment_a();
    experiment_b();
    complexity();
    std::printf("%s: %d of 8 criteria failed\n", failures == 0 ? "PASS" : "FAIL", failures);
    return failures == 0 ? 0 : 1;
}
