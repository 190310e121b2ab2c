#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "ctsw/simgen.hpp"
#include "ctsw/switcher.hpp"

namespace ctsw {

struct ExperimentConfig {
    SegmentedSourceSpec spec = default_experiment_spec();
    std::vector<double> alphas{0.1, 0.01, 0.001};
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    double g = 0.5;
    double beta = 0.5;
    int depth = 2;
    std::optional<double> prune_epsilon;
    // 0 leaves the OpenMP default.
    int threads = 0;

    void validate() const;
    SwitcherConfig switcher_config(double alpha) const;
};

struct CurveRow {
    std::size_t t;
    double alpha;
    double value;
};

// Trial-averaged instantaneous redundancy -log2 p(x_t|x^{t-1}) - H(segment of t).
// Trial i simulates with seed + i; averages are reduced in trial order.
std::vector<CurveRow> run_experiment_a(const ExperimentConfig& cfg);
// Trial-averaged argmax_tau v(tau | x^{t-1}).
std::vector<CurveRow> run_experiment_b(const ExperimentConfig& cfg);

void write_experiment_a_csv(std::ostream& out, const std::vector<CurveRow>& rows);
void write_experiment_b_csv(std::ostream& out, const std::vector<CurveRow>& rows);

struct OracleCheckOptions {
    std::size_t n_max = 10;
    std::size_t instances = 50;
    std::uint64_t seed = 1;
    // Forces alpha for every instance instead of drawing it.
    std::optional<double> alpha;
    // Forwarded to SwitcherConfig::posterior_perturbation.
    double perturbation = 0.0;
    double tolerance = 1e-9;
};

struct OracleInstanceResult {
    int depth;
    double alpha;
    std::vector<Symbol> sequence;
    double max_rel_deviation;
    double max_posterior_drift;  // max |sum_tau v - 1| over steps
};

struct OracleCheckReport {
    std::vector<OracleInstanceResult> instances;
    double max_rel_deviation = 0.0;
    bool passed = false;
};

// Random |X|=2 instances with d in {0,1,2}, per-node random g and beta;
// compares every per-step switcher probability with oracle prefix ratios.
OracleCheckReport run_oracle_check(const OracleCheckOptions& opts);
void write_oracle_report(std::ostream& out, const OracleCheckReport& report);

struct BenchOptions {
    std::vector<std::size_t> sizes{1000, 2000};
    double alpha = 0.01;
    int depth = 2;
    double g = 0.5;
    double beta = 0.5;
    std::optional<double> prune_epsilon;
    Kernel kernel = Kernel::serial;
    std::uint64_t seed = 1;
};

struct BenchRow {
    std::size_t n;
    double seconds;
    std::size_t live_trees;
    bool exact;
};

// Times a full switcher pass over an i.i.d. uniform binary sequence of each size.
std::vector<BenchRow> run_bench(const BenchOptions& opts);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

// Wall-clock seconds of each advance() call over one sequence of length n.
std::vector<double> measure_step_costs(std::size_t n, const BenchOptions& opts);

std::vector<Symbol> uniform_binary_sequence(std::size_t n, std::uint64_t seed);

}  // namespace ctsw
