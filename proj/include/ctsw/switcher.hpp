#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ctsw/predictor.hpp"

namespace ctsw {

// How the per-candidate tree work inside one step is executed. Both kernels
// reduce in ascending start-time order and give bit-identical results.
enum class Kernel { serial, parallel };

struct SwitcherConfig {
    PredictorConfig predictor;
    // Bernoulli rate of a model change at each time t >= 2.
    double alpha = 0.01;
    // Drop candidates whose posterior falls below this and renormalize. Not exact.
    std::optional<double> prune_epsilon;
    Kernel kernel = Kernel::serial;
    // Negative-control hook for the oracle check: scales carried-over posterior
    // weights by (1 + posterior_perturbation). Must stay 0 outside tests.
    double posterior_perturbation = 0.0;

    void validate() const;
};

// One candidate for the last change point: segment start time (1-based) and its posterior weight.
struct Candidate {
    std::size_t start_time;
    double weight;
};

// Online mixture over change patterns and context tree models. After t symbols
// it holds one superposed tree per live start time tau <= t and the posterior
// v(tau | x^t); the not-yet-started segment tau = t+1 carries weight alpha
// (1 before the first symbol) and is instantiated only when it has mass.
class Switcher {
public:
    explicit Switcher(SwitcherConfig config);

    const SwitcherConfig& config() const noexcept { return config_; }
    std::size_t time() const noexcept { return history_.size(); }
    std::size_t live_trees() const noexcept { return trees_.size(); }
    std::span<const Symbol> history() const noexcept { return history_; }

    // Predictive distribution of x_{t+1}.
    void predict(std::span<double> out) const;
    std::vector<double> predict() const;

    // Consumes x_{t+1}; returns its mixture probability given the past.
    double advance(Symbol x);

    // Posterior over the last change point for the next symbol, ascending start time.
    std::vector<Candidate> posterior() const;

    // Start time with the largest posterior weight; ties go to the earliest.
    std::size_t last_changepoint_estimate() const;

private:
    std::span<const Symbol> segment(const SuperposedTree& tree) const noexcept {
        return std::span<const Symbol>(history_).subspan(tree.start_time() - 1);
    }
    void absorb_all(Symbol x);
    void predict_all(std::span<double> scratch) const;

    SwitcherConfig config_;
    std::shared_ptr<const PredictorConfig> shared_;
    std::vector<Symbol> history_;
    std::vector<SuperposedTree> trees_;
    std::vector<double> weights_;
    double fresh_weight_ = 1.0;
    SuperposedTree prior_tree_;

    std::vector<double> step_probs_;
    mutable std::vector<double> scratch_;
};

}  // namespace ctsw
