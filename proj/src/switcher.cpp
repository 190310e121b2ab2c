#include "ctsw/switcher.hpp"

#include <algorithm>
#include <cmath>

#include "ctsw/error.hpp"

namespace ctsw {

void SwitcherConfig::validate() const {
    predictor.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
    if (prune_epsilon && !(*prune_epsilon >= 0.0 && *prune_epsilon < 1.0)) {
        throw ConfigError("prune epsilon must be in [0, 1)");
    }
}

Switcher::Switcher(SwitcherConfig config)
    : config_((config.validate(), std::move(config))),
      shared_(std::make_shared<const PredictorConfig>(config_.predictor)),
      prior_tree_(shared_, 1) {}

void Switcher::absorb_all(Symbol x) {
    const std::size_t n = trees_.size();
    step_probs_.resize(n);
    if (config_.kernel == Kernel::parallel) {
        const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            auto& tree = trees_[static_cast<std::size_t>(i)];
            step_probs_[static_cast<std::size_t>(i)] = tree.absorb(segment(tree), x);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) step_probs_[i] = trees_[i].absorb(segment(trees_[i]), x);
    }
}

void Switcher::predict_all(std::span<double> scratch) const {
    const std::size_t k = config_.predictor.alphabet.size();
    const std::size_t n = trees_.size();
    if (config_.kernel == Kernel::parallel) {
        const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            const auto& tree = trees_[static_cast<std::size_t>(i)];
            tree.predict(segment(tree), scratch.subspan(static_cast<std::size_t>(i) * k, k));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) trees_[i].predict(segment(trees_[i]), scratch.subspan(i * k, k));
    }
}

void Switcher::predict(std::span<double> out) const {
    const std::size_t k = config_.predictor.alphabet.size();
    const std::size_t n = trees_.size();
    scratch_.resize((n + 1) * k);
    predict_all(scratch_);
    prior_tree_.predict({}, std::span<double>(scratch_).subspan(n * k, k));

    for (std::size_t a = 0; a < k; ++a) {
        double p = 0.0;
        for (std::size_t i = 0; i < n; ++i) p += weights_[i] * scratch_[i * k + a];
        if (fresh_weight_ > 0.0) p += fresh_weight_ * scratch_[n * k + a];
        out[a] = p;
    }
}

std::vector<double> Switcher::predict() const {
    std::vector<double> out(config_.predictor.alphabet.size());
    predict(out);
    return out;
}

double Switcher::advance(Symbol x) {
    if (!config_.predictor.alphabet.contains(x)) {
        throw InputError("symbol " + std::to_string(x) + " is outside the alphabet");
    }
    const double alpha = config_.alpha;

    absorb_all(x);
    if (fresh_weight_ > 0.0) {
        trees_.emplace_back(shared_, history_.size() + 1);
        weights_.push_back(fresh_weight_);
        SuperposedTree& fresh = trees_.back();
        step_probs_.push_back(fresh.absorb({}, x));
    }

    double p = 0.0;
    for (std::size_t i = 0; i < trees_.size(); ++i) p += weights_[i] * step_probs_[i];

    const double carry = (1.0 - alpha) * (1.0 + config_.posterior_perturbation);
    for (std::size_t i = 0; i < trees_.size(); ++i) weights_[i] = carry * step_probs_[i] * weights_[i] / p;
    fresh_weight_ = alpha;
    history_.push_back(x);

    // Zero-weight candidates can never regain mass.
    std::size_t keep = 0;
    const double floor = config_.prune_epsilon.value_or(0.0);
    for (std::size_t i = 0; i < trees_.size(); ++i) {
        const bool live = config_.prune_epsilon ? weights_[i] >= floor && weights_[i] > 0.0 : weights_[i] > 0.0;
        if (!live) continue;
        if (keep != i) {
            trees_[keep] = std::move(trees_[i]);
            weights_[keep] = weights_[i];
        }
        ++keep;
    }
    if (keep != trees_.size()) {
        trees_.erase(trees_.begin() + static_cast<std::ptrdiff_t>(keep), trees_.end());
        weights_.resize(keep);
        if (config_.prune_epsilon) {
            double total = fresh_weight_;
            for (double w : weights_) total += w;
            for (double& w : weights_) w /= total;
            fresh_weight_ /= total;
        }
    }
    return p;
}

std::vector<Candidate> Switcher::posterior() const {
    std::vector<Candidate> out;
    out.reserve(trees_.size() + 1);
    for (std::size_t i = 0; i < trees_.size(); ++i) out.push_back({trees_[i].start_time(), weights_[i]});
    if (fresh_weight_ > 0.0) out.push_back({history_.size() + 1, fresh_weight_});
    return out;
}

std::size_t Switcher::last_changepoint_estimate() const {
    const auto post = posterior();
    if (post.empty()) throw InputError("no change-point candidates in the current state");
    std::size_t best = 0;
    for (std::size_t i = 1; i < post.size(); ++i) {
        if (post[i].weight > post[best].weight) best = i;
    }
    return post[best].start_time;
}

}  // namespace ctsw
