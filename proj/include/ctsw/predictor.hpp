#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ctsw/context_tree.hpp"

namespace ctsw {

// Shared, immutable settings of a superposed context tree.
struct PredictorConfig {
    Alphabet alphabet{2};
    int depth = 2;
    NodeHyperPrior g{0.5};
    DirichletPrior beta{0.5};
    // Stands in for symbols before the start of a segment.
    Symbol pad_symbol = 0;

    void validate() const;
};

// Dirichlet predictive probability (beta(a) + N(a)) / sum_i (beta(i) + N(i)).
double kt_prob(std::span<const std::uint32_t> counts, std::span<const double> beta, Symbol a);

// Bayes mixture over every context tree model of depth <= d for one segment,
// computed on the superposed tree. Nodes are created lazily along traversed
// contexts; a node stores its symbol counts and posterior hyper-parameter.
class SuperposedTree {
public:
    SuperposedTree(std::shared_ptr<const PredictorConfig> config, std::size_t start_time);

    std::size_t start_time() const noexcept { return start_time_; }
    std::size_t node_count() const noexcept { return g_.size(); }
    const PredictorConfig& config() const noexcept { return *config_; }

    // Full predictive distribution of the next symbol given the segment-local history.
    void predict(std::span<const Symbol> history, std::span<double> out) const;
    std::vector<double> predict(std::span<const Symbol> history) const;

    // Absorbs x as the symbol following `history`, updating counts and posterior g
    // along the context path. Returns the pre-update probability of x.
    double absorb(std::span<const Symbol> history, Symbol x);

    struct NodeView {
        std::vector<std::uint32_t> counts;
        double posterior_g;
    };
    std::optional<NodeView> inspect(const Context& ctx) const;

private:
    static constexpr std::int32_t kNone = -1;

    std::int32_t create_node(std::span<const Symbol> history, int depth);
    // g and beta of a node that has not been created yet.
    double prior_g(std::span<const Symbol> history, int depth) const;
    const double* prior_beta(std::span<const Symbol> history, int depth) const;
    double beta_of(const double* beta, Symbol a) const noexcept { return beta ? beta[a] : default_beta_; }
    double beta_sum_of(const double* beta) const noexcept;

    std::shared_ptr<const PredictorConfig> config_;
    std::size_t start_time_;
    std::size_t k_;

    // Structure-of-arrays node storage; node i owns entries [i*k_, (i+1)*k_).
    std::vector<std::uint32_t> counts_;
    std::vector<std::int32_t> children_;
    std::vector<std::uint32_t> totals_;
    std::vector<double> g_;
    // Per-node beta override, or nullptr for the symmetric default.
    std::vector<const double*> beta_;
    std::vector<double> beta_sum_;

    double default_beta_;
    double default_beta_sum_;
};

}  // namespace ctsw
