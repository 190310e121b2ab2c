#pragma once

#include <cstddef>
#include <span>

#include "ctsw/context_tree.hpp"

namespace ctsw::oracle {

// Brute-force evaluation of the exact Bayes mixture for tiny instances.
// Models and change patterns are enumerated explicitly; segment marginals
// use the closed Gamma-function form.

inline constexpr std::size_t kMaxSequenceLength = 16;

// log of the Dirichlet-multinomial marginal of `segment` under model m.
double log_segment_marginal(std::span<const Symbol> segment, const ContextTreeModel& m, const DirichletPrior& beta,
                            Symbol pad);
double exact_segment_marginal(std::span<const Symbol> segment, const ContextTreeModel& m, const DirichletPrior& beta,
                              Symbol pad);
// Same marginal as a product of sequential Dirichlet predictive ratios at the leaves.
double sequential_segment_marginal(std::span<const Symbol> segment, const ContextTreeModel& m,
                                   const DirichletPrior& beta, Symbol pad);

// sum_m P(m) * marginal(segment | m) over every model of depth <= d.
double log_model_mixture(std::span<const Symbol> segment, Alphabet alphabet, const NodeHyperPrior& g,
                         const DirichletPrior& beta, int d, Symbol pad);
double exact_model_mixture(std::span<const Symbol> segment, Alphabet alphabet, const NodeHyperPrior& g,
                           const DirichletPrior& beta, int d, Symbol pad);

// p(x^n) = sum_c pi(c) prod_j mixture(segment_j(c)) over all 2^(n-1) change patterns.
double log_switch_prob(std::span<const Symbol> sequence, Alphabet alphabet, double alpha, const NodeHyperPrior& g,
                       const DirichletPrior& beta, int d, Symbol pad);
double exact_switch_prob(std::span<const Symbol> sequence, Alphabet alphabet, double alpha, const NodeHyperPrior& g,
                         const DirichletPrior& beta, int d, Symbol pad);

}  // namespace ctsw::oracle
