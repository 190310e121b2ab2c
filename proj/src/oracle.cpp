#include "ctsw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "ctsw/error.hpp"

namespace ctsw::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& terms) {
    double hi = kNegInf;
    for (double v : terms) hi = std::max(hi, v);
    if (hi == kNegInf) return kNegInf;
    double s = 0.0;
    for (double v : terms) s += std::exp(v - hi);
    return hi + std::log(s);
}

// n * log(p), with 0 * log(0) = 0.
double weighted_log(double n, double p) { return n == 0.0 ? 0.0 : n * std::log(p); }

// Per-leaf symbol counts of a segment under model m.
std::map<std::size_t, std::vector<double>> leaf_counts(std::span<const Symbol> segment, const ContextTreeModel& m,
                                                      Symbol pad) {
    std::map<std::size_t, std::vector<double>> counts;
    for (std::size_t i = 0; i < segment.size(); ++i) {
        const std::size_t leaf = m.leaf_for(segment.first(i), pad);
        auto& c = counts[leaf];
        c.resize(m.alphabet().size(), 0.0);
        c[segment[i]] += 1.0;
    }
    return counts;
}

double log_mixture_with(std::span<const Symbol> segment, const std::vector<ContextTreeModel>& models,
                        const NodeHyperPrior& g, const DirichletPrior& beta, Symbol pad) {
    std::vector<double> terms;
    terms.reserve(models.size());
    for (const ContextTreeModel& m : models) {
        terms.push_back(std::log(model_prior(m, g)) + log_segment_marginal(segment, m, beta, pad));
    }
    return log_sum_exp(terms);
}

}  // namespace

double log_segment_marginal(std::span<const Symbol> segment, const ContextTreeModel& m, const DirichletPrior& beta,
                            Symbol pad) {
    m.alphabet().check(segment);
    double lp = 0.0;
    for (const auto& [leaf, n] : leaf_counts(segment, m, pad)) {
        const std::vector<double> b = beta.at(m.context(leaf), m.alphabet().size());
        double bsum = 0.0;
        double nsum = 0.0;
        for (std::size_t a = 0; a < b.size(); ++a) {
            lp += std::lgamma(b[a] + n[a]) - std::lgamma(b[a]);
            bsum += b[a];
            nsum += n[a];
        }
        lp += std::lgamma(bsum) - std::lgamma(bsum + nsum);
    }
    return lp;
}

double exact_segment_marginal(std::span<const Symbol> segment, const ContextTreeModel& m, const DirichletPrior& beta,
                              Symbol pad) {
    return std::exp(log_segment_marginal(segment, m, beta, pad));
}

double sequential_segment_marginal(std::span<const Symbol> segment, const ContextTreeModel& m,
                                   const DirichletPrior& beta, Symbol pad) {
    m.alphabet().check(segment);
    const std::size_t k = m.alphabet().size();
    std::map<std::size_t, std::vector<double>> counts;
    double p = 1.0;
    for (std::size_t i = 0; i < segment.size(); ++i) {
        const std::size_t leaf = m.leaf_for(segment.first(i), pad);
        auto& c = counts[leaf];
        c.resize(k, 0.0);
        const std::vector<double> b = beta.at(m.context(leaf), k);
        double den = 0.0;
        for (std::size_t a = 0; a < k; ++a) den += b[a] + c[a];
        p *= (b[segment[i]] + c[segment[i]]) / den;
        c[segment[i]] += 1.0;
    }
    return p;
}

double log_model_mixture(std::span<const Symbol> segment, Alphabet alphabet, const NodeHyperPrior& g,
                         const DirichletPrior& beta, int d, Symbol pad) {
    return log_mixture_with(segment, enumerate_models(alphabet, d), g, beta, pad);
}

double exact_model_mixture(std::span<const Symbol> segment, Alphabet alphabet, const NodeHyperPrior& g,
                           const DirichletPrior& beta, int d, Symbol pad) {
    return std::exp(log_model_mixture(segment, alphabet, g, beta, d, pad));
}

double log_switch_prob(std::span<const Symbol> sequence, Alphabet alphabet, double alpha, const NodeHyperPrior& g,
                       const DirichletPrior& beta, int d, Symbol pad) {
    const std::size_t n = sequence.size();
    if (n > kMaxSequenceLength) {
        throw EnumerationTooLarge("oracle sequence length " + std::to_string(n) + " exceeds " +
                                  std::to_string(kMaxSequenceLength));
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
    alphabet.check(sequence);
    if (n == 0) return 0.0;

    const auto models = enumerate_models(alphabet, d);

    // segment_log[i][j]: log mixture of sequence[i, j).
    std::vector<std::vector<double>> segment_log(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            segment_log[i][j] = log_mixture_with(sequence.subspan(i, j - i), models, g, beta, pad);
        }
    }

    // Bit b of `pattern` is w_{b+2}: a change right before position b+1 (0-based).
    const std::size_t patterns = std::size_t{1} << (n - 1);
    std::vector<double> terms;
    terms.reserve(patterns);
    for (std::size_t pattern = 0; pattern < patterns; ++pattern) {
        double changes = 0.0;
        double lp = 0.0;
        std::size_t start = 0;
        for (std::size_t pos = 1; pos <= n; ++pos) {
            const bool cut = pos == n || ((pattern >> (pos - 1)) & 1u);
            if (!cut) continue;
            lp += segment_log[start][pos];
            if (pos < n) changes += 1.0;
            start = pos;
        }
        const double stays = static_cast<double>(n - 1) - changes;
        lp += weighted_log(changes, alpha) + weighted_log(stays, 1.0 - alpha);
        terms.push_back(lp);
    }
    return log_sum_exp(terms);
}

double exact_switch_prob(std::span<const Symbol> sequence, Alphabet alphabet, double alpha, const NodeHyperPrior& g,
                         const DirichletPrior& beta, int d, Symbol pad) {
    return std::exp(log_switch_prob(sequence, alphabet, alpha, g, beta, d, pad));
}

}  // namespace ctsw::oracle
