#include "ctsw/predictor.hpp"

#include <array>
#include <numeric>

#include "ctsw/error.hpp"

namespace ctsw {

void PredictorConfig::validate() const {
    if (depth < 0 || depth > kMaxDepth) throw ConfigError("depth must be in [0, " + std::to_string(kMaxDepth) + "]");
    if (!alphabet.contains(pad_symbol)) throw ConfigError("pad symbol is outside the alphabet");
    for (const auto& [ctx, b] : beta.overrides()) {
        if (b.size() != alphabet.size()) {
            throw ConfigError("beta vector for node \"" + context_to_string(ctx) + "\" has the wrong length");
        }
    }
}

double kt_prob(std::span<const std::uint32_t> counts, std::span<const double> beta, Symbol a) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double term = beta[i] + static_cast<double>(counts[i]);
        den += term;
        if (i == a) num = term;
    }
    return num / den;
}

namespace {

Context context_prefix(std::span<const Symbol> history, int depth, Symbol pad) {
    Context ctx(static_cast<std::size_t>(depth));
    for (int k = 0; k < depth; ++k) ctx[static_cast<std::size_t>(k)] = padded_context_symbol(history, static_cast<std::size_t>(k), pad);
    return ctx;
}

}  // namespace

SuperposedTree::SuperposedTree(std::shared_ptr<const PredictorConfig> config, std::size_t start_time)
    : config_(std::move(config)),
      start_time_(start_time),
      k_(config_->alphabet.size()),
      default_beta_(config_->beta.default_value()),
      default_beta_sum_(config_->beta.default_value() * static_cast<double>(config_->alphabet.size())) {}

double SuperposedTree::beta_sum_of(const double* beta) const noexcept {
    if (!beta) return default_beta_sum_;
    double s = 0.0;
    for (std::size_t a = 0; a < k_; ++a) s += beta[a];
    return s;
}

double SuperposedTree::prior_g(std::span<const Symbol> history, int depth) const {
    const PredictorConfig& cfg = *config_;
    if (depth >= cfg.depth) return 0.0;
    if (!cfg.g.has_overrides()) return cfg.g.default_value();
    return cfg.g.value(context_prefix(history, depth, cfg.pad_symbol), cfg.depth);
}

const double* SuperposedTree::prior_beta(std::span<const Symbol> history, int depth) const {
    const PredictorConfig& cfg = *config_;
    if (!cfg.beta.has_overrides()) return nullptr;
    const auto* o = cfg.beta.override_for(context_prefix(history, depth, cfg.pad_symbol));
    return o ? o->data() : nullptr;
}

std::int32_t SuperposedTree::create_node(std::span<const Symbol> history, int depth) {
    const auto id = static_cast<std::int32_t>(g_.size());
    counts_.resize(counts_.size() + k_, 0);
    children_.resize(children_.size() + k_, kNone);
    totals_.push_back(0);
    g_.push_back(prior_g(history, depth));
    const double* b = prior_beta(history, depth);
    beta_.push_back(b);
    beta_sum_.push_back(beta_sum_of(b));
    return id;
}

void SuperposedTree::predict(std::span<const Symbol> history, std::span<double> out) const {
    const PredictorConfig& cfg = *config_;
    const int d = cfg.depth;
    std::array<std::int32_t, kMaxDepth + 1> path;
    std::int32_t node = g_.empty() ? kNone : 0;
    for (int k = 0; k <= d; ++k) {
        path[static_cast<std::size_t>(k)] = node;
        if (k < d && node != kNone) {
            node = children_[static_cast<std::size_t>(node) * k_ + padded_context_symbol(history, static_cast<std::size_t>(k), cfg.pad_symbol)];
        }
    }

    for (int k = d; k >= 0; --k) {
        const std::int32_t n = path[static_cast<std::size_t>(k)];
        const double* beta;
        double den;
        double g;
        const std::uint32_t* counts = nullptr;
        if (n != kNone) {
            const auto i = static_cast<std::size_t>(n);
            beta = beta_[i];
            den = beta_sum_[i] + static_cast<double>(totals_[i]);
            g = g_[i];
            counts = &counts_[i * k_];
        } else {
            beta = prior_beta(history, k);
            den = beta_sum_of(beta);
            g = prior_g(history, k);
        }
        for (std::size_t a = 0; a < k_; ++a) {
            const double num = beta_of(beta, static_cast<Symbol>(a)) + (counts ? static_cast<double>(counts[a]) : 0.0);
            const double q = num / den;
            out[a] = k == d ? q : (1.0 - g) * q + g * out[a];
        }
    }
}

std::vector<double> SuperposedTree::predict(std::span<const Symbol> history) const {
    std::vector<double> out(k_);
    predict(history, out);
    return out;
}

double SuperposedTree::absorb(std::span<const Symbol> history, Symbol x) {
    const PredictorConfig& cfg = *config_;
    const int d = cfg.depth;
    std::array<std::int32_t, kMaxDepth + 1> path;
    std::array<double, kMaxDepth + 1> weighted;

    if (g_.empty()) create_node(history, 0);
    std::int32_t node = 0;
    for (int k = 0; k <= d; ++k) {
        path[static_cast<std::size_t>(k)] = node;
        if (k == d) break;
        const std::size_t slot = static_cast<std::size_t>(node) * k_ + padded_context_symbol(history, static_cast<std::size_t>(k), cfg.pad_symbol);
        if (children_[slot] == kNone) {
            const std::int32_t c = create_node(history, k + 1);
            children_[slot] = c;
        }
        node = children_[slot];
    }

    for (int k = d; k >= 0; --k) {
        const auto i = static_cast<std::size_t>(path[static_cast<std::size_t>(k)]);
        const double num = beta_of(beta_[i], x) + static_cast<double>(counts_[i * k_ + x]);
        const double q = num / (beta_sum_[i] + static_cast<double>(totals_[i]));
        weighted[static_cast<std::size_t>(k)] = k == d ? q : (1.0 - g_[i]) * q + g_[i] * weighted[static_cast<std::size_t>(k) + 1];
    }

    for (int k = 0; k <= d; ++k) {
        const auto i = static_cast<std::size_t>(path[static_cast<std::size_t>(k)]);
        if (k < d) g_[i] = g_[i] * weighted[static_cast<std::size_t>(k) + 1] / weighted[static_cast<std::size_t>(k)];
        ++counts_[i * k_ + x];
        ++totals_[i];
    }
    return weighted[0];
}

std::optional<SuperposedTree::NodeView> SuperposedTree::inspect(const Context& ctx) const {
    if (g_.empty() || static_cast<int>(ctx.size()) > config_->depth) return std::nullopt;
    std::int32_t node = 0;
    for (Symbol s : ctx) {
        if (s >= k_) return std::nullopt;
        node = children_[static_cast<std::size_t>(node) * k_ + s];
        if (node == kNone) return std::nullopt;
    }
    const auto i = static_cast<std::size_t>(node);
    NodeView view;
    view.counts.assign(counts_.begin() + static_cast<std::ptrdiff_t>(i * k_), counts_.begin() + static_cast<std::ptrdiff_t>((i + 1) * k_));
    view.posterior_g = g_[i];
    return view;
}

}  // namespace ctsw
