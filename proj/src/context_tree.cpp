#include "ctsw/context_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "ctsw/error.hpp"

namespace ctsw {

Alphabet::Alphabet(std::size_t size) : size_(size) {
    if (size < 2 || size > 65535) {
        throw ConfigError("alphabet size must be in [2, 65535], got " + std::to_string(size));
    }
}

void Alphabet::check(std::span<const Symbol> sequence) const {
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        if (!contains(sequence[i])) {
            throw InputError("symbol " + std::to_string(sequence[i]) + " at position " + std::to_string(i) +
                             " is outside the alphabet of size " + std::to_string(size_));
        }
    }
}

std::string context_to_string(const Context& ctx) {
    std::string out;
    for (std::size_t k = 0; k < ctx.size(); ++k) {
        if (k) out += ',';
        out += std::to_string(ctx[k]);
    }
    return out;
}

Context context_from_string(const std::string& text) {
    Context ctx;
    if (text.empty()) return ctx;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError("malformed context key \"" + text + "\"");
        }
        unsigned long v = std::stoul(item);
        if (v > 65535) throw ConfigError("context symbol out of range in \"" + text + "\"");
        ctx.push_back(static_cast<Symbol>(v));
    }
    return ctx;
}

// ---------------------------------------------------------------------------
// ContextTreeModel

ContextTreeModel::ContextTreeModel(Alphabet alphabet, int max_depth) : alphabet_(alphabet), max_depth_(max_depth) {
    if (max_depth < 0 || max_depth > kMaxDepth) {
        throw ConfigError("max depth must be in [0, " + std::to_string(kMaxDepth) + "]");
    }
    add_leaf({});
}

std::size_t ContextTreeModel::add_leaf(Context ctx) {
    nodes_.push_back(Node{std::move(ctx), -1});
    return nodes_.size() - 1;
}

void ContextTreeModel::split(std::size_t node) {
    if (!is_leaf(node)) return;
    if (static_cast<int>(nodes_[node].context.size()) >= max_depth_) {
        throw ConfigError("cannot split node \"" + context_to_string(nodes_[node].context) + "\" at max depth");
    }
    const auto first = static_cast<std::int32_t>(nodes_.size());
    for (std::size_t a = 0; a < alphabet_.size(); ++a) {
        Context c = nodes_[node].context;
        c.push_back(static_cast<Symbol>(a));
        add_leaf(std::move(c));
    }
    nodes_[node].first_child = first;
}

ContextTreeModel ContextTreeModel::root_only(Alphabet alphabet, int max_depth) {
    return ContextTreeModel(alphabet, max_depth);
}

ContextTreeModel ContextTreeModel::from_internal(Alphabet alphabet, int max_depth, const std::vector<Context>& internal) {
    ContextTreeModel m(alphabet, max_depth);
    std::vector<Context> sorted = internal;
    std::sort(sorted.begin(), sorted.end(),
              [](const Context& a, const Context& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const Context& ctx : sorted) {
        for (Symbol s : ctx) {
            if (!alphabet.contains(s)) throw ConfigError("internal node \"" + context_to_string(ctx) + "\" uses a symbol outside the alphabet");
        }
        auto idx = m.find(ctx);
        if (!idx) {
            throw ConfigError("internal node set is not prefix closed: parent of \"" + context_to_string(ctx) + "\" is not internal");
        }
        m.split(*idx);
    }
    return m;
}

ContextTreeModel ContextTreeModel::from_preorder(Alphabet alphabet, int max_depth, const std::vector<bool>& code) {
    ContextTreeModel m(alphabet, max_depth);
    std::size_t pos = 0;
    std::function<void(std::size_t)> build = [&](std::size_t node) {
        if (pos >= code.size()) throw ConfigError("preorder code is truncated");
        if (!code[pos++]) return;
        m.split(node);
        const auto first = static_cast<std::size_t>(m.nodes_[node].first_child);
        for (std::size_t a = 0; a < alphabet.size(); ++a) build(first + a);
    };
    build(0);
    if (pos != code.size()) throw ConfigError("preorder code has trailing entries");
    return m;
}

int ContextTreeModel::depth() const noexcept {
    std::size_t d = 0;
    for (const Node& n : nodes_) d = std::max(d, n.context.size());
    return static_cast<int>(d);
}

std::optional<std::size_t> ContextTreeModel::child(std::size_t node, Symbol a) const {
    if (is_leaf(node) || !alphabet_.contains(a)) return std::nullopt;
    return static_cast<std::size_t>(nodes_[node].first_child) + a;
}

std::optional<std::size_t> ContextTreeModel::find(const Context& ctx) const {
    std::size_t node = 0;
    for (Symbol s : ctx) {
        auto c = child(node, s);
        if (!c) return std::nullopt;
        node = *c;
    }
    return node;
}

std::vector<Context> ContextTreeModel::leaves() const {
    std::vector<Context> out;
    for (const Node& n : nodes_) {
        if (n.first_child < 0) out.push_back(n.context);
    }
    return out;
}

std::vector<Context> ContextTreeModel::internal_nodes() const {
    std::vector<Context> out;
    for (const Node& n : nodes_) {
        if (n.first_child >= 0) out.push_back(n.context);
    }
    return out;
}

std::size_t ContextTreeModel::leaf_for(std::span<const Symbol> history, Symbol pad) const {
    std::size_t node = 0;
    for (std::size_t k = 0; !is_leaf(node); ++k) {
        node = static_cast<std::size_t>(nodes_[node].first_child) + padded_context_symbol(history, k, pad);
    }
    return node;
}

std::vector<bool> ContextTreeModel::preorder() const {
    std::vector<bool> code;
    std::function<void(std::size_t)> walk = [&](std::size_t node) {
        code.push_back(!is_leaf(node));
        if (is_leaf(node)) return;
        for (std::size_t a = 0; a < alphabet_.size(); ++a) walk(static_cast<std::size_t>(nodes_[node].first_child) + a);
    };
    walk(0);
    return code;
}

// ---------------------------------------------------------------------------
// Priors

NodeHyperPrior::NodeHyperPrior(double default_g) : default_(default_g) {
    if (!(default_g >= 0.0 && default_g <= 1.0)) throw ConfigError("g must be in [0, 1]");
}

void NodeHyperPrior::set(const Context& ctx, double g) {
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("g for node \"" + context_to_string(ctx) + "\" must be in [0, 1]");
    overrides_[ctx] = g;
}

double NodeHyperPrior::value(const Context& ctx, int max_depth) const {
    if (static_cast<int>(ctx.size()) >= max_depth) return 0.0;
    if (!overrides_.empty()) {
        auto it = overrides_.find(ctx);
        if (it != overrides_.end()) return it->second;
    }
    return default_;
}

DirichletPrior::DirichletPrior(double default_beta) : default_(default_beta) {
    if (!(default_beta > 0.0) || !std::isfinite(default_beta)) throw ConfigError("beta must be positive and finite");
}

void DirichletPrior::set(const Context& ctx, std::vector<double> beta) {
    for (double b : beta) {
        if (!(b > 0.0) || !std::isfinite(b)) {
            throw ConfigError("beta for node \"" + context_to_string(ctx) + "\" must be positive and finite");
        }
    }
    overrides_[ctx] = std::move(beta);
}

const std::vector<double>* DirichletPrior::override_for(const Context& ctx) const {
    if (overrides_.empty()) return nullptr;
    auto it = overrides_.find(ctx);
    return it == overrides_.end() ? nullptr : &it->second;
}

std::vector<double> DirichletPrior::at(const Context& ctx, std::size_t alphabet_size) const {
    if (const auto* o = override_for(ctx)) {
        if (o->size() != alphabet_size) {
            throw ConfigError("beta vector for node \"" + context_to_string(ctx) + "\" has the wrong length");
        }
        return *o;
    }
    return std::vector<double>(alphabet_size, default_);
}

void ThetaParams::set(const Context& leaf, std::vector<double> probs) { theta_[leaf] = std::move(probs); }

const std::vector<double>& ThetaParams::at(const Context& leaf) const {
    auto it = theta_.find(leaf);
    if (it == theta_.end()) throw ConfigError("no theta for leaf \"" + context_to_string(leaf) + "\"");
    return it->second;
}

void ThetaParams::validate(const ContextTreeModel& model) const {
    const auto leaves = model.leaves();
    for (const Context& leaf : leaves) {
        const auto& p = at(leaf);
        if (p.size() != model.alphabet().size()) {
            throw ConfigError("theta for leaf \"" + context_to_string(leaf) + "\" has the wrong length");
        }
        double sum = 0.0;
        for (double v : p) {
            if (!(v > 0.0 && v < 1.0)) {
                throw ConfigError("theta entries for leaf \"" + context_to_string(leaf) + "\" must lie in (0, 1)");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw ConfigError("theta for leaf \"" + context_to_string(leaf) + "\" does not sum to 1");
        }
    }
    if (theta_.size() != leaves.size()) throw ConfigError("theta lists contexts that are not leaves of the model");
}

// ---------------------------------------------------------------------------
// Enumeration and prior

std::optional<std::uint64_t> count_models(std::size_t alphabet_size, int d) {
    std::uint64_t m = 1;
    for (int k = 1; k <= d; ++k) {
        std::uint64_t p = 1;
        for (std::size_t i = 0; i < alphabet_size; ++i) {
            if (m != 0 && p > (UINT64_MAX - 1) / m) return std::nullopt;
            p *= m;
        }
        m = p + 1;
    }
    return m;
}

namespace {

using Shape = std::vector<bool>;

// All preorder shapes of complete subtrees with at most `remaining` levels below the root.
std::vector<Shape> shapes(std::size_t k, int remaining) {
    std::vector<Shape> out{Shape{false}};
    if (remaining == 0) return out;
    const std::vector<Shape> sub = shapes(k, remaining - 1);
    std::vector<std::size_t> pick(k, 0);
    while (true) {
        Shape s{true};
        for (std::size_t i = 0; i < k; ++i) s.insert(s.end(), sub[pick[i]].begin(), sub[pick[i]].end());
        out.push_back(std::move(s));
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (++pick[i] < sub.size()) break;
            pick[i] = 0;
            if (i == 0) return out;
        }
    }
}

}  // namespace

std::vector<ContextTreeModel> enumerate_models(Alphabet alphabet, int d) {
    if (d < 0) throw ConfigError("depth must be non-negative");
    const std::size_t k = alphabet.size();
    std::uint64_t leaves = 1;
    for (int i = 0; i < d; ++i) {
        leaves *= k;
        if (leaves > (1u << 16)) throw EnumerationTooLarge("enumeration too large: |X|^d exceeds 2^16");
    }
    auto count = count_models(k, d);
    if (!count || *count > kMaxEnumeratedModels) {
        throw EnumerationTooLarge("enumeration too large: model count exceeds " + std::to_string(kMaxEnumeratedModels));
    }
    std::vector<ContextTreeModel> models;
    models.reserve(*count);
    for (const Shape& s : shapes(k, d)) models.push_back(ContextTreeModel::from_preorder(alphabet, d, s));
    return models;
}

double model_prior(const ContextTreeModel& model, const NodeHyperPrior& g) {
    double p = 1.0;
    for (std::size_t i = 0; i < model.node_count(); ++i) {
        const double gs = g.value(model.context(i), model.max_depth());
        p *= model.is_leaf(i) ? (1.0 - gs) : gs;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Entropy rate

double entropy_bits(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

double entropy_rate(const ContextTreeModel& model, const ThetaParams& theta) {
    theta.validate(model);
    const std::size_t k = model.alphabet().size();
    const int depth = model.depth();
    if (depth == 0) return entropy_bits(theta.at({}));

    std::size_t states = 1;
    for (int i = 0; i < depth; ++i) states *= k;
    const std::size_t tail = states / k;

    // State index encodes (x_{t-1}, ..., x_{t-depth}) with x_{t-1} least significant.
    std::vector<const std::vector<double>*> row(states);
    std::vector<Symbol> history(static_cast<std::size_t>(depth));
    for (std::size_t s = 0; s < states; ++s) {
        std::size_t rest = s;
        for (int j = 0; j < depth; ++j) {
            history[static_cast<std::size_t>(depth - 1 - j)] = static_cast<Symbol>(rest % k);
            rest /= k;
        }
        row[s] = &theta.at(model.context(model.leaf_for(history, 0)));
    }

    std::vector<double> pi(states, 1.0 / static_cast<double>(states)), next(states);
    constexpr long kMaxIterations = 1'000'000;
    bool converged = false;
    for (long it = 0; it < kMaxIterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < states; ++s) {
            const std::size_t shifted = (s % tail) * k;
            for (std::size_t a = 0; a < k; ++a) next[shifted + a] += pi[s] * (*row[s])[a];
        }
        double diff = 0.0;
        for (std::size_t s = 0; s < states; ++s) diff += std::abs(next[s] - pi[s]);
        pi.swap(next);
        if (diff < 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged) throw ConvergenceError("stationary distribution did not converge");

    double h = 0.0;
    for (std::size_t s = 0; s < states; ++s) h += pi[s] * entropy_bits(*row[s]);
    return h;
}

}  // namespace ctsw
