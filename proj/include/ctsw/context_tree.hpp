#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ctsw {

using Symbol = std::uint16_t;

// A node context. Element k is the symbol k+1 steps back in time,
// so {x_{t-1}, x_{t-2}, ...}. The root is the empty context.
using Context = std::vector<Symbol>;

// Hard cap on tree depth; the container header stores it in one byte.
inline constexpr int kMaxDepth = 255;

class Alphabet {
public:
    explicit Alphabet(std::size_t size);

    std::size_t size() const noexcept { return size_; }
    bool contains(std::size_t symbol) const noexcept { return symbol < size_; }
    void check(std::span<const Symbol> sequence) const;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::size_t size_;
};

// Symbol `k+1` steps back from the end of a segment-local history, with
// virtual left padding once the history runs out.
inline Symbol padded_context_symbol(std::span<const Symbol> history, std::size_t k, Symbol pad) noexcept {
    return k < history.size() ? history[history.size() - 1 - k] : pad;
}

// "0,1" style key used by the JSON formats. Root is "".
std::string context_to_string(const Context& ctx);
Context context_from_string(const std::string& text);

// A complete |X|-ary tree of depth <= max_depth. Every internal node has all
// |X| children; the node set is prefix closed.
class ContextTreeModel {
public:
    static ContextTreeModel root_only(Alphabet alphabet, int max_depth);
    // Builds the model whose internal nodes are exactly `internal`.
    static ContextTreeModel from_internal(Alphabet alphabet, int max_depth, const std::vector<Context>& internal);
    // Preorder shape code: true = internal (children follow in symbol order), false = leaf.
    static ContextTreeModel from_preorder(Alphabet alphabet, int max_depth, const std::vector<bool>& code);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    int max_depth() const noexcept { return max_depth_; }
    // Depth of the deepest leaf.
    int depth() const noexcept;

    std::size_t node_count() const noexcept { return nodes_.size(); }
    const Context& context(std::size_t node) const { return nodes_[node].context; }
    bool is_leaf(std::size_t node) const { return nodes_[node].first_child < 0; }
    std::optional<std::size_t> child(std::size_t node, Symbol a) const;
    std::optional<std::size_t> find(const Context& ctx) const;

    std::vector<Context> leaves() const;
    std::vector<Context> internal_nodes() const;

    // Node index of the leaf S_m reached by the (padded) history.
    std::size_t leaf_for(std::span<const Symbol> history, Symbol pad) const;

    std::vector<bool> preorder() const;

    friend bool operator==(const ContextTreeModel& a, const ContextTreeModel& b) {
        return a.alphabet_ == b.alphabet_ && a.max_depth_ == b.max_depth_ && a.preorder() == b.preorder();
    }

private:
    struct Node {
        Context context;
        std::int32_t first_child = -1;  // children are contiguous
    };

    ContextTreeModel(Alphabet alphabet, int max_depth);
    std::size_t add_leaf(Context ctx);
    void split(std::size_t node);

    Alphabet alphabet_;
    int max_depth_;
    std::vector<Node> nodes_;
};

// Prior probability g_s that the tree extends below s. Forced to zero at max depth.
class NodeHyperPrior {
public:
    explicit NodeHyperPrior(double default_g = 0.5);

    void set(const Context& ctx, double g);
    double value(const Context& ctx, int max_depth) const;
    double default_value() const noexcept { return default_; }
    bool has_overrides() const noexcept { return !overrides_.empty(); }
    const std::map<Context, double>& overrides() const noexcept { return overrides_; }

private:
    double default_;
    std::map<Context, double> overrides_;
};

// Dirichlet hyper-parameters beta(i|s), symmetric default plus per-node vectors.
class DirichletPrior {
public:
    explicit DirichletPrior(double default_beta = 0.5);

    void set(const Context& ctx, std::vector<double> beta);
    // beta(a|s) for every symbol of an alphabet of `alphabet_size`.
    std::vector<double> at(const Context& ctx, std::size_t alphabet_size) const;
    const std::vector<double>* override_for(const Context& ctx) const;
    double default_value() const noexcept { return default_; }
    bool has_overrides() const noexcept { return !overrides_.empty(); }
    const std::map<Context, std::vector<double>>& overrides() const noexcept { return overrides_; }

private:
    double default_;
    std::map<Context, std::vector<double>> overrides_;
};

// Per-leaf symbol distributions theta_s.
class ThetaParams {
public:
    ThetaParams() = default;

    void set(const Context& leaf, std::vector<double> probs);
    const std::vector<double>& at(const Context& leaf) const;
    const std::map<Context, std::vector<double>>& entries() const noexcept { return theta_; }

    // Throws ConfigError unless every leaf of `model` has a valid vector and nothing else is listed.
    void validate(const ContextTreeModel& model) const;

private:
    std::map<Context, std::vector<double>> theta_;
};

// Number of complete models of depth <= d: M_0 = 1, M_k = 1 + M_{k-1}^{|X|}.
// Returns nullopt when the count overflows 64 bits.
std::optional<std::uint64_t> count_models(std::size_t alphabet_size, int d);

// Every complete context tree model of depth <= d, each exactly once.
// Throws EnumerationTooLarge when |X|^d > 2^16 or the model count exceeds kMaxEnumeratedModels.
inline constexpr std::uint64_t kMaxEnumeratedModels = 1'000'000;
std::vector<ContextTreeModel> enumerate_models(Alphabet alphabet, int d);

// P(m) = prod_{internal} g_s * prod_{leaves} (1 - g_s).
double model_prior(const ContextTreeModel& model, const NodeHyperPrior& g);

// Entropy rate in bits/symbol of the stationary order-depth Markov chain the model induces.
double entropy_rate(const ContextTreeModel& model, const ThetaParams& theta);

// Shannon entropy in bits.
double entropy_bits(std::span<const double> probs);

}  // namespace ctsw
