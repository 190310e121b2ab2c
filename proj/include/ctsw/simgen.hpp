#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctsw/context_tree.hpp"

namespace ctsw {

// Counter-based generator: draw i of stream `seed` is splitmix64's output
// function applied to seed + (i + 1) * golden-gamma. Any implementation that
// reproduces splitmix64 reproduces the sequences exactly.
class CounterRng {
public:
    static constexpr std::string_view kAlgorithm = "splitmix64-ctr";

    explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t bits(std::uint64_t counter) const noexcept;
    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform(std::uint64_t counter) const noexcept;

private:
    std::uint64_t seed_;
};

struct Segment {
    std::size_t length;
    ContextTreeModel model;
    ThetaParams theta;
};

// A piecewise source: consecutive segments each driven by its own model and parameters.
struct SegmentedSourceSpec {
    Alphabet alphabet{2};
    Symbol pad_symbol = 0;
    std::vector<Segment> segments;

    std::size_t total_length() const noexcept;
    // 1-based times at which a new segment starts, excluding t = 1.
    std::vector<std::size_t> change_points() const;
    void validate() const;
};

// Symbol t of each segment is drawn from theta at the leaf its padded
// within-segment context reaches. Deterministic in (spec, seed).
std::vector<Symbol> generate(const SegmentedSourceSpec& spec, std::uint64_t seed);

// Entropy rate of the segment covering each position, in bits.
std::vector<double> per_symbol_entropy(const SegmentedSourceSpec& spec);

// Built-in three-segment experiment source (3 x 100 symbols, binary).
SegmentedSourceSpec default_experiment_spec();

// JSON spec files:
// {
//   "alphabet_size": 2, "pad_symbol": 0, "rng": "splitmix64-ctr",
//   "segments": [
//     {"length": 100, "model": {"max_depth": 1, "internal": [""]},
//      "theta": {"0": [0.3, 0.7], "1": [0.9, 0.1]}}
//   ]
// }
// Context keys list symbols most recent first, comma separated; "" is the root.
SegmentedSourceSpec parse_source_spec(const std::string& json_text);
SegmentedSourceSpec load_source_spec(const std::string& path);
std::string source_spec_to_json(const SegmentedSourceSpec& spec);

}  // namespace ctsw
