#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctsw/range_coder.hpp"
#include "ctsw/switcher.hpp"

namespace ctsw {

// Integer frequencies on the 2^30 budget; every entry >= 1, sum exactly 2^30.
struct QuantizedDistribution {
    std::vector<std::uint32_t> freq;

    // |X|+1 prefix sums, 0 ... 2^30.
    std::vector<std::uint32_t> cumulative() const;
};

// Largest-remainder rounding of p onto 2^30 with a floor of 1 per symbol.
// Ties go to the lower symbol index.
QuantizedDistribution quantize(std::span<const double> p);

// Hyper-parameters that travel in the container header.
struct CodecParams {
    std::size_t alphabet_size = 2;
    int depth = 2;
    Symbol pad_symbol = 0;
    double alpha = 0.01;
    double g = 0.5;
    double beta = 0.5;

    SwitcherConfig switcher_config() const;
};

// Fixed 42-byte container header, all integers and IEEE-754 doubles big-endian:
//   "CTSW" | version u8 | alphabet u16 | depth u8 | pad u16 | alpha f64 | g f64 | beta f64 | N u64
struct ContainerHeader {
    static constexpr std::array<char, 4> kMagic{'C', 'T', 'S', 'W'};
    static constexpr std::uint8_t kVersion = 1;
    static constexpr std::size_t kSize = 42;

    CodecParams params;
    std::uint64_t length = 0;

    void write(std::vector<std::uint8_t>& out) const;
    static ContainerHeader read(std::span<const std::uint8_t> bytes);
};

struct EncodeStats {
    double ideal_bits = 0.0;        // sum of -log2 p(x_t | x^{t-1})
    std::size_t payload_bits = 0;   // bits after the header
};

std::vector<std::uint8_t> encode(std::span<const Symbol> symbols, const CodecParams& params,
                                 EncodeStats* stats = nullptr);

struct Decoded {
    CodecParams params;
    std::vector<Symbol> symbols;
};

// Throws DecodeError on any malformed container.
Decoded decode(std::span<const std::uint8_t> bytes);

}  // namespace ctsw
