#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ctsw {

// Frequencies are integers on a fixed budget of 2^30.
inline constexpr unsigned kFrequencyBits = 30;
inline constexpr std::uint32_t kFrequencyTotal = std::uint32_t{1} << kFrequencyBits;

// 64-bit range coder emitting 32-bit words. Sub-intervals are computed as
// floor(range * cum / 2^30) with a full 128-bit product, so the only coding
// loss is one unit of the range per symbol. Carries are propagated into the
// already emitted words.
class RangeEncoder {
public:
    void encode(std::uint32_t cum, std::uint32_t freq);
    // Terminates the stream; returns the emitted words.
    std::vector<std::uint32_t> finish();

private:
    void emit_carry();

    std::uint64_t low_ = 0;
    std::uint64_t range_ = UINT64_MAX;
    std::vector<std::uint32_t> words_;
    bool started_ = false;
};

class RangeDecoder {
public:
    explicit RangeDecoder(std::span<const std::uint32_t> words);

    // Symbol whose cumulative interval contains the current code value.
    // `cumulative` has |X|+1 entries, starting at 0 and ending at 2^30.
    std::size_t decode(std::span<const std::uint32_t> cumulative);
    // True when every word was consumed, plus the single implied zero word the encoder leaves off.
    bool exhausted() const noexcept { return pos_ == words_.size() + 1; }

private:
    std::uint32_t next_word();

    std::span<const std::uint32_t> words_;
    std::size_t pos_ = 0;
    std::uint64_t range_ = UINT64_MAX;
    std::uint64_t value_ = 0;  // code - low, always < range_
};

}  // namespace ctsw
