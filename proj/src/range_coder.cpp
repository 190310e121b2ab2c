#include "ctsw/range_coder.hpp"

#include "ctsw/error.hpp"

namespace ctsw {

namespace {

__extension__ typedef unsigned __int128 uint128;

constexpr std::uint64_t kRenormThreshold = std::uint64_t{1} << 32;

std::uint64_t bound(std::uint64_t range, std::uint32_t cum) {
    return static_cast<std::uint64_t>((static_cast<uint128>(range) * cum) >> kFrequencyBits);
}

}  // namespace

void RangeEncoder::emit_carry() {
    for (auto it = words_.rbegin(); it != words_.rend(); ++it) {
        if (++*it != 0) return;
    }
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq) {
    const std::uint64_t start = bound(range_, cum);
    const std::uint64_t end = bound(range_, cum + freq);
    const std::uint64_t before = low_;
    low_ += start;
    if (low_ < before) emit_carry();
    range_ = end - start;
    while (range_ < kRenormThreshold) {
        words_.push_back(static_cast<std::uint32_t>(low_ >> 32));
        low_ <<= 32;
        range_ <<= 32;
    }
    started_ = true;
}

std::vector<std::uint32_t> RangeEncoder::finish() {
    if (!started_) return {};
    // Smallest multiple of 2^32 inside [low, low + range); range >= 2^32 guarantees one exists.
    const std::uint64_t before = low_;
    std::uint64_t v = low_ + 0xFFFFFFFFull;
    if (v < before) emit_carry();
    v &= ~0xFFFFFFFFull;
    words_.push_back(static_cast<std::uint32_t>(v >> 32));
    started_ = false;
    return std::move(words_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint32_t> words) : words_(words) {
    value_ = static_cast<std::uint64_t>(next_word()) << 32;
    value_ |= next_word();
}

std::uint32_t RangeDecoder::next_word() {
    if (pos_ < words_.size()) return words_[pos_++];
    if (pos_ == words_.size()) {
        ++pos_;
        return 0;
    }
    throw DecodeError("payload is truncated");
}

std::size_t RangeDecoder::decode(std::span<const std::uint32_t> cumulative) {
    if (value_ >= range_) throw DecodeError("code value outside the coding interval");
    // Largest s with bound(cum[s]) <= value.
    std::size_t lo = 0;
    std::size_t hi = cumulative.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (bound(range_, cumulative[mid]) <= value_) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const std::uint64_t start = bound(range_, cumulative[lo]);
    const std::uint64_t end = bound(range_, cumulative[lo + 1]);
    value_ -= start;
    range_ = end - start;
    while (range_ < kRenormThreshold) {
        value_ = (value_ << 32) | next_word();
        range_ <<= 32;
    }
    return lo;
}

}  // namespace ctsw
