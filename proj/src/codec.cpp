#include "ctsw/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "ctsw/error.hpp"

namespace ctsw {

std::vector<std::uint32_t> QuantizedDistribution::cumulative() const {
    std::vector<std::uint32_t> cum(freq.size() + 1, 0);
    for (std::size_t a = 0; a < freq.size(); ++a) cum[a + 1] = cum[a] + freq[a];
    return cum;
}

QuantizedDistribution quantize(std::span<const double> p) {
    if (p.size() < 2 || p.size() > kFrequencyTotal) throw InputError("distribution has an unsupported size");
    double sum = 0.0;
    for (double v : p) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InputError("distribution entries must be positive");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("distribution does not sum to 1");

    const std::size_t k = p.size();
    const double total = static_cast<double>(kFrequencyTotal);
    QuantizedDistribution q;
    q.freq.resize(k);
    std::vector<double> remainder(k);
    std::int64_t assigned = 0;
    for (std::size_t a = 0; a < k; ++a) {
        const double scaled = p[a] * total;
        const double whole = std::floor(scaled);
        remainder[a] = scaled - whole;
        q.freq[a] = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(whole));
        assigned += q.freq[a];
    }

    std::int64_t diff = static_cast<std::int64_t>(kFrequencyTotal) - assigned;
    if (diff > 0) {
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
        for (std::size_t i = 0; diff > 0; i = (i + 1) % k, --diff) ++q.freq[order[i]];
    }
    while (diff < 0) {
        // Take back from the largest frequency; floors only ever push the sum up by < |X|.
        const auto it = std::max_element(q.freq.begin(), q.freq.end());
        --*it;
        ++diff;
    }
    return q;
}

SwitcherConfig CodecParams::switcher_config() const {
    SwitcherConfig cfg;
    cfg.predictor.alphabet = Alphabet(alphabet_size);
    cfg.predictor.depth = depth;
    cfg.predictor.g = NodeHyperPrior(g);
    cfg.predictor.beta = DirichletPrior(beta);
    cfg.predictor.pad_symbol = pad_symbol;
    cfg.alpha = alpha;
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Header

namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
    for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_be(std::span<const std::uint8_t> in, std::size_t& pos, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v = (v << 8) | in[pos++];
    return v;
}

}  // namespace

void ContainerHeader::write(std::vector<std::uint8_t>& out) const {
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    out.push_back(kVersion);
    put_be(out, params.alphabet_size, 2);
    put_be(out, static_cast<std::uint64_t>(params.depth), 1);
    put_be(out, params.pad_symbol, 2);
    put_be(out, std::bit_cast<std::uint64_t>(params.alpha), 8);
    put_be(out, std::bit_cast<std::uint64_t>(params.g), 8);
    put_be(out, std::bit_cast<std::uint64_t>(params.beta), 8);
    put_be(out, length, 8);
}

ContainerHeader ContainerHeader::read(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kSize) throw DecodeError("container is shorter than its header");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw DecodeError("bad magic");
    if (bytes[4] != kVersion) throw DecodeError("unsupported container version " + std::to_string(bytes[4]));

    std::size_t pos = 5;
    ContainerHeader h;
    h.params.alphabet_size = get_be(bytes, pos, 2);
    h.params.depth = static_cast<int>(get_be(bytes, pos, 1));
    h.params.pad_symbol = static_cast<Symbol>(get_be(bytes, pos, 2));
    h.params.alpha = std::bit_cast<double>(get_be(bytes, pos, 8));
    h.params.g = std::bit_cast<double>(get_be(bytes, pos, 8));
    h.params.beta = std::bit_cast<double>(get_be(bytes, pos, 8));
    h.length = get_be(bytes, pos, 8);

    if (h.params.alphabet_size < 2) throw DecodeError("header alphabet size is below 2");
    if (h.params.pad_symbol >= h.params.alphabet_size) throw DecodeError("header pad symbol is outside the alphabet");
    if (!(h.params.alpha >= 0.0 && h.params.alpha <= 1.0)) throw DecodeError("header alpha is outside [0, 1]");
    if (!(h.params.g >= 0.0 && h.params.g <= 1.0)) throw DecodeError("header g is outside [0, 1]");
    if (!(h.params.beta > 0.0) || !std::isfinite(h.params.beta)) throw DecodeError("header beta is not positive");
    return h;
}

// ---------------------------------------------------------------------------
// Encoder / decoder

namespace {

// The one state machine both directions run.
class CodingModel {
public:
    explicit CodingModel(const CodecParams& params)
        : switcher_(params.switcher_config()), probs_(params.alphabet_size) {}

    const std::vector<double>& distribution() {
        switcher_.predict(probs_);
        return probs_;
    }
    void update(Symbol x) { switcher_.advance(x); }

private:
    Switcher switcher_;
    std::vector<double> probs_;
};

}  // namespace

std::vector<std::uint8_t> encode(std::span<const Symbol> symbols, const CodecParams& params, EncodeStats* stats) {
    Alphabet(params.alphabet_size).check(symbols);
    CodingModel model(params);
    RangeEncoder coder;
    double ideal = 0.0;
    for (Symbol x : symbols) {
        const auto& p = model.distribution();
        ideal -= std::log2(p[x]);
        const QuantizedDistribution q = quantize(p);
        std::uint32_t cum = 0;
        for (std::size_t a = 0; a < x; ++a) cum += q.freq[a];
        coder.encode(cum, q.freq[x]);
        model.update(x);
    }
    const std::vector<std::uint32_t> words = coder.finish();

    std::vector<std::uint8_t> out;
    out.reserve(ContainerHeader::kSize + 4 * words.size());
    ContainerHeader{params, symbols.size()}.write(out);
    for (std::uint32_t w : words) put_be(out, w, 4);

    if (stats) {
        stats->ideal_bits = ideal;
        stats->payload_bits = 32 * words.size();
    }
    return out;
}

Decoded decode(std::span<const std::uint8_t> bytes) {
    const ContainerHeader header = ContainerHeader::read(bytes);
    const auto payload = bytes.subspan(ContainerHeader::kSize);
    if (payload.size() % 4 != 0) throw DecodeError("payload is not a whole number of 32-bit words");
    if (header.length == 0 && !payload.empty()) throw DecodeError("payload present for an empty sequence");

    std::vector<std::uint32_t> words;
    words.reserve(payload.size() / 4);
    for (std::size_t pos = 0; pos < payload.size();) words.push_back(static_cast<std::uint32_t>(get_be(payload, pos, 4)));

    Decoded out;
    out.params = header.params;
    if (header.length == 0) return out;

    CodingModel model = [&] {
        try {
            return CodingModel(header.params);
        } catch (const ConfigError& e) {
            throw DecodeError(std::string("header parameters rejected: ") + e.what());
        }
    }();
    RangeDecoder coder(words);
    out.symbols.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(header.length, 1u << 20)));
    for (std::uint64_t t = 0; t < header.length; ++t) {
        const QuantizedDistribution q = quantize(model.distribution());
        const auto x = static_cast<Symbol>(coder.decode(q.cumulative()));
        out.symbols.push_back(x);
        model.update(x);
    }
    if (!coder.exhausted()) throw DecodeError("payload has trailing data");
    return out;
}

}  // namespace ctsw
