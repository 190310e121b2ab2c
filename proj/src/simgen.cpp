#include "ctsw/simgen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ctsw/error.hpp"

namespace ctsw {

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
    std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

std::size_t SegmentedSourceSpec::total_length() const noexcept {
    std::size_t n = 0;
    for (const Segment& s : segments) n += s.length;
    return n;
}

std::vector<std::size_t> SegmentedSourceSpec::change_points() const {
    std::vector<std::size_t> out;
    std::size_t t = 1;
    for (std::size_t j = 0; j < segments.size(); ++j) {
        if (j > 0) out.push_back(t);
        t += segments[j].length;
    }
    return out;
}

void SegmentedSourceSpec::validate() const {
    if (!alphabet.contains(pad_symbol)) throw ConfigError("pad symbol is outside the alphabet");
    if (segments.empty()) throw ConfigError("source spec has no segments");
    for (std::size_t j = 0; j < segments.size(); ++j) {
        const Segment& s = segments[j];
        if (s.length < 1) throw ConfigError("segment " + std::to_string(j) + " has zero length");
        if (!(s.model.alphabet() == alphabet)) throw ConfigError("segment " + std::to_string(j) + " uses a different alphabet");
        s.theta.validate(s.model);
    }
}

std::vector<Symbol> generate(const SegmentedSourceSpec& spec, std::uint64_t seed) {
    spec.validate();
    const CounterRng rng(seed);
    std::vector<Symbol> out;
    out.reserve(spec.total_length());
    for (const Segment& seg : spec.segments) {
        const std::size_t begin = out.size();
        for (std::size_t i = 0; i < seg.length; ++i) {
            const std::span<const Symbol> history(out.data() + begin, i);
            const auto& theta = seg.theta.at(seg.model.context(seg.model.leaf_for(history, spec.pad_symbol)));
            const double u = rng.uniform(out.size());
            std::size_t a = 0;
            double acc = theta[0];
            while (u >= acc && a + 1 < theta.size()) acc += theta[++a];
            out.push_back(static_cast<Symbol>(a));
        }
    }
    return out;
}

std::vector<double> per_symbol_entropy(const SegmentedSourceSpec& spec) {
    spec.validate();
    std::vector<double> out;
    out.reserve(spec.total_length());
    for (const Segment& seg : spec.segments) out.insert(out.end(), seg.length, entropy_rate(seg.model, seg.theta));
    return out;
}

SegmentedSourceSpec default_experiment_spec() {
    const Alphabet bin(2);
    SegmentedSourceSpec spec;
    spec.alphabet = bin;

    Segment memoryless{100, ContextTreeModel::root_only(bin, 0), {}};
    memoryless.theta.set({}, {0.8, 0.2});

    Segment order1{100, ContextTreeModel::from_internal(bin, 1, {{}}), {}};
    order1.theta.set({0}, {0.3, 0.7});
    order1.theta.set({1}, {0.9, 0.1});

    Segment order2{100, ContextTreeModel::from_internal(bin, 2, {{}, {1}}), {}};
    order2.theta.set({0}, {0.85, 0.15});
    order2.theta.set({1, 0}, {0.2, 0.8});
    order2.theta.set({1, 1}, {0.6, 0.4});

    spec.segments = {std::move(memoryless), std::move(order1), std::move(order2)};
    return spec;
}

// ---------------------------------------------------------------------------
// JSON

using nlohmann::json;

SegmentedSourceSpec parse_source_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("source spec is not valid JSON: ") + e.what());
    }
    try {
        if (doc.contains("rng") && doc.at("rng").get<std::string>() != CounterRng::kAlgorithm) {
            throw ConfigError("unsupported rng \"" + doc.at("rng").get<std::string>() + "\"");
        }
        SegmentedSourceSpec spec;
        spec.alphabet = Alphabet(doc.at("alphabet_size").get<std::size_t>());
        spec.pad_symbol = doc.value("pad_symbol", Symbol{0});
        for (const json& s : doc.at("segments")) {
            const json& m = s.at("model");
            std::vector<Context> internal;
            for (const json& key : m.value("internal", json::array())) internal.push_back(context_from_string(key.get<std::string>()));
            int max_depth = 0;
            for (const Context& c : internal) max_depth = std::max(max_depth, static_cast<int>(c.size()) + 1);
            max_depth = m.value("max_depth", max_depth);

            Segment seg{s.at("length").get<std::size_t>(), ContextTreeModel::from_internal(spec.alphabet, max_depth, internal), {}};
            for (const auto& [key, probs] : s.at("theta").items()) {
                seg.theta.set(context_from_string(key), probs.get<std::vector<double>>());
            }
            spec.segments.push_back(std::move(seg));
        }
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed source spec: ") + e.what());
    }
}

SegmentedSourceSpec load_source_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open source spec " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_source_spec(ss.str());
}

std::string source_spec_to_json(const SegmentedSourceSpec& spec) {
    json doc;
    doc["alphabet_size"] = spec.alphabet.size();
    doc["pad_symbol"] = spec.pad_symbol;
    doc["rng"] = CounterRng::kAlgorithm;
    doc["segments"] = json::array();
    for (const Segment& seg : spec.segments) {
        json internal = json::array();
        for (const Context& c : seg.model.internal_nodes()) internal.push_back(context_to_string(c));
        json theta = json::object();
        for (const auto& [ctx, probs] : seg.theta.entries()) theta[context_to_string(ctx)] = probs;
        doc["segments"].push_back({{"length", seg.length},
                                   {"model", {{"max_depth", seg.model.max_depth()}, {"internal", internal}}},
                                   {"theta", theta}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace ctsw
