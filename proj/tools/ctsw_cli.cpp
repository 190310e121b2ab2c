// ctsw: command-line front end for the change-point context tree coder.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ctsw/codec.hpp"
#include "ctsw/error.hpp"
#include "ctsw/experiments.hpp"
#include "ctsw/simgen.hpp"
#include "ctsw/switcher.hpp"

namespace {

using namespace ctsw;

struct ModelFlags {
    std::size_t alphabet = 2;
    int depth = 2;
    double alpha = 0.01;
    double g = 0.5;
    double beta = 0.5;
    std::optional<int> pad;
    std::optional<double> prune;
    int threads = 0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_alpha = true) {
    cmd->add_option("--alphabet", f.alphabet, "Alphabet size |X| (text format only)");
    cmd->add_option("--depth", f.depth, "Maximum context tree depth d");
    if (with_alpha) cmd->add_option("--alpha", f.alpha, "Change-point rate alpha");
    cmd->add_option("--g", f.g, "Default node hyper-parameter g_s");
    cmd->add_option("--beta", f.beta, "Symmetric Dirichlet parameter beta");
    cmd->add_option("--pad-symbol", f.pad, "Symbol assumed before the start of each segment");
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::string& data) {
    if (path == "-") {
        std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

enum class Format { text, bytes, bits };

std::vector<Symbol> parse_symbols(const std::vector<std::uint8_t>& raw, Format fmt) {
    std::vector<Symbol> out;
    switch (fmt) {
        case Format::bytes:
            out.assign(raw.begin(), raw.end());
            break;
        case Format::bits:
            for (std::uint8_t b : raw) {
                for (int i = 7; i >= 0; --i) out.push_back(static_cast<Symbol>((b >> i) & 1u));
            }
            break;
        case Format::text: {
            std::string text(raw.begin(), raw.end());
            for (char& c : text) {
                if (c == ',') c = ' ';
            }
            std::istringstream ss(text);
            std::string tok;
            while (ss >> tok) {
                if (tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 5) {
                    throw InputError("invalid symbol token \"" + tok + "\"");
                }
                const unsigned long v = std::stoul(tok);
                if (v > 65535) throw InputError("symbol " + tok + " is too large");
                out.push_back(static_cast<Symbol>(v));
            }
            break;
        }
    }
    return out;
}

std::string format_symbols(const std::vector<Symbol>& symbols, Format fmt) {
    std::string out;
    switch (fmt) {
        case Format::bytes:
            for (Symbol s : symbols) {
                if (s > 255) throw InputError("symbol does not fit in a byte");
                out.push_back(static_cast<char>(s));
            }
            break;
        case Format::bits:
            if (symbols.size() % 8 != 0) throw InputError("bit sequence length is not a multiple of 8");
            for (std::size_t i = 0; i < symbols.size(); i += 8) {
                unsigned b = 0;
                for (std::size_t j = 0; j < 8; ++j) b = (b << 1) | (symbols[i + j] & 1u);
                out.push_back(static_cast<char>(b));
            }
            break;
        case Format::text:
            for (std::size_t i = 0; i < symbols.size(); ++i) {
                if (i) out += ' ';
                out += std::to_string(symbols[i]);
            }
            out += '\n';
            break;
    }
    return out;
}

std::size_t alphabet_for(Format fmt, std::size_t requested) {
    switch (fmt) {
        case Format::bytes: return 256;
        case Format::bits: return 2;
        case Format::text: return requested;
    }
    return requested;
}

CodecParams codec_params(const ModelFlags& f, std::size_t alphabet) {
    const int pad = f.pad.value_or(0);
    if (pad < 0 || pad > 65535) throw ConfigError("pad symbol out of range");
    CodecParams p;
    p.alphabet_size = alphabet;
    p.depth = f.depth;
    p.pad_symbol = static_cast<Symbol>(pad);
    p.alpha = f.alpha;
    p.g = f.g;
    p.beta = f.beta;
    p.switcher_config();
    return p;
}

SegmentedSourceSpec spec_from(const std::string& path) {
    return path.empty() ? default_experiment_spec() : load_source_spec(path);
}

void emit_error(const std::string& kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential Bayes coding for sources whose context tree model switches at unknown times"};
    app.require_subcommand(1);

    const std::map<std::string, Format> formats{{"text", Format::text}, {"bytes", Format::bytes}, {"bits", Format::bits}};

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Draw a sequence from a piecewise source spec");
    std::string sim_spec, sim_out = "-";
    std::uint64_t sim_seed = 1;
    bool emit_spec = false;
    simulate->add_option("--spec", sim_spec, "Source spec JSON (default: built-in 3x100 spec)");
    simulate->add_option("--seed", sim_seed, "RNG seed");
    simulate->add_option("--out", sim_out, "Output path, - for stdout");
    simulate->add_flag("--emit-spec", emit_spec, "Write the spec as JSON instead of sampling");

    // compress / decompress
    auto* compress = app.add_subcommand("compress", "Compress a symbol sequence");
    ModelFlags cf;
    std::string c_in = "-", c_out = "-";
    Format c_fmt = Format::text;
    add_model_flags(compress, cf);
    compress->add_option("--in", c_in, "Input path, - for stdin");
    compress->add_option("--out", c_out, "Output path, - for stdout");
    compress->add_option("--format", c_fmt, "Input format: text, bytes or bits")->transform(CLI::CheckedTransformer(formats));

    auto* decompress = app.add_subcommand("decompress", "Restore a compressed sequence");
    std::string d_in = "-", d_out = "-";
    Format d_fmt = Format::text;
    decompress->add_option("--in", d_in, "Input path, - for stdin");
    decompress->add_option("--out", d_out, "Output path, - for stdout");
    decompress->add_option("--format", d_fmt, "Output format: text, bytes or bits")->transform(CLI::CheckedTransformer(formats));

    // predict
    auto* predict = app.add_subcommand("predict", "Per-step coding probabilities and change-point estimates as CSV");
    ModelFlags pf;
    std::string p_in = "-", p_out = "-";
    Format p_fmt = Format::text;
    add_model_flags(predict, pf);
    predict->add_option("--in", p_in, "Input path, - for stdin");
    predict->add_option("--out", p_out, "CSV output path, - for stdout");
    predict->add_option("--format", p_fmt, "Input format: text, bytes or bits")->transform(CLI::CheckedTransformer(formats));
    predict->add_option("--prune-epsilon", pf.prune, "Drop change-point candidates below this posterior (inexact)");

    // oracle-check
    auto* ocheck = app.add_subcommand("oracle-check", "Compare the switcher with brute-force enumeration");
    OracleCheckOptions oopts;
    std::optional<double> o_alpha;
    ocheck->add_option("--n-max", oopts.n_max, "Sequence length per instance (<= 12)");
    ocheck->add_option("--instances", oopts.instances, "Number of random instances");
    ocheck->add_option("--seed", oopts.seed, "Instance seed");
    ocheck->add_option("--alpha", o_alpha, "Force alpha for every instance");
    ocheck->add_option("--perturb", oopts.perturbation, "Perturb the posterior update (negative control)");
    std::string o_out = "-";
    ocheck->add_option("--out", o_out, "Report path, - for stdout");

    // exp-a / exp-b
    ExperimentConfig ecfg;
    std::string e_spec, e_out = "-";
    ModelFlags ef;
    std::vector<double> e_alphas{0.1, 0.01, 0.001};
    auto add_exp = [&](const char* name, const char* help) {
        auto* cmd = app.add_subcommand(name, help);
        add_model_flags(cmd, ef, false);
        cmd->add_option("--alpha", e_alphas, "Alpha values (comma separated or repeated)")->delimiter(',');
        cmd->add_option("--spec", e_spec, "Source spec JSON (default: built-in 3x100 spec)");
        cmd->add_option("--trials", ecfg.trials, "Trials per alpha");
        cmd->add_option("--seed", ecfg.seed, "Base seed; trial i uses seed + i");
        cmd->add_option("--out", e_out, "CSV output path, - for stdout");
        cmd->add_option("--prune-epsilon", ef.prune, "Drop change-point candidates below this posterior (inexact)");
        cmd->add_option("--threads", ef.threads, "OpenMP threads over trials (0 = default)");
        return cmd;
    };
    auto* exp_a = add_exp("exp-a", "Trial-averaged redundancy curve");
    auto* exp_b = add_exp("exp-b", "Trial-averaged last change point estimate");

    // bench
    auto* bench = app.add_subcommand("bench", "Time the switcher over increasing sequence lengths");
    BenchOptions bopts;
    ModelFlags bf;
    std::string kernel = "serial", b_out = "-";
    add_model_flags(bench, bf);
    bench->add_option("--sizes", bopts.sizes, "Sequence lengths")->delimiter(',');
    bench->add_option("--seed", bopts.seed, "Sequence seed");
    bench->add_option("--prune-epsilon", bf.prune, "Drop change-point candidates below this posterior (inexact)");
    bench->add_option("--kernel", kernel, "serial or parallel")->check(CLI::IsMember({"serial", "parallel"}));
    bench->add_option("--threads", bf.threads, "OpenMP threads for the parallel kernel (0 = default)");
    bench->add_option("--out", b_out, "CSV output path, - for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            const auto spec = spec_from(sim_spec);
            if (emit_spec) {
                write_bytes(sim_out, source_spec_to_json(spec));
            } else {
                write_bytes(sim_out, format_symbols(generate(spec, sim_seed), Format::text));
            }
        } else if (*compress) {
            const auto symbols = parse_symbols(read_bytes(c_in), c_fmt);
            const auto bytes = encode(symbols, codec_params(cf, alphabet_for(c_fmt, cf.alphabet)));
            write_bytes(c_out, std::string(bytes.begin(), bytes.end()));
        } else if (*decompress) {
            const auto decoded = decode(read_bytes(d_in));
            write_bytes(d_out, format_symbols(decoded.symbols, d_fmt));
        } else if (*predict) {
            const auto symbols = parse_symbols(read_bytes(p_in), p_fmt);
            SwitcherConfig cfg = codec_params(pf, alphabet_for(p_fmt, pf.alphabet)).switcher_config();
            cfg.prune_epsilon = pf.prune;
            cfg.validate();
            Switcher model(cfg);
            std::ostringstream csv;
            csv << "t,symbol,probability,code_bits,tau_hat,live_trees\n";
            char buf[128];
            for (std::size_t t = 0; t < symbols.size(); ++t) {
                const std::size_t tau = model.last_changepoint_estimate();
                const double p = model.advance(symbols[t]);
                std::snprintf(buf, sizeof buf, "%zu,%u,%.17g,%.17g,%zu,%zu\n", t + 1, static_cast<unsigned>(symbols[t]), p,
                              -std::log2(p), tau, model.live_trees());
                csv << buf;
            }
            write_bytes(p_out, csv.str());
        } else if (*ocheck) {
            oopts.alpha = o_alpha;
            const auto report = run_oracle_check(oopts);
            std::ostringstream out;
            write_oracle_report(out, report);
            write_bytes(o_out, out.str());
            return report.passed ? 0 : 1;
        } else if (*exp_a || *exp_b) {
            ecfg.spec = spec_from(e_spec);
            ecfg.alphas = e_alphas;
            ecfg.depth = ef.depth;
            ecfg.g = ef.g;
            ecfg.beta = ef.beta;
            ecfg.prune_epsilon = ef.prune;
            ecfg.threads = ef.threads;
            if (ef.pad) {
                if (*ef.pad < 0 || *ef.pad > 65535) throw ConfigError("pad symbol out of range");
                ecfg.spec.pad_symbol = static_cast<Symbol>(*ef.pad);
            }
            std::ostringstream out;
            if (*exp_a) {
                write_experiment_a_csv(out, run_experiment_a(ecfg));
            } else {
                write_experiment_b_csv(out, run_experiment_b(ecfg));
            }
            write_bytes(e_out, out.str());
        } else if (*bench) {
            bopts.alpha = bf.alpha;
            bopts.depth = bf.depth;
            bopts.g = bf.g;
            bopts.beta = bf.beta;
            bopts.prune_epsilon = bf.prune;
            bopts.kernel = kernel == "parallel" ? Kernel::parallel : Kernel::serial;
#ifdef _OPENMP
            omp_set_num_threads(bf.threads > 0 && bopts.kernel == Kernel::parallel ? bf.threads : 1);
            if (bopts.kernel == Kernel::parallel && bf.threads == 0) omp_set_num_threads(omp_get_num_procs());
#endif
            std::ostringstream out;
            write_bench_csv(out, run_bench(bopts));
            write_bytes(b_out, out.str());
        }
    } catch (const ctsw::Error& e) {
        emit_error(e.kind(), e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("internal_error", e.what());
        return 3;
    }
    return 0;
}
