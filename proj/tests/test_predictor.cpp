#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "ctsw/oracle.hpp"
#include "ctsw/predictor.hpp"

using namespace ctsw;

namespace {

std::shared_ptr<const PredictorConfig> make_config(std::size_t k, int d, double g, double beta, Symbol pad = 0) {
    auto cfg = std::make_shared<PredictorConfig>();
    cfg->alphabet = Alphabet(k);
    cfg->depth = d;
    cfg->g = NodeHyperPrior(g);
    cfg->beta = DirichletPrior(beta);
    cfg->pad_symbol = pad;
    cfg->validate();
    return cfg;
}

std::vector<Context> contexts_upto(std::size_t k, int d) {
    std::vector<Context> out, level{{}};
    for (int depth = 0; depth <= d; ++depth) {
        std::vector<Context> next;
        for (const Context& c : level) {
            out.push_back(c);
            for (std::size_t a = 0; a < k; ++a) {
                Context child = c;
                child.push_back(static_cast<Symbol>(a));
                next.push_back(child);
            }
        }
        level = std::move(next);
    }
    return out;
}

// Random per-node g and beta on every node of the superposed tree.
std::shared_ptr<const PredictorConfig> random_config(std::size_t k, int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto cfg = std::make_shared<PredictorConfig>();
    cfg->alphabet = Alphabet(k);
    cfg->depth = d;
    cfg->g = NodeHyperPrior(u(rng));
    cfg->beta = DirichletPrior(0.1 + 2.0 * u(rng));
    cfg->pad_symbol = static_cast<Symbol>(rng() % k);
    for (const Context& c : contexts_upto(k, d)) {
        if (static_cast<int>(c.size()) < d) cfg->g.set(c, u(rng));
        std::vector<double> b(k);
        for (double& v : b) v = 0.1 + 2.0 * u(rng);
        cfg->beta.set(c, b);
    }
    cfg->validate();
    return cfg;
}

double sequential_product(const std::shared_ptr<const PredictorConfig>& cfg, const std::vector<Symbol>& seq) {
    SuperposedTree tree(cfg, 1);
    double p = 1.0;
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const std::span<const Symbol> history(seq.data(), t);
        p *= tree.absorb(history, seq[t]);
    }
    return p;
}

}  // namespace

TEST_CASE("kt_prob") {
    const std::vector<double> beta{0.5, 0.5};
    const std::vector<std::uint32_t> empty{0, 0};
    CHECK(kt_prob(empty, beta, 0) == 0.5);
    CHECK(kt_prob(empty, beta, 1) == 0.5);

    const std::vector<std::uint32_t> c31{3, 1};
    CHECK(kt_prob(c31, beta, 0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(kt_prob(c31, beta, 0) + kt_prob(c31, beta, 1) == doctest::Approx(1.0));

    const std::vector<std::uint32_t> c10{1, 0};
    CHECK(kt_prob(c10, beta, 0) == 0.75);
}

TEST_CASE("weighted prediction hand examples") {
    const auto cfg = make_config(2, 1, 0.5, 0.5);
    SuperposedTree tree(cfg, 1);
    const std::vector<Symbol> none;
    auto p = tree.predict(none);
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 0.5);

    const std::vector<Symbol> seq{0};
    const double first = tree.absorb({}, 0);
    CHECK(first == 0.5);
    // Root and leaf "0" both hold N(0)=1: 0.5 * 0.75 + 0.5 * 0.75.
    p = tree.predict(seq);
    CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-15));

    SUBCASE("fresh symmetric tree keeps g at 0.5 along the path") {
        const auto cfg2 = make_config(2, 3, 0.5, 0.5);
        SuperposedTree t2(cfg2, 1);
        t2.absorb({}, 1);
        for (const Context& c : {Context{}, Context{0}, Context{0, 0}}) {
            auto view = t2.inspect(c);
            REQUIRE(view);
            CHECK(view->posterior_g == 0.5);
        }
        auto leaf = t2.inspect({0, 0, 0});
        REQUIRE(leaf);
        CHECK(leaf->posterior_g == 0.0);
        CHECK(leaf->counts == std::vector<std::uint32_t>{0, 1});
    }
}

TEST_CASE("depth-d nodes keep g at zero") {
    std::mt19937_64 rng(5);
    const auto cfg = random_config(2, 2, rng);
    SuperposedTree tree(cfg, 1);
    std::vector<Symbol> seq;
    for (int i = 0; i < 40; ++i) {
        const auto x = static_cast<Symbol>(rng() % 2);
        tree.absorb(seq, x);
        seq.push_back(x);
    }
    for (const Context& c : contexts_upto(2, 2)) {
        if (c.size() != 2) continue;
        if (auto v = tree.inspect(c)) CHECK(v->posterior_g == 0.0);
    }
}

TEST_CASE("absorb touches only the context path") {
    const auto cfg = make_config(2, 2, 0.3, 0.5);
    SuperposedTree tree(cfg, 1);
    const std::vector<Symbol> h1{1, 1, 0};  // x_{t-1}=0, x_{t-2}=1
    tree.absorb(h1, 1);
    CHECK(tree.node_count() == 3);
    CHECK(tree.inspect({0, 1})->counts == std::vector<std::uint32_t>{0, 1});
    CHECK_FALSE(tree.inspect({1}));

    const std::vector<Symbol> h2{0, 1};  // x_{t-1}=1, x_{t-2}=0
    const double g_before = tree.inspect({0})->posterior_g;
    tree.absorb(h2, 0);
    CHECK(tree.inspect({0})->posterior_g == g_before);
    CHECK(tree.inspect({0})->counts == std::vector<std::uint32_t>{0, 1});
    CHECK(tree.inspect({})->counts == std::vector<std::uint32_t>{1, 1});
}

TEST_CASE("depth zero reduces to the Dirichlet estimator at the root") {
    const auto cfg = make_config(3, 0, 0.5, 0.7);
    SuperposedTree tree(cfg, 1);
    const std::vector<Symbol> seq{2, 0, 2, 2, 1, 0};
    std::vector<std::uint32_t> counts(3, 0);
    const std::vector<double> beta(3, 0.7);
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const auto p = tree.predict(std::span(seq).first(t));
        for (Symbol a = 0; a < 3; ++a) CHECK(p[a] == doctest::Approx(kt_prob(counts, beta, a)).epsilon(1e-15));
        tree.absorb(std::span(seq).first(t), seq[t]);
        ++counts[seq[t]];
    }
}

TEST_CASE("properties over random histories") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t k = 2 + rng() % 3;
        const int d = static_cast<int>(rng() % 4);
        const auto cfg = random_config(k, d, rng);
        SuperposedTree tree(cfg, 1);
        std::vector<Symbol> seq;
        const std::size_t n = 1 + rng() % 60;
        for (std::size_t t = 0; t < n; ++t) {
            const auto p = tree.predict(seq);
            double sum = 0.0;
            for (double v : p) {
                CHECK(v > 0.0);
                CHECK(v < 1.0);
                sum += v;
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);

            const auto x = static_cast<Symbol>(rng() % k);
            const double q = tree.absorb(seq, x);
            CHECK(q == p[x]);
            seq.push_back(x);
            CHECK(tree.node_count() <= seq.size() * static_cast<std::size_t>(d + 1));
        }
    }
}

TEST_CASE("sequential predictions equal the brute-force model mixture") {
    std::mt19937_64 rng(23);
    const Alphabet bin(2);
    for (int d = 0; d <= 2; ++d) {
        for (int rep = 0; rep < 4; ++rep) {
            const auto cfg = random_config(2, d, rng);
            for (std::size_t n = 1; n <= 8; ++n) {
                for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
                    std::vector<Symbol> seq(n);
                    for (std::size_t i = 0; i < n; ++i) seq[i] = static_cast<Symbol>((bits >> i) & 1u);
                    const double exact = oracle::exact_model_mixture(seq, bin, cfg->g, cfg->beta, d, cfg->pad_symbol);
                    const double got = sequential_product(cfg, seq);
                    CHECK(std::abs(got - exact) / exact < 1e-9);
                }
            }
        }
    }

    SUBCASE("ternary alphabet") {
        const Alphabet tri(3);
        for (int d = 1; d <= 2; ++d) {
            const auto cfg = random_config(3, d, rng);
            for (int rep = 0; rep < 50; ++rep) {
                std::vector<Symbol> seq(1 + rng() % 10);
                for (auto& s : seq) s = static_cast<Symbol>(rng() % 3);
                const double exact = oracle::exact_model_mixture(seq, tri, cfg->g, cfg->beta, d, cfg->pad_symbol);
                CHECK(std::abs(sequential_product(cfg, seq) - exact) / exact < 1e-9);
            }
        }
    }
}
