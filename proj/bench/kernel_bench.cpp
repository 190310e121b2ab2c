// Serial vs OpenMP switcher kernels: wall-clock per sequence length, plus a
// check that both produce bit-identical coding probabilities.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ctsw/experiments.hpp"
#include "ctsw/switcher.hpp"

namespace {

double run(ctsw::Kernel kernel, const std::vector<ctsw::Symbol>& seq, std::vector<double>& probs) {
    ctsw::SwitcherConfig cfg;
    cfg.predictor.depth = 2;
    cfg.alpha = 0.01;
    cfg.kernel = kernel;
    ctsw::Switcher model(cfg);
    probs.clear();
    const auto start = std::chrono::steady_clock::now();
    for (ctsw::Symbol x : seq) probs.push_back(model.advance(x));
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> sizes{500, 1000, 2000, 4000};
    if (argc > 1) {
        sizes.clear();
        for (int i = 1; i < argc; ++i) sizes.push_back(std::strtoul(argv[i], nullptr, 10));
    }
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("threads=%d\n%8s %12s %12s %8s %s\n", threads, "N", "serial_s", "parallel_s", "speedup", "identical");
    bool all_identical = true;
    for (std::size_t n : sizes) {
        const auto seq = ctsw::uniform_binary_sequence(n, 7);
        std::vector<double> serial_probs, parallel_probs;
        const double ts = run(ctsw::Kernel::serial, seq, serial_probs);
        const double tp = run(ctsw::Kernel::parallel, seq, parallel_probs);
        const bool identical = serial_probs == parallel_probs;
        all_identical = all_identical && identical;
        std::printf("%8zu %12.4f %12.4f %8.2f %s\n", n, ts, tp, ts / tp, identical ? "yes" : "NO");
    }
    return all_identical ? 0 : 1;
}
