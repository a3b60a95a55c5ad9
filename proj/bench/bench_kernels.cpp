// bench_kernels.cpp -- throughput comparison of the OpenMP kernels against
// the serial reference implementations.
//
//   bfsurf_bench [N] [repeats]     (defaults: 256 40)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bfsurf/ops.hpp"
#include "bfsurf/ref.hpp"
#include "bfsurf/spectral.hpp"

using namespace bfsurf;

namespace {

volatile double g_sink = 0.0;

template <class Fn>
double time_best_of(int repeats, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        g_sink = g_sink + fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-22s %10.3f ms %10.3f ms   speedup %.2fx\n", name, serial * 1e3,
                parallel * 1e3, serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 256;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 40;
    const GridSpec g(n, 8.0);

    std::mt19937_64 eng(7u);
    std::uniform_real_distribution<double> dist(0.1, 0.9);
    CellField phi(g), rho(g);
    for (std::size_t k = 0; k < phi.size(); ++k) {
        phi.data()[k] = dist(eng);
        rho.data()[k] = dist(eng);
    }
    const EdgeFieldPair w = avg_to_edges(rho);
    const ModelParams p{0.05, 0.001, 0.02, 0.05, 0.05, 0.001, 0.01, 1e-4};

#ifdef _OPENMP
    std::printf("grid %dx%d, %d repeats, %d OpenMP threads\n\n", n, n, repeats,
                omp_get_max_threads());
#else
    std::printf("grid %dx%d, %d repeats, OpenMP disabled\n\n", n, n, repeats);
#endif
    std::printf("%-22s %13s %13s\n", "kernel", "serial", "parallel");

    report("laplacian",
           time_best_of(repeats, [&] { return ref::laplacian(phi)(0, 0); }),
           time_best_of(repeats, [&] { return laplacian(phi)(0, 0); }));
    report("grad+div",
           time_best_of(repeats, [&] { return ref::div(ref::grad(phi))(0, 0); }),
           time_best_of(repeats, [&] { return div(grad(phi))(0, 0); }));
    report("weighted_div_grad",
           time_best_of(repeats, [&] { return ref::weighted_div_grad(w, phi)(0, 0); }),
           time_best_of(repeats, [&] { return weighted_div_grad(w, phi)(0, 0); }));
    report("avg_grad_mag",
           time_best_of(repeats, [&] { return ref::avg_grad_mag(phi, p.delta)(0, 0); }),
           time_best_of(repeats, [&] { return avg_grad_mag(phi, p.delta)(0, 0); }));
    report("inner",
           time_best_of(repeats, [&] { return ref::inner(phi, rho); }),
           time_best_of(repeats, [&] { return inner(phi, rho); }));
    report("energy",
           time_best_of(repeats, [&] { return ref::energy_total(phi, rho, p); }),
           time_best_of(repeats, [&] {
               return energy(State(phi, rho), p).total;
           }));

    SpectralPoisson poisson(g);
    const CellField v = sub_mean(phi);
    const double t_solve = time_best_of(repeats, [&] {
        return poisson.inv_neg_laplacian(v)(0, 0);
    });
    std::printf("%-22s %13s %10.3f ms\n", "inv_neg_laplacian", "-", t_solve * 1e3);

    return g_sink == 12345.0 ? 1 : 0;
}
