// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "clines/grid.hpp"
#include "clines/kernels.hpp"
#include "clines/pde.hpp"

using namespace clines;

namespace {

struct Fields {
    Grid1D grid;
    std::vector<double> p, q, D, u, v, w, z;
    std::vector<double> o1, o2, o3, o4;

    explicit Fields(std::size_t n) : grid{-200.0, 200.0, n} {
        p = tanh_front(grid, 0.3, -5.0);
        q = tanh_front(grid, 0.3, 5.0);
        D.assign(n, 0.0);
        u.resize(n), v.resize(n), w.resize(n), z.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            D[i] = 0.05 * std::exp(-grid.x(i) * grid.x(i) / 50.0);
            u[i] = p[i] * q[i] + D[i];
            v[i] = p[i] - u[i];
            w[i] = q[i] - u[i];
            z[i] = 1.0 - u[i] - v[i] - w[i];
        }
        o1.resize(n), o2.resize(n), o3.resize(n), o4.resize(n);
    }
};

const FitnessParams kFp{0.01, 0.01, 0.1, 0.1, 0.1, 2.0};

template <bool Parallel>
void BM_laplacian(benchmark::State& st) {
    Fields f(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Parallel) kernels::omp::laplacian(f.p, f.grid.dx(), f.o1);
        else kernels::serial::laplacian(f.p, f.grid.dx(), f.o1);
        benchmark::DoNotOptimize(f.o1.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_reduced_reaction(benchmark::State& st) {
    Fields f(static_cast<std::size_t>(st.range(0)));
    const kernels::ReducedCoeffs c{0.1, 0.01, 0.1, true};
    for (auto _ : st) {
        if constexpr (Parallel) kernels::omp::reduced_reaction(f.p, f.grid.dx(), c, f.o1);
        else kernels::serial::reduced_reaction(f.p, f.grid.dx(), c, f.o1);
        benchmark::DoNotOptimize(f.o1.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_pqd_reaction(benchmark::State& st) {
    Fields f(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Parallel) kernels::omp::pqd_reaction(f.p, f.q, f.D, f.grid.dx(), kFp, f.o1, f.o2, f.o3);
        else kernels::serial::pqd_reaction(f.p, f.q, f.D, f.grid.dx(), kFp, f.o1, f.o2, f.o3);
        benchmark::DoNotOptimize(f.o1.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_gamete_reaction(benchmark::State& st) {
    Fields f(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Parallel) kernels::omp::gamete_reaction(f.u, f.v, f.w, f.z, kFp, f.o1, f.o2, f.o3, f.o4);
        else kernels::serial::gamete_reaction(f.u, f.v, f.w, f.z, kFp, f.o1, f.o2, f.o3, f.o4);
        benchmark::DoNotOptimize(f.o1.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_exp_convolve(benchmark::State& st) {
    Fields f(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Parallel) kernels::omp::exp_convolve(f.p, f.grid.dx(), 2.0, f.o1);
        else kernels::serial::exp_convolve(f.p, f.grid.dx(), 2.0, f.o1);
        benchmark::DoNotOptimize(f.o1.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

#define CLINES_PAIR(fn)                                                                       \
    BENCHMARK(fn<false>)->Name(#fn "/serial")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);   \
    BENCHMARK(fn<true>)->Name(#fn "/omp")->RangeMultiplier(8)->Range(1 << 10, 1 << 19)

CLINES_PAIR(BM_laplacian);
CLINES_PAIR(BM_reduced_reaction);
CLINES_PAIR(BM_pqd_reaction);
CLINES_PAIR(BM_gamete_reaction);
CLINES_PAIR(BM_exp_convolve);

BENCHMARK_MAIN();
