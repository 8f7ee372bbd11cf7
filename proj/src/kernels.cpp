#include "clines/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace clines::kernels {

namespace {

using Index = std::ptrdiff_t;

Index isize(std::span<const double> s) { return static_cast<Index>(s.size()); }

double laplacian_at(std::span<const double> f, Index i, double inv_dx2) {
    const Index n = isize(f);
    if (i == 0) return 2.0 * (f[1] - f[0]) * inv_dx2;
    if (i == n - 1) return 2.0 * (f[n - 2] - f[n - 1]) * inv_dx2;
    return (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv_dx2;
}

std::vector<double> exp_weights(std::size_t n, double dx, double kappa) {
    std::vector<double> rho(n);
    double mass = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        rho[k] = std::exp(-kappa * static_cast<double>(k) * dx);
        mass += (k == 0 ? 1.0 : 2.0) * rho[k];
    }
    for (double& w : rho) w /= mass;
    return rho;
}

double convolve_at(std::span<const double> src, const std::vector<double>& rho, Index i) {
    const Index n = isize(src);
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) acc += rho[static_cast<std::size_t>(i > j ? i - j : j - i)] * src[j];
    return acc;
}

}  // namespace

namespace serial {

void reduced_reaction(std::span<const double> u, double dx, const ReducedCoeffs& c, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = reduced_source(u[i], central_gradient_at(u, i, dx), c);
}

void pqd_reaction(std::span<const double> p, std::span<const double> q, std::span<const double> D,
                  double dx, const FitnessParams& fp, std::span<double> dp, std::span<double> dq,
                  std::span<double> dD) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        pqd_source(p[i], q[i], D[i], central_gradient_at(p, i, dx), central_gradient_at(q, i, dx), fp, dp[i],
                   dq[i], dD[i]);
    }
}

void gamete_reaction(std::span<const double> u, std::span<const double> v, std::span<const double> w,
                     std::span<const double> z, const FitnessParams& fp, std::span<double> du,
                     std::span<double> dv, std::span<double> dw, std::span<double> dz) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        const GameteFreqs d = clines::gamete_reaction({u[i], v[i], w[i], z[i]}, fp);
        du[i] = d.u;
        dv[i] = d.v;
        dw[i] = d.w;
        dz[i] = d.z;
    }
}

void laplacian(std::span<const double> f, double dx, std::span<double> out) {
    const double inv_dx2 = 1.0 / (dx * dx);
    for (Index i = 0; i < isize(f); ++i) out[i] = laplacian_at(f, i, inv_dx2);
}

void axpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = y[i] + a * x[i];
}

void exp_convolve(std::span<const double> src, double dx, double kappa, std::span<double> out) {
    const auto rho = exp_weights(src.size(), dx, kappa);
    for (Index i = 0; i < isize(src); ++i) out[i] = convolve_at(src, rho, i);
}

}  // namespace serial

namespace omp {

void reduced_reaction(std::span<const double> u, double dx, const ReducedCoeffs& c, std::span<double> out) {
    const Index n = isize(u);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        out[i] = reduced_source(u[i], central_gradient_at(u, static_cast<std::size_t>(i), dx), c);
    }
}

void pqd_reaction(std::span<const double> p, std::span<const double> q, std::span<const double> D,
                  double dx, const FitnessParams& fp, std::span<double> dp, std::span<double> dq,
                  std::span<double> dD) {
    const Index n = isize(p);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        pqd_source(p[k], q[k], D[k], central_gradient_at(p, k, dx), central_gradient_at(q, k, dx), fp, dp[k],
                   dq[k], dD[k]);
    }
}

void gamete_reaction(std::span<const double> u, std::span<const double> v, std::span<const double> w,
                     std::span<const double> z, const FitnessParams& fp, std::span<double> du,
                     std::span<double> dv, std::span<double> dw, std::span<double> dz) {
    const Index n = isize(u);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        const GameteFreqs d = clines::gamete_reaction({u[i], v[i], w[i], z[i]}, fp);
        du[i] = d.u;
        dv[i] = d.v;
        dw[i] = d.w;
        dz[i] = d.z;
    }
}

void laplacian(std::span<const double> f, double dx, std::span<double> out) {
    const double inv_dx2 = 1.0 / (dx * dx);
    const Index n = isize(f);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) out[i] = laplacian_at(f, i, inv_dx2);
}

void axpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> out) {
    const Index n = isize(x);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) out[i] = y[i] + a * x[i];
}

void exp_convolve(std::span<const double> src, double dx, double kappa, std::span<double> out) {
    const auto rho = exp_weights(src.size(), dx, kappa);
    const Index n = isize(src);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) out[i] = convolve_at(src, rho, i);
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace clines::kernels
