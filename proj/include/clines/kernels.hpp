#pragma once

// Data-parallel inner loops of the integrators. Every kernel exists twice:
// `serial::` is the plain reference loop, `omp::` is the OpenMP version. Both
// evaluate the same expression per output index, so their results are
// bit-identical and the test suite compares them exactly.

#include <cstddef>
#include <span>

#include "clines/genetics.hpp"

namespace clines::kernels {

enum class Exec { serial, parallel };

/// Coefficients of u_t = u_xx + S f(u) + eps g(u) + (2/r)(S(2u-1)+eps) u_x^2.
struct ReducedCoeffs {
    double S = 0.1;
    double eps = 0.0;
    double r = 0.1;
    bool coupling = true;  // false drops the gradient term (single-cline bistable equation)
};

/// f(u) = u(2u-1)(1-u), the balanced bistable nonlinearity.
inline double bistable(double u) { return u * (2.0 * u - 1.0) * (1.0 - u); }
/// f'(u) = -6u^2 + 6u - 1.
inline double bistable_prime(double u) { return -6.0 * u * u + 6.0 * u - 1.0; }
/// g(u) = u(1-u).
inline double logistic(double u) { return u * (1.0 - u); }

inline double reduced_source(double u, double ux, const ReducedCoeffs& c) {
    double val = c.S * bistable(u) + c.eps * logistic(u);
    if (c.coupling) val += (2.0 / c.r) * (c.S * (2.0 * u - 1.0) + c.eps) * ux * ux;
    return val;
}

/// Reaction part of the (p,q,D) system, including the sigma^2 p_x q_x source of D.
inline void pqd_source(double p, double q, double D, double px, double qx, const FitnessParams& fp,
                       double& dp, double& dq, double& dD) {
    const double selA = fp.SA * (2.0 * p - 1.0) + fp.sA;
    const double selB = fp.SB * (2.0 * q - 1.0) + fp.sB;
    dp = selA * p * (1.0 - p) + selB * D;
    dq = selB * q * (1.0 - q) + selA * D;
    dD = fp.sigma2 * px * qx - (fp.r + (2.0 * p - 1.0) * selA + (2.0 * q - 1.0) * selB) * D;
}

/// Central difference at interior nodes, zero at the two end nodes.
inline double central_gradient_at(std::span<const double> f, std::size_t i, double dx) {
    if (i == 0 || i + 1 == f.size()) return 0.0;
    return (f[i + 1] - f[i - 1]) / (2.0 * dx);
}

namespace serial {
void reduced_reaction(std::span<const double> u, double dx, const ReducedCoeffs& c, std::span<double> out);
void pqd_reaction(std::span<const double> p, std::span<const double> q, std::span<const double> D,
                  double dx, const FitnessParams& fp, std::span<double> dp, std::span<double> dq,
                  std::span<double> dD);
void gamete_reaction(std::span<const double> u, std::span<const double> v, std::span<const double> w,
                     std::span<const double> z, const FitnessParams& fp, std::span<double> du,
                     std::span<double> dv, std::span<double> dw, std::span<double> dz);
/// Second difference with reflecting (mirror ghost node) ends.
void laplacian(std::span<const double> f, double dx, std::span<double> out);
/// out = y + a * x
void axpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> out);
/// out_i = sum_j rho(x_i - x_j) src_j with rho ∝ exp(-kappa |x|) normalized to unit mass on the grid.
void exp_convolve(std::span<const double> src, double dx, double kappa, std::span<double> out);
}  // namespace serial

namespace omp {
void reduced_reaction(std::span<const double> u, double dx, const ReducedCoeffs& c, std::span<double> out);
void pqd_reaction(std::span<const double> p, std::span<const double> q, std::span<const double> D,
                  double dx, const FitnessParams& fp, std::span<double> dp, std::span<double> dq,
                  std::span<double> dD);
void gamete_reaction(std::span<const double> u, std::span<const double> v, std::span<const double> w,
                     std::span<const double> z, const FitnessParams& fp, std::span<double> du,
                     std::span<double> dv, std::span<double> dw, std::span<double> dz);
void laplacian(std::span<const double> f, double dx, std::span<double> out);
void axpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> out);
void exp_convolve(std::span<const double> src, double dx, double kappa, std::span<double> out);
}  // namespace omp

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace clines::kernels
