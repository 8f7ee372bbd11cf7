#pragma once

// Linearization of the reduced equation about the standing wave u0:
//   L h = h'' + (4S/r)(2u0-1) u0' h' + S (f'(u0) + (4/r) u0'^2) h,
// its symmetric conjugate M k = k'' + c(x) k with c = (2S^2/r)(2u0-1) f(u0) + S f'(u0),
// related by h = exp(-(2S/r)(u0^2-u0)) k, and the adjoint kernel
//   psi = u0' exp((4S/r)(u0^2-u0)).

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "clines/standing.hpp"

namespace clines {

enum class OperatorKind { L, M, L_adjoint };
std::string_view to_string(OperatorKind k);

/// Second-order central discretization on the interior nodes of a profile grid with
/// homogeneous Dirichlet ends. Row i reads lower[i] h[i-1] + diag[i] h[i] + upper[i] h[i+1].
struct DiscretizedOperator {
    OperatorKind kind = OperatorKind::L;
    std::vector<double> x;
    std::vector<double> lower, diag, upper;

    std::size_t size() const { return diag.size(); }
    std::vector<double> apply(std::span<const double> h) const;
    DiscretizedOperator transpose() const;
    /// max_i |upper[i] - lower[i+1]|
    double max_asymmetry() const;
};

/// Throw InvalidParameter unless dx <= 0.1/sqrt(S).
DiscretizedOperator assemble_L(const WaveProfile& u0, double S, double r);
DiscretizedOperator assemble_M(const WaveProfile& u0, double S, double r);

struct Spectrum {
    std::vector<double> eigenvalues;                ///< descending
    std::vector<std::vector<double>> eigenvectors;  ///< unit 2-norm, largest component positive
};

/// Top-k eigenpairs of a tridiagonal operator whose off-diagonal products are positive
/// (diagonal similarity to a symmetric matrix, Sturm bisection, inverse iteration).
Spectrum spectrum(const DiscretizedOperator& op, std::size_t k);

/// |<a, b>| / (|a| |b|)
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// u0' restricted to the interior nodes.
std::vector<double> translation_mode(const WaveProfile& u0);
/// psi on the interior nodes; `weighted` = false gives plain u0' (negative control).
std::vector<double> adjoint_kernel(const WaveProfile& u0, double S, double r, bool weighted = true);

/// sup |L^T psi| / sup |psi| for the discrete transpose of L, end rows excluded.
double adjoint_kernel_residual(const WaveProfile& u0, double S, double r, bool weighted = true);

/// <psi, g(u0) + (2/r) u0'^2 + c1 u0'> / <psi, -u0'>; vanishes at c1 = c1_exact(S, r).
double solvability_residual(const WaveProfile& u0, double S, double r, double c1);

/// Second solution of L v = 0: v0 = u0' ∫0^x u0'^-2 exp(-(4S/r)(u0^2-u0)) on the full profile grid.
std::vector<double> second_kernel_solution(const WaveProfile& u0, double S, double r);
/// Least-squares slope of log|v0| over x in [x_max/2, x_max]; expected +sqrt(S).
double second_kernel_growth_rate(const WaveProfile& u0, double S, double r);

struct RelaxationConfig {
    double dt = 0.05;
    double check_every = 5.0;   ///< spacing of convergence checks
    double t_max = 3000.0;
    double stall_tol = 1e-9;    ///< displacement change per check interval
    double field_tol = 1e-8;    ///< sup-norm field change per check interval
};

struct RelaxationResult {
    double displacement = 0.0;         ///< final front offset relative to the unperturbed run
    double shift_per_amp = 0.0;        ///< displacement / eps_amp
    double raw_integral = 0.0;         ///< ∫ h psi dx
    double normalized_integral = 0.0;  ///< ∫ h psi dx / ∫ u0' psi dx
    double predicted_shift_per_amp = 0.0;  ///< -normalized_integral
    double t_final = 0.0;
    double last_change = 0.0;
    bool converged = false;
};

/// Evolves u0 + eps_amp h under the reduced equation at eps = 0 alongside an unperturbed
/// reference run on the profile grid (no-flux ends) until the front offset and the field
/// stop changing; reports the offset and the projection predicted from psi.
RelaxationResult relaxation_shift(const WaveProfile& u0, double S, double r, const std::function<double(double)>& h,
                                  double eps_amp, const RelaxationConfig& cfg = {});

}  // namespace clines
