#pragma once

// Standing wave u0 of u'' + S f(u) + (2/r) S (2u-1) u'^2 = 0, u(-inf)=1, u(+inf)=0,
// normalized by u0(0) = 1/2. Two independent constructions are provided: quadrature
// of the closed-form first integral u'^2 = P(u), and shooting along the unstable
// manifold of the saddle (1, 0) in the phase plane.

#include <cstddef>
#include <string_view>
#include <vector>

#include "clines/grid.hpp"

namespace clines {

enum class ProfileMethod { shooting, quadrature, bvp };
std::string_view to_string(ProfileMethod m);

/// Monotone front sampled on a uniform grid centered on x = 0.
struct WaveProfile {
    std::vector<double> x;
    std::vector<double> u;
    std::vector<double> du;
    ProfileMethod method = ProfileMethod::quadrature;

    std::size_t size() const { return x.size(); }
    double dx() const { return x[1] - x[0]; }
    double x_max() const { return x.back(); }
    /// Index of the node at x = 0.
    std::size_t center_index() const;
    Grid1D grid() const { return Grid1D{x.front(), x.back(), x.size()}; }

    /// Cubic Hermite interpolation from (u, du); exponential tails beyond the grid.
    double value_at(double xq) const;
    double slope_at(double xq) const;
};

/// u0'^2 as a function of u0:
/// P(u) = (r^2/8S) exp((4S/r)(u-u^2)) - (r/2)(u-u^2) - r^2/(8S),
/// evaluated as (r^2/8S)(expm1(y) - y) with y = (4S/r)(u-u^2) to avoid cancellation.
double first_integral(double u, double S, double r);

/// Integrates u' = -sqrt(P(u)) forward and backward from u(0) = 1/2 with adaptive
/// Dormand-Prince steps onto the grid x = -x_max .. x_max (spacing dx). Below
/// u = 1e-10 (or above 1 - 1e-10) the profile continues as an exponential tail
/// matched in value and slope.
WaveProfile profile_from_quadrature(double S, double r, double x_max, double dx);

struct ShootingResult {
    WaveProfile profile;
    double beta = 0.0;             ///< |u0'(0)|: the orbit meets x = 1/2 at (1/2, -beta)
    double crossing_time = 0.0;    ///< time from the manifold offset to the crossing
    bool condition_violated = false;  ///< S >= 4r (outside the regime covered by the barrier argument)
};

/// Phase-plane shooting from (1 - delta, -sqrt(S) delta), delta = 1e-8, until x = 1/2;
/// recentered so the crossing sits at the origin, right half completed by u(-x) = 1 - u(x).
/// Throws NumericalFailure if y drops below -10 sqrt(S) before the crossing.
ShootingResult profile_from_shooting(double S, double r, double x_max, double dx, double tol = 1e-12);

enum class Tail { right, left };

/// Least-squares slope of log u (right) or log(1-u) (left) over the outer quarter of the domain.
/// Expected -sqrt(S) (right) and +sqrt(S) (left). Throws unless the tail is below 1e-3 at the edge.
double decay_rate(const WaveProfile& profile, Tail tail = Tail::right);

struct ProfileDiagnostics {
    double symmetry_defect = 0.0;       ///< max |u(-x) + u(x) - 1|
    double slope_law_defect = 0.0;      ///< max |u'^2 - P(u)|
    double ode_residual = 0.0;          ///< sup |u'' + S f(u) + (2/r) S (2u-1) u'^2|, 4th-order u''
    double normalization_defect = 0.0;  ///< |u(0) - 1/2|
    bool monotone = true;               ///< u non-increasing with u' < 0 everywhere
};

ProfileDiagnostics diagnose(const WaveProfile& profile, double S, double r);

}  // namespace clines
