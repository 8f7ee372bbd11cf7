#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "clines/grid.hpp"
#include "clines/pde.hpp"
#include "clines/standing.hpp"

namespace clines {

/// First-order speed coefficient c1 in c_eps = c1 eps + o(eps), rescaled frame:
///   c1 = ∫0^1 (r/4S)(1 - e^{-(4S/r)(u-u^2)}) du / ∫0^1 sqrt(P(u)) e^{-(4S/r)(u-u^2)} du
/// by adaptive Gauss-Kronrod quadrature with relative tolerance `quad_tol`.
double c1_exact(double S, double r, double quad_tol = 1e-10);

/// (1/sqrt S)(1 + (4/15)(S/r) + (2/45)(S/r)^2) truncated after `order` (0, 1 or 2) terms.
double c1_series(double S, double r, int order = 2);

/// First-order truncation c1_series(S, r, 1).
double c1_star(double S, double r);

/// Speed per unit eps from the standing profile in x-space:
///   -∫ (g(u0) + (2/r) u0'^2) u0' e^{(4S/r)(u0^2-u0)} dx / ∫ u0'^2 e^{(4S/r)(u0^2-u0)} dx,
/// trapezoid rule on the profile grid plus exponential tail corrections.
/// Throws InvalidParameter if the tails carry more than 1e-8 of either integral.
double c_eps_from_profile(const WaveProfile& u0, double S, double r);

/// Bistable single-cline speed s/sqrt(S) (rescaled frame). Requires 0 < s < S.
double single_cline_speed(double s, double S);
/// Exact single-cline traveling wave ½ - ½ tanh((sqrt S / 2)(x - c t)), c = s/sqrt S.
double single_cline_profile(double x, double t, double s, double S);
/// No-recombination speed 2s/sqrt(2S). Requires 0 < s < S.
double zero_recombination_speed(double s, double S);

struct TravelingWave {
    double c = 0.0;
    WaveProfile profile;          ///< method = bvp; not re-centered (the phase condition fixes the shift)
    double residual = 0.0;        ///< sup norm of the discrete equation at the last iterate
    double phase_defect = 0.0;    ///< ∫ (u - u0) u0' dx
    std::size_t iterations = 0;   ///< Newton iterations summed over the continuation path
    std::vector<double> eps_path;
};

/// Newton solve of u'' + c u' + S f(u) + eps g(u) + (2/r)(S(2u-1)+eps) u'^2 = 0 on `grid`
/// with u = 1 / 0 pinned at the ends and the phase condition ∫ (u - u0) u0' dx = 0 closing
/// the system for c. Continues geometrically in eps from the standing wave.
/// Throws InvalidParameter if eps > S/10, NumericalFailure if Newton diverges.
TravelingWave solve_traveling_bvp(double S, double r, double eps, const Grid1D& grid, double newton_tol = 1e-11);

enum class Frame { rescaled, original };
std::string_view to_string(Frame f);

/// One parameter tuple of a theory-vs-simulation comparison (original model: s = sA = sB, S = SA = SB).
struct SweepPoint {
    double S = 0.1;
    double r = 0.5;
    double s = 0.01;
    double sigma2 = 2.0;
};

struct CompareSettings {
    double dx = 0.2;            ///< original-frame spacing
    double dt = 0.05;
    double t_end = 800.0;
    double transient = 100.0;   ///< speed fit discards t < transient
    double record_every = 10.0;
    int threads = 0;            ///< 0 = OpenMP default
};

struct SpeedReport {
    SweepPoint params;
    double c1_exact = 0.0;
    double c1_series = 0.0;
    double c1_star = 0.0;
    double predicted_star = 0.0;   ///< s c1* in `frame`
    double predicted_exact = 0.0;  ///< s c1 in `frame`
    double measured_speed = 0.0;   ///< fitted front speed of p in `frame`
    Frame frame = Frame::original;
    double relative_gap = 0.0;     ///< (measured - predicted_star) / predicted_star; NaN when s = 0
};

/// Runs the full (p, q, D) system from stacked clines for every tuple and reports the
/// measured front speed against s c1* and s c1, all in the original frame.
/// Tuples run concurrently; the output order matches the input order.
std::vector<SpeedReport> compare_speeds(std::span<const SweepPoint> sweep, const CompareSettings& settings);

struct ReducedRunSettings {
    double dx = 0.1;
    double dt = 0.05;
    double t_end = 400.0;
    double transient = 50.0;
    double record_every = 5.0;
    double half_width = 0.0;  ///< 0 picks 40/sqrt(S) plus the expected travel
};

/// Reduced-equation run from the tanh front ½ - ½ tanh(sqrt(S) x / 2) on a domain sized for the horizon.
Trajectory simulate_reduced_front(const ReducedParams& params, const ReducedRunSettings& settings);

/// Front speed of the reduced equation started from the tanh front (rescaled frame).
SpeedEstimate measure_reduced_speed(const ReducedParams& params, const ReducedRunSettings& settings);

}  // namespace clines
