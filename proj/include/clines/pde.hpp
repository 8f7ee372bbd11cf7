#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "clines/genetics.hpp"
#include "clines/grid.hpp"
#include "clines/kernels.hpp"
#include "clines/sim_config.hpp"

namespace clines {

/// Time history of a spatial simulation.
struct Trajectory {
    Grid1D grid;
    std::vector<double> times;
    std::vector<std::vector<Field1D>> snapshots;
    /// Front position per recorded time for every tracked field (NaN where undefined).
    std::map<Quantity, std::vector<double>> front_positions;

    const Field1D& field(std::size_t snapshot, Quantity tag) const;
    std::vector<Quantity> tags() const;
};

struct PqdFields {
    std::vector<double> p, q, D;
};

struct GameteFields {
    std::vector<double> u, v, w, z;
};

/// Parameters of the reduced equation u_t = u_xx + S f(u) + eps g(u) + (2/r)(S(2u-1)+eps) u_x^2
/// (rescaled space, unit diffusion).
struct ReducedParams {
    double S = 0.1;
    double eps = 0.0;
    double r = 0.1;
    bool coupling = true;

    void validate() const;
};

Trajectory simulate_pqd(const PqdFields& init, const FitnessParams& fp, const Grid1D& grid, const SimConfig& cfg);
Trajectory simulate_gametes(const GameteFields& init, const FitnessParams& fp, const Grid1D& grid,
                            const SimConfig& cfg);
Trajectory simulate_reduced(std::span<const double> init, const ReducedParams& params, const Grid1D& grid,
                            const SimConfig& cfg);

/// Speeds of the reduced equation live in rescaled space; multiply by sigma/sqrt(2) to
/// return to the original spatial scale.
double to_original_frame(double rescaled_speed, double sigma2);

enum class QleMode { local, kernel };

/// Quasi-linkage-equilibrium estimate of D from allele-frequency gradients:
/// local  -> (sigma2/r) p_x q_x
/// kernel -> (sigma2/r) (rho * p_x q_x), rho(x) = ½ k exp(-k|x|), k = sqrt(2r/sigma2).
Field1D qle_disequilibrium(std::span<const double> p, std::span<const double> q, const Grid1D& grid,
                           double sigma2, double r, QleMode mode,
                           kernels::Exec exec = kernels::Exec::serial);

enum class Direction { decreasing, increasing };

/// Abscissa where `values` crosses `level`, by linear interpolation between the
/// bracketing nodes. An exact step (1 up to node k, 0 after) yields x_k + dx/2.
/// Throws NumericalFailure if there is no crossing or more than one.
double front_position(std::span<const double> values, const Grid1D& grid, double level = 0.5,
                      Direction dir = Direction::decreasing);

/// Location of max |values| refined by a parabola through the three nodes around it.
double peak_position(std::span<const double> values, const Grid1D& grid);

/// Front tracker used for each quantity inside a Trajectory.
double track_front(Quantity tag, std::span<const double> values, const Grid1D& grid);

struct SpeedEstimate {
    std::vector<double> times;   ///< sample times inside the window
    std::vector<double> speeds;  ///< central-difference speeds at interior samples (first/last one-sided)
    double fitted = 0.0;         ///< least-squares slope of position against time
    std::size_t samples = 0;
};

/// Front speed of `tag` over recorded times t in [t_begin, t_end].
SpeedEstimate instantaneous_speed(const Trajectory& traj, Quantity tag, double t_begin, double t_end);

/// Least-squares slope of ys against xs.
double fit_slope(std::span<const double> xs, std::span<const double> ys);

/// ½ - ½ tanh(k (x - x0) / 2) sampled on the grid.
std::vector<double> tanh_front(const Grid1D& grid, double k, double x0 = 0.0);

}  // namespace clines
