#include "clines/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"

#include "clines/errors.hpp"
#include "clines/splitting.hpp"

namespace clines {

namespace {

constexpr double kFarFieldTol = 1e-6;

void check_range(std::span<const double> f, std::string_view name, double lo, double hi, double t, double tol) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] >= lo - tol && f[i] <= hi + tol)) {
            throw InvariantViolation(std::string(name) + " left its admissible range at t=" + std::to_string(t),
                                   range_violation_json(name, t, i, f[i]));
        }
    }
}

bool near_limit(double v) { return std::abs(v) <= kFarFieldTol || std::abs(v - 1.0) <= kFarFieldTol; }

void check_far_field(std::span<const double> f, std::string_view name) {
    if (!near_limit(f.front()) || !near_limit(f.back())) {
        throw InvalidParameter("initial " + std::string(name) +
                               " is not within 1e-6 of a limit state at the domain ends; widen the domain");
    }
}

template <class Model>
void record(const SplitIntegrator<Model>& integ, Trajectory& traj) {
    traj.times.push_back(integ.time());
    std::vector<Field1D> snap;
    for (std::size_t k = 0; k < Model::kFields; ++k) {
        snap.push_back({Model::kTags[k], integ.state()[k]});
        traj.front_positions[Model::kTags[k]].push_back(track_front(Model::kTags[k], integ.state()[k], integ.grid()));
    }
    traj.snapshots.push_back(std::move(snap));
}

template <class Model>
Trajectory run(Model model, const Grid1D& grid, const SimConfig& cfg, FieldSet<Model::kFields> init) {
    SplitIntegrator<Model> integ(std::move(model), grid, cfg, std::move(init));
    Trajectory traj;
    traj.grid = grid;
    const auto total = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.record_every / cfg.dt)));
    record(integ, traj);
    for (std::size_t k = 1; k <= total; ++k) {
        integ.step();
        if (k % stride == 0 || k == total) record(integ, traj);
    }
    return traj;
}

}  // namespace

std::string range_violation_json(std::string_view field, double t, std::size_t index, double value) {
    nlohmann::json j{{"field", field}, {"t", t}, {"index", index}, {"value", value}};
    return j.dump();
}

void ReducedModel::check(const FieldSet<1>& s, double t, double tol) const {
    check_range(s[0], "u", 0.0, 1.0, t, tol);
}

void PqdModel::check(const FieldSet<3>& s, double t, double tol) const {
    check_range(s[0], "p", 0.0, 1.0, t, tol);
    check_range(s[1], "q", 0.0, 1.0, t, tol);
    check_range(s[2], "D", -0.25, 0.25, t, tol);
}

void GameteModel::check(const FieldSet<4>& s, double t, double tol) const {
    static constexpr std::array<std::string_view, 4> names{"u", "v", "w", "z"};
    for (std::size_t k = 0; k < 4; ++k) check_range(s[k], names[k], 0.0, 1.0, t, tol);
}

const Field1D& Trajectory::field(std::size_t snapshot, Quantity tag) const {
    for (const auto& f : snapshots.at(snapshot)) {
        if (f.tag == tag) return f;
    }
    throw InvalidParameter("trajectory has no field '" + std::string(to_string(tag)) + "'");
}

std::vector<Quantity> Trajectory::tags() const {
    std::vector<Quantity> out;
    if (!snapshots.empty()) {
        for (const auto& f : snapshots.front()) out.push_back(f.tag);
    }
    return out;
}

void ReducedParams::validate() const {
    if (!(S > 0.0)) throw InvalidParameter("S must be positive");
    if (!(r > 0.0)) throw InvalidParameter("r must be positive");
    if (!(eps >= 0.0)) throw InvalidParameter("eps must be non-negative");
}

Trajectory simulate_pqd(const PqdFields& init, const FitnessParams& fp, const Grid1D& grid, const SimConfig& cfg) {
    fp.validate();
    if (cfg.check_far_field) {
        check_far_field(init.p, "p");
        check_far_field(init.q, "q");
    }
    return run(PqdModel{fp}, grid, cfg, FieldSet<3>{init.p, init.q, init.D});
}

Trajectory simulate_gametes(const GameteFields& init, const FitnessParams& fp, const Grid1D& grid,
                            const SimConfig& cfg) {
    fp.validate();
    if (cfg.check_far_field) {
        for (const auto* f : {&init.u, &init.v, &init.w, &init.z}) check_far_field(*f, "gamete frequency");
    }
    return run(GameteModel{fp}, grid, cfg, FieldSet<4>{init.u, init.v, init.w, init.z});
}

Trajectory simulate_reduced(std::span<const double> init, const ReducedParams& params, const Grid1D& grid,
                            const SimConfig& cfg) {
    params.validate();
    if (cfg.check_far_field) check_far_field(init, "u");
    ReducedModel model{{params.S, params.eps, params.r, params.coupling}};
    return run(model, grid, cfg, FieldSet<1>{std::vector<double>(init.begin(), init.end())});
}

double to_original_frame(double rescaled_speed, double sigma2) {
    return rescaled_speed * std::sqrt(sigma2) / std::sqrt(2.0);
}

Field1D qle_disequilibrium(std::span<const double> p, std::span<const double> q, const Grid1D& grid,
                           double sigma2, double r, QleMode mode, kernels::Exec exec) {
    if (p.size() != grid.n || q.size() != grid.n) throw InvalidParameter("fields must match the grid");
    if (!(r > 0.0) || !(sigma2 > 0.0)) throw InvalidParameter("QLE needs r > 0 and sigma2 > 0");
    const double dx = grid.dx();
    std::vector<double> source(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        source[i] = kernels::central_gradient_at(p, i, dx) * kernels::central_gradient_at(q, i, dx);
    }
    Field1D out{Quantity::D, std::vector<double>(grid.n)};
    if (mode == QleMode::kernel) {
        const double kappa = std::sqrt(2.0 * r / sigma2);
        if (exec == kernels::Exec::parallel) kernels::omp::exp_convolve(source, dx, kappa, out.values);
        else kernels::serial::exp_convolve(source, dx, kappa, out.values);
    } else {
        out.values = source;
    }
    for (double& d : out.values) d *= sigma2 / r;
    return out;
}

double front_position(std::span<const double> values, const Grid1D& grid, double level, Direction dir) {
    if (values.size() != grid.n) throw InvalidParameter("field does not match the grid");
    std::size_t down = 0, up = 0, where = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const bool falls = values[i] >= level && values[i + 1] < level;
        const bool rises = values[i] < level && values[i + 1] >= level;
        if (falls) ++down;
        if (rises) ++up;
        if ((dir == Direction::decreasing && falls) || (dir == Direction::increasing && rises)) where = i;
    }
    const std::size_t wanted = dir == Direction::decreasing ? down : up;
    if (wanted == 0 || down + up != 1) {
        nlohmann::json diag{{"crossings", down + up}, {"level", level}};
        throw NumericalFailure(wanted == 0 ? "field never crosses the tracking level"
                                           : "field crosses the tracking level " + std::to_string(down + up) +
                                                 " times",
                               diag.dump());
    }
    const double a = values[where], b = values[where + 1];
    return grid.x(where) + grid.dx() * (a - level) / (a - b);
}

double peak_position(std::span<const double> values, const Grid1D& grid) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (std::abs(values[i]) > std::abs(values[k])) k = i;
    }
    if (k == 0 || k + 1 == values.size()) return grid.x(k);
    const double fm = std::abs(values[k - 1]), f0 = std::abs(values[k]), fp = std::abs(values[k + 1]);
    const double denom = fm - 2.0 * f0 + fp;
    const double offset = denom != 0.0 ? 0.5 * (fm - fp) / denom : 0.0;
    return grid.x(k) + offset * grid.dx();
}

double track_front(Quantity tag, std::span<const double> values, const Grid1D& grid) {
    try {
        switch (tag) {
            case Quantity::D:
            case Quantity::v:
            case Quantity::w: return peak_position(values, grid);
            case Quantity::z: return front_position(values, grid, 0.5, Direction::increasing);
            default: return front_position(values, grid, 0.5, Direction::decreasing);
        }
    } catch (const NumericalFailure&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double fit_slope(std::span<const double> xs, std::span<const double> ys) {
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

SpeedEstimate instantaneous_speed(const Trajectory& traj, Quantity tag, double t_begin, double t_end) {
    const auto it = traj.front_positions.find(tag);
    if (it == traj.front_positions.end()) throw InvalidParameter("field is not tracked in this trajectory");
    SpeedEstimate est;
    std::vector<double> pos;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        if (t >= t_begin && t <= t_end && std::isfinite(it->second[k])) {
            est.times.push_back(t);
            pos.push_back(it->second[k]);
        }
    }
    est.samples = pos.size();
    if (est.samples < 3) throw InvalidParameter("need at least 3 front positions inside the speed window");
    const std::size_t m = pos.size();
    est.speeds.resize(m);
    est.speeds[0] = (pos[1] - pos[0]) / (est.times[1] - est.times[0]);
    est.speeds[m - 1] = (pos[m - 1] - pos[m - 2]) / (est.times[m - 1] - est.times[m - 2]);
    for (std::size_t k = 1; k + 1 < m; ++k) {
        est.speeds[k] = (pos[k + 1] - pos[k - 1]) / (est.times[k + 1] - est.times[k - 1]);
    }
    est.fitted = fit_slope(est.times, pos);
    return est;
}

std::vector<double> tanh_front(const Grid1D& grid, double k, double x0) {
    std::vector<double> u(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) u[i] = 0.5 - 0.5 * std::tanh(0.5 * k * (grid.x(i) - x0));
    return u;
}

}  // namespace clines
