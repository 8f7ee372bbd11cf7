#include "clines/speed.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include <omp.h>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include "json.hpp"

#include "clines/errors.hpp"
#include "clines/kernels.hpp"

namespace clines {

namespace {

constexpr double kTailWeightTol = 1e-8;
constexpr std::size_t kMaxNewton = 40;

void require_positive(double S, double r) {
    if (!(S > 0.0)) throw InvalidParameter("S must be positive");
    if (!(r > 0.0)) throw InvalidParameter("r must be positive");
}

void require_weak_selection(double s, double S) {
    if (!(S > 0.0)) throw InvalidParameter("S must be positive");
    if (!(s > 0.0) || !(s < S)) throw InvalidParameter("need 0 < s < S");
}

// Trapezoid sum plus geometric tail extrapolation beyond both ends.
struct TailedIntegral {
    double value = 0.0;
    double tails = 0.0;
};

double tail_beyond(double inner, double edge, double h) {
    if (!(std::abs(edge) > 0.0) || !(std::abs(inner) > std::abs(edge)) || inner * edge <= 0.0) return 0.0;
    const double rate = std::log(inner / edge) / h;
    return edge / rate;
}

TailedIntegral integrate_tailed(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < n; ++i) sum += f[i];
    sum *= h;
    const double tails = tail_beyond(f[1], f[0], h) + tail_beyond(f[n - 2], f[n - 1], h);
    return {sum + tails, tails};
}

}  // namespace

std::string_view to_string(Frame f) { return f == Frame::rescaled ? "rescaled" : "original"; }

double c1_exact(double S, double r, double quad_tol) {
    require_positive(S, r);
    const double k = 4.0 * S / r;
    auto num = [&](double u) { return r / (4.0 * S) * -std::expm1(-k * u * (1.0 - u)); };
    auto den = [&](double u) {
        return std::sqrt(std::max(first_integral(u, S, r), 0.0)) * std::exp(-k * u * (1.0 - u));
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err_n = 0.0, err_d = 0.0;
    const double in = GK::integrate(num, 0.0, 1.0, 20, quad_tol, &err_n);
    const double id = GK::integrate(den, 0.0, 1.0, 20, quad_tol, &err_d);
    if (!(err_n <= 10.0 * quad_tol * std::abs(in)) || !(err_d <= 10.0 * quad_tol * std::abs(id))) {
        nlohmann::json diag = {{"S", S}, {"r", r}, {"error_numerator", err_n}, {"error_denominator", err_d}};
        throw NumericalFailure("c1 quadrature did not reach the requested tolerance", diag.dump());
    }
    return in / id;
}

double c1_series(double S, double r, int order) {
    require_positive(S, r);
    if (order < 0 || order > 2) throw InvalidParameter("series order must be 0, 1 or 2");
    const double q = S / r;
    double bracket = 1.0;
    if (order >= 1) bracket += 4.0 / 15.0 * q;
    if (order >= 2) bracket += 2.0 / 45.0 * q * q;
    return bracket / std::sqrt(S);
}

double c1_star(double S, double r) { return c1_series(S, r, 1); }

double c_eps_from_profile(const WaveProfile& u0, double S, double r) {
    require_positive(S, r);
    const std::size_t n = u0.size();
    if (n < 5) throw InvalidParameter("profile too short");
    const double k = 4.0 * S / r;
    std::vector<double> num(n), den(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = u0.u[i], du = u0.du[i];
        const double weight = std::exp(k * (u * u - u));
        num[i] = -(kernels::logistic(u) + 2.0 / r * du * du) * du * weight;
        den[i] = du * du * weight;
    }
    const auto in = integrate_tailed(num, u0.dx());
    const auto id = integrate_tailed(den, u0.dx());
    if (std::abs(in.tails) > kTailWeightTol * std::abs(in.value) ||
        std::abs(id.tails) > kTailWeightTol * std::abs(id.value)) {
        throw InvalidParameter("profile too short: tails carry more than 1e-8 of the speed integrals");
    }
    return in.value / id.value;
}

double single_cline_speed(double s, double S) {
    require_weak_selection(s, S);
    return s / std::sqrt(S);
}

double single_cline_profile(double x, double t, double s, double S) {
    const double c = single_cline_speed(s, S);
    return 0.5 - 0.5 * std::tanh(0.5 * std::sqrt(S) * (x - c * t));
}

double zero_recombination_speed(double s, double S) {
    require_weak_selection(s, S);
    return 2.0 * s / std::sqrt(2.0 * S);
}

namespace {

struct BvpState {
    std::vector<double> U;  // full grid, ends pinned
    double c = 0.0;
};

struct BvpProblem {
    double S, r, eps, h;
    std::vector<double> u0, du0, phase_w;

    double source(double u, double g) const {
        return S * kernels::bistable(u) + eps * kernels::logistic(u) + 2.0 / r * (S * (2.0 * u - 1.0) + eps) * g * g;
    }

    std::vector<double> residual(const BvpState& st, double& phase) const {
        const std::size_t n = st.U.size();
        std::vector<double> F(n - 2);
        const double ih2 = 1.0 / (h * h);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double g = (st.U[i + 1] - st.U[i - 1]) / (2.0 * h);
            F[i - 1] = (st.U[i + 1] - 2.0 * st.U[i] + st.U[i - 1]) * ih2 + st.c * g + source(st.U[i], g);
        }
        phase = 0.0;
        for (std::size_t i = 0; i < n; ++i) phase += phase_w[i] * (st.U[i] - u0[i]) * du0[i];
        return F;
    }

    Eigen::SparseMatrix<double> jacobian(const BvpState& st) const {
        const std::size_t n = st.U.size();
        const auto m = static_cast<Eigen::Index>(n - 2);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(5 * n);
        const double ih2 = 1.0 / (h * h);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const auto row = static_cast<Eigen::Index>(i - 1);
            const double u = st.U[i];
            const double g = (st.U[i + 1] - st.U[i - 1]) / (2.0 * h);
            const double a = 2.0 / r * (S * (2.0 * u - 1.0) + eps);
            const double dg = (st.c + 2.0 * a * g) / (2.0 * h);
            if (i > 1) trip.emplace_back(row, row - 1, ih2 - dg);
            if (i + 2 < n) trip.emplace_back(row, row + 1, ih2 + dg);
            const double diag = -2.0 * ih2 + S * kernels::bistable_prime(u) + eps * (1.0 - 2.0 * u) +
                                4.0 * S / r * g * g;
            trip.emplace_back(row, row, diag);
            trip.emplace_back(row, m, g);
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            trip.emplace_back(m, static_cast<Eigen::Index>(i - 1), phase_w[i] * du0[i]);
        }
        Eigen::SparseMatrix<double> J(m + 1, m + 1);
        J.setFromTriplets(trip.begin(), trip.end());
        return J;
    }
};

double sup_norm(const std::vector<double>& v, double extra) {
    double m = std::abs(extra);
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Newton on (U_interior, c); returns the final residual and adds the iteration count.
double newton(const BvpProblem& prob, BvpState& st, double tol, std::size_t& iters) {
    const std::size_t n = st.U.size();
    double phase = 0.0;
    auto F = prob.residual(st, phase);
    double res = sup_norm(F, phase);
    const double start = res;
    for (std::size_t it = 0; it < kMaxNewton; ++it) {
        if (res < tol) return res;
        const auto J = prob.jacobian(st);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) {
            throw NumericalFailure("singular Jacobian in traveling-wave Newton solve",
                                   nlohmann::json{{"eps", prob.eps}, {"iteration", it}}.dump());
        }
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n - 1));
        for (std::size_t i = 0; i + 2 < n; ++i) rhs[static_cast<Eigen::Index>(i)] = -F[i];
        rhs[static_cast<Eigen::Index>(n - 2)] = -phase;
        const Eigen::VectorXd delta = lu.solve(rhs);
        for (std::size_t i = 1; i + 1 < n; ++i) st.U[i] += delta[static_cast<Eigen::Index>(i - 1)];
        st.c += delta[static_cast<Eigen::Index>(n - 2)];
        ++iters;
        F = prob.residual(st, phase);
        res = sup_norm(F, phase);
        if (!std::isfinite(res) || res > 1e6 * std::max(start, 1.0)) break;
    }
    if (res < tol) return res;
    throw NumericalFailure("traveling-wave Newton solve did not converge",
                           nlohmann::json{{"eps", prob.eps}, {"residual", res}, {"tolerance", tol}}.dump());
}

}  // namespace

TravelingWave solve_traveling_bvp(double S, double r, double eps, const Grid1D& grid, double newton_tol) {
    require_positive(S, r);
    grid.validate();
    if (!(eps >= 0.0)) throw InvalidParameter("eps must be non-negative");
    if (eps > 0.1 * S) throw InvalidParameter("eps outside the weak-selection regime (eps > S/10)");
    const std::size_t n = grid.n;
    const double h = grid.dx();
    const double reach = std::max(std::abs(grid.x_min), std::abs(grid.x_max));
    const auto standing = profile_from_quadrature(S, r, reach + h, h);

    BvpProblem prob{S, r, 0.0, h, {}, {}, {}};
    prob.u0.resize(n);
    prob.du0.resize(n);
    prob.phase_w.assign(n, h);
    prob.phase_w.front() = prob.phase_w.back() = 0.5 * h;
    for (std::size_t i = 0; i < n; ++i) {
        prob.u0[i] = standing.value_at(grid.x(i));
        prob.du0[i] = standing.slope_at(grid.x(i));
    }

    TravelingWave out;
    std::vector<double> path{0.0};
    if (eps > 0.0) {
        const double floor = 1e-4 * S;
        int rungs = eps > floor ? static_cast<int>(std::ceil(std::log(eps / floor) / std::log(4.0))) : 0;
        for (int j = rungs; j >= 0; --j) path.push_back(eps * std::pow(0.25, j));
    }

    BvpState st;
    st.U = prob.u0;
    st.U.front() = 1.0;
    st.U.back() = 0.0;
    double prev_eps = 0.0;
    for (double e : path) {
        st.c = prev_eps > 0.0 ? st.c * e / prev_eps : e * c1_series(S, r, 2);
        prob.eps = e;
        out.residual = newton(prob, st, newton_tol, out.iterations);
        prev_eps = e;
    }
    out.eps_path = path;
    out.c = st.c;
    double phase = 0.0;
    prob.residual(st, phase);
    out.phase_defect = phase;

    WaveProfile& prof = out.profile;
    prof.method = ProfileMethod::bvp;
    prof.x = grid.nodes();
    prof.u = st.U;
    prof.du.resize(n);
    prof.du.front() = (st.U[1] - st.U[0]) / h;
    prof.du.back() = (st.U[n - 1] - st.U[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) prof.du[i] = (st.U[i + 1] - st.U[i - 1]) / (2.0 * h);
    return out;
}

std::vector<SpeedReport> compare_speeds(std::span<const SweepPoint> sweep, const CompareSettings& settings) {
    if (!(settings.t_end > settings.transient)) throw InvalidParameter("t_end must exceed the transient");
    std::vector<SpeedReport> out(sweep.size());
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        const auto& pt = sweep[k];
        FitnessParams fp{pt.s, pt.s, pt.S, pt.S, pt.r, pt.sigma2};
        fp.validate();
    }
    std::vector<std::exception_ptr> errors(sweep.size());
    const int threads = settings.threads > 0 ? settings.threads : omp_get_max_threads();
    const auto count = static_cast<std::ptrdiff_t>(sweep.size());

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        try {
            const auto& pt = sweep[static_cast<std::size_t>(k)];
            const double L = std::sqrt(pt.sigma2 / 2.0);
            SpeedReport rep;
            rep.params = pt;
            rep.frame = Frame::original;
            rep.c1_exact = c1_exact(pt.S, pt.r);
            rep.c1_series = c1_series(pt.S, pt.r, 2);
            rep.c1_star = c1_star(pt.S, pt.r);
            rep.predicted_star = pt.s * rep.c1_star * L;
            rep.predicted_exact = pt.s * rep.c1_exact * L;

            const double half = 40.0 / std::sqrt(pt.S) * L;
            const double travel = 1.5 * std::abs(rep.predicted_exact) * settings.t_end;
            const auto grid = Grid1D::with_spacing(-half, half + travel, settings.dx);
            FitnessParams fp{pt.s, pt.s, pt.S, pt.S, pt.r, pt.sigma2};
            PqdFields init;
            init.p = tanh_front(grid, std::sqrt(pt.S) / L);
            init.q = init.p;
            init.D = qle_disequilibrium(init.p, init.q, grid, pt.sigma2, pt.r, QleMode::local).values;
            SimConfig cfg;
            cfg.dt = settings.dt;
            cfg.t_end = settings.t_end;
            cfg.record_every = settings.record_every;
            const auto traj = simulate_pqd(init, fp, grid, cfg);
            rep.measured_speed = instantaneous_speed(traj, Quantity::p, settings.transient, settings.t_end).fitted;
            rep.relative_gap = pt.s > 0.0 ? (rep.measured_speed - rep.predicted_star) / rep.predicted_star
                                          : std::numeric_limits<double>::quiet_NaN();
            out[static_cast<std::size_t>(k)] = rep;
        } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

Trajectory simulate_reduced_front(const ReducedParams& params, const ReducedRunSettings& settings) {
    params.validate();
    if (!(settings.t_end > settings.transient)) throw InvalidParameter("t_end must exceed the transient");
    double half = settings.half_width;
    if (!(half > 0.0)) half = 40.0 / std::sqrt(params.S);
    const double guess = params.eps * std::max(c1_series(params.S, params.r, 2), 1.0 / std::sqrt(params.S));
    const double travel = 1.5 * std::abs(guess) * settings.t_end;
    const auto grid = Grid1D::with_spacing(-half, half + travel, settings.dx);
    const auto init = tanh_front(grid, std::sqrt(params.S));
    SimConfig cfg;
    cfg.dt = settings.dt;
    cfg.t_end = settings.t_end;
    cfg.record_every = settings.record_every;
    return simulate_reduced(init, params, grid, cfg);
}

SpeedEstimate measure_reduced_speed(const ReducedParams& params, const ReducedRunSettings& settings) {
    const auto traj = simulate_reduced_front(params, settings);
    return instantaneous_speed(traj, Quantity::u_reduced, settings.transient, settings.t_end);
}

}  // namespace clines
