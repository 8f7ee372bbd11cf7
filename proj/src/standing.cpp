#include "clines/standing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>
#include "json.hpp"

#include "clines/errors.hpp"
#include "clines/kernels.hpp"
#include "clines/pde.hpp"

namespace clines {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kTailSwitch = 1e-10;
constexpr double kManifoldOffset = 1e-8;
constexpr double kQuadratureTol = 1e-13;

void require_positive(double S, double r) {
    if (!(S > 0.0)) throw InvalidParameter("S must be positive");
    if (!(r > 0.0)) throw InvalidParameter("r must be positive");
}

// expm1(y) - y without cancellation for small y.
double expm1_minus_identity(double y) {
    if (std::abs(y) < 1e-2) {
        double term = y * y / 2.0, sum = term;
        for (int k = 3; k <= 8; ++k) {
            term *= y / k;
            sum += term;
        }
        return sum;
    }
    return std::expm1(y) - y;
}

double slope_magnitude(double u, double S, double r) { return std::sqrt(std::max(first_integral(u, S, r), 0.0)); }

struct Layout {
    std::size_t half;  // nodes on each side of the center
    double dx;
};

Layout make_layout(double x_max, double dx) {
    if (!(dx > 0.0) || !(x_max > dx)) throw InvalidParameter("need 0 < dx < x_max");
    return {static_cast<std::size_t>(std::llround(x_max / dx)), dx};
}

WaveProfile empty_profile(const Layout& lay, ProfileMethod method) {
    WaveProfile prof;
    const std::size_t n = 2 * lay.half + 1;
    prof.x.resize(n);
    prof.u.assign(n, 0.0);
    prof.du.assign(n, 0.0);
    prof.method = method;
    for (std::size_t i = 0; i < n; ++i) {
        prof.x[i] = (static_cast<double>(i) - static_cast<double>(lay.half)) * lay.dx;
    }
    return prof;
}

}  // namespace

std::string_view to_string(ProfileMethod m) {
    switch (m) {
        case ProfileMethod::shooting: return "shooting";
        case ProfileMethod::quadrature: return "quadrature";
        case ProfileMethod::bvp: return "bvp";
    }
    return "?";
}

std::size_t WaveProfile::center_index() const {
    return static_cast<std::size_t>(std::llround(-x.front() / dx()));
}

double WaveProfile::value_at(double xq) const {
    const std::size_t n = size();
    if (xq <= x.front()) {
        const double m = 1.0 - u.front();
        return m > 0.0 ? 1.0 - m * std::exp(-du.front() / m * (xq - x.front())) : 1.0;
    }
    if (xq >= x.back()) return u.back() * std::exp(du.back() / u.back() * (xq - x.back()));
    const double h = dx();
    const auto i = std::min(static_cast<std::size_t>((xq - x.front()) / h), n - 2);
    const double t = (xq - x[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * u[i] + (t3 - 2 * t2 + t) * h * du[i] + (-2 * t3 + 3 * t2) * u[i + 1] +
           (t3 - t2) * h * du[i + 1];
}

double WaveProfile::slope_at(double xq) const {
    const std::size_t n = size();
    if (xq <= x.front()) {
        const double m = 1.0 - u.front();
        return m > 0.0 ? du.front() * std::exp(-du.front() / m * (xq - x.front())) : 0.0;
    }
    if (xq >= x.back()) return du.back() * std::exp(du.back() / u.back() * (xq - x.back()));
    const double h = dx();
    const auto i = std::min(static_cast<std::size_t>((xq - x.front()) / h), n - 2);
    const double t = (xq - x[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * u[i] + (-6 * t2 + 6 * t) * u[i + 1]) / h + (3 * t2 - 4 * t + 1) * du[i] +
           (3 * t2 - 2 * t) * du[i + 1];
}

double first_integral(double u, double S, double r) {
    const double w = u * (1.0 - u);
    return r * r / (8.0 * S) * expm1_minus_identity(4.0 * S / r * w);
}

WaveProfile profile_from_quadrature(double S, double r, double x_max, double dx) {
    require_positive(S, r);
    const Layout lay = make_layout(x_max, dx);
    WaveProfile prof = empty_profile(lay, ProfileMethod::quadrature);
    const std::size_t c = lay.half;

    using State = std::array<double, 1>;
    // Forward: u' = -sqrt(P(u)) towards u = 0. Backward in s = -x: du/ds = +sqrt(P(u)) towards u = 1.
    for (const double sign : {-1.0, 1.0}) {
        auto rhs = [&](const State& s, State& ds, double) { ds[0] = sign * slope_magnitude(s[0], S, r); };
        auto stepper = odeint::make_controlled(kQuadratureTol, kQuadratureTol, odeint::runge_kutta_dopri5<State>());
        State state{0.5};
        prof.u[c] = 0.5;
        prof.du[c] = -slope_magnitude(0.5, S, r);
        bool tail = false;
        double tail_rate = 0.0, tail_gap = 0.0, tail_start = 0.0;
        for (std::size_t k = 1; k <= lay.half; ++k) {
            const std::size_t i = sign < 0 ? c + k : c - k;
            const double s1 = static_cast<double>(k) * dx;
            if (!tail) {
                odeint::integrate_adaptive(stepper, rhs, state, s1 - dx, s1, dx / 4.0);
                const double gap = sign < 0 ? state[0] : 1.0 - state[0];
                if (!(gap > 0.0) || !std::isfinite(gap)) {
                    throw NumericalFailure("quadrature left (0,1)", nlohmann::json{{"x", s1}, {"u", state[0]}}.dump());
                }
                prof.u[i] = state[0];
                prof.du[i] = -slope_magnitude(state[0], S, r);
                if (gap < kTailSwitch) {
                    tail = true;
                    tail_gap = gap;
                    tail_rate = -prof.du[i] / gap;
                    tail_start = s1;
                }
                continue;
            }
            const double g = tail_gap * std::exp(-tail_rate * (s1 - tail_start));
            prof.u[i] = sign < 0 ? g : 1.0 - g;
            prof.du[i] = -tail_rate * g;
        }
    }
    return prof;
}

ShootingResult profile_from_shooting(double S, double r, double x_max, double dx, double tol) {
    require_positive(S, r);
    const Layout lay = make_layout(x_max, dx);
    const double root_s = std::sqrt(S);
    const double y_max = 10.0 * root_s;

    // State (1 - x, y): the deviation from the saddle keeps full relative precision.
    using State = std::array<double, 2>;
    auto rhs = [&](const State& s, State& ds, double) {
        const double xi = s[0];
        ds[0] = -s[1];
        ds[1] = -S * (1.0 - xi) * (1.0 - 2.0 * xi) * xi - 2.0 / r * S * (1.0 - 2.0 * xi) * s[1] * s[1];
    };
    const State start{kManifoldOffset, -root_s * kManifoldOffset};
    constexpr double kAbsTol = 1e-24;

    // Pass 1: time of flight from the manifold offset to x = 1/2.
    auto ctrl = odeint::make_controlled(kAbsTol, tol, odeint::runge_kutta_dopri5<State>());
    State s = start;
    double t = 0.0, h = 1e-2;
    const double t_limit = 1e3 / root_s;
    double crossing = std::numeric_limits<double>::quiet_NaN();
    while (t < t_limit) {
        const State prev = s;
        const double t_prev = t;
        while (ctrl.try_step(rhs, s, t, h) == odeint::fail) {
        }
        if (s[1] < -y_max) {
            throw NumericalFailure("orbit escaped before reaching x = 1/2 (no heteroclinic found)",
                                   nlohmann::json{{"t", t}, {"x", 1.0 - s[0]}, {"y", s[1]}, {"y_max", y_max}}.dump());
        }
        if (s[0] >= 0.5) {
            odeint::runge_kutta_dopri5<State> rk;
            double lo = 0.0, hi = t - t_prev;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, t); ++it) {
                const double mid = 0.5 * (lo + hi);
                State probe;
                rk.do_step(rhs, prev, t_prev, probe, mid);
                (probe[0] < 0.5 ? lo : hi) = mid;
            }
            crossing = t_prev + 0.5 * (lo + hi);
            break;
        }
    }
    if (!std::isfinite(crossing)) {
        throw NumericalFailure("orbit did not reach x = 1/2",
                               nlohmann::json{{"t", t}, {"x", 1.0 - s[0]}, {"y", s[1]}}.dump());
    }
    // Newton polish on the adaptive flow map so pass 2 lands on x = 1/2.
    for (int it = 0; it < 8; ++it) {
        State probe = start;
        odeint::integrate_adaptive(odeint::make_controlled(kAbsTol, tol, odeint::runge_kutta_dopri5<State>()), rhs,
                                   probe, 0.0, crossing, 1e-2);
        const double miss = probe[0] - 0.5;
        crossing -= miss / -probe[1];
        if (std::abs(miss) < 1e-15) break;
    }

    // Pass 2: re-integrate, stopping exactly at the grid abscissae x = t - crossing <= 0.
    ShootingResult result;
    result.crossing_time = crossing;
    result.condition_violated = !(S < 4.0 * r);
    WaveProfile& prof = result.profile;
    prof = empty_profile(lay, ProfileMethod::shooting);
    const std::size_t c = lay.half;

    std::vector<double> deviation(prof.size(), 0.0);
    std::vector<double> times{0.0};
    std::vector<std::size_t> nodes{std::numeric_limits<std::size_t>::max()};
    for (std::size_t k = lay.half + 1; k-- > 0;) {
        const double tk = crossing - static_cast<double>(k) * dx;
        if (tk > 0.0) {
            times.push_back(tk);
            nodes.push_back(c - k);
        } else {
            // Left of the shooting start: linear unstable manifold 1 - u = delta exp(sqrt(S) (x + crossing)).
            const double gap = kManifoldOffset * std::exp(root_s * tk);
            deviation[c - k] = gap;
            prof.u[c - k] = 1.0 - gap;
            prof.du[c - k] = -root_s * gap;
        }
    }
    std::size_t seen = 0;
    auto observer = [&](const State& st, double) {
        const std::size_t node = nodes[seen++];
        if (node == std::numeric_limits<std::size_t>::max()) return;
        deviation[node] = st[0];
        prof.u[node] = 1.0 - st[0];
        prof.du[node] = st[1];
    };
    State s2 = start;
    odeint::integrate_times(odeint::make_controlled(kAbsTol, tol, odeint::runge_kutta_dopri5<State>()), rhs, s2,
                            times.begin(), times.end(), 1e-2, observer);
    result.beta = -prof.du[c];

    for (std::size_t k = 1; k <= lay.half; ++k) {
        prof.u[c + k] = deviation[c - k];
        prof.du[c + k] = prof.du[c - k];
    }
    return result;
}

double decay_rate(const WaveProfile& profile, Tail tail) {
    const std::size_t n = profile.size();
    const double edge = tail == Tail::right ? profile.u.back() : 1.0 - profile.u.front();
    if (!(edge < 1e-3) || !(edge > 0.0)) {
        throw InvalidParameter("profile tail is too short for a decay-rate fit (edge value " + std::to_string(edge) + ")");
    }
    const double span = profile.x.back() - profile.x.front();
    std::vector<double> xs, logs;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = profile.x[i];
        if (tail == Tail::right && xi >= profile.x.back() - span / 4.0) {
            xs.push_back(xi);
            logs.push_back(std::log(profile.u[i]));
        } else if (tail == Tail::left && xi <= profile.x.front() + span / 4.0) {
            xs.push_back(xi);
            logs.push_back(std::log(1.0 - profile.u[i]));
        }
    }
    if (xs.size() < 3) throw InvalidParameter("profile tail is too short for a decay-rate fit");
    return fit_slope(xs, logs);
}

ProfileDiagnostics diagnose(const WaveProfile& prof, double S, double r) {
    ProfileDiagnostics d;
    const std::size_t n = prof.size();
    const std::size_t c = prof.center_index();
    d.normalization_defect = std::abs(prof.u[c] - 0.5);
    for (std::size_t k = 0; k <= c && c + k < n; ++k) {
        d.symmetry_defect = std::max(d.symmetry_defect, std::abs(prof.u[c - k] + prof.u[c + k] - 1.0));
    }
    const double h = prof.dx();
    for (std::size_t i = 0; i < n; ++i) {
        d.slope_law_defect =
            std::max(d.slope_law_defect, std::abs(prof.du[i] * prof.du[i] - first_integral(prof.u[i], S, r)));
        if (!(prof.du[i] < 0.0) || (i > 0 && prof.u[i] > prof.u[i - 1])) d.monotone = false;
        if (i >= 2 && i + 2 < n) {
            const double upp = (-prof.u[i + 2] + 16.0 * prof.u[i + 1] - 30.0 * prof.u[i] + 16.0 * prof.u[i - 1] -
                                prof.u[i - 2]) /
                               (12.0 * h * h);
            const double res =
                upp + S * kernels::bistable(prof.u[i]) + 2.0 / r * S * (2.0 * prof.u[i] - 1.0) * prof.du[i] * prof.du[i];
            d.ode_residual = std::max(d.ode_residual, std::abs(res));
        }
    }
    return d;
}

}  // namespace clines
