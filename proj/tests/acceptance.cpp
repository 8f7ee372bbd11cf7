// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "clines/genetics.hpp"
#include "clines/pde.hpp"
#include "clines/speed.hpp"
#include "clines/splitting.hpp"
#include "clines/stability.hpp"
#include "clines/standing.hpp"

using namespace clines;

namespace {

[[gnu::format(printf, 1, 2)]] std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& text) {
        if (!detail.empty()) detail += "; ";
        detail += text;
        if (!ok) {
            pass = false;
            detail += " [x]";
        }
    }
};

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct StandingCase {
    double S, r, dx;
};
const StandingCase kStanding[] = {{0.6, 0.25, 0.025}, {0.1, 0.1, 0.05}, {0.25, 0.25, 0.05}};

std::vector<WaveProfile> g_profiles;

Outcome standing_cross_validation() {
    Outcome o;
    for (const auto& c : kStanding) {
        const double xm = 30 / std::sqrt(c.S);
        const auto q = profile_from_quadrature(c.S, c.r, xm, c.dx);
        const auto s = profile_from_shooting(c.S, c.r, xm, c.dx).profile;
        double ode = 0.0, sym = 0.0, rate = 0.0;
        for (const auto* p : {&q, &s}) {
            const auto d = diagnose(*p, c.S, c.r);
            ode = std::max(ode, d.ode_residual);
            sym = std::max(sym, d.symmetry_defect);
            for (auto tail : {Tail::right, Tail::left})
                rate = std::max(rate, std::abs(std::abs(decay_rate(*p, tail)) / std::sqrt(c.S) - 1));
        }
        const double diff = sup_diff(q.u, s.u);
        o.require(diff < 1e-6 && ode < 1e-6 && sym < 1e-8 && rate < 0.01,
                  fmt("(%.2g,%.2g) diff=%.1e ode=%.1e sym=%.1e rate=%.1e%%", c.S, c.r, diff, ode, sym, 100 * rate));
        g_profiles.push_back(q);
        g_profiles.push_back(s);
    }
    return o;
}

Outcome first_integral_identity() {
    Outcome o;
    double worst = 0.0;
    for (std::size_t k = 0; k < g_profiles.size(); ++k) {
        const auto& c = kStanding[k / 2];
        worst = std::max(worst, diagnose(g_profiles[k], c.S, c.r).slope_law_defect);
    }
    o.require(!g_profiles.empty() && worst < 1e-8, fmt("max |u0'^2 - P(u0)| = %.1e over %zu profiles", worst,
              g_profiles.size()));
    return o;
}

Outcome speed_coefficient() {
    Outcome o;
    const double ex = c1_exact(0.02, 0.5), se = c1_series(0.02, 0.5, 2);
    const double rel = std::abs(ex - se) / ex;
    o.require(rel < 1e-4, fmt("c1(0.02,0.5)=%.10g series=%.10g rel=%.1e", ex, se, rel));
    bool decreasing = true, bracketed = true;
    double prev = INFINITY;
    for (double r = 0.1; r <= 0.5 + 1e-12; r += 0.05) {
        const double c = c1_exact(0.1, r);
        decreasing = decreasing && c < prev;
        bracketed = bracketed && c > 1 / std::sqrt(0.1) && c < std::sqrt(2.0 / 0.1);
        prev = c;
    }
    const double small = c1_exact(0.02, 0.5);
    bracketed = bracketed && small > 1 / std::sqrt(0.02) && small < std::sqrt(2.0 / 0.02);
    o.require(decreasing, fmt("decreasing in r at S=0.1 over 0.1..0.5"));
    o.require(bracketed, fmt("1/sqrt(S) < c1 < sqrt(2)/sqrt(S)"));
    return o;
}

Outcome profile_speed_consistency() {
    Outcome o;
    for (double r : {0.1, 0.5}) {
        const double S = 0.1, ex = c1_exact(S, r);
        const auto u0 = profile_from_quadrature(S, r, 100, 0.05);
        const double from_profile = c_eps_from_profile(u0, S, r);
        const double from_solvability = solvability_residual(u0, S, r, 0.0);
        const double e1 = std::abs(from_profile / ex - 1), e2 = std::abs(from_solvability / ex - 1);
        o.require(e1 < 1e-6 && e2 < 1e-6, fmt("r=%.2g profile rel=%.1e solvability rel=%.1e", r, e1, e2));
    }
    return o;
}

Outcome traveling_bvp() {
    Outcome o;
    const double S = 0.1, r = 0.1, ex = c1_exact(S, r);
    const auto grid = Grid1D::with_spacing(-60, 60, 0.05);
    const auto a = solve_traveling_bvp(S, r, 1e-3, grid);
    const auto b = solve_traveling_bvp(S, r, 1e-4, grid);
    const double qa = a.c / 1e-3, qb = b.c / 1e-4;
    const double rich = (10 * qb - qa) / 9;
    const double rel = std::abs(rich / ex - 1);
    const double phase = std::max(std::abs(a.phase_defect), std::abs(b.phase_defect));
    o.require(rel < 1e-3, fmt("c/eps = %.8g, %.8g; extrapolated %.8g vs c1 %.8g (rel %.1e)", qa, qb, rich, ex, rel));
    o.require(phase < 1e-10, fmt("phase defect %.1e", phase));
    return o;
}

Outcome dynamic_speed() {
    Outcome o;
    ReducedRunSettings rs;  // dx 0.1, dt 0.05, t in [50, 400]
    const double S = 0.1, r = 0.1, eps = 0.01;
    const double coupled = measure_reduced_speed({S, eps, r, true}, rs).fitted;
    const double target = eps * c1_exact(S, r);
    o.require(std::abs(coupled / target - 1) < 0.05, fmt("coupled %.6g vs eps c1 %.6g (%.2f%%)", coupled, target,
              100 * (coupled / target - 1)));
    const double single = measure_reduced_speed({S, eps, r, false}, rs).fitted;
    const double ctl = single_cline_speed(eps, S);
    o.require(std::abs(single / ctl - 1) < 0.02, fmt("single cline %.6g vs s/sqrt(S) %.6g (%.2f%%)", single, ctl,
              100 * (single / ctl - 1)));
    return o;
}

Outcome stacking() {
    Outcome o;
    const FitnessParams fp{0.0, 0.0, 0.1, 0.1, 0.1, 2.0};
    const auto grid = Grid1D::with_spacing(-150, 150, 0.5);
    const double k = std::sqrt(fp.SA);
    PqdFields pqd{tanh_front(grid, k, -10.0), tanh_front(grid, k, 10.0), std::vector<double>(grid.n, 0.0)};
    GameteFields g;
    for (auto* f : {&g.u, &g.v, &g.w, &g.z}) f->resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const auto y = from_pqd({pqd.p[i], pqd.q[i], 0.0});
        g.u[i] = y.u, g.v[i] = y.v, g.w[i] = y.w, g.z[i] = y.z;
    }
    SimConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 3000;
    cfg.record_every = 10;
    const auto a = simulate_pqd(pqd, fp, grid, cfg);
    const auto b = simulate_gametes(g, fp, grid, cfg);

    const auto& xp = a.front_positions.at(Quantity::p);
    const auto& xq = a.front_positions.at(Quantity::q);
    double t_stacked = NAN, dmin = INFINITY, dmax = -INFINITY, rise = 0.0;
    for (std::size_t s = 0; s < a.times.size(); ++s) {
        const double gap = std::abs(xp[s] - xq[s]);
        if (std::isnan(t_stacked) && gap < grid.dx()) t_stacked = a.times[s];
        if (s > 0 && std::isnan(t_stacked)) rise = std::max(rise, gap - std::abs(xp[s - 1] - xq[s - 1]));
        for (double d : a.field(s, Quantity::D).values) dmin = std::min(dmin, d), dmax = std::max(dmax, d);
    }
    double sum_defect = 0.0, gap_end = 0.0;
    for (std::size_t s = 0; s < b.times.size(); ++s) {
        std::vector<double> p(grid.n), q(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const GameteFreqs y{b.field(s, Quantity::u).values[i], b.field(s, Quantity::v).values[i],
                                b.field(s, Quantity::w).values[i], b.field(s, Quantity::z).values[i]};
            sum_defect = std::max(sum_defect, std::abs(y.sum() - 1.0));
            const auto f = to_pqd(y);
            p[i] = f.p, q[i] = f.q;
            dmin = std::min(dmin, f.D), dmax = std::max(dmax, f.D);
        }
        if (s + 1 == b.times.size()) gap_end = std::abs(front_position(p, grid) - front_position(q, grid));
    }
    o.require(!std::isnan(t_stacked) && t_stacked < cfg.t_end, fmt("(p,q,D) fronts within dx from t=%.0f", t_stacked));
    o.require(rise <= 0.0, fmt("gap non-increasing until stacked (max rise %.1e)", rise));
    o.require(gap_end < grid.dx(), fmt("gamete fronts gap at t_end %.2e", gap_end));
    o.require(dmin >= -0.25 && dmax <= 0.25, fmt("D in [%.3g, %.3g]", dmin, dmax));
    o.require(sum_defect <= 1e-10, fmt("gamete sum defect %.1e", sum_defect));
    return o;
}

Outcome full_system_speed() {
    Outcome o;
    std::vector<SweepPoint> sweep;
    for (double r : {0.5, 0.3, 0.2, 0.15}) sweep.push_back({0.1, r, 0.01, 2.0});
    CompareSettings cs;  // t in [100, 800]
    const auto reports = compare_speeds(sweep, cs);
    const auto& head = reports.front();
    const double rel = head.measured_speed / head.predicted_star - 1;
    o.require(std::abs(rel) < 0.10, fmt("r=0.5 measured %.6g vs s c1* sigma/sqrt2 %.6g (%.2f%%)", head.measured_speed,
              head.predicted_star, 100 * rel));
    bool increasing = true;
    std::string gaps;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        if (k > 0) increasing = increasing && std::abs(reports[k].relative_gap) > std::abs(reports[k - 1].relative_gap);
        char buf[48];
        std::snprintf(buf, sizeof buf, "%s%.3g", k ? "," : "", reports[k].relative_gap);
        gaps += buf;
    }
    o.require(increasing, fmt("|relative gap| increasing; gaps for r=0.5,0.3,0.2,0.15: %s", gaps.c_str()));
    return o;
}

Outcome spectral_stability() {
    Outcome o;
    const double S = 0.1, r = 0.1;
    const auto u0 = profile_from_quadrature(S, r, 60, 0.05);
    const auto L = assemble_L(u0, S, r);
    const auto sp = spectrum(L, 3);
    const double cosine = cosine_similarity(sp.eigenvectors[0], translation_mode(u0));
    o.require(std::abs(sp.eigenvalues[0]) < 1e-3, fmt("n=%zu lambda0=%.2e", L.size(), sp.eigenvalues[0]));
    o.require(cosine > 0.999, fmt("cos(v0, u0')=%.6f", cosine));
    o.require(sp.eigenvalues[0] <= 1e-3, fmt("no eigenvalue above 1e-3"));
    o.require(sp.eigenvalues[1] < -0.01, fmt("lambda1=%.4g", sp.eigenvalues[1]));
    return o;
}

Outcome adjoint_kernel_order() {
    Outcome o;
    const double S = 0.1, r = 0.1;
    std::vector<double> res;
    for (double dx : {0.2, 0.1, 0.05})
        res.push_back(adjoint_kernel_residual(profile_from_quadrature(S, r, 60, dx), S, r));
    const double p1 = std::log2(res[0] / res[1]), p2 = std::log2(res[1] / res[2]);
    o.require(std::abs(p1 - 2) < 0.2 && std::abs(p2 - 2) < 0.2, fmt("residuals %.2e,%.2e,%.2e observed order %.2f,%.2f",
              res[0], res[1], res[2], p1, p2));
    const double g = second_kernel_growth_rate(profile_from_quadrature(S, r, 60, 0.05), S, r);
    o.require(std::abs(g / std::sqrt(S) - 1) < 0.02, fmt("v0 growth %.6f vs sqrt(S) %.6f", g, std::sqrt(S)));
    return o;
}

Outcome relaxation() {
    Outcome o;
    const double S = 0.1, r = 0.1;
    const auto u0 = profile_from_quadrature(S, r, 20 / std::sqrt(S), 0.1);
    RelaxationConfig cfg;
    cfg.dt = 0.1;
    auto bump = [](double x) { return std::exp(-x * x); };
    const auto a = relaxation_shift(u0, S, r, bump, 0.01, cfg);
    const auto b = relaxation_shift(u0, S, r, bump, 0.02, cfg);
    const double ratio = b.displacement / a.displacement;
    o.require(a.converged && b.converged && std::abs(ratio / 2 - 1) < 0.05,
              fmt("bump shifts %.4e, %.4e ratio %.4f", a.displacement, b.displacement, ratio));
    const auto odd = relaxation_shift(u0, S, r, [](double x) { return x * std::exp(-x * x / 4); }, 0.01, cfg);
    o.require(odd.converged && std::abs(odd.raw_integral) < 1e-12 && std::abs(odd.displacement) < 1e-3,
              fmt("odd h: projection %.1e shift %.1e", odd.raw_integral, odd.displacement));
    return o;
}

Outcome orders_of_accuracy() {
    Outcome o;
    {
        const auto grid = Grid1D::with_spacing(-80, 80, 0.2);
        const auto init = tanh_front(grid, 0.5);
        const ReducedModel model{kernels::ReducedCoeffs{0.1, 0.01, 0.2, true}};
        auto terminal = [&](double dt) {
            SimConfig cfg;
            cfg.dt = dt;
            cfg.splitting = Splitting::strang;
            SplitIntegrator<ReducedModel> integ(model, grid, cfg, {init});
            const auto steps = static_cast<std::size_t>(std::llround(20.0 / dt));
            for (std::size_t k = 0; k < steps; ++k) integ.step();
            return integ.state()[0];
        };
        const auto ref = terminal(0.4 / 32);
        const double e1 = sup_diff(terminal(0.4), ref);
        const double e2 = sup_diff(terminal(0.2), ref);
        const double e3 = sup_diff(terminal(0.1), ref);
        const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
        o.require(std::abs(p1 - 2) < 0.25 && std::abs(p2 - 2) < 0.25, fmt("Strang dt order %.2f,%.2f", p1, p2));
    }
    {
        const double ref = c1_exact(0.1, 0.1, 1e-13);
        bool within = true;
        double worst = 0.0;
        for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
            const double err = std::abs(c1_exact(0.1, 0.1, tol) / ref - 1);
            within = within && err <= tol;
            worst = std::max(worst, err);
        }
        o.require(within, fmt("c1 error within tol for tol 1e-4..1e-10 (max %.1e)", worst));
    }
    {
        const double ex = c1_exact(0.1, 0.1);
        std::vector<double> err;
        for (double dx : {0.4, 0.2, 0.1}) {
            const auto u0 = profile_from_quadrature(0.1, 0.1, 100, dx);
            err.push_back(std::abs(c_eps_from_profile(u0, 0.1, 0.1) / ex - 1));
        }
        o.require(err[2] <= err[0] && err[2] < 1e-6,
                  fmt("profile speed errors %.1e,%.1e,%.1e", err[0], err[1], err[2]));
    }
    {
        std::vector<double> m;
        const auto q = profile_from_quadrature(0.25, 0.25, 60, 0.05);
        for (double tol : {1e-8, 1e-12})
            m.push_back(sup_diff(profile_from_shooting(0.25, 0.25, 60, 0.05, tol).profile.u, q.u));
        o.require(m[1] < m[0] && m[1] < 1e-9,
                  fmt("shooting vs quadrature at tol 1e-8, 1e-12: %.1e, %.1e", m[0], m[1]));
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"standing-wave cross-validation", standing_cross_validation},
        {"first-integral identity", first_integral_identity},
        {"speed coefficient", speed_coefficient},
        {"profile and solvability speed", profile_speed_consistency},
        {"traveling-wave BVP first-order law", traveling_bvp},
        {"dynamic speed", dynamic_speed},
        {"cline stacking", stacking},
        {"full-system speed", full_system_speed},
        {"spectral stability", spectral_stability},
        {"adjoint kernel", adjoint_kernel_order},
        {"relaxation shift", relaxation},
        {"order of accuracy", orders_of_accuracy},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
