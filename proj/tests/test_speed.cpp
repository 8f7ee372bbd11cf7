#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "clines/errors.hpp"
#include "clines/speed.hpp"
#include "clines/standing.hpp"

using namespace clines;

TEST_CASE("speed coefficient reference values") {
    // 30-digit adaptive quadrature of the same ratio of integrals
    struct Ref { double S, r, c1; };
    for (const auto ref : {Ref{0.1, 0.1, 4.15746204688648}, Ref{0.1, 0.5, 3.336646873443439},
                           Ref{0.02, 0.5, 7.146997026115817}, Ref{0.1, 0.2, 3.62049012751918},
                           Ref{0.6, 0.25, 2.50776124416901}}) {
        CAPTURE(ref.S);
        CAPTURE(ref.r);
        CHECK(c1_exact(ref.S, ref.r) == doctest::Approx(ref.c1).epsilon(1e-11));
    }
}

TEST_CASE("series expansion") {
    CHECK(c1_series(0.1, 0.5, 0) == doctest::Approx(1 / std::sqrt(0.1)).epsilon(1e-15));
    CHECK(c1_star(0.1, 0.5) == doctest::Approx((1 + 4.0 / 15 * 0.2) / std::sqrt(0.1)).epsilon(1e-15));
    CHECK(c1_series(0.1, 0.5, 2) == doctest::Approx((1 + 4.0 / 15 * 0.2 + 2.0 / 45 * 0.04) / std::sqrt(0.1)).epsilon(1e-15));
    CHECK_THROWS_AS(c1_series(0.1, 0.5, 3), InvalidParameter);

    SUBCASE("truncation error shrinks with order at small S/r") {
        const double S = 0.02, r = 0.5, exact = c1_exact(S, r);
        const double e0 = std::abs(c1_series(S, r, 0) - exact);
        const double e1 = std::abs(c1_series(S, r, 1) - exact);
        const double e2 = std::abs(c1_series(S, r, 2) - exact);
        CHECK(e1 < e0);
        CHECK(e2 < e1);
        CHECK(e2 / exact < 1e-4);
    }
    SUBCASE("second-order remainder scales like (S/r)^3") {
        const double S = 0.02;
        const double ra = 0.5, rb = 1.0;
        const double da = std::abs(c1_series(S, ra, 2) - c1_exact(S, ra)) * std::sqrt(S);
        const double db = std::abs(c1_series(S, rb, 2) - c1_exact(S, rb)) * std::sqrt(S);
        CHECK(da / db == doctest::Approx(8.0).epsilon(0.1));
    }
}

TEST_CASE("speed coefficient is monotone and bracketed") {
    const double S = 0.1;
    double prev = INFINITY;
    for (double r : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        const double c = c1_exact(S, r);
        CHECK(c < prev);
        CHECK(c > 1 / std::sqrt(S));
        CHECK(c < std::sqrt(2.0) / std::sqrt(S));
        prev = c;
    }
    CHECK(c1_exact(S, 1e5) == doctest::Approx(1 / std::sqrt(S)).epsilon(1e-4));
}

TEST_CASE("quadrature tolerance refinement") {
    const double ref = c1_exact(0.1, 0.1, 1e-13);
    for (double tol : {1e-4, 1e-6, 1e-8}) CHECK(std::abs(c1_exact(0.1, 0.1, tol) - ref) <= 10 * tol * ref);
}

TEST_CASE("speed from the standing profile") {
    for (double r : {0.1, 0.5}) {
        const auto u0 = profile_from_quadrature(0.1, r, 100, 0.05);
        CHECK(c_eps_from_profile(u0, 0.1, r) == doctest::Approx(c1_exact(0.1, r)).epsilon(1e-6));
    }
    const auto truncated = profile_from_quadrature(0.1, 0.1, 10, 0.05);
    CHECK_THROWS_AS(c_eps_from_profile(truncated, 0.1, 0.1), InvalidParameter);
}

TEST_CASE("single-cline and zero-recombination limits") {
    const double s = 0.01, S = 0.1;
    CHECK(single_cline_speed(s, S) == doctest::Approx(s / std::sqrt(S)));
    CHECK(zero_recombination_speed(s, S) == doctest::Approx(2 * s / std::sqrt(2 * S)));
    CHECK_THROWS_AS(single_cline_speed(0.2, S), InvalidParameter);
    CHECK_THROWS_AS(zero_recombination_speed(-0.01, S), InvalidParameter);

    SUBCASE("closed-form wave solves the single-cline equation") {
        const double h = 1e-3;
        double worst = 0.0;
        for (double x : {-7.0, -2.0, 0.3, 4.0}) {
            const double t = 5.0;
            auto U = [&](double xx, double tt) { return single_cline_profile(xx, tt, s, S); };
            const double u = U(x, t);
            const double ut = (U(x, t + h) - U(x, t - h)) / (2 * h);
            const double uxx = (U(x + h, t) - 2 * u + U(x - h, t)) / (h * h);
            const double rhs = uxx + S * u * (2 * u - 1) * (1 - u) + s * u * (1 - u);
            worst = std::max(worst, std::abs(ut - rhs));
        }
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("traveling-wave boundary value problem") {
    const double S = 0.1, r = 0.5;
    const auto grid = Grid1D::with_spacing(-60, 60, 0.1);
    const auto tw = solve_traveling_bvp(S, r, 1e-3, grid);
    CHECK(tw.residual < 1e-10);
    CHECK(std::abs(tw.phase_defect) < 1e-10);
    CHECK(tw.eps_path.back() == 1e-3);
    CHECK(tw.c / 1e-3 == doctest::Approx(c1_exact(S, r)).epsilon(2e-3));
    CHECK(tw.profile.u.front() == 1.0);
    CHECK(tw.profile.u.back() == 0.0);

    SUBCASE("zero eps gives the standing wave") {
        const auto st = solve_traveling_bvp(S, r, 0.0, grid);
        CHECK(std::abs(st.c) < 1e-12);
        const auto u0 = profile_from_quadrature(S, r, 60, 0.1);
        double m = 0.0;
        for (std::size_t i = 0; i < u0.size(); ++i) m = std::max(m, std::abs(st.profile.u[i] - u0.u[i]));
        CHECK(m < 1e-3);
    }
    SUBCASE("guards") {
        CHECK_THROWS_AS(solve_traveling_bvp(S, r, 0.05, grid), InvalidParameter);
        CHECK_THROWS_AS(solve_traveling_bvp(S, r, -1e-3, grid), InvalidParameter);
        CHECK_THROWS_AS(solve_traveling_bvp(-S, r, 1e-3, grid), InvalidParameter);
    }
}

TEST_CASE("reduced front speed in a short run") {
    ReducedRunSettings rs;
    rs.t_end = 150;
    rs.transient = 50;
    const auto est = measure_reduced_speed({0.1, 0.005, 0.1, false}, rs);
    CHECK(est.fitted == doctest::Approx(single_cline_speed(0.005, 0.1)).epsilon(0.03));
}

TEST_CASE("frames") {
    CHECK(to_string(Frame::rescaled) == "rescaled");
    CHECK(to_string(Frame::original) == "original");
}
