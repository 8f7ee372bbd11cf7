#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "clines/errors.hpp"
#include "clines/pde.hpp"
#include "clines/splitting.hpp"
#include "clines/standing.hpp"

using namespace clines;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<double> sample_profile(const WaveProfile& prof, const Grid1D& grid) {
    std::vector<double> u(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) u[i] = prof.value_at(grid.x(i));
    return u;
}

}  // namespace

TEST_CASE("uniform symmetric state is stationary") {
    const Grid1D grid{-20, 20, 201};
    const FitnessParams fp{0.0, 0.0, 0.1, 0.1, 0.1, 2.0};
    SimConfig cfg;
    cfg.t_end = 10;
    cfg.check_far_field = false;
    PqdFields init{std::vector<double>(grid.n, 0.5), std::vector<double>(grid.n, 0.5), std::vector<double>(grid.n, 0.0)};
    const auto traj = simulate_pqd(init, fp, grid, cfg);
    const auto& last = traj.snapshots.back();
    CHECK(sup_diff(last[0].values, init.p) < 1e-15);
    CHECK(sup_diff(last[1].values, init.q) < 1e-15);
    CHECK(sup_diff(last[2].values, init.D) < 1e-15);
}

TEST_CASE("monomorphic gamete state is stationary") {
    const Grid1D grid{-20, 20, 101};
    const FitnessParams fp{0.01, 0.02, 0.1, 0.2, 0.1, 2.0};
    SimConfig cfg;
    cfg.t_end = 5;
    GameteFields g{std::vector<double>(grid.n, 1.0), std::vector<double>(grid.n, 0.0), std::vector<double>(grid.n, 0.0),
                   std::vector<double>(grid.n, 0.0)};
    const auto traj = simulate_gametes(g, fp, grid, cfg);
    CHECK(sup_diff(traj.snapshots.back()[0].values, g.u) < 1e-15);
    CHECK(sup_diff(traj.snapshots.back()[3].values, g.z) < 1e-15);
}

TEST_CASE("reduced equation around the standing wave") {
    const double S = 0.1, r = 0.1;
    const auto grid = Grid1D::with_spacing(-130, 130, 0.2);
    const auto u0 = profile_from_quadrature(S, r, 131, 0.2);
    SimConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 100;
    cfg.record_every = 10;

    SUBCASE("no drift without directional selection") {
        const auto traj = simulate_reduced(sample_profile(u0, grid), {S, 0.0, r, true}, grid, cfg);
        for (double x : traj.front_positions.at(Quantity::u_reduced)) CHECK(std::abs(x) < grid.dx());
        const auto est = instantaneous_speed(traj, Quantity::u_reduced, 0, 100);
        CHECK(std::abs(est.fitted) < grid.dx() / 100.0);
    }
    SUBCASE("directional selection moves the front right") {
        const auto traj = simulate_reduced(sample_profile(u0, grid), {S, 0.01, r, true}, grid, cfg);
        CHECK(instantaneous_speed(traj, Quantity::u_reduced, 20, 100).fitted > 0.0);
    }
}

TEST_CASE("step initial data relaxes to a stable front shape") {
    const auto grid = Grid1D::with_spacing(-130, 130, 0.2);
    std::vector<double> step(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) step[i] = grid.x(i) < 0.0 ? 1.0 : 0.0;
    SimConfig cfg;
    cfg.dt = 0.04;
    cfg.t_end = 300;
    cfg.record_every = 125;
    const auto traj = simulate_reduced(step, {0.1, 0.0, 0.2, true}, grid, cfg);
    const std::size_t k = traj.snapshots.size();
    CHECK(sup_diff(traj.snapshots[k - 1][0].values, traj.snapshots[k - 2][0].values) < 1e-3);
    const auto& u = traj.snapshots.back()[0].values;
    for (std::size_t i = 1; i < u.size(); ++i) CHECK(u[i] <= u[i - 1] + 1e-12);
}

TEST_CASE("quasi-linkage-equilibrium disequilibrium") {
    const auto grid = Grid1D::with_spacing(-60, 60, 0.1);
    const auto p = tanh_front(grid, std::sqrt(0.1));
    SUBCASE("constant frequency gives zero D") {
        const std::vector<double> flat(grid.n, 0.3);
        for (auto mode : {QleMode::local, QleMode::kernel}) {
            const auto D = qle_disequilibrium(p, flat, grid, 2.0, 0.1, mode);
            CHECK(*std::max_element(D.values.begin(), D.values.end(), [](double a, double b) {
                return std::abs(a) < std::abs(b);
            }) == 0.0);
        }
    }
    SUBCASE("stacked clines give non-negative local D") {
        const auto D = qle_disequilibrium(p, p, grid, 2.0, 0.1, QleMode::local);
        CHECK(D.tag == Quantity::D);
        for (double d : D.values) CHECK(d >= 0.0);
    }
    SUBCASE("kernel form approaches the local form as r grows") {
        std::vector<double> gaps;
        for (double r : {0.1, 0.5, 2.5}) {
            const auto a = qle_disequilibrium(p, p, grid, 2.0, r, QleMode::local);
            const auto b = qle_disequilibrium(p, p, grid, 2.0, r, QleMode::kernel);
            // compare at the scale of D itself
            gaps.push_back(sup_diff(a.values, b.values) * r);
        }
        CHECK(gaps[1] < gaps[0]);
        CHECK(gaps[2] < gaps[1]);
    }
}

TEST_CASE("front position") {
    const Grid1D grid{0.0, 10.0, 11};
    SUBCASE("exact step sits half a cell past the last full node") {
        std::vector<double> f(grid.n, 0.0);
        for (std::size_t i = 0; i <= 4; ++i) f[i] = 1.0;
        CHECK(front_position(f, grid) == doctest::Approx(4.5));
    }
    SUBCASE("increasing direction") {
        std::vector<double> f(grid.n, 1.0);
        for (std::size_t i = 0; i <= 6; ++i) f[i] = 0.0;
        CHECK(front_position(f, grid, 0.5, Direction::increasing) == doctest::Approx(6.5));
    }
    SUBCASE("tanh front and translation equivariance") {
        const auto fine = Grid1D::with_spacing(-50, 50, 0.01);
        const auto a = tanh_front(fine, std::sqrt(0.1), 3.0);
        const auto b = tanh_front(fine, std::sqrt(0.1), 3.37);
        const double xa = front_position(a, fine), xb = front_position(b, fine);
        CHECK(std::abs(xa - 3.0) < 1e-4);
        CHECK(std::abs(xb - xa - 0.37) < 1e-4);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(front_position(std::vector<double>(grid.n, 0.2), grid), NumericalFailure);
        std::vector<double> wiggle{1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0};
        try {
            front_position(wiggle, grid);
            FAIL("expected a multiple-crossing failure");
        } catch (const NumericalFailure& e) {
            CHECK(std::string(e.diagnostic()).find("\"crossings\":3") != std::string::npos);
        }
    }
}

TEST_CASE("instantaneous speed") {
    Trajectory traj;
    traj.grid = Grid1D{0, 1, 3};
    for (int k = 0; k <= 10; ++k) {
        traj.times.push_back(k * 2.0);
        traj.front_positions[Quantity::p].push_back(1.5 + 0.25 * k * 2.0);
    }
    const auto est = instantaneous_speed(traj, Quantity::p, 0, 20);
    CHECK(est.fitted == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(est.samples == 11);
    for (double s : est.speeds) CHECK(s == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(instantaneous_speed(traj, Quantity::p, 0, 3), InvalidParameter);
}

TEST_CASE("frame conversion is exact") {
    CHECK(to_original_frame(0.3, 2.0) == 0.3);
    CHECK(to_original_frame(0.3, 8.0) == 0.3 * std::sqrt(8.0) / std::sqrt(2.0));
}

TEST_CASE("invariant and configuration guards") {
    const auto grid = Grid1D::with_spacing(-50, 50, 0.5);
    const FitnessParams fp{0.0, 0.0, 0.1, 0.1, 0.1, 2.0};
    PqdFields init;
    init.p = tanh_front(grid, std::sqrt(0.1));
    init.q = init.p;
    init.D.assign(grid.n, 0.0);
    SimConfig cfg;
    cfg.t_end = 1;
    SUBCASE("explicit diffusion respects the stability bound") {
        cfg.diffusion = DiffusionScheme::explicit_euler;
        cfg.dt = 0.2;
        CHECK_THROWS_AS(simulate_pqd(init, fp, grid, cfg), InvalidParameter);
        cfg.dt = 0.1;
        CHECK_NOTHROW(simulate_pqd(init, fp, grid, cfg));
    }
    SUBCASE("out-of-range field aborts") {
        init.p[grid.n / 2] = 1.2;
        CHECK_THROWS_AS(simulate_pqd(init, fp, grid, cfg), InvariantViolation);
    }
    SUBCASE("domain too narrow for the far field") {
        const auto narrow = Grid1D::with_spacing(-5, 5, 0.5);
        PqdFields small{tanh_front(narrow, 0.3), tanh_front(narrow, 0.3), std::vector<double>(narrow.n, 0.0)};
        CHECK_THROWS_AS(simulate_pqd(small, fp, narrow, cfg), InvalidParameter);
    }
    SUBCASE("grid sanity") {
        CHECK_THROWS_AS((Grid1D{1.0, 0.0, 10}.validate()), InvalidParameter);
        CHECK_THROWS_AS((Grid1D{0.0, 1.0, 2}.validate()), InvalidParameter);
    }
}

TEST_CASE("offset clines generate positive disequilibrium and stay in range") {
    const auto grid = Grid1D::with_spacing(-120, 120, 0.5);
    const FitnessParams fp{0.0, 0.0, 0.1, 0.1, 0.1, 2.0};
    PqdFields init;
    init.p = tanh_front(grid, std::sqrt(0.1), -10.0);
    init.q = tanh_front(grid, std::sqrt(0.1), 10.0);
    init.D.assign(grid.n, 0.0);
    SimConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 200;
    cfg.record_every = 20;
    const auto traj = simulate_pqd(init, fp, grid, cfg);
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double xp = traj.front_positions.at(Quantity::p)[k], xq = traj.front_positions.at(Quantity::q)[k];
        const auto mid = static_cast<std::size_t>(std::llround((0.5 * (xp + xq) - grid.x_min) / grid.dx()));
        CHECK(traj.field(k, Quantity::D).values[mid] > 0.0);
        for (double v : traj.field(k, Quantity::D).values) CHECK(std::abs(v) <= 0.25);
        for (double v : traj.field(k, Quantity::p).values) CHECK((v >= -1e-8 && v <= 1 + 1e-8));
    }
    const auto& xp = traj.front_positions.at(Quantity::p);
    const auto& xq = traj.front_positions.at(Quantity::q);
    CHECK(std::abs(xq.back() - xp.back()) < std::abs(xq.front() - xp.front()));
}

TEST_CASE("gamete system tracks the (p,q,D) system under weak selection") {
    const auto grid = Grid1D::with_spacing(-150, 150, 0.5);
    const FitnessParams base{0.05, 0.05, 0.1, 0.1, 0.1, 2.0};
    const auto fp = base.scaled(0.1);
    const double k = std::sqrt(fp.SA);
    PqdFields pqd;
    pqd.p = tanh_front(grid, k, -5.0);
    pqd.q = tanh_front(grid, k, 5.0);
    pqd.D.assign(grid.n, 0.0);
    GameteFields g;
    for (auto* f : {&g.u, &g.v, &g.w, &g.z}) f->resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const auto y = from_pqd({pqd.p[i], pqd.q[i], 0.0});
        g.u[i] = y.u, g.v[i] = y.v, g.w[i] = y.w, g.z[i] = y.z;
    }
    SimConfig cfg;
    cfg.dt = 0.25;
    cfg.t_end = 300;
    cfg.record_every = 50;
    const auto a = simulate_pqd(pqd, fp, grid, cfg);
    const auto b = simulate_gametes(g, fp, grid, cfg);
    REQUIRE(a.times.size() == b.times.size());
    double sum_defect = 0.0;
    for (std::size_t s = 0; s < b.times.size(); ++s) {
        std::vector<double> p(grid.n), q(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const GameteFreqs y{b.field(s, Quantity::u).values[i], b.field(s, Quantity::v).values[i],
                                b.field(s, Quantity::w).values[i], b.field(s, Quantity::z).values[i]};
            sum_defect = std::max(sum_defect, std::abs(y.sum() - 1.0));
            p[i] = to_pqd(y).p;
            q[i] = to_pqd(y).q;
        }
        CHECK(std::abs(front_position(p, grid) - a.front_positions.at(Quantity::p)[s]) < 2 * grid.dx());
        CHECK(std::abs(front_position(q, grid) - a.front_positions.at(Quantity::q)[s]) < 2 * grid.dx());
    }
    CHECK(sum_defect < 1e-10);
}

TEST_CASE("Strang splitting is second order in time, Lie first order") {
    const auto grid = Grid1D::with_spacing(-80, 80, 0.2);
    const auto init = tanh_front(grid, 0.5);
    const ReducedModel model{kernels::ReducedCoeffs{0.1, 0.01, 0.2, true}};
    auto terminal = [&](double dt, Splitting split) {
        SimConfig cfg;
        cfg.dt = dt;
        cfg.splitting = split;
        SplitIntegrator<ReducedModel> integ(model, grid, cfg, {init});
        const auto steps = static_cast<std::size_t>(std::llround(20.0 / dt));
        for (std::size_t k = 0; k < steps; ++k) integ.step();
        return integ.state()[0];
    };
    for (auto split : {Splitting::strang, Splitting::lie}) {
        const auto ref = terminal(0.4 / 16, split);
        const double e1 = sup_diff(terminal(0.4, split), ref);
        const double e2 = sup_diff(terminal(0.2, split), ref);
        const double ratio = e1 / e2;
        if (split == Splitting::strang) {
            CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
        } else {
            CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
        }
    }
}
