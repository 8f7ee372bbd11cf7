#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "clines/errors.hpp"
#include "clines/speed.hpp"
#include "clines/stability.hpp"
#include "clines/standing.hpp"

using namespace clines;

namespace {

constexpr double kS = 0.1;
constexpr double kR = 0.1;

const WaveProfile& base_profile() {
    static const WaveProfile u0 = profile_from_quadrature(kS, kR, 60, 0.1);
    return u0;
}

}  // namespace

TEST_CASE("eigenvalues of the discrete Dirichlet Laplacian") {
    const std::size_t n = 200;
    const double dx = 0.05;
    DiscretizedOperator op;
    op.x.resize(n);
    op.lower.assign(n, 1 / (dx * dx));
    op.upper.assign(n, 1 / (dx * dx));
    op.diag.assign(n, -2 / (dx * dx));
    op.lower.front() = 0.0;
    op.upper.back() = 0.0;
    const auto sp = spectrum(op, 4);
    for (std::size_t k = 0; k < 4; ++k) {
        const double exact = -2 / (dx * dx) * (1 - std::cos((k + 1) * std::numbers::pi / (n + 1)));
        CHECK(sp.eigenvalues[k] == doctest::Approx(exact).epsilon(1e-9));
        const auto v = op.apply(sp.eigenvectors[k]);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(v[i] - exact * sp.eigenvectors[k][i]));
        CHECK(res < 1e-6);
    }
    CHECK(std::abs(sp.eigenvectors[0][n / 2]) == doctest::Approx(*std::max_element(
              sp.eigenvectors[0].begin(), sp.eigenvectors[0].end())));
}

TEST_CASE("linearization about the standing wave") {
    const auto& u0 = base_profile();
    const auto L = assemble_L(u0, kS, kR);
    const auto M = assemble_M(u0, kS, kR);
    CHECK(M.max_asymmetry() < 1e-14);
    CHECK(L.max_asymmetry() > 1e-6);
    CHECK(L.transpose().transpose().max_asymmetry() == L.max_asymmetry());

    const auto sl = spectrum(L, 3);
    const auto sm = spectrum(M, 3);
    CHECK(std::abs(sl.eigenvalues[0]) < 1e-3);
    CHECK(sl.eigenvalues[1] < -0.01);
    for (std::size_t k = 0; k < 3; ++k) CHECK(sl.eigenvalues[k] == doctest::Approx(sm.eigenvalues[k]).epsilon(1e-3));
    CHECK(cosine_similarity(sl.eigenvectors[0], translation_mode(u0)) > 0.999);
}

TEST_CASE("operator guards") {
    const auto coarse = profile_from_quadrature(1.0, 0.5, 20, 0.2);
    CHECK_THROWS_AS(assemble_L(coarse, 1.0, 0.5), InvalidParameter);
    CHECK_NOTHROW(assemble_L(coarse, 0.25, 0.5));
}

TEST_CASE("adjoint kernel") {
    const auto fine = profile_from_quadrature(kS, kR, 60, 0.05);
    const double a = adjoint_kernel_residual(base_profile(), kS, kR);
    const double b = adjoint_kernel_residual(fine, kS, kR);
    CHECK(a / b == doctest::Approx(4.0).epsilon(0.1));
    // u0' alone is not in the kernel of the transpose
    CHECK(adjoint_kernel_residual(fine, kS, kR, false) > 100 * b);
    const auto psi = adjoint_kernel(fine, kS, kR);
    for (double v : psi) CHECK(v < 0.0);
}

TEST_CASE("solvability condition selects the speed coefficient") {
    const auto& u0 = base_profile();
    const double c1 = c1_exact(kS, kR);
    CHECK(std::abs(solvability_residual(u0, kS, kR, c1)) < 1e-6);
    CHECK(std::abs(solvability_residual(u0, kS, kR, 1.01 * c1)) > 1e-3);
}

TEST_CASE("second kernel solution grows at the tail rate") {
    const auto& u0 = base_profile();
    const auto v0 = second_kernel_solution(u0, kS, kR);
    CHECK(v0.size() == u0.size());
    CHECK(v0[u0.center_index()] == 0.0);
    CHECK(second_kernel_growth_rate(u0, kS, kR) == doctest::Approx(std::sqrt(kS)).epsilon(0.02));
}

TEST_CASE("relaxation of perturbed standing waves") {
    const auto u0 = profile_from_quadrature(kS, kR, 20 / std::sqrt(kS), 0.1);
    RelaxationConfig cfg;
    cfg.dt = 0.1;
    SUBCASE("translation mode shifts by the perturbation amplitude") {
        const auto res = relaxation_shift(u0, kS, kR, [&](double x) { return u0.slope_at(x); }, 0.01, cfg);
        CHECK(res.converged);
        CHECK(res.shift_per_amp == doctest::Approx(-1.0).epsilon(0.01));
        CHECK(res.predicted_shift_per_amp == doctest::Approx(-1.0).epsilon(1e-6));
    }
    SUBCASE("odd perturbation leaves the front in place") {
        const auto res = relaxation_shift(u0, kS, kR, [](double x) { return x * std::exp(-x * x / 4); }, 0.01, cfg);
        CHECK(res.converged);
        CHECK(std::abs(res.raw_integral) < 1e-12);
        CHECK(std::abs(res.displacement) < 1e-3);
    }
}

TEST_CASE("names") {
    CHECK(to_string(OperatorKind::L) == "L");
    CHECK(to_string(OperatorKind::M) == "M");
}
