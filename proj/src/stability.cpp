#include "clines/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include "json.hpp"

#include "clines/errors.hpp"
#include "clines/kernels.hpp"
#include "clines/pde.hpp"
#include "clines/splitting.hpp"

namespace clines {

namespace {

constexpr std::size_t kMaxInverseIterations = 50;

void require_resolved(const WaveProfile& u0, double S, double r) {
    if (!(S > 0.0) || !(r > 0.0)) throw InvalidParameter("S and r must be positive");
    if (u0.size() < 5) throw InvalidParameter("profile needs at least 5 nodes");
    if (u0.dx() > 0.1 / std::sqrt(S)) throw InvalidParameter("grid too coarse: need dx <= 0.1/sqrt(S)");
}

double weight_exponent(double u, double S, double r) { return 4.0 * S / r * (u * u - u); }

double trapezoid(const std::vector<double>& f, double h) {
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
    return sum * h;
}

DiscretizedOperator interior_skeleton(const WaveProfile& u0, OperatorKind kind) {
    DiscretizedOperator op;
    op.kind = kind;
    const std::size_t m = u0.size() - 2;
    op.x.assign(u0.x.begin() + 1, u0.x.end() - 1);
    op.lower.assign(m, 0.0);
    op.diag.assign(m, 0.0);
    op.upper.assign(m, 0.0);
    return op;
}

// Number of eigenvalues of the symmetric tridiagonal (a, e) below lambda.
std::size_t sturm_count(const std::vector<double>& a, const std::vector<double>& e, double lambda) {
    std::size_t count = 0;
    double q = a[0] - lambda;
    const double tiny = std::numeric_limits<double>::min();
    for (std::size_t i = 0;; ++i) {
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
        if (i + 1 == a.size()) break;
        q = a[i + 1] - lambda - e[i] * e[i] / q;
    }
    return count;
}

}  // namespace

std::string_view to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::L: return "L";
        case OperatorKind::M: return "M";
        case OperatorKind::L_adjoint: return "L_adjoint";
    }
    return "?";
}

std::vector<double> DiscretizedOperator::apply(std::span<const double> h) const {
    const std::size_t m = size();
    if (h.size() != m) throw InvalidParameter("vector size does not match the operator");
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        double v = diag[i] * h[i];
        if (i > 0) v += lower[i] * h[i - 1];
        if (i + 1 < m) v += upper[i] * h[i + 1];
        out[i] = v;
    }
    return out;
}

DiscretizedOperator DiscretizedOperator::transpose() const {
    DiscretizedOperator t = *this;
    const std::size_t m = size();
    for (std::size_t i = 0; i < m; ++i) {
        t.lower[i] = i > 0 ? upper[i - 1] : 0.0;
        t.upper[i] = i + 1 < m ? lower[i + 1] : 0.0;
    }
    if (kind == OperatorKind::L) t.kind = OperatorKind::L_adjoint;
    else if (kind == OperatorKind::L_adjoint) t.kind = OperatorKind::L;
    return t;
}

double DiscretizedOperator::max_asymmetry() const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < size(); ++i) m = std::max(m, std::abs(upper[i] - lower[i + 1]));
    return m;
}

DiscretizedOperator assemble_L(const WaveProfile& u0, double S, double r) {
    require_resolved(u0, S, r);
    auto op = interior_skeleton(u0, OperatorKind::L);
    const double h = u0.dx(), ih2 = 1.0 / (h * h);
    for (std::size_t i = 0; i < op.size(); ++i) {
        const double u = u0.u[i + 1], du = u0.du[i + 1];
        const double a = 4.0 * S / r * (2.0 * u - 1.0) * du;
        const double b = S * (kernels::bistable_prime(u) + 4.0 / r * du * du);
        op.lower[i] = ih2 - a / (2.0 * h);
        op.diag[i] = -2.0 * ih2 + b;
        op.upper[i] = ih2 + a / (2.0 * h);
    }
    op.lower.front() = 0.0;
    op.upper.back() = 0.0;
    return op;
}

DiscretizedOperator assemble_M(const WaveProfile& u0, double S, double r) {
    require_resolved(u0, S, r);
    auto op = interior_skeleton(u0, OperatorKind::M);
    const double h = u0.dx(), ih2 = 1.0 / (h * h);
    for (std::size_t i = 0; i < op.size(); ++i) {
        const double u = u0.u[i + 1];
        const double c = 2.0 * S * S / r * (2.0 * u - 1.0) * kernels::bistable(u) + S * kernels::bistable_prime(u);
        op.lower[i] = ih2;
        op.diag[i] = -2.0 * ih2 + c;
        op.upper[i] = ih2;
    }
    op.lower.front() = 0.0;
    op.upper.back() = 0.0;
    return op;
}

Spectrum spectrum(const DiscretizedOperator& op, std::size_t k) {
    const std::size_t m = op.size();
    if (k == 0 || k > m) throw InvalidParameter("requested eigenpair count out of range");

    // Diagonal similarity D A D^-1 = T with T symmetric.
    std::vector<double> scale(m, 1.0), e(m > 0 ? m - 1 : 0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double prod = op.upper[i] * op.lower[i + 1];
        if (!(prod > 0.0)) {
            throw NumericalFailure("operator is not symmetrizable (off-diagonal product <= 0)",
                                   nlohmann::json{{"row", i}, {"product", prod}}.dump());
        }
        e[i] = std::sqrt(prod);
        scale[i + 1] = scale[i] * std::sqrt(op.upper[i] / op.lower[i + 1]);
    }

    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    for (std::size_t i = 0; i < m; ++i) {
        const double radius = (i > 0 ? e[i - 1] : 0.0) + (i + 1 < m ? e[i] : 0.0);
        lo = std::min(lo, op.diag[i] - radius);
        hi = std::max(hi, op.diag[i] + radius);
    }
    const double span = std::max(hi - lo, 1.0);

    Eigen::SparseMatrix<double> T(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    {
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t i = 0; i < m; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            trip.emplace_back(ii, ii, op.diag[i]);
            if (i + 1 < m) {
                trip.emplace_back(ii, ii + 1, e[i]);
                trip.emplace_back(ii + 1, ii, e[i]);
            }
        }
        T.setFromTriplets(trip.begin(), trip.end());
    }
    Eigen::SparseMatrix<double> I(T.rows(), T.cols());
    I.setIdentity();

    Spectrum out;
    std::vector<Eigen::VectorXd> found;
    for (std::size_t j = 0; j < k; ++j) {
        // Eigenvalue with exactly m-1-j others below it.
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * span; ++it) {
            const double mid = 0.5 * (a + b);
            if (sturm_count(op.diag, e, mid) >= m - j) b = mid;
            else a = mid;
        }
        const double lambda = 0.5 * (a + b);

        const double shift = lambda + 1e-10 * span;
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(T - shift * I);
        if (lu.info() != Eigen::Success) throw NumericalFailure("shifted factorization failed in inverse iteration");
        Eigen::VectorXd t(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) t[static_cast<Eigen::Index>(i)] = 1.0 + 0.1 * std::sin(0.37 * i + j);
        double resid = std::numeric_limits<double>::infinity();
        std::size_t it = 0;
        for (; it < kMaxInverseIterations; ++it) {
            for (const auto& prev : found) t -= prev.dot(t) * prev;
            t.normalize();
            resid = (T * t - lambda * t).norm();
            if (resid <= 1e-9 * span) break;
            t = lu.solve(t);
        }
        if (resid > 1e-9 * span) {
            throw NumericalFailure("inverse iteration did not converge",
                                   nlohmann::json{{"eigenvalue", lambda}, {"residual", resid}, {"index", j}}.dump());
        }
        found.push_back(t);

        std::vector<double> v(m);
        double norm = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = t[static_cast<Eigen::Index>(i)] / scale[i];
            norm += v[i] * v[i];
            if (std::abs(v[i]) > std::abs(peak)) peak = v[i];
        }
        norm = std::sqrt(norm) * (peak < 0.0 ? -1.0 : 1.0);
        for (double& x : v) x /= norm;
        out.eigenvalues.push_back(lambda);
        out.eigenvectors.push_back(std::move(v));
    }
    return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidParameter("vector sizes differ");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return std::abs(ab) / std::sqrt(aa * bb);
}

std::vector<double> translation_mode(const WaveProfile& u0) {
    return std::vector<double>(u0.du.begin() + 1, u0.du.end() - 1);
}

std::vector<double> adjoint_kernel(const WaveProfile& u0, double S, double r, bool weighted) {
    std::vector<double> psi = translation_mode(u0);
    if (weighted) {
        for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= std::exp(weight_exponent(u0.u[i + 1], S, r));
    }
    return psi;
}

double adjoint_kernel_residual(const WaveProfile& u0, double S, double r, bool weighted) {
    const auto Lt = assemble_L(u0, S, r).transpose();
    const auto psi = adjoint_kernel(u0, S, r, weighted);
    const auto res = Lt.apply(psi);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        // end rows carry the truncated boundary value of psi
        if (i > 0 && i + 1 < psi.size()) num = std::max(num, std::abs(res[i]));
        den = std::max(den, std::abs(psi[i]));
    }
    return num / den;
}

double solvability_residual(const WaveProfile& u0, double S, double r, double c1) {
    require_resolved(u0, S, r);
    const std::size_t n = u0.size();
    std::vector<double> num(n), den(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = u0.u[i], du = u0.du[i];
        const double psi = du * std::exp(weight_exponent(u, S, r));
        num[i] = psi * (kernels::logistic(u) + 2.0 / r * du * du + c1 * du);
        den[i] = -psi * du;
    }
    return trapezoid(num, u0.dx()) / trapezoid(den, u0.dx());
}

std::vector<double> second_kernel_solution(const WaveProfile& u0, double S, double r) {
    require_resolved(u0, S, r);
    const std::size_t n = u0.size(), c = u0.center_index();
    const double h = u0.dx();
    std::vector<double> q(n), acc(n, 0.0), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = std::exp(-weight_exponent(u0.u[i], S, r)) / (u0.du[i] * u0.du[i]);
    }
    for (std::size_t i = c + 1; i < n; ++i) acc[i] = acc[i - 1] + 0.5 * h * (q[i] + q[i - 1]);
    for (std::size_t i = c; i-- > 0;) acc[i] = acc[i + 1] - 0.5 * h * (q[i] + q[i + 1]);
    for (std::size_t i = 0; i < n; ++i) v[i] = u0.du[i] * acc[i];
    return v;
}

double second_kernel_growth_rate(const WaveProfile& u0, double S, double r) {
    const auto v = second_kernel_solution(u0, S, r);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        if (u0.x[i] >= 0.5 * u0.x_max() && v[i] != 0.0) {
            xs.push_back(u0.x[i]);
            ys.push_back(std::log(std::abs(v[i])));
        }
    }
    if (xs.size() < 2) throw InvalidParameter("profile too short for a tail fit");
    return fit_slope(xs, ys);
}

RelaxationResult relaxation_shift(const WaveProfile& u0, double S, double r, const std::function<double(double)>& h,
                                  double eps_amp, const RelaxationConfig& cfg) {
    require_resolved(u0, S, r);
    if (!(eps_amp != 0.0)) throw InvalidParameter("perturbation amplitude must be non-zero");
    if (!(cfg.dt > 0.0) || !(cfg.check_every >= cfg.dt) || !(cfg.t_max > 0.0)) {
        throw InvalidParameter("invalid relaxation time controls");
    }
    const std::size_t n = u0.size();
    const double dx = u0.dx();
    const Grid1D grid = u0.grid();

    RelaxationResult out;
    std::vector<double> hv(n), hpsi(n), upsi(n), perturbed(n);
    for (std::size_t i = 0; i < n; ++i) {
        hv[i] = h(u0.x[i]);
        const double psi = u0.du[i] * std::exp(weight_exponent(u0.u[i], S, r));
        hpsi[i] = hv[i] * psi;
        upsi[i] = u0.du[i] * psi;
        perturbed[i] = u0.u[i] + eps_amp * hv[i];
    }
    out.raw_integral = trapezoid(hpsi, dx);
    out.normalized_integral = out.raw_integral / trapezoid(upsi, dx);
    out.predicted_shift_per_amp = -out.normalized_integral;

    SimConfig sc;
    sc.dt = cfg.dt;
    sc.t_end = cfg.t_max;
    sc.boundary = Boundary::no_flux;
    const ReducedModel model{kernels::ReducedCoeffs{S, 0.0, r, true}};
    SplitIntegrator<ReducedModel> pert(model, grid, sc, {perturbed});
    SplitIntegrator<ReducedModel> ref(model, grid, sc, {u0.u});

    const auto per_check = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.check_every / cfg.dt)));
    auto offset = [&] { return front_position(pert.state()[0], grid) - front_position(ref.state()[0], grid); };
    double prev_offset = offset();
    std::vector<double> prev_field = pert.state()[0];
    while (pert.time() < cfg.t_max) {
        for (std::size_t s = 0; s < per_check; ++s) {
            pert.step();
            ref.step();
        }
        const double d = offset();
        double field_change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            field_change = std::max(field_change, std::abs(pert.state()[0][i] - prev_field[i]));
        }
        out.last_change = std::abs(d - prev_offset);
        out.displacement = d;
        prev_offset = d;
        prev_field = pert.state()[0];
        if (out.last_change < cfg.stall_tol && field_change < cfg.field_tol) {
            out.converged = true;
            break;
        }
    }
    out.t_final = pert.time();
    out.shift_per_amp = out.displacement / eps_amp;
    return out;
}

}  // namespace clines
