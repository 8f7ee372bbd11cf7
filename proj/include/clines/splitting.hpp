#pragma once

// Operator-splitting integrator for multi-field reaction-diffusion systems on
// a uniform 1-D grid. The reaction substep is classical RK4 on the semi-discrete
// reaction system (gradients are re-evaluated at every stage); the diffusion
// substep is Crank-Nicolson or explicit Euler per field.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "clines/errors.hpp"
#include "clines/genetics.hpp"
#include "clines/grid.hpp"
#include "clines/kernels.hpp"
#include "clines/sim_config.hpp"
#include "clines/tridiag.hpp"

namespace clines {

template <std::size_t N>
using FieldSet = std::array<std::vector<double>, N>;

std::string range_violation_json(std::string_view field, double t, std::size_t index, double value);

/// Reduced scalar equation for stacked clines u = p = q.
struct ReducedModel {
    static constexpr std::size_t kFields = 1;
    static constexpr std::array<Quantity, 1> kTags{Quantity::u_reduced};

    kernels::ReducedCoeffs coeffs;

    std::array<double, 1> diffusivity() const { return {1.0}; }
    void rhs(const FieldSet<1>& s, FieldSet<1>& out, double dx, kernels::Exec exec) const {
        if (exec == kernels::Exec::parallel) kernels::omp::reduced_reaction(s[0], dx, coeffs, out[0]);
        else kernels::serial::reduced_reaction(s[0], dx, coeffs, out[0]);
    }
    void normalize(FieldSet<1>&) const {}
    void check(const FieldSet<1>& s, double t, double tol) const;
};

/// Allele frequencies and linkage disequilibrium (p, q, D).
struct PqdModel {
    static constexpr std::size_t kFields = 3;
    static constexpr std::array<Quantity, 3> kTags{Quantity::p, Quantity::q, Quantity::D};

    FitnessParams fp;

    std::array<double, 3> diffusivity() const {
        const double d = 0.5 * fp.sigma2;
        return {d, d, d};
    }
    void rhs(const FieldSet<3>& s, FieldSet<3>& out, double dx, kernels::Exec exec) const {
        if (exec == kernels::Exec::parallel) {
            kernels::omp::pqd_reaction(s[0], s[1], s[2], dx, fp, out[0], out[1], out[2]);
        } else {
            kernels::serial::pqd_reaction(s[0], s[1], s[2], dx, fp, out[0], out[1], out[2]);
        }
    }
    void normalize(FieldSet<3>&) const {}
    void check(const FieldSet<3>& s, double t, double tol) const;
};

/// Four gamete frequencies with reaction R(y) = exact_step(y) - y per generation.
struct GameteModel {
    static constexpr std::size_t kFields = 4;
    static constexpr std::array<Quantity, 4> kTags{Quantity::u, Quantity::v, Quantity::w, Quantity::z};

    FitnessParams fp;

    std::array<double, 4> diffusivity() const {
        const double d = 0.5 * fp.sigma2;
        return {d, d, d, d};
    }
    void rhs(const FieldSet<4>& s, FieldSet<4>& out, double /*dx*/, kernels::Exec exec) const {
        if (exec == kernels::Exec::parallel) {
            kernels::omp::gamete_reaction(s[0], s[1], s[2], s[3], fp, out[0], out[1], out[2], out[3]);
        } else {
            kernels::serial::gamete_reaction(s[0], s[1], s[2], s[3], fp, out[0], out[1], out[2], out[3]);
        }
    }
    /// Divides each node by its exact component sum.
    void normalize(FieldSet<4>& s) const {
        for (std::size_t i = 0; i < s[0].size(); ++i) {
            const double total = s[0][i] + s[1][i] + s[2][i] + s[3][i];
            for (auto& f : s) f[i] /= total;
        }
    }
    void check(const FieldSet<4>& s, double t, double tol) const;
};

template <class Model>
class SplitIntegrator {
public:
    static constexpr std::size_t N = Model::kFields;

    SplitIntegrator(Model model, Grid1D grid, SimConfig cfg, FieldSet<N> init)
        : model_(std::move(model)), grid_(grid), cfg_(cfg), state_(std::move(init)) {
        const auto diff = model_.diffusivity();
        double max_diff = 0.0;
        for (double d : diff) max_diff = std::max(max_diff, d);
        cfg_.validate(grid_, max_diff);
        for (const auto& f : state_) {
            if (f.size() != grid_.n) throw InvalidParameter("initial field size does not match the grid");
        }
        for (std::size_t k = 0; k < N; ++k) {
            for (auto* buf : {&k1_[k], &k2_[k], &k3_[k], &k4_[k], &stage_[k], &work_[k]}) buf->assign(grid_.n, 0.0);
        }
        if (cfg_.diffusion == DiffusionScheme::crank_nicolson) {
            build_crank_nicolson(cfg_.dt, diff);
        }
        model_.check(state_, 0.0, cfg_.invariant_tol);
    }

    void step() {
        const double h = cfg_.dt;
        if (cfg_.splitting == Splitting::strang) {
            react(0.5 * h);
            diffuse(h);
            react(0.5 * h);
        } else {
            react(h);
            diffuse(h);
        }
        model_.normalize(state_);
        ++steps_;
        model_.check(state_, time(), cfg_.invariant_tol);
    }

    double time() const { return static_cast<double>(steps_) * cfg_.dt; }
    std::size_t steps_taken() const { return steps_; }
    const FieldSet<N>& state() const { return state_; }
    const Grid1D& grid() const { return grid_; }
    const SimConfig& config() const { return cfg_; }
    const Model& model() const { return model_; }

private:
    void eval(const FieldSet<N>& s, FieldSet<N>& out) const {
        model_.rhs(s, out, grid_.dx(), cfg_.exec);
        if (cfg_.boundary == Boundary::pinned) {
            for (auto& f : out) f.front() = f.back() = 0.0;
        }
    }

    void axpy(double a, const std::vector<double>& x, const std::vector<double>& y, std::vector<double>& out) const {
        if (cfg_.exec == kernels::Exec::parallel) kernels::omp::axpy(a, x, y, out);
        else kernels::serial::axpy(a, x, y, out);
    }

    void react(double h) {
        eval(state_, k1_);
        for (std::size_t k = 0; k < N; ++k) axpy(0.5 * h, k1_[k], state_[k], stage_[k]);
        eval(stage_, k2_);
        for (std::size_t k = 0; k < N; ++k) axpy(0.5 * h, k2_[k], state_[k], stage_[k]);
        eval(stage_, k3_);
        for (std::size_t k = 0; k < N; ++k) axpy(h, k3_[k], state_[k], stage_[k]);
        eval(stage_, k4_);
        for (std::size_t k = 0; k < N; ++k) {
            axpy(h / 6.0, k1_[k], state_[k], work_[k]);
            axpy(h / 3.0, k2_[k], work_[k], work_[k]);
            axpy(h / 3.0, k3_[k], work_[k], work_[k]);
            axpy(h / 6.0, k4_[k], work_[k], state_[k]);
        }
    }

    void laplacian(const std::vector<double>& f, std::vector<double>& out) const {
        if (cfg_.exec == kernels::Exec::parallel) kernels::omp::laplacian(f, grid_.dx(), out);
        else kernels::serial::laplacian(f, grid_.dx(), out);
    }

    void build_crank_nicolson(double h, const std::array<double, N>& diff) {
        const std::size_t n = grid_.n;
        const double inv_dx2 = 1.0 / (grid_.dx() * grid_.dx());
        for (std::size_t k = 0; k < N; ++k) {
            const double a = 0.5 * h * diff[k] * inv_dx2;
            std::vector<double> lower(n, -a), diag(n, 1.0 + 2.0 * a), upper(n, -a);
            if (cfg_.boundary == Boundary::pinned) {
                diag.front() = diag.back() = 1.0;
                upper.front() = lower.back() = 0.0;
            } else {
                upper.front() = -2.0 * a;
                lower.back() = -2.0 * a;
            }
            solvers_[k] = TridiagonalSolver(std::move(lower), std::move(diag), std::move(upper));
        }
    }

    void diffuse(double h) {
        const auto diff = model_.diffusivity();
        for (std::size_t k = 0; k < N; ++k) {
            auto& f = state_[k];
            const double left = f.front(), right = f.back();
            laplacian(f, work_[k]);
            const double coef = cfg_.diffusion == DiffusionScheme::crank_nicolson ? 0.5 * h * diff[k] : h * diff[k];
            axpy(coef, work_[k], f, f);
            if (cfg_.diffusion == DiffusionScheme::crank_nicolson) solvers_[k].solve(f);
            if (cfg_.boundary == Boundary::pinned) {
                f.front() = left;
                f.back() = right;
            }
        }
    }

    Model model_;
    Grid1D grid_;
    SimConfig cfg_;
    FieldSet<N> state_;
    FieldSet<N> k1_, k2_, k3_, k4_, stage_, work_;
    std::array<TridiagonalSolver, N> solvers_;
    std::size_t steps_ = 0;
};

}  // namespace clines
