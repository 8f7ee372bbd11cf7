#include "clines/tridiag.hpp"

#include <cmath>

#include "clines/errors.hpp"

namespace clines {

TridiagonalSolver::TridiagonalSolver(std::vector<double> lower, std::vector<double> diag,
                                     std::vector<double> upper)
    : lower_(std::move(lower)) {
    const std::size_t n = diag.size();
    if (lower_.size() != n || upper.size() != n || n == 0) {
        throw InvalidParameter("tridiagonal bands must have equal, nonzero length");
    }
    upper_mod_.resize(n);
    diag_inv_.resize(n);
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pivot = diag[i] - (i > 0 ? lower_[i] * prev_upper : 0.0);
        if (pivot == 0.0 || !std::isfinite(pivot)) throw NumericalFailure("zero pivot in tridiagonal solve");
        diag_inv_[i] = 1.0 / pivot;
        upper_mod_[i] = (i + 1 < n ? upper[i] : 0.0) * diag_inv_[i];
        prev_upper = upper_mod_[i];
    }
}

void TridiagonalSolver::solve(std::span<double> rhs) const {
    const std::size_t n = size();
    rhs[0] *= diag_inv_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * diag_inv_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper_mod_[i] * rhs[i + 1];
}

}  // namespace clines
