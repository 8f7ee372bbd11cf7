#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace clines {

/// Thomas-algorithm solver for a fixed tridiagonal matrix. The forward sweep is
/// precomputed once, so repeated solves with the same matrix are O(n).
/// lower[0] and upper[n-1] are ignored.
class TridiagonalSolver {
public:
    TridiagonalSolver() = default;
    TridiagonalSolver(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);

    std::size_t size() const { return diag_inv_.size(); }

    /// Overwrites rhs with the solution.
    void solve(std::span<double> rhs) const;

private:
    std::vector<double> lower_;
    std::vector<double> upper_mod_;
    std::vector<double> diag_inv_;
};

}  // namespace clines
