#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace clines {

/// Uniform 1-D grid with n >= 3 nodes on [x_min, x_max].
struct Grid1D {
    double x_min = -100.0;
    double x_max = 100.0;
    std::size_t n = 2001;

    double dx() const { return (x_max - x_min) / static_cast<double>(n - 1); }
    double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
    std::vector<double> nodes() const;
    void validate() const;

    /// Grid with spacing `dx` covering [x_min, x_max] (x_max is rounded to a whole number of cells).
    static Grid1D with_spacing(double x_min, double x_max, double dx);
};

enum class Quantity { p, q, D, u, v, w, z, u_reduced };

std::string_view to_string(Quantity q);
Quantity quantity_from_string(std::string_view name);

/// Values aligned with a Grid1D, tagged with the quantity they hold.
struct Field1D {
    Quantity tag = Quantity::u_reduced;
    std::vector<double> values;
};

}  // namespace clines
