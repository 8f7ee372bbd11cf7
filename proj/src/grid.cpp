#include "clines/grid.hpp"

#include <cmath>
#include <string>

#include "clines/errors.hpp"

namespace clines {

std::vector<double> Grid1D::nodes() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
}

void Grid1D::validate() const {
    if (n < 3) throw InvalidParameter("grid needs at least 3 nodes");
    if (!(x_min < x_max)) throw InvalidParameter("grid requires x_min < x_max");
}

Grid1D Grid1D::with_spacing(double x_min, double x_max, double dx) {
    if (!(dx > 0.0) || !(x_max > x_min)) throw InvalidParameter("grid spacing must be positive");
    const auto cells = static_cast<std::size_t>(std::llround((x_max - x_min) / dx));
    return Grid1D{x_min, x_min + static_cast<double>(cells) * dx, cells + 1};
}

std::string_view to_string(Quantity q) {
    switch (q) {
        case Quantity::p: return "p";
        case Quantity::q: return "q";
        case Quantity::D: return "D";
        case Quantity::u: return "u";
        case Quantity::v: return "v";
        case Quantity::w: return "w";
        case Quantity::z: return "z";
        case Quantity::u_reduced: return "u_reduced";
    }
    return "?";
}

Quantity quantity_from_string(std::string_view name) {
    for (Quantity q : {Quantity::p, Quantity::q, Quantity::D, Quantity::u, Quantity::v, Quantity::w,
                       Quantity::z, Quantity::u_reduced}) {
        if (to_string(q) == name) return q;
    }
    throw InvalidParameter("unknown field tag '" + std::string(name) + "'");
}

}  // namespace clines
