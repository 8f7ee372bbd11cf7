#include "clines/sim_config.hpp"

#include <string>

#include "clines/errors.hpp"

namespace clines {

std::string_view to_string(Boundary b) { return b == Boundary::no_flux ? "no-flux" : "pinned"; }
std::string_view to_string(Splitting s) { return s == Splitting::strang ? "strang" : "lie"; }
std::string_view to_string(DiffusionScheme d) {
    return d == DiffusionScheme::crank_nicolson ? "crank-nicolson" : "explicit";
}

Boundary boundary_from_string(std::string_view s) {
    if (s == "no-flux") return Boundary::no_flux;
    if (s == "pinned") return Boundary::pinned;
    throw InvalidParameter("unknown boundary '" + std::string(s) + "'");
}

Splitting splitting_from_string(std::string_view s) {
    if (s == "strang") return Splitting::strang;
    if (s == "lie") return Splitting::lie;
    throw InvalidParameter("unknown splitting '" + std::string(s) + "'");
}

DiffusionScheme diffusion_from_string(std::string_view s) {
    if (s == "crank-nicolson") return DiffusionScheme::crank_nicolson;
    if (s == "explicit") return DiffusionScheme::explicit_euler;
    throw InvalidParameter("unknown diffusion scheme '" + std::string(s) + "'");
}

void SimConfig::validate(const Grid1D& grid, double max_diffusivity) const {
    grid.validate();
    if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
    if (!(t_end >= 0.0)) throw InvalidParameter("t_end must be non-negative");
    if (!(record_every > 0.0)) throw InvalidParameter("record_every must be positive");
    if (diffusion == DiffusionScheme::explicit_euler) {
        const double limit = grid.dx() * grid.dx() / (2.0 * max_diffusivity);
        if (dt > limit) {
            throw InvalidParameter("explicit diffusion violates the CFL bound dt <= " + std::to_string(limit));
        }
    }
}

}  // namespace clines
