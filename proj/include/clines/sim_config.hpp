#pragma once

#include <string_view>

#include "clines/grid.hpp"
#include "clines/kernels.hpp"

namespace clines {

enum class Boundary { no_flux, pinned };
enum class Splitting { strang, lie };
enum class DiffusionScheme { crank_nicolson, explicit_euler };

std::string_view to_string(Boundary b);
std::string_view to_string(Splitting s);
std::string_view to_string(DiffusionScheme d);
Boundary boundary_from_string(std::string_view s);
Splitting splitting_from_string(std::string_view s);
DiffusionScheme diffusion_from_string(std::string_view s);

/// Time-stepping controls shared by all spatial integrators.
struct SimConfig {
    double dt = 0.05;
    double t_end = 100.0;
    double record_every = 1.0;
    Boundary boundary = Boundary::no_flux;
    Splitting splitting = Splitting::strang;
    DiffusionScheme diffusion = DiffusionScheme::crank_nicolson;
    kernels::Exec exec = kernels::Exec::serial;
    /// Pointwise range violations beyond this abort the run.
    double invariant_tol = 1e-6;
    /// Require initial end values within 1e-6 of the limit states {0, 1}.
    bool check_far_field = true;

    /// Throws InvalidParameter on dt <= 0, t_end < 0, or (explicit diffusion only)
    /// dt > dx^2 / (2 * max_diffusivity).
    void validate(const Grid1D& grid, double max_diffusivity) const;
};

}  // namespace clines
