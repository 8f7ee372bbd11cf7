#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clines/pde.hpp"
#include "clines/speed.hpp"
#include "clines/stability.hpp"
#include "clines/standing.hpp"

namespace clines::io {

/// Shortest-safe round-trip text for a double: printf "%.17g", with nan/inf spelled out.
std::string format_double(double v);

/// Header "t,x,<tags...>", one row per (time, node).
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
/// Header "x,<tags...>" for a single recorded time.
void write_snapshot_csv(const Trajectory& traj, std::size_t snapshot, std::ostream& os);
/// Header "t,front_<tag>..." from the tracked front positions.
void write_fronts_csv(const Trajectory& traj, std::ostream& os);
/// Header "x,u,du".
void write_profile_csv(const WaveProfile& profile, std::ostream& os);
/// Header "index,eigenvalue".
void write_eigenvalues_csv(const Spectrum& sp, std::ostream& os);
/// Header "x,v0,v1,...".
void write_eigenvectors_csv(const Spectrum& sp, const DiscretizedOperator& op, std::ostream& os);
/// Header "S,r,s,sigma2,c1_exact,c1_series,c1_star,predicted_star,predicted_exact,measured_speed,relative_gap,frame".
void write_speed_reports_csv(std::span<const SpeedReport> reports, std::ostream& os);

/// Hex SHA-1 of "blob <size>\0<content>", the object id git assigns to a file with this content.
std::string git_blob_id(std::string_view content);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

/// Standalone SVG line plot with axes, tick labels and a legend.
std::string render_svg(std::span<const PlotSeries> series, std::string_view title, std::string_view x_label,
                       std::string_view y_label);

}  // namespace clines::io
