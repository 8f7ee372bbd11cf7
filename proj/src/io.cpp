#include "clines/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "clines/errors.hpp"

namespace clines::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
    const auto tags = traj.tags();
    os << "t,x";
    for (auto tag : tags) os << ',' << to_string(tag);
    os << '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const std::string t = format_double(traj.times[k]);
        for (std::size_t i = 0; i < traj.grid.n; ++i) {
            os << t << ',' << format_double(traj.grid.x(i));
            for (const auto& f : traj.snapshots[k]) os << ',' << format_double(f.values[i]);
            os << '\n';
        }
    }
}

void write_snapshot_csv(const Trajectory& traj, std::size_t snapshot, std::ostream& os) {
    if (snapshot >= traj.snapshots.size()) throw InvalidParameter("snapshot index out of range");
    os << "x";
    for (const auto& f : traj.snapshots[snapshot]) os << ',' << to_string(f.tag);
    os << '\n';
    for (std::size_t i = 0; i < traj.grid.n; ++i) {
        os << format_double(traj.grid.x(i));
        for (const auto& f : traj.snapshots[snapshot]) os << ',' << format_double(f.values[i]);
        os << '\n';
    }
}

void write_fronts_csv(const Trajectory& traj, std::ostream& os) {
    os << "t";
    for (const auto& [tag, _] : traj.front_positions) os << ",front_" << to_string(tag);
    os << '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        os << format_double(traj.times[k]);
        for (const auto& [_, pos] : traj.front_positions) os << ',' << format_double(pos[k]);
        os << '\n';
    }
}

void write_profile_csv(const WaveProfile& profile, std::ostream& os) {
    os << "x,u,du\n";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        os << format_double(profile.x[i]) << ',' << format_double(profile.u[i]) << ','
           << format_double(profile.du[i]) << '\n';
    }
}

void write_eigenvalues_csv(const Spectrum& sp, std::ostream& os) {
    os << "index,eigenvalue\n";
    for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
        os << k << ',' << format_double(sp.eigenvalues[k]) << '\n';
    }
}

void write_eigenvectors_csv(const Spectrum& sp, const DiscretizedOperator& op, std::ostream& os) {
    os << "x";
    for (std::size_t k = 0; k < sp.eigenvectors.size(); ++k) os << ",v" << k;
    os << '\n';
    for (std::size_t i = 0; i < op.size(); ++i) {
        os << format_double(op.x[i]);
        for (const auto& v : sp.eigenvectors) os << ',' << format_double(v[i]);
        os << '\n';
    }
}

void write_speed_reports_csv(std::span<const SpeedReport> reports, std::ostream& os) {
    os << "S,r,s,sigma2,c1_exact,c1_series,c1_star,predicted_star,predicted_exact,measured_speed,relative_gap,frame\n";
    for (const auto& rep : reports) {
        for (double v : {rep.params.S, rep.params.r, rep.params.s, rep.params.sigma2, rep.c1_exact, rep.c1_series,
                         rep.c1_star, rep.predicted_star, rep.predicted_exact, rep.measured_speed, rep.relative_gap}) {
            os << format_double(v) << ',';
        }
        os << to_string(rep.frame) << '\n';
    }
}

std::string git_blob_id(std::string_view content) {
    std::string payload = "blob " + std::to_string(content.size());
    payload.push_back('\0');
    payload.append(content);
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(payload.data(), payload.size(), md.data(), &len, EVP_sha1(), nullptr) != 1) {
        throw NumericalFailure("SHA-1 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xf]);
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

namespace {

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string short_number(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.4g", v);
    return buf.data();
}

}  // namespace

std::string render_svg(std::span<const PlotSeries> series, std::string_view title, std::string_view x_label,
                       std::string_view y_label) {
    constexpr double W = 640, H = 420, left = 70, right = 160, top = 40, bottom = 50;
    static constexpr std::array<const char*, 8> kColors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                        "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << short_number(xv) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << short_number(yv) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n";
    os << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kColors[k % kColors.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << short_number(px(s.x[i])) << ',' << short_number(py(s.y[i])) << ' ';
        }
        os << "\"/>\n";
        const double ly = top + 14.0 + 18.0 * static_cast<double>(k);
        os << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - right + 36 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace clines::io
