#include "clines/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

#include <omp.h>
#include "CLI11.hpp"
#include "json.hpp"

#include "clines/errors.hpp"
#include "clines/genetics.hpp"
#include "clines/io.hpp"
#include "clines/pde.hpp"
#include "clines/speed.hpp"
#include "clines/stability.hpp"
#include "clines/standing.hpp"

namespace clines::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::string_view kToolkit = "clinewave";
constexpr std::string_view kVersion = "1.0.0";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string underscored(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

double parse_double(std::string_view text, std::string_view key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError("value '" + t + "' for key '" + std::string(key) + "' is not a number");
    }
    return v;
}

std::string number_tag(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

struct Preset {
    std::map<std::string, std::string> values;
    std::vector<std::string> assumed;
};

class Context;

struct Param {
    std::string key;
    std::string value;
    std::string help;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Param> params;
    std::map<std::string, Preset> presets;
    std::function<void(Context&)> exec;
};

class Context {
public:
    std::string command;
    std::string preset;
    std::map<std::string, std::string> values;
    std::map<std::string, std::string> origin;
    std::set<std::string> assumed;
    fs::path out_dir;
    int threads = 1;
    json report = json::object();
    std::vector<std::pair<std::string, std::string>> outputs;

    const std::string& str(const std::string& key) const { return values.at(key); }
    double num(const std::string& key) const { return parse_double(values.at(key), key); }
    long integer(const std::string& key) const {
        const double v = num(key);
        if (v != std::floor(v)) throw ConfigError("key '" + key + "' needs an integer");
        return static_cast<long>(v);
    }
    bool boolean(const std::string& key) const {
        const std::string v = values.at(key);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw ConfigError("key '" + key + "' needs true or false");
    }
    std::vector<double> list(const std::string& key) const {
        try {
            return parse_number_list(values.at(key));
        } catch (const ConfigError& e) {
            throw ConfigError("key '" + key + "': " + e.what());
        }
    }
    std::string choice(const std::string& key, std::initializer_list<std::string_view> allowed) const {
        const std::string& v = values.at(key);
        for (auto a : allowed) {
            if (v == a) return v;
        }
        std::string msg = "key '" + key + "' must be one of";
        for (auto a : allowed) msg += " " + std::string(a);
        throw ConfigError(msg);
    }
    void emit(const std::string& rel, const std::string& content) {
        io::write_file(out_dir / rel, content);
        outputs.emplace_back(rel, io::git_blob_id(content));
    }
};

template <class Fn>
std::string render(Fn&& fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}

// Enum parsers report bad values as configuration errors.
template <class Fn>
auto config_enum(Fn&& fn, const std::string& key) {
    try {
        return fn();
    } catch (const InvalidParameter& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

json diagnostics_json(const ProfileDiagnostics& d) {
    return {{"symmetry_defect", d.symmetry_defect},
            {"slope_law_defect", d.slope_law_defect},
            {"ode_residual", d.ode_residual},
            {"normalization_defect", d.normalization_defect},
            {"monotone", d.monotone}};
}

json speed_report_json(const SpeedReport& rep) {
    return {{"S", rep.params.S},
            {"r", rep.params.r},
            {"s", rep.params.s},
            {"sigma2", rep.params.sigma2},
            {"c1_exact", rep.c1_exact},
            {"c1_series", rep.c1_series},
            {"c1_star", rep.c1_star},
            {"predicted_star", rep.predicted_star},
            {"predicted_exact", rep.predicted_exact},
            {"measured_speed", rep.measured_speed},
            {"relative_gap", std::isfinite(rep.relative_gap) ? json(rep.relative_gap) : json(nullptr)},
            {"frame", std::string(to_string(rep.frame))}};
}

// ---------------------------------------------------------------- simulate

SimConfig sim_config(const Context& ctx) {
    SimConfig cfg;
    cfg.dt = ctx.num("dt");
    cfg.t_end = ctx.num("t_end");
    cfg.record_every = ctx.num("record_every");
    cfg.boundary = config_enum([&] { return boundary_from_string(ctx.str("boundary")); }, "boundary");
    cfg.splitting = config_enum([&] { return splitting_from_string(ctx.str("splitting")); }, "splitting");
    cfg.diffusion = config_enum([&] { return diffusion_from_string(ctx.str("diffusion")); }, "diffusion");
    cfg.exec = ctx.boolean("parallel") ? kernels::Exec::parallel : kernels::Exec::serial;
    return cfg;
}

std::vector<double> front_field(const Grid1D& grid, const std::string& init, double k, double x0) {
    if (init == "step") {
        std::vector<double> f(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) f[i] = grid.x(i) < x0 ? 1.0 : 0.0;
        return f;
    }
    return tanh_front(grid, k, x0);
}

void export_trajectory(Context& ctx, const std::string& label, const Trajectory& traj) {
    if (ctx.boolean("write_trajectory")) {
        ctx.emit(label + "_trajectory.csv", render([&](std::ostream& os) { io::write_trajectory_csv(traj, os); }));
    }
    ctx.emit(label + "_fronts.csv", render([&](std::ostream& os) { io::write_fronts_csv(traj, os); }));
    const auto wanted = ctx.list("snapshot_times");
    for (double t : wanted) {
        std::size_t best = 0;
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            if (std::abs(traj.times[k] - t) < std::abs(traj.times[best] - t)) best = k;
        }
        ctx.emit(label + "_t" + number_tag(t) + ".csv",
                 render([&](std::ostream& os) { io::write_snapshot_csv(traj, best, os); }));
    }
    std::vector<io::PlotSeries> series;
    for (const auto& [tag, pos] : traj.front_positions) {
        series.push_back({std::string(to_string(tag)), traj.times, pos});
    }
    ctx.emit(label + "_fronts.svg", io::render_svg(series, label + " front positions", "t", "x"));
}

json field_ranges(const Trajectory& traj) {
    json out = json::object();
    for (auto tag : traj.tags()) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            for (double v : traj.field(k, tag).values) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        out[std::string(to_string(tag))] = {lo, hi};
    }
    return out;
}

double final_front(const Trajectory& traj, Quantity tag) { return traj.front_positions.at(tag).back(); }

void cmd_simulate(Context& ctx) {
    const std::string model = ctx.choice("model", {"pqd", "gametes", "reduced", "both"});
    const auto grid = Grid1D::with_spacing(ctx.num("x_min"), ctx.num("x_max"), ctx.num("dx"));
    grid.validate();
    const SimConfig cfg = sim_config(ctx);
    const std::string init = ctx.choice("init", {"tanh", "step", "standing"});
    if (cfg.exec == kernels::Exec::parallel) omp_set_num_threads(ctx.threads);

    if (model == "reduced") {
        ReducedParams rp{ctx.num("S"), ctx.num("eps"), ctx.num("r"), ctx.boolean("coupling")};
        rp.validate();
        std::vector<double> u;
        if (init == "standing") {
            const double reach = std::max(std::abs(grid.x_min), std::abs(grid.x_max));
            const auto prof = profile_from_quadrature(rp.S, rp.r, reach + grid.dx(), grid.dx());
            u.resize(grid.n);
            for (std::size_t i = 0; i < grid.n; ++i) u[i] = prof.value_at(grid.x(i) - ctx.num("offset"));
        } else {
            u = front_field(grid, init, std::sqrt(rp.S), ctx.num("offset"));
        }
        const auto traj = simulate_reduced(u, rp, grid, cfg);
        export_trajectory(ctx, "reduced", traj);
        const double t0 = ctx.num("t_end") / 2.0;
        json rep = {{"final_time", traj.times.back()}, {"final_front", final_front(traj, Quantity::u_reduced)}};
        if (traj.times.size() >= 3 && t0 > 0.0) {
            rep["fitted_speed_second_half"] = instantaneous_speed(traj, Quantity::u_reduced, t0, ctx.num("t_end")).fitted;
        }
        ctx.report["reduced"] = rep;
        return;
    }

    if (init == "standing") throw ConfigError("init=standing applies to model=reduced only");
    FitnessParams fp{ctx.num("sA"), ctx.num("sB"), ctx.num("SA"), ctx.num("SB"), ctx.num("r"), ctx.num("sigma2")};
    fp.validate();
    const double L = std::sqrt(fp.sigma2 / 2.0);
    const double half = 0.5 * ctx.num("offset");
    PqdFields pqd;
    pqd.p = front_field(grid, init, std::sqrt(fp.SA) / L, -half);
    pqd.q = front_field(grid, init, std::sqrt(fp.SB) / L, half);
    pqd.D.assign(grid.n, 0.0);

    if (model == "pqd" || model == "both") {
        const auto traj = simulate_pqd(pqd, fp, grid, cfg);
        export_trajectory(ctx, "pqd", traj);
        ctx.report["pqd"] = {{"final_time", traj.times.back()},
                             {"final_front_p", final_front(traj, Quantity::p)},
                             {"final_front_q", final_front(traj, Quantity::q)},
                             {"final_front_gap", std::abs(final_front(traj, Quantity::p) - final_front(traj, Quantity::q))},
                             {"dx", grid.dx()},
                             {"ranges", field_ranges(traj)}};
    }
    if (model == "gametes" || model == "both") {
        GameteFields g;
        for (auto* f : {&g.u, &g.v, &g.w, &g.z}) f->resize(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const auto y = from_pqd(PQD{pqd.p[i], pqd.q[i], pqd.D[i]});
            g.u[i] = y.u;
            g.v[i] = y.v;
            g.w[i] = y.w;
            g.z[i] = y.z;
        }
        const auto traj = simulate_gametes(g, fp, grid, cfg);
        export_trajectory(ctx, "gametes", traj);
        double sum_defect = 0.0;
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            for (std::size_t i = 0; i < grid.n; ++i) {
                const double s = traj.field(k, Quantity::u).values[i] + traj.field(k, Quantity::v).values[i] +
                                 traj.field(k, Quantity::w).values[i] + traj.field(k, Quantity::z).values[i];
                sum_defect = std::max(sum_defect, std::abs(s - 1.0));
            }
        }
        const std::size_t last = traj.snapshots.size() - 1;
        std::vector<double> p(grid.n), q(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const auto s = to_pqd(GameteFreqs{traj.field(last, Quantity::u).values[i], traj.field(last, Quantity::v).values[i],
                                              traj.field(last, Quantity::w).values[i], traj.field(last, Quantity::z).values[i]});
            p[i] = s.p;
            q[i] = s.q;
        }
        ctx.report["gametes"] = {{"final_time", traj.times.back()},
                                 {"max_sum_defect", sum_defect},
                                 {"final_front_gap_pq", std::abs(front_position(p, grid) - front_position(q, grid))},
                                 {"ranges", field_ranges(traj)}};
    }
}

// ---------------------------------------------------------------- standing

double auto_extent(const Context& ctx, const std::string& key, double fallback) {
    const double v = ctx.num(key);
    return v > 0.0 ? v : fallback;
}

void cmd_standing(Context& ctx) {
    const double S = ctx.num("S"), r = ctx.num("r");
    if (!(S > 0.0) || !(r > 0.0)) throw InvalidParameter("S and r must be positive");
    const double x_max = auto_extent(ctx, "x_max", 30.0 / std::sqrt(S));
    const double dx = ctx.num("dx");
    const std::string method = ctx.choice("method", {"quadrature", "shooting", "both"});
    ctx.report["S"] = S;
    ctx.report["r"] = r;
    ctx.report["x_max"] = x_max;
    ctx.report["condition_S_lt_4r"] = S < 4.0 * r;

    std::vector<WaveProfile> made;
    auto describe = [&](const WaveProfile& prof) {
        json d = diagnostics_json(diagnose(prof, S, r));
        try {
            d["decay_rate_right"] = decay_rate(prof, Tail::right);
            d["decay_rate_left"] = decay_rate(prof, Tail::left);
        } catch (const InvalidParameter& e) {
            d["decay_rate_error"] = e.what();
        }
        d["expected_decay_rate"] = std::sqrt(S);
        return d;
    };
    if (method != "shooting") {
        made.push_back(profile_from_quadrature(S, r, x_max, dx));
        ctx.report["quadrature"] = describe(made.back());
    }
    if (method != "quadrature") {
        const auto sh = profile_from_shooting(S, r, x_max, dx, ctx.num("tol"));
        made.push_back(sh.profile);
        json d = describe(sh.profile);
        d["beta"] = sh.beta;
        d["crossing_time"] = sh.crossing_time;
        d["condition_violated"] = sh.condition_violated;
        ctx.report["shooting"] = d;
    }
    if (made.size() == 2) {
        double diff = 0.0;
        for (std::size_t i = 0; i < made[0].size(); ++i) diff = std::max(diff, std::abs(made[0].u[i] - made[1].u[i]));
        ctx.report["cross_method_sup_diff"] = diff;
    }
    std::vector<io::PlotSeries> prof_series, phase_series;
    for (const auto& prof : made) {
        const std::string tag(to_string(prof.method));
        ctx.emit("profile_" + tag + ".csv", render([&](std::ostream& os) { io::write_profile_csv(prof, os); }));
        prof_series.push_back({tag, prof.x, prof.u});
        phase_series.push_back({tag, prof.u, prof.du});
    }
    ctx.emit("profile.svg", io::render_svg(prof_series, "standing wave", "x", "u"));
    ctx.emit("phase_plane.svg", io::render_svg(phase_series, "phase plane", "u", "u'"));
}

// ---------------------------------------------------------------- speed / compare

std::vector<double> r_values(const Context& ctx) {
    const auto grid = ctx.list("r_grid");
    if (!grid.empty()) return grid;
    return {ctx.num("r")};
}

void run_comparison(Context& ctx, double S, const std::vector<double>& rs) {
    std::vector<SweepPoint> points;
    for (double r : rs) points.push_back({S, r, ctx.num("s"), ctx.num("sigma2")});
    CompareSettings cs;
    cs.dx = ctx.num("dx");
    cs.dt = ctx.num("dt");
    cs.t_end = ctx.num("t_end");
    cs.transient = ctx.num("transient");
    cs.record_every = ctx.num("record_every");
    cs.threads = ctx.threads;
    const auto reports = compare_speeds(points, cs);
    ctx.emit("comparison.csv", render([&](std::ostream& os) { io::write_speed_reports_csv(reports, os); }));

    io::PlotSeries star{"s c1* (theory)", {}, {}}, exact{"s c1 (quadrature)", {}, {}}, measured{"measured", {}, {}};
    std::ostringstream plot;
    plot << "r,theory_star,theory_exact,measured\n";
    json rows = json::array();
    for (const auto& rep : reports) {
        plot << io::format_double(rep.params.r) << ',' << io::format_double(rep.predicted_star) << ','
             << io::format_double(rep.predicted_exact) << ',' << io::format_double(rep.measured_speed) << '\n';
        for (auto* s : {&star, &exact, &measured}) s->x.push_back(rep.params.r);
        star.y.push_back(rep.predicted_star);
        exact.y.push_back(rep.predicted_exact);
        measured.y.push_back(rep.measured_speed);
        rows.push_back(speed_report_json(rep));
    }
    ctx.emit("fig3_plot.csv", plot.str());
    const std::vector<io::PlotSeries> series{star, exact, measured};
    ctx.emit("fig3.svg", io::render_svg(series, "stacked-front speed", "r", "speed (original frame)"));
    ctx.report["comparison"] = rows;
}

void cmd_speed(Context& ctx) {
    const double S = ctx.num("S"), s = ctx.num("s");
    const auto rs = r_values(ctx);
    std::ostringstream table;
    table << "S,r,S_over_r,c1_exact,c1_series0,c1_series1,c1_series2,c1_star\n";
    json rows = json::array();
    for (double r : rs) {
        const double c1 = c1_exact(S, r, ctx.num("quad_tol"));
        table << io::format_double(S) << ',' << io::format_double(r) << ',' << io::format_double(S / r) << ','
              << io::format_double(c1) << ',' << io::format_double(c1_series(S, r, 0)) << ','
              << io::format_double(c1_series(S, r, 1)) << ',' << io::format_double(c1_series(S, r, 2)) << ','
              << io::format_double(c1_star(S, r)) << '\n';
        rows.push_back({{"r", r}, {"c1_exact", c1}, {"c1_series", c1_series(S, r, 2)}, {"c1_star", c1_star(S, r)}});
    }
    ctx.emit("speed_table.csv", table.str());
    ctx.report["coefficients"] = rows;
    if (s > 0.0) {
        const double L = std::sqrt(ctx.num("sigma2") / 2.0);
        ctx.report["single_cline_speed"] = {{"rescaled", single_cline_speed(s, S)},
                                            {"original", single_cline_speed(s, S) * L}};
        ctx.report["zero_recombination_speed"] = {{"rescaled", zero_recombination_speed(s, S)},
                                                  {"original", zero_recombination_speed(s, S) * L}};
    }
    if (ctx.boolean("simulate")) run_comparison(ctx, S, rs);
}

void cmd_compare(Context& ctx) { run_comparison(ctx, ctx.num("S"), ctx.list("r_grid")); }

// ---------------------------------------------------------------- stability

std::function<double(double)> perturbation(const std::string& kind, const WaveProfile& u0) {
    if (kind == "translation") return [&u0](double x) { return u0.slope_at(x); };
    if (kind == "bump") return [](double x) { return std::exp(-x * x); };
    return [](double x) { return x * std::exp(-x * x / 4.0); };
}

void cmd_stability(Context& ctx) {
    const double S = ctx.num("S"), r = ctx.num("r");
    if (!(S > 0.0) || !(r > 0.0)) throw InvalidParameter("S and r must be positive");
    const double x_max = auto_extent(ctx, "x_max", 60.0 * std::sqrt(0.1 / S));
    const auto k = static_cast<std::size_t>(ctx.integer("k"));
    const auto u0 = profile_from_quadrature(S, r, x_max, ctx.num("dx"));
    const auto L = assemble_L(u0, S, r);
    const auto M = assemble_M(u0, S, r);
    const auto specL = spectrum(L, k);
    const auto specM = spectrum(M, k);

    const auto mode = translation_mode(u0);
    std::vector<double> weighted_mode(mode.size());
    for (std::size_t i = 0; i < mode.size(); ++i) {
        const double u = u0.u[i + 1];
        weighted_mode[i] = mode[i] * std::exp(2.0 * S / r * (u * u - u));
    }
    const auto Lmode = L.apply(mode);
    double kernel_res = 0.0, mode_max = 0.0;
    for (std::size_t i = 0; i < mode.size(); ++i) {
        kernel_res = std::max(kernel_res, std::abs(Lmode[i]));
        mode_max = std::max(mode_max, std::abs(mode[i]));
    }
    double max_diff = 0.0;
    for (std::size_t j = 0; j < k; ++j) max_diff = std::max(max_diff, std::abs(specL.eigenvalues[j] - specM.eigenvalues[j]));

    const double c1 = c1_exact(S, r);
    ctx.report = {{"S", S},
                  {"r", r},
                  {"x_max", x_max},
                  {"nodes", L.size()},
                  {"eigenvalues_L", specL.eigenvalues},
                  {"eigenvalues_M", specM.eigenvalues},
                  {"max_L_M_eigenvalue_difference", max_diff},
                  {"leading_cosine_L", cosine_similarity(specL.eigenvectors[0], mode)},
                  {"leading_cosine_M", cosine_similarity(specM.eigenvectors[0], weighted_mode)},
                  {"kernel_residual", kernel_res / mode_max},
                  {"adjoint_kernel_residual", adjoint_kernel_residual(u0, S, r, true)},
                  {"adjoint_kernel_residual_unweighted", adjoint_kernel_residual(u0, S, r, false)},
                  {"M_max_asymmetry", M.max_asymmetry()},
                  {"c1_exact", c1},
                  {"c_eps_from_profile", c_eps_from_profile(u0, S, r)},
                  {"solvability_residual", solvability_residual(u0, S, r, c1)},
                  {"second_kernel_growth_rate", second_kernel_growth_rate(u0, S, r)},
                  {"expected_growth_rate", std::sqrt(S)}};

    ctx.emit("eigenvalues_L.csv", render([&](std::ostream& os) { io::write_eigenvalues_csv(specL, os); }));
    ctx.emit("eigenvalues_M.csv", render([&](std::ostream& os) { io::write_eigenvalues_csv(specM, os); }));
    ctx.emit("eigenvectors_L.csv", render([&](std::ostream& os) { io::write_eigenvectors_csv(specL, L, os); }));
    ctx.emit("eigenvectors_M.csv", render([&](std::ostream& os) { io::write_eigenvectors_csv(specM, M, os); }));
    const auto v0 = second_kernel_solution(u0, S, r);
    ctx.emit("second_kernel.csv", render([&](std::ostream& os) {
                 os << "x,v0\n";
                 for (std::size_t i = 0; i < u0.size(); ++i) os << io::format_double(u0.x[i]) << ',' << io::format_double(v0[i]) << '\n';
             }));
    std::vector<io::PlotSeries> vecs;
    for (std::size_t j = 0; j < std::min<std::size_t>(k, 3); ++j) vecs.push_back({"L mode " + std::to_string(j), L.x, specL.eigenvectors[j]});
    ctx.emit("eigenvectors_L.svg", io::render_svg(vecs, "leading eigenvectors of L", "x", "h"));

    const std::string relax = ctx.choice("relax", {"none", "translation", "bump", "odd"});
    if (relax != "none") {
        RelaxationConfig rc;
        rc.dt = ctx.num("relax_dt");
        rc.t_max = ctx.num("relax_t_max");
        const auto res = relaxation_shift(u0, S, r, perturbation(relax, u0), ctx.num("relax_amp"), rc);
        ctx.report["relaxation"] = {{"perturbation", relax},
                                    {"amplitude", ctx.num("relax_amp")},
                                    {"displacement", res.displacement},
                                    {"shift_per_amp", res.shift_per_amp},
                                    {"raw_integral", res.raw_integral},
                                    {"normalized_integral", res.normalized_integral},
                                    {"predicted_shift_per_amp", res.predicted_shift_per_amp},
                                    {"t_final", res.t_final},
                                    {"converged", res.converged}};
    }
}

// ---------------------------------------------------------------- sweep

void cmd_sweep(Context& ctx) {
    struct Job {
        double S, r, eps;
    };
    std::vector<Job> jobs;
    for (double S : ctx.list("S_grid")) {
        for (double r : ctx.list("r_grid")) {
            for (double eps : ctx.list("eps_grid")) jobs.push_back({S, r, eps});
        }
    }
    if (jobs.empty()) throw ConfigError("sweep grid is empty");
    ReducedRunSettings rs;
    rs.dx = ctx.num("dx");
    rs.dt = ctx.num("dt");
    rs.t_end = ctx.num("t_end");
    rs.transient = ctx.num("transient");
    rs.record_every = ctx.num("record_every");
    const bool coupling = ctx.boolean("coupling");
    for (const auto& j : jobs) ReducedParams{j.S, j.eps, j.r, coupling}.validate();

    struct Outcome {
        double measured = 0.0, predicted = 0.0;
        std::size_t samples = 0;
        std::string fronts;
    };
    std::vector<Outcome> outcomes(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic) num_threads(ctx.threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            const auto& j = jobs[idx];
            const ReducedParams rp{j.S, j.eps, j.r, coupling};
            const auto traj = simulate_reduced_front(rp, rs);
            const auto est = instantaneous_speed(traj, Quantity::u_reduced, rs.transient, rs.t_end);
            outcomes[idx].measured = est.fitted;
            outcomes[idx].samples = est.samples;
            outcomes[idx].predicted = j.eps * (coupling ? c1_exact(j.S, j.r) : 1.0 / std::sqrt(j.S));
            outcomes[idx].fronts = render([&](std::ostream& os) { io::write_fronts_csv(traj, os); });
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::ostringstream summary;
    summary << "index,S,r,eps,measured_speed,predicted_speed,relative_error,samples\n";
    json rows = json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& j = jobs[i];
        const auto& o = outcomes[i];
        char dir[32];
        std::snprintf(dir, sizeof dir, "run_%03zu", i);
        ctx.emit(std::string(dir) + "/fronts.csv", o.fronts);
        const json run_manifest = {{"S", j.S}, {"r", j.r}, {"eps", j.eps}, {"coupling", coupling},
                                   {"dx", rs.dx}, {"dt", rs.dt}, {"t_end", rs.t_end}, {"transient", rs.transient}};
        ctx.emit(std::string(dir) + "/manifest.json", run_manifest.dump(2) + "\n");
        const double rel = o.predicted != 0.0 ? (o.measured - o.predicted) / o.predicted : std::nan("");
        summary << i << ',' << io::format_double(j.S) << ',' << io::format_double(j.r) << ',' << io::format_double(j.eps)
                << ',' << io::format_double(o.measured) << ',' << io::format_double(o.predicted) << ','
                << io::format_double(rel) << ',' << o.samples << '\n';
        rows.push_back({{"run", dir}, {"measured_speed", o.measured}, {"predicted_speed", o.predicted}});
    }
    ctx.emit("summary.csv", summary.str());
    ctx.report["runs"] = rows;
}

// ---------------------------------------------------------------- table

std::vector<Param> sim_params() {
    return {{"dt", "0.05", "time step"},
            {"t_end", "100", "horizon"},
            {"record_every", "1", "output stride in time units"},
            {"boundary", "no-flux", "no-flux | pinned"},
            {"splitting", "strang", "strang | lie"},
            {"diffusion", "crank-nicolson", "crank-nicolson | explicit"},
            {"parallel", "false", "OpenMP kernels inside the run"}};
}

std::vector<Param> comparison_params() {
    return {{"S", "0.1", "heterozygote cost SA = SB"},
            {"s", "0.01", "directional selection sA = sB"},
            {"sigma2", "2", "dispersal variance"},
            {"dx", "0.2", "original-frame grid spacing"},
            {"dt", "0.05", "time step"},
            {"t_end", "800", "horizon"},
            {"transient", "100", "discarded initial window"},
            {"record_every", "10", "front sampling interval"}};
}

std::vector<Command> commands() {
    std::vector<Command> cmds;

    {
        Command c{"simulate", "integrate the (p,q,D), gamete or reduced system", {}, {}, cmd_simulate};
        c.params = {{"model", "pqd", "pqd | gametes | reduced | both (pqd and gametes)"},
                    {"sA", "0", "directional selection at locus A"},
                    {"sB", "0", "directional selection at locus B"},
                    {"SA", "0.1", "heterozygote cost at locus A"},
                    {"SB", "0.1", "heterozygote cost at locus B"},
                    {"r", "0.1", "recombination rate"},
                    {"sigma2", "2", "dispersal variance"},
                    {"S", "0.1", "reduced model: heterozygote cost"},
                    {"eps", "0", "reduced model: directional selection"},
                    {"coupling", "true", "reduced model: keep the gradient term"},
                    {"x_min", "-100", "left domain end"},
                    {"x_max", "100", "right domain end"},
                    {"dx", "0.5", "grid spacing"},
                    {"init", "tanh", "tanh | step | standing (reduced only)"},
                    {"offset", "0", "initial separation of the p and q fronts (reduced: front position)"},
                    {"snapshot_times", "", "times written as separate snapshot files"},
                    {"write_trajectory", "true", "write the full (t, x) trajectory CSV"}};
        for (auto& p : sim_params()) c.params.push_back(p);
        c.presets["fig1"] = {{{"model", "both"}, {"sA", "0"}, {"sB", "0"}, {"SA", "0.1"}, {"SB", "0.1"}, {"r", "0.1"},
                              {"sigma2", "2"}, {"offset", "20"}, {"x_min", "-150"}, {"x_max", "150"}, {"dx", "0.5"},
                              {"dt", "0.1"}, {"t_end", "3000"}, {"record_every", "10"},
                              {"snapshot_times", "0,300,3000"}},
                             {"offset", "x_min", "x_max", "dx", "dt", "t_end", "record_every", "snapshot_times"}};
        cmds.push_back(std::move(c));
    }
    {
        Command c{"standing", "construct the standing wave by quadrature and shooting", {}, {}, cmd_standing};
        c.params = {{"S", "0.1", "heterozygote cost"},
                    {"r", "0.1", "recombination rate"},
                    {"x_max", "0", "half-width of the profile grid (0: 30/sqrt(S))"},
                    {"dx", "0.05", "grid spacing"},
                    {"method", "both", "quadrature | shooting | both"},
                    {"tol", "1e-12", "shooting integrator tolerance"}};
        c.presets["fig2"] = {{{"S", "0.6"}, {"r", "0.25"}}, {}};
        c.presets["fig2-right"] = {{{"S", "0.85"}, {"r", "0.15"}}, {}};
        cmds.push_back(std::move(c));
    }
    {
        Command c{"speed", "first-order speed coefficient by quadrature and series", {}, {}, cmd_speed};
        c.params = comparison_params();
        c.params.push_back({"r", "0.1", "recombination rate"});
        c.params.push_back({"r_grid", "", "list or a:b:step of recombination rates (overrides r)"});
        c.params.push_back({"quad_tol", "1e-10", "quadrature relative tolerance"});
        c.params.push_back({"simulate", "false", "also run the full-system comparison"});
        c.presets["fig3"] = {{{"S", "0.1"}, {"r_grid", "0.1:0.5:0.05"}, {"s", "0.01"}, {"sigma2", "2"},
                              {"simulate", "true"}},
                             {"S", "r_grid", "s", "sigma2", "dx", "dt", "t_end", "transient", "record_every"}};
        cmds.push_back(std::move(c));
    }
    {
        Command c{"compare", "full-system front speed against the first-order theory", {}, {}, cmd_compare};
        c.params = comparison_params();
        c.params.push_back({"r_grid", "0.5,0.3,0.2,0.15", "list or a:b:step of recombination rates"});
        c.presets["fig3"] = {{{"S", "0.1"}, {"r_grid", "0.1:0.5:0.05"}, {"s", "0.01"}, {"sigma2", "2"}},
                             {"S", "r_grid", "s", "sigma2", "dx", "dt", "t_end", "transient", "record_every"}};
        cmds.push_back(std::move(c));
    }
    {
        Command c{"stability", "spectra and kernels of the linearization about the standing wave", {}, {}, cmd_stability};
        c.params = {{"S", "0.1", "heterozygote cost"},
                    {"r", "0.1", "recombination rate"},
                    {"x_max", "0", "half-width (0: 60 sqrt(0.1/S))"},
                    {"dx", "0.05", "grid spacing"},
                    {"k", "5", "number of leading eigenpairs"},
                    {"relax", "none", "none | translation | bump | odd"},
                    {"relax_amp", "0.01", "perturbation amplitude"},
                    {"relax_dt", "0.05", "relaxation time step"},
                    {"relax_t_max", "3000", "relaxation horizon"}};
        cmds.push_back(std::move(c));
    }
    {
        Command c{"sweep", "reduced-equation front speeds over a parameter grid", {}, {}, cmd_sweep};
        c.params = {{"S_grid", "0.1", "heterozygote costs"},
                    {"r_grid", "0.1,0.2,0.3,0.4,0.5", "recombination rates"},
                    {"eps_grid", "0.01", "directional selection values"},
                    {"coupling", "true", "keep the gradient term"},
                    {"dx", "0.1", "grid spacing"},
                    {"dt", "0.05", "time step"},
                    {"t_end", "400", "horizon"},
                    {"transient", "50", "discarded initial window"},
                    {"record_every", "5", "front sampling interval"}};
        cmds.push_back(std::move(c));
    }
    return cmds;
}

struct Bound {
    const Command* cmd = nullptr;
    CLI::App* sub = nullptr;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;
    std::string config_path, out, preset;
    int threads = 0;
};

Context resolve(const Bound& b) {
    Context ctx;
    ctx.command = b.cmd->name;
    for (const auto& p : b.cmd->params) {
        ctx.values[p.key] = p.value;
        ctx.origin[p.key] = "default";
    }
    std::map<std::string, std::string> file_values;
    if (!b.config_path.empty()) {
        std::ifstream f(b.config_path);
        if (!f) throw ConfigError("cannot read config file " + b.config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        file_values = parse_config_text(ss.str());
    }
    std::string preset = b.preset;
    if (preset.empty() && file_values.count("preset")) preset = file_values.at("preset");
    file_values.erase("preset");
    if (!preset.empty()) {
        const auto it = b.cmd->presets.find(preset);
        if (it == b.cmd->presets.end()) throw ConfigError("unknown preset '" + preset + "' for " + b.cmd->name);
        for (const auto& [k, v] : it->second.values) {
            ctx.values[k] = v;
            ctx.origin[k] = "preset";
        }
        ctx.assumed.insert(it->second.assumed.begin(), it->second.assumed.end());
        ctx.preset = preset;
    }
    for (const auto& [k, v] : file_values) {
        if (!ctx.values.count(k)) throw ConfigError("unknown key '" + k + "' for " + b.cmd->name);
        ctx.values[k] = v;
        ctx.origin[k] = "config";
        ctx.assumed.erase(k);
    }
    for (const auto& [k, opt] : b.opts) {
        if (opt->count() > 0) {
            ctx.values[k] = b.raw.at(k);
            ctx.origin[k] = "flag";
            ctx.assumed.erase(k);
        }
    }
    if (b.threads < 0) throw ConfigError("--threads must be non-negative");
    ctx.threads = b.threads > 0 ? b.threads : omp_get_num_procs();
    if (!b.out.empty()) {
        ctx.out_dir = b.out;
    } else if (const char* root = std::getenv("CLINEWAVE_OUT"); root && *root) {
        ctx.out_dir = fs::path(root) / b.cmd->name;
    } else {
        ctx.out_dir = fs::path("clinewave_out") / b.cmd->name;
    }
    return ctx;
}

void write_manifest(const Context& ctx) {
    json cfg = ctx.values;
    json origin = ctx.origin;
    json filled = json::array();
    for (const auto& [k, o] : ctx.origin) {
        if (o == "default" || o == "preset") filled.push_back(k);
    }
    json outputs = json::array();
    for (const auto& [file, id] : ctx.outputs) outputs.push_back({{"file", file}, {"blob", id}});
    const json identity = {{"command", ctx.command}, {"config", cfg}};
    const json manifest = {{"toolkit", kToolkit},
                           {"version", kVersion},
                           {"command", ctx.command},
                           {"preset", ctx.preset.empty() ? json(nullptr) : json(ctx.preset)},
                           {"run_id", io::git_blob_id(identity.dump())},
                           {"config", cfg},
                           {"origin", origin},
                           {"defaults_filled", filled},
                           {"assumed", ctx.assumed},
                           {"threads", ctx.threads},
                           {"outputs", outputs}};
    io::write_file(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

int fail(std::ostream& err, int code, std::string_view kind, std::string_view message, std::string_view diagnostic = "{}") {
    json diag = json::parse(diagnostic, nullptr, false);
    if (diag.is_discarded()) diag = std::string(diagnostic);
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}, {"diagnostic", diag}}.dump() << '\n';
    return code;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(std::string_view text) {
    std::map<std::string, std::string> out;
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = underscored(trim(std::string_view(t).substr(0, eq)));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (out.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        out[key] = trim(std::string_view(t).substr(eq + 1));
    }
    return out;
}

std::vector<double> parse_number_list(std::string_view text) {
    const std::string t = trim(text);
    std::vector<double> out;
    if (t.empty()) return out;
    if (t.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::string_view rest = t;
        while (true) {
            const auto colon = rest.find(':');
            parts.push_back(parse_double(rest.substr(0, colon), "range"));
            if (colon == std::string_view::npos) break;
            rest.remove_prefix(colon + 1);
        }
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
            throw ConfigError("range must be a:b:step with a <= b and step > 0");
        }
        const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        for (long i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
        return out;
    }
    std::string_view rest = t;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(parse_double(rest.substr(0, comma), "list"));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    const auto cmds = commands();
    CLI::App app{"clinewave: coupled underdominant clines toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    std::vector<std::unique_ptr<Bound>> bound;
    for (const auto& cmd : cmds) {
        auto b = std::make_unique<Bound>();
        b->cmd = &cmd;
        b->sub = app.add_subcommand(cmd.name, cmd.help);
        b->sub->add_option("--config", b->config_path, "flat key = value file (flags win)");
        b->sub->add_option("--out", b->out, "output directory");
        b->sub->add_option("--threads", b->threads, "worker threads (0: number of cores)");
        if (!cmd.presets.empty()) {
            std::string names;
            for (const auto& [name, _] : cmd.presets) names += (names.empty() ? "" : ", ") + name;
            b->sub->add_option("--preset", b->preset, "parameter preset: " + names);
        }
        for (const auto& p : cmd.params) {
            b->opts[p.key] = b->sub->add_option("--" + dashed(p.key), b->raw[p.key], p.help + " [" + p.value + "]");
        }
        bound.push_back(std::move(b));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        return fail(err, kConfigError, "config", e.what());
    }

    const Bound* chosen = nullptr;
    for (const auto& b : bound) {
        if (b->sub->parsed()) chosen = b.get();
    }
    if (!chosen) return fail(err, kConfigError, "config", "no command given");

    try {
        Context ctx = resolve(*chosen);
        chosen->cmd->exec(ctx);
        if (!ctx.report.empty()) ctx.emit("report.json", ctx.report.dump(2) + "\n");
        write_manifest(ctx);
        out << ctx.report.dump(2) << '\n';
        return kOk;
    } catch (const ConfigError& e) {
        return fail(err, kConfigError, "config", e.what());
    } catch (const InvalidParameter& e) {
        return fail(err, kInvariantViolation, "invalid_parameter", e.what());
    } catch (const InfeasibleState& e) {
        return fail(err, kInvariantViolation, "infeasible_state", e.what());
    } catch (const InvariantViolation& e) {
        return fail(err, kInvariantViolation, "invariant_violation", e.what(), e.diagnostic());
    } catch (const NumericalFailure& e) {
        return fail(err, kNumericalFailure, "numerical_failure", e.what(), e.diagnostic());
    } catch (const std::exception& e) {
        return fail(err, kIoError, "io", e.what());
    }
}

}  // namespace clines::cli
