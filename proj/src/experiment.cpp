#include "radwave/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "radwave/inequalities.hpp"
#include "radwave/linearization.hpp"
#include "radwave/wave_solver.hpp"

namespace radwave {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(std::exception_ptr error) {
    if (!error) return kExitOk;
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError&) {
        return kExitInputError;
    } catch (const GateError&) {
        return kExitGateFailure;
    } catch (const OverflowError&) {
        return kExitNumericalAbort;
    } catch (const NonFiniteError&) {
        return kExitNumericalAbort;
    } catch (const CflError&) {
        return kExitNumericalAbort;
    } catch (const WallProximityError&) {
        return kExitNumericalAbort;
    } catch (const DomainError&) {
        return kExitInputError;
    } catch (const fs::filesystem_error&) {
        return kExitInputError;
    } catch (...) {
        return kExitNumericalAbort;
    }
}

fs::path resolve_output_dir(const ExperimentConfig& config, const ExecuteOptions& opts) {
    if (opts.out) return *opts.out;
    if (config.output_dir) return *config.output_dir;
    if (const char* root = std::getenv("RADWAVE_OUT"); root && *root) return fs::path(root) / opts.config_stem;
    return fs::path("radwave-out") / opts.config_stem;
}

void write_atomic(const fs::path& path, std::string_view contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw fs::filesystem_error("cannot write", tmp, std::make_error_code(std::errc::io_error));
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw fs::filesystem_error("short write", tmp, std::make_error_code(std::errc::io_error));
    }
    fs::rename(tmp, path);
}

RadialGrid simulation_grid(const ExperimentConfig& config) {
    const auto& g = config.grid;
    const double reach = config.data.R0 + config.run.T;
    constexpr double wall_cells = 8.0;
    if (g.dr) {
        const double r_max = g.r_max.value_or(reach + wall_cells * *g.dr);
        const auto cells = static_cast<std::size_t>(std::llround(r_max / *g.dr));
        return build_grid(config.model.dim, cells * *g.dr, cells);
    }
    if (!g.num_cells) throw DomainError("[grid] needs num_cells or dr");
    const std::size_t cells = *g.num_cells;
    if (g.r_max) return build_grid(config.model.dim, *g.r_max, cells);
    if (cells <= 8) throw DomainError("[grid] num_cells too small to fit the wall margin");
    const double dr = reach / static_cast<double>(cells - 8);
    return build_grid(config.model.dim, dr * static_cast<double>(cells), cells);
}

namespace {

json model_json(const ModelSpec& m) {
    json j;
    j["dim"] = m.dim;
    j["kind"] = std::string(to_string(m.kind));
    j["b"] = m.b;
    j["mass"] = m.mass;
    if (m.kind == NonlinearityKind::Power3D) j["p"] = m.p;
    return j;
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["command"] = std::string(to_string(c.command));
    j["allow_outside_theorems"] = c.allow_outside_theorems;
    j["model"] = model_json(c.model);
    json grid = json::object();
    if (c.grid.r_max) grid["r_max"] = *c.grid.r_max;
    if (c.grid.num_cells) grid["num_cells"] = *c.grid.num_cells;
    if (c.grid.dr) grid["dr"] = *c.grid.dr;
    j["grid"] = grid;
    j["run"] = {{"T", c.run.T},
                {"cfl", c.run.cfl},
                {"snapshot_stride", c.run.snapshot_stride},
                {"drift_gate", c.run.drift_gate}};
    j["data"] = {{"profile", c.data.profile},
                 {"amplitude", c.data.amplitude},
                 {"R0", c.data.R0},
                 {"velocity_amplitude", c.data.velocity_amplitude}};
    j["sweep"] = {{"n_list", c.sweep.n_list},
                  {"cells_per_support", c.sweep.cells_per_support},
                  {"refine_check", c.sweep.refine_check},
                  {"drift_gate", c.sweep.drift_gate}};
    const auto& iq = c.inequalities;
    j["inequalities"] = {{"dr", iq.dr},
                         {"strauss_corpus", iq.strauss_corpus},
                         {"gn_cases", iq.gn_cases},
                         {"mt_beta", iq.mt_beta},
                         {"mt_alpha_fraction", iq.mt_alpha_fraction},
                         {"moser_beta", iq.moser_beta},
                         {"moser_eps_fraction", iq.moser_eps_fraction},
                         {"moser_n", iq.moser_n},
                         {"k_alpha", iq.k_alpha},
                         {"tech2d_b", iq.tech2d_b},
                         {"tech2d_alpha", iq.tech2d_alpha}};
    return j;
}

json grid_json(const RadialGrid& g) {
    return {{"dim", g.dim()}, {"r_max", g.r_max()}, {"num_cells", g.num_cells()}, {"dr", g.spacing()}};
}

std::string platform_string() {
    std::string s;
#if defined(__linux__)
    s = "linux";
#elif defined(__APPLE__)
    s = "macos";
#elif defined(_WIN32)
    s = "windows";
#else
    s = "unknown";
#endif
#if defined(__x86_64__) || defined(_M_X64)
    s += "-x86_64";
#elif defined(__aarch64__)
    s += "-aarch64";
#endif
#if defined(__clang__)
    s += " clang " __clang_version__;
#elif defined(__GNUC__)
    s += " gcc " __VERSION__;
#endif
    return s;
}

// JSON has no inf/nan; keep them readable instead of null.
json number_or_string(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

struct Context {
    const ExperimentConfig& cfg;
    const ExecuteOptions& opts;
    std::ostream& log;
    fs::path dir;
    json results = json::object();
};

int run_validate(Context& ctx) {
    const ModelSpec& m = ctx.cfg.model;
    ctx.log << "model: " << to_string(m.kind) << " N=" << m.dim << " b=" << m.b << " m=" << m.mass;
    if (m.kind == NonlinearityKind::Power3D) ctx.log << " p=" << m.p;
    ctx.log << '\n';

    if (m.kind == NonlinearityKind::Power3D) {
        const CriticalityReport rep = critical_exponent(m);
        ctx.log << "criticality: s_c=" << rep.s_c << " p_mass_critical=" << rep.p_mass_critical;
        if (rep.p_energy_critical) ctx.log << " p_energy_critical=" << *rep.p_energy_critical;
        ctx.log << " class=" << to_string(rep.classification) << '\n';
        json c = {{"s_c", rep.s_c},
                  {"p_mass_critical", rep.p_mass_critical},
                  {"classification", std::string(to_string(rep.classification))}};
        if (rep.p_energy_critical) c["p_energy_critical"] = *rep.p_energy_critical;
        ctx.results["criticality"] = c;

        const auto [q, r] = strichartz_pair(m.p, m.b);
        const bool ok = std::isfinite(r) && r > 0 && q > 0 && admissible_pair_check(q, r);
        ctx.log << "strichartz pair: q=" << q << " r=" << r << (ok ? " (admissible)" : " (not admissible)") << '\n';
        ctx.results["strichartz_pair"] = {{"q", number_or_string(q)}, {"r", number_or_string(r)}, {"admissible", ok}};
    } else {
        ctx.log << "criticality: not defined (no scaling symmetry for " << to_string(m.kind) << ")\n";
    }

    const auto violations = validate_hypotheses(m);
    json hv = json::array();
    if (violations.empty()) ctx.log << "hypotheses: all satisfied\n";
    for (const auto& v : violations) {
        ctx.log << "hypothesis violated: " << v.theorem << ": " << v.condition << " (" << v.detail << ")\n";
        hv.push_back({{"theorem", v.theorem}, {"condition", v.condition}, {"detail", v.detail}});
    }
    ctx.results["hypotheses_satisfied"] = violations.empty();
    ctx.results["hypothesis_violations"] = hv;
    return kExitOk;
}

int run_simulate(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const RadialGrid grid = simulation_grid(cfg);
    ctx.results["grid"] = grid_json(grid);
    auto [u0, v0] = initial_bump(grid, cfg.data.amplitude, cfg.data.R0, cfg.data.velocity_amplitude);

    EvolveOptions eo;
    eo.T = cfg.run.T;
    eo.cfl = cfg.run.cfl;
    eo.snapshot_stride = cfg.run.snapshot_stride;
    ctx.log << "simulate: " << grid.num_cells() << " cells, dr=" << grid.spacing() << ", T=" << eo.T << '\n';
    const Trajectory traj = evolve(FieldState(std::move(u0), std::move(v0)), cfg.model, eo);

    std::ostringstream csv;
    write_energy_csv(csv, traj);
    write_atomic(ctx.dir / "energy.csv", csv.str());

    const double dr = grid.spacing();
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (const auto& rep : traj.reports)
        worst_excess = std::max(worst_excess, rep.support_radius - (cfg.data.R0 + rep.t + 3.0 * dr));
    const bool drift_ok = traj.max_relative_drift <= cfg.run.drift_gate;
    const bool speed_ok = worst_excess <= 0.0;

    ctx.results["dt"] = traj.dt;
    ctx.results["snapshots"] = traj.reports.size();
    ctx.results["max_relative_drift"] = traj.max_relative_drift;
    ctx.results["drift_gate_passed"] = drift_ok;
    ctx.results["support_excess_over_R0_t_3dr"] = worst_excess;
    ctx.results["finite_speed_passed"] = speed_ok;
    ctx.results["l2_spacetime"] = traj.l2_spacetime();

    ctx.log << "energy drift " << traj.max_relative_drift << " (gate " << cfg.run.drift_gate << "): "
            << (drift_ok ? "ok" : "FAILED") << '\n';
    ctx.log << "finite speed: " << (speed_ok ? "ok" : "FAILED") << '\n';
    return drift_ok && speed_ok ? kExitOk : kExitGateFailure;
}

int run_linearize(Context& ctx) {
    const auto& cfg = ctx.cfg;
    SweepOptions so;
    so.policy.cells_per_support = cfg.sweep.cells_per_support;
    so.policy.finest_n = cfg.sweep.n_list.back();
    so.policy.cfl = cfg.run.cfl;
    so.policy.snapshot_stride = cfg.run.snapshot_stride;
    so.policy.drift_gate = cfg.sweep.drift_gate;
    so.refine_check = cfg.sweep.refine_check;
    so.threads = std::max(1, ctx.opts.threads);

    const BaseData base{cfg.data.amplitude, cfg.data.R0, cfg.data.velocity_amplitude};
    const RadialGrid grid = so.policy.grid_for(cfg.model.dim, base, cfg.run.T);
    ctx.results["grid_policy"] = {{"cells_per_support", so.policy.cells_per_support},
                                  {"finest_n", so.policy.finest_n},
                                  {"min_cells_per_radius", so.policy.min_cells_per_radius},
                                  {"wall_cells", so.policy.wall_cells},
                                  {"cfl", so.policy.cfl},
                                  {"snapshot_stride", so.policy.snapshot_stride},
                                  {"drift_gate", so.policy.drift_gate},
                                  {"grid", grid_json(grid)}};
    ctx.results["determinism"] =
        "no random numbers are used; rows are computed independently and written in n order, so reruns of the "
        "same config give identical CSV payloads";
    ctx.log << "linearize: " << cfg.sweep.n_list.size() << " rows on " << grid.num_cells() << " cells (dr="
            << grid.spacing() << "), threads=" << so.threads << '\n';

    const SweepResult res = sweep(cfg.model, base, cfg.sweep.n_list, cfg.run.T, so);

    std::ostringstream csv;
    write_sweep_csv(csv, res);
    write_atomic(ctx.dir / "sweep.csv", csv.str());

    json rows = json::array();
    for (const auto& r : res.rows) {
        json row = {{"n", r.n},
                    {"sup_diff_e0", r.sup_diff_e0},
                    {"data_velocity_l2", r.data_velocity_l2},
                    {"total_energy", r.total_energy},
                    {"drift_nonlinear", r.drift_nonlinear},
                    {"drift_linear", r.drift_linear},
                    {"runtime_s", r.runtime_s},
                    {"converged", r.converged}};
        if (r.coarse_sup_diff_e0) row["coarse_sup_diff_e0"] = *r.coarse_sup_diff_e0;
        rows.push_back(row);
        ctx.log << "  n=" << std::setw(3) << r.n << " sup_diff_e0=" << std::setw(12) << r.sup_diff_e0
                << " l2=" << r.u_l2_spacetime << " " << r.verdict << '\n';
    }
    ctx.results["rows"] = rows;
    ctx.results["verdict"] = res.verdict;
    ctx.results["sup_diff_trend_ok"] = res.sup_diff_trend_ok;
    ctx.results["all_converged"] = res.all_converged;
    if (res.l2_decreasing) ctx.results["l2_decreasing"] = *res.l2_decreasing;
    if (res.strichartz_bounded) ctx.results["strichartz_bounded"] = *res.strichartz_bounded;
    ctx.results["energy_bound"] = number_or_string(res.energy_bound);
    ctx.results["energy_bound_ok"] = res.energy_bound_ok;
    ctx.results["notes"] = res.notes;
    for (const auto& n : res.notes) ctx.log << "note: " << n << '\n';
    ctx.log << "verdict: " << res.verdict << '\n';

    if (res.error) std::rethrow_exception(res.error);
    return res.passed() ? kExitOk : kExitGateFailure;
}

// mu * g(nu r) sampled on the grid, g a Gaussian.
RadialField scaled_gaussian(const RadialGrid& grid, double mu, double nu) {
    return RadialField::sample(grid, [=](double r) { return mu * std::exp(-(nu * r) * (nu * r)); });
}

RadialField bump_field(const RadialGrid& grid, double amplitude, double radius) {
    return initial_bump(grid, amplitude, radius).first;
}

std::size_t cells_for(double r_max, double dr) { return static_cast<std::size_t>(std::ceil(r_max / dr)); }

int run_inequalities(Context& ctx) {
    const auto& iq = ctx.cfg.inequalities;
    std::vector<InequalityVerdict> out;
    json extra = json::object();

    // Strauss: bumps of log-spaced radius, alternating dimension.
    {
        const double r_max = 2.5;
        const RadialGrid g2 = build_grid(2, r_max, cells_for(r_max, iq.dr));
        const RadialGrid g3 = build_grid(3, r_max, cells_for(r_max, iq.dr));
        double worst = 0.0;
        for (int k = 0; k < iq.strauss_corpus; ++k) {
            const double s = iq.strauss_corpus == 1 ? 1.0 : 0.1 * std::pow(20.0, double(k) / (iq.strauss_corpus - 1));
            const RadialGrid& g = k % 2 == 0 ? g2 : g3;
            InequalityVerdict v = strauss_ratio(bump_field(g, 1.0, s));
            v.params["R0"] = s;
            v.params["dim"] = g.dim();
            worst = std::max(worst, v.ratio);
            out.push_back(std::move(v));
        }
        ctx.log << "strauss: " << iq.strauss_corpus << " fields, max ratio " << worst << '\n';
    }

    // Subcritical Moser-Trudinger on a 2D bump.
    {
        const RadialGrid g = build_grid(2, 1.25, cells_for(1.25, iq.dr));
        const RadialField u = bump_field(g, 1.0, 1.0);
        for (double beta : iq.mt_beta) {
            const double alpha = iq.mt_alpha_fraction * 2.0 * std::numbers::pi * (2.0 - beta);
            out.push_back(mt_subcritical_ratio(u, alpha, beta));
        }
    }

    // Sharpness sweeps along Moser fields.
    json moser = json::array();
    for (double beta : iq.moser_beta) {
        for (double frac : iq.moser_eps_fraction) {
            const double eps = 2.0 * std::numbers::pi * (2.0 - beta) * frac;
            const auto rows = mt_sharpness_sweep(beta, eps, iq.moser_n);
            for (const auto& r : rows) {
                InequalityVerdict v;
                v.name = "mt_sharpness";
                v.params = {{"beta", beta}, {"eps", eps}, {"n", r.n}};
                v.lhs = r.lhs;
                v.rhs_factor = 1.0;
                v.ratio = r.lhs;
                v.grid_cells = r.grid_cells;
                out.push_back(std::move(v));
            }
            if (!rows.empty()) {
                const double growth = rows.back().lhs / rows.front().lhs;
                ctx.log << "moser beta=" << beta << " eps=" << eps << ": last/first " << growth << '\n';
                moser.push_back({{"beta", beta}, {"eps", eps}, {"last_over_first", number_or_string(growth)}});
            }
        }
        const MtSupremumSearch s = mt_supremum_lower_bound(beta);
        InequalityVerdict v;
        v.name = "mt_supremum_lower_bound";
        v.params = {{"beta", beta},
                    {"plateau_height", s.plateau_height},
                    {"inner_radius", s.inner_radius},
                    {"outer_radius", s.outer_radius}};
        v.lhs = s.value;
        v.rhs_factor = 1.0;
        v.ratio = s.value;
        out.push_back(std::move(v));
    }
    extra["moser_growth"] = moser;

    // Gagliardo-Nirenberg, with the scaling family (mu, nu) in {0.5, 1, 2}^2.
    json gn = json::array();
    for (const auto& c : iq.gn_cases) {
        const int dim = static_cast<int>(c[0]);
        const double theta = c[1], lambda = c[2];
        const RadialGrid g = build_grid(dim, 12.0, cells_for(12.0, iq.dr));
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (double mu : {0.5, 1.0, 2.0}) {
            for (double nu : {0.5, 1.0, 2.0}) {
                InequalityVerdict v = gn_ratio(scaled_gaussian(g, mu, nu), theta, lambda);
                v.params["mu"] = mu;
                v.params["nu"] = nu;
                lo = std::min(lo, v.ratio);
                hi = std::max(hi, v.ratio);
                out.push_back(std::move(v));
            }
        }
        const GnExponents e = gn_exponents(dim, theta, lambda);
        const std::string report = gn_discrepancy_report(dim, theta, lambda);
        ctx.log << "gn N=" << dim << " theta=" << theta << " lambda=" << lambda << ": A=" << e.A << " B=" << e.B
                << ", scaling spread " << (hi / lo - 1.0) << '\n';
        if (dim >= 3) ctx.log << "  " << report << '\n';
        gn.push_back({{"dim", dim},
                      {"theta", theta},
                      {"lambda", lambda},
                      {"A", e.A},
                      {"B", e.B},
                      {"printed_A", e.printed_A},
                      {"valid", e.valid},
                      {"scaling_spread", hi / lo - 1.0},
                      {"discrepancy_report", report}});
    }
    extra["gn"] = gn;

    // K_alpha.
    for (double alpha : iq.k_alpha) {
        const KAlphaResult k = k_alpha(alpha);
        InequalityVerdict v;
        v.name = "k_alpha";
        v.params = {{"alpha", alpha}, {"argmax", k.argmax}, {"widenings", k.widenings}};
        v.lhs = k.value;
        v.rhs_factor = 1.0 / alpha;
        v.ratio = k.value * alpha;
        out.push_back(std::move(v));
        ctx.log << "K_alpha(" << alpha << ") = " << k.value << '\n';
    }

    {
        const RadialGrid g = build_grid(2, 1.25, cells_for(1.25, iq.dr));
        out.push_back(tech2d_ratio(bump_field(g, 1.0, 1.0), iq.tech2d_b, iq.tech2d_alpha));
    }

    std::ostringstream csv;
    write_verdicts_csv(csv, out);
    write_atomic(ctx.dir / "verdicts.csv", csv.str());
    extra["verdict_count"] = out.size();
    ctx.results = extra;
    return kExitOk;
}

}  // namespace

RunOutcome execute(const ExperimentConfig& config, const ExecuteOptions& opts, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    RunOutcome outcome;
    outcome.directory = resolve_output_dir(config, opts);
    try {
        fs::create_directories(outcome.directory);
    } catch (const fs::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        outcome.exit_code = kExitInputError;
        outcome.summary = e.what();
        return outcome;
    }

    Context ctx{config, opts, log, outcome.directory};
    std::string error_text;
    try {
        switch (config.command) {
            case Command::Validate: outcome.exit_code = run_validate(ctx); break;
            case Command::Simulate: outcome.exit_code = run_simulate(ctx); break;
            case Command::Linearize: outcome.exit_code = run_linearize(ctx); break;
            case Command::Inequalities: outcome.exit_code = run_inequalities(ctx); break;
        }
    } catch (const std::exception& e) {
        outcome.exit_code = exit_code_for(std::current_exception());
        error_text = e.what();
        log << "error: " << error_text << '\n';
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest;
    manifest["command"] = std::string(to_string(config.command));
    manifest["code_version"] = RADWAVE_VERSION;
    manifest["platform"] = platform_string();
    manifest["wall_time_s"] = wall;
    manifest["threads"] = opts.threads;
    manifest["exit_code"] = outcome.exit_code;
    if (!error_text.empty()) manifest["error"] = error_text;
    manifest["config"] = config_json(config);
    manifest["config_toml"] = opts.config_text.empty() ? serialize(config) : opts.config_text;
    manifest["results"] = ctx.results;
    try {
        write_atomic(outcome.directory / "manifest.json", manifest.dump(2) + "\n");
    } catch (const fs::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        if (outcome.exit_code == kExitOk) outcome.exit_code = kExitInputError;
    }

    outcome.summary = error_text.empty() ? "done" : error_text;
    return outcome;
}

}  // namespace radwave
