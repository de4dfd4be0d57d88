#pragma once

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "zksem/carleman.hpp"
#include "zksem/io.hpp"
#include "zksem/riesz.hpp"
#include "zksem/uniqueness.hpp"

namespace zksem {

namespace cli {

inline std::string join(const std::string& dir, const std::string& name) { return (std::filesystem::path(dir) / name).string(); }

inline std::vector<double> read_numbers(const json& v, const std::string& what)
{
    require(v.is_array() && !v.empty(), what + " must be a non-empty array");
    std::vector<double> out;
    for (const auto& x : v) {
        require(x.is_number(), what + " must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// base + bump for perturbed_pair, else the single field twice
inline std::pair<Field, Field> read_pair_initial(ConfigReader r, const Grid2D& g)
{
    if (r.has("family") && r.raw("family") == "perturbed_pair") {
        const Field base = read_initial(r.child("base"), g);
        const Field bump = read_initial(r.child("bump"), g);
        r.finish();
        return {base, base + bump};
    }
    const Field f = read_initial(r, g);
    return {f, f};
}

inline Field read_initial_any(ConfigReader r, const Grid2D& g) { return read_pair_initial(r, g).second; }

inline json grid_json(const Grid2D& g) { return {{"nx", g.nx}, {"ny", g.ny}, {"Lx", g.Lx}, {"Ly", g.Ly}}; }

inline int simulate(ConfigReader r, const std::string& out)
{
    SolverConfig cfg;
    cfg.model = model_from_string(r.get<std::string>("model"));
    cfg.grid = read_grid(r.child("grid"));
    cfg.dt = r.get<double>("dt", 0.0);
    cfg.t_end = r.get<double>("t_end");
    cfg.snapshot_every = r.get<int>("snapshot_every", 1);
    cfg.dealias = r.get<bool>("dealias", true);
    cfg.strict = r.get<bool>("strict", false);
    cfg.drift_tolerance = r.get<double>("drift_tolerance", 1e-6);
    cfg.override_dt = r.get<bool>("override_dt", false);
    const auto seed = r.get<std::uint64_t>("seed", 0);
    const Field u0 = read_initial_any(r.child("initial"), cfg.grid);
    r.finish();
    const Trajectory tr = evolve(u0, cfg);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%06zu.sem2", i);
        write_snapshot(join(out, name), tr.snapshots[i], tr.times[i]);
        const Invariants& inv = tr.invariant_log[i];
        rows.push_back({tr.times[i], inv.mass, inv.l2, inv.hamiltonian.value_or(std::nan(""))});
    }
    write_csv(join(out, "invariants.csv"), {"t", "mass", "l2", "hamiltonian"}, rows);
    const Invariants& a = tr.invariant_log.front();
    const Invariants& b = tr.invariant_log.back();
    json rep = {{"subcommand", "simulate"},
                {"seed", seed},
                {"model", to_string(cfg.model)},
                {"grid", grid_json(cfg.grid)},
                {"t_end", cfg.t_end},
                {"snapshots", tr.times.size()},
                {"mass_drift", number(std::abs(b.mass - a.mass))},
                {"l2_drift", number(std::abs(b.l2 - a.l2))},
                {"max_abs_final", max_abs(tr.snapshots.back())}};
    write_json(join(out, "report.json"), rep);
    return 0;
}

inline int riesz_check(ConfigReader r, const std::string& out)
{
    const Grid2D g = read_grid(r.child("grid"));
    NormSearchConfig cfg;
    cfg.kind = multiplier_kind_from_string(r.get<std::string>("kind", std::string("RIESZ_X")));
    cfg.p = r.get<double>("p");
    cfg.budget = r.get<int>("budget", 64);
    cfg.seed = r.get<std::uint64_t>("seed", 1);
    cfg.line_points = r.get<std::size_t>("line_points", 0);
    cfg.ascent_iterations = r.get<int>("ascent_iterations", 10);
    cfg.slack = r.get<double>("slack", 0.05);
    r.finish();
    const NormEstimate e = operator_norm_search(g, cfg);
    write_json(join(out, "report.json"), {{"subcommand", "riesz-check"},
                                          {"seed", cfg.seed},
                                          {"kind", to_string(cfg.kind)},
                                          {"p", e.p},
                                          {"lower_bound", e.lower_bound},
                                          {"sharp_value", e.sharp_value},
                                          {"slack", e.slack},
                                          {"sample_count", e.sample_count},
                                          {"violations", e.violations},
                                          {"best_family", e.best_family}});
    return 0;
}

inline Field read_log_weight(ConfigReader r, const Grid2D& g)
{
    const auto family = r.get<std::string>("family");
    Field lw(g);
    if (family == "unit") {
    } else if (family == "power") {
        const double a = r.get<double>("exponent");
        require(a > -2 && a < 2, "power weight exponent must lie in (-2, 2)");
        lw = Field::sample(g, [&](double x, double y) { return 0.5 * a * std::log(x * x + y * y + g.dx() * g.dy()); });
    } else if (family == "cutoff") {
        CutoffWeight cw;
        cw.R = r.get<double>("R");
        cw.alpha = r.get<double>("alpha");
        cw.profile = TimeProfile(r.get<double>("r", 0.4));
        lw = cutoff_log_weight(g, cw, r.get<double>("t", 0.5), r.get<double>("eps", 1e-3), r.get<double>("delta", 1e-3));
    } else {
        throw ValidationError("unknown weight family " + family);
    }
    r.finish();
    return lw;
}

inline int ap_check(ConfigReader r, const std::string& out)
{
    const Grid2D g = read_grid(r.child("grid"));
    const double p = r.get<double>("p", 2.0);
    const auto seed = r.get<std::uint64_t>("seed", 0);
    std::vector<int> levels{0, 1};
    if (r.has("levels")) {
        levels.clear();
        for (double v : read_numbers(r.raw("levels"), "levels")) levels.push_back(int(v));
    }
    const Field lw = read_log_weight(r.child("weight"), g);
    r.finish();
    json rows = json::array();
    for (int level : levels) {
        const ApEstimate e = ap_constant_log(lw, p, make_ball_family(g, level));
        rows.push_back({{"level", level},
                        {"log_q", e.log_q},
                        {"q_value", number(e.q_value)},
                        {"ball_count", e.ball_count},
                        {"skipped_balls", e.skipped_balls},
                        {"max_ball_radius", e.max_ball.radius}});
    }
    write_json(join(out, "report.json"), {{"subcommand", "ap-check"}, {"seed", seed}, {"p", p}, {"levels", rows}});
    return 0;
}

struct CarlemanSetup {
    CarlemanParams params;
    int count = 100;
    unsigned seed = 1;
    CarlemanQuadrature quad;
    CarlemanCoefficients coeffs;
};

inline CarlemanSetup read_carleman(ConfigReader& r, bool coefficients)
{
    CarlemanSetup s;
    const double R = r.get<double>("R");
    const double rr = r.get<double>("r", 0.4);
    std::optional<double> alpha;
    if (r.has("alpha")) alpha = r.get<double>("alpha");
    s.count = r.get<int>("count", 100);
    s.seed = r.get<unsigned>("seed", 1);
    s.quad.time_intervals = r.get<int>("time_intervals", 128);
    if (coefficients && r.has("coefficients")) {
        ConfigReader c = r.child("coefficients");
        s.coeffs = {c.get<double>("a1", 0.0), c.get<double>("b1", 0.0), c.get<double>("c0", 0.0)};
        c.finish();
    }
    r.finish();
    require(s.count >= 1, "count must be positive");
    s.params = make_carleman_params(R, rr, alpha);
    return s;
}

inline json params_json(const CarlemanParams& p)
{
    return {{"R", p.R}, {"alpha", p.alpha}, {"r", p.profile.r()}, {"cbar", p.cbar}};
}

inline int carleman_check(ConfigReader r, const std::string& out)
{
    const CarlemanSetup s = read_carleman(r, true);
    json rows = json::array();
    double worst = 0;
    for (const TestFunction& g : carleman_test_family(s.params, s.count, s.seed)) {
        const CarlemanSides c = carleman_sides(g, s.params, s.coeffs, s.quad);
        require(std::isfinite(c.ratio), "non-finite Carleman ratio");
        worst = std::max(worst, c.ratio);
        rows.push_back({{"lhs", number(c.lhs)},
                        {"rhs", number(c.rhs)},
                        {"ratio", c.ratio},
                        {"log_scale", c.log_scale},
                        {"reduced_lhs", c.reduced_lhs},
                        {"reduced_rhs", c.reduced_rhs}});
    }
    write_json(join(out, "report.json"), {{"subcommand", "carleman-check"},
                                          {"seed", s.seed},
                                          {"params", params_json(s.params)},
                                          {"max_ratio", worst},
                                          {"samples", rows}});
    return 0;
}

inline int commutator_check(ConfigReader r, const std::string& out)
{
    const CarlemanSetup s = read_carleman(r, false);
    json rows = json::array();
    std::size_t below = 0;
    for (const TestFunction& g : carleman_test_family(s.params, s.count, s.seed)) {
        const CommutatorForm c = commutator_form(g, s.params, s.quad);
        const bool ok = c.reduced_form >= c.reduced_lower_bound - 1e-8 * std::abs(c.reduced_form);
        below += ok ? 0 : 1;
        rows.push_back({{"quadratic_form", number(c.quadratic_form)},
                        {"lower_bound", number(c.lower_bound)},
                        {"log_scale", c.log_scale},
                        {"reduced_form", c.reduced_form},
                        {"reduced_lower_bound", c.reduced_lower_bound},
                        {"holds", ok}});
    }
    const PhiBoundReport pb = phi_support_bounds(s.params);
    write_json(join(out, "report.json"), {{"subcommand", "commutator-check"},
                                          {"seed", s.seed},
                                          {"params", params_json(s.params)},
                                          {"violations", below},
                                          {"max_phi_annulus", pb.max_phi_annulus},
                                          {"max_phi_band", pb.max_phi_band},
                                          {"samples", rows}});
    return 0;
}

inline TruncatedGaussian read_truncated(ConfigReader r)
{
    TruncatedGaussian t{r.get<double>("center", 0.0), r.get<double>("width", 1.0), r.get<double>("cutoff", 3.0)};
    r.finish();
    return t;
}

inline int persistence_check(ConfigReader r, const std::string& out)
{
    const double lambda = r.get<double>("lambda"), beta = r.get<double>("beta");
    const double dx = r.get<double>("dx", 0.02);
    const int nt = r.get<int>("time_intervals", 128);
    const auto seed = r.get<std::uint64_t>("seed", 0);
    SpaceTimeBump w;
    if (r.has("a")) w.a = read_truncated(r.child("a"));
    if (r.has("b")) w.b = read_truncated(r.child("b"));
    if (r.has("c")) {
        ConfigReader c = r.child("c");
        w.c = {c.get<double>("mean", 1.0), c.get<double>("amp", 0.5), c.get<double>("freq", 3.0),
               c.get<double>("phase", 0.3)};
        c.finish();
    }
    w.amplitude = r.get<double>("amplitude", 1.0);
    r.finish();
    const PersistenceSides s = persistence_sides(w, lambda, beta, dx, nt);
    write_json(join(out, "report.json"), {{"subcommand", "persistence-check"},
                                          {"seed", seed},
                                          {"lambda", lambda},
                                          {"beta", beta},
                                          {"lhs", number(s.lhs)},
                                          {"rhs", number(s.rhs)},
                                          {"holds", s.lhs <= s.rhs}});
    return 0;
}

inline int interp_check(ConfigReader r, const std::string& out)
{
    const Grid2D g = read_grid(r.child("grid"));
    const double beta = r.get<double>("beta", 0.5);
    const int k = r.get<int>("k", 4);
    const int count = r.get<int>("count", 50);
    const auto seed = r.get<unsigned>("seed", 3);
    std::vector<double> thetas{0, 0.25, 0.5, 0.75, 1};
    if (r.has("thetas")) thetas = read_numbers(r.raw("thetas"), "thetas");
    r.finish();
    json rows = json::array();
    double worst = 0;
    for (const auto& q : gaussian_family(count, seed)) {
        const Field f = gaussian_field(g, q);
        for (double th : thetas) {
            const InterpolationSides s = interpolation_sides(f, th, beta, k);
            worst = std::max(worst, s.ratio);
            rows.push_back({{"theta", th}, {"lhs", s.lhs}, {"rhs_product", s.rhs_product}, {"ratio", s.ratio}});
        }
    }
    write_json(join(out, "report.json"),
               {{"subcommand", "interp-check"}, {"seed", seed}, {"beta", beta}, {"k", k}, {"max_ratio", worst}, {"samples", rows}});
    return 0;
}

inline json fit_json(const std::optional<DecayFit>& f)
{
    if (!f) return nullptr;
    return {{"c0", f->c0}, {"c1", f->c1}, {"residual", f->residual}, {"radii_used", f->radii_used}};
}

inline void write_profile_csv(const std::string& path, const AnnulusReport& rep)
{
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
        rows.push_back({rep.radii[i], rep.a_values[i], rep.a_initial[i], rep.a_final[i]});
    write_csv(path, {"R", "A_R", "A_R_initial", "A_R_final"}, rows);
}

inline int annulus_report(ConfigReader r, const std::string& out)
{
    const json& inputs = r.raw("inputs");
    require(inputs.is_array() && !inputs.empty(), "inputs must be a non-empty array of snapshot paths");
    const std::vector<double> radii = read_numbers(r.raw("radii"), "radii");
    const auto seed = r.get<std::uint64_t>("seed", 0);
    r.finish();
    Trajectory v;
    for (const auto& p : inputs) {
        require(p.is_string(), "inputs must hold paths");
        Snapshot s = read_snapshot(p.get<std::string>());
        require(v.snapshots.empty() || (s.field.grid == v.snapshots[0].grid && s.t > v.times.back()),
                "snapshots must share a grid and have increasing times");
        v.times.push_back(s.t);
        v.snapshots.push_back(std::move(s.field));
    }
    const AnnulusReport rep = decay_profile(v, radii);
    write_profile_csv(join(out, "annulus.csv"), rep);
    write_json(join(out, "report.json"), {{"subcommand", "annulus-report"},
                                          {"seed", seed},
                                          {"radii", rep.radii},
                                          {"a_values", rep.a_values},
                                          {"a_initial", rep.a_initial},
                                          {"a_final", rep.a_final},
                                          {"fit", fit_json(try_fit(rep.radii, rep.a_values))}});
    return 0;
}

inline int uniqueness(ConfigReader r, const std::string& out)
{
    ExperimentConfig cfg;
    cfg.solver.model = Model::SEM;
    cfg.solver.grid = read_grid(r.child("grid"));
    cfg.solver.dt = r.get<double>("dt", 0.01);
    cfg.solver.t_end = r.get<double>("t_end", 1.0);
    cfg.solver.snapshot_every = r.get<int>("snapshot_every", 1);
    cfg.solver.dealias = r.get<bool>("dealias", true);
    cfg.radii = read_numbers(r.raw("radii"), "radii");
    cfg.boundary_fraction = r.get<double>("boundary_fraction", 0.05);
    const auto seed = r.get<std::uint64_t>("seed", 0);
    std::tie(cfg.u1, cfg.u2) = read_pair_initial(r.child("initial"), cfg.solver.grid);
    r.finish();
    const double cadence = cfg.solver.dt * cfg.solver.snapshot_every;
    require(cadence <= 0.01 + 1e-15, "snapshot cadence must not exceed 0.01");
    const ExperimentReport rep = uniqueness_experiment(cfg);
    write_profile_csv(join(out, "annulus.csv"), rep.profile);
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    write_json(join(out, "report.json"), {{"subcommand", "uniqueness-experiment"},
                                          {"seed", seed},
                                          {"verdict", rep.verdict},
                                          {"max_difference", rep.max_difference},
                                          {"radii", rep.profile.radii},
                                          {"a_values", rep.profile.a_values},
                                          {"a_initial", rep.profile.a_initial},
                                          {"a_final", rep.profile.a_final},
                                          {"fit_full", fit_json(rep.fit_full)},
                                          {"fit_initial", fit_json(rep.fit_initial)},
                                          {"fit_final", fit_json(rep.fit_final)},
                                          {"a0_form", opt(rep.a0_form)},
                                          {"a0_form_radius_r", opt(rep.a0_form_radius_r)},
                                          {"boundary_certificate", rep.boundary_certificate}});
    return 0;
}

inline std::string one_line(std::string s)
{
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

} // namespace cli

// 0 success, 1 validation error, 2 numerical failure; one-line reason on err
inline int cli_dispatch(int argc, const char* const* argv, std::ostream& err = std::cerr)
{
    using Handler = std::function<int(ConfigReader, const std::string&)>;
    const std::map<std::string, Handler> handlers = {
        {"simulate", cli::simulate},
        {"riesz-check", cli::riesz_check},
        {"ap-check", cli::ap_check},
        {"carleman-check", cli::carleman_check},
        {"commutator-check", cli::commutator_check},
        {"persistence-check", cli::persistence_check},
        {"interp-check", cli::interp_check},
        {"annulus-report", cli::annulus_report},
        {"uniqueness-experiment", cli::uniqueness},
    };
    CLI::App app{"ZK/SEM spectral toolkit and inequality harness", "zksem_cli"};
    app.require_subcommand(1, 1);
    std::string config, out = ".";
    for (const auto& [name, h] : handlers) {
        CLI::App* sc = app.add_subcommand(name);
        sc->add_option("--config", config, "JSON configuration")->required();
        sc->add_option("--out", out, "output directory");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return 0;
        }
        err << cli::one_line(e.what()) << "\n";
        return 1;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const json j = load_json(config);
        std::filesystem::create_directories(out);
        return handlers.at(name)(ConfigReader(j, ""), out);
    } catch (const ValidationError& e) {
        err << cli::one_line(e.what()) << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << cli::one_line(e.what()) << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << cli::one_line(e.what()) << "\n";
        return 1;
    }
}

} // namespace zksem
