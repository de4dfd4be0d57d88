#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include <CLI11.hpp>

#include "zksem/carleman.hpp"
#include "zksem/riesz.hpp"
#include "zksem/solver.hpp"
#include "zksem/uniqueness.hpp"

using namespace zksem;

namespace {

struct Verdict {
    bool pass = true;

    // records one sub-check and prints its measured value against the bound
    void check(bool ok, const char* what, double value, double bound)
    {
        std::printf("  %-58s %.6e  (bound %.3e)  %s\n", what, value, bound, ok ? "ok" : "VIOLATED");
        pass = pass && ok;
    }
    void at_most(const char* what, double value, double bound) { check(value <= bound, what, value, bound); }
    void at_least(const char* what, double value, double bound) { check(value >= bound, what, value, bound); }
};

Field random_field(const Grid2D& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Field f(g);
    for (double& v : f.data) v = nd(rng);
    return f;
}

Field soliton_field(const Grid2D& g, double c, double x0)
{
    return Field::sample(g, [&](double x, double) { return kdv_soliton_periodic(x, c, x0, g.Lx); });
}

Field gaussian(const Grid2D& g, double amp, double sx, double sy, double cx = 0, double cy = 0)
{
    return Field::sample(g, [&](double x, double y) {
        return amp * std::exp(-std::pow((x - cx) / sx, 2) - std::pow((y - cy) / sy, 2));
    });
}

double rel_l2(const Field& a, const Field& b) { return l2_norm(a - b) / l2_norm(b); }

Field subtract_mean(Field f)
{
    const double m = mean(f);
    for (double& v : f.data) v -= m;
    return f;
}

Trajectory run(const Field& u0, Model model, double dt, double t_end, int every)
{
    SolverConfig cfg;
    cfg.model = model;
    cfg.grid = u0.grid;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.snapshot_every = every;
    return evolve(u0, cfg);
}

double l1_norm(const Field& f)
{
    double s = 0;
    for (double v : f.data) s += std::abs(v);
    return s * f.grid.dx() * f.grid.dy();
}

// ---------------------------------------------------------------- 1

bool spectral_substrate(Verdict& v)
{
    double round_trip = 0, parseval = 0, partition = 0;
    for (std::size_t n : {16, 64, 128}) {
        const Grid2D g = make_grid(n, n, 7.0, 3.0);
        const Field f = random_field(g, n);
        round_trip = std::max(round_trip, max_abs_diff(f, inverse_transform(transform(f))) / max_abs(f));
        parseval = std::max(parseval, std::abs(spectral_mean_square(transform(f)) / mean_square(f) - 1));
        const Field sum = apply(f, MultiplierKind::NONLOCAL_X) + apply(f, MultiplierKind::NONLOCAL_X_COMPLEMENT);
        partition = std::max(partition, max_abs_diff(sum, subtract_mean(f)));
    }
    v.at_most("round trip max relative error, grids 16/64/128", round_trip, 1e-12);
    v.at_most("Parseval relative error", parseval, 1e-12);
    v.at_most("NONLOCAL_X + complement vs off-mean identity", partition, 1e-10);
    return v.pass;
}

// ---------------------------------------------------------------- 2

bool riesz_norms(Verdict& v)
{
    double identity = 0;
    for (std::size_t n : {16, 64, 128}) {
        const Grid2D g = make_grid(n, n, 13, 9);
        std::mt19937_64 rng(n);
        Field f = random_band_limited(g, n / 2 - 1, rng);
        for (double& x : f.data) x += 0.7;
        const Field s = riesz(riesz(f, Axis::x), Axis::x) + riesz(riesz(f, Axis::y), Axis::y);
        identity = std::max(identity, max_abs_diff(s, -1.0 * subtract_mean(f)));
    }
    v.at_most("Rx^2 + Ry^2 + (Id - mean) on band-limited fields", identity, 1e-10);

    const Grid2D g = make_grid(64, 64, 10, 10);
    NormSearchConfig cfg;
    cfg.kind = MultiplierKind::RIESZ_X;
    cfg.p = 2;
    cfg.budget = 20;
    const NormEstimate l2 = operator_norm_search(g, cfg);
    v.at_most("|L2 norm search - 1| for Rx", std::abs(l2.lower_bound - 1), 1e-10);

    cfg.p = 4;
    cfg.budget = 40;
    cfg.line_points = std::size_t(1) << 23;
    const NormEstimate l4 = operator_norm_search(g, cfg);
    const double sharp = 1 + std::sqrt(2.0);
    std::printf("  p = 4: %zu samples, best family %s\n", l4.sample_count, l4.best_family.c_str());
    v.at_most("p = 4 ratios above cot(pi/8) (1 + 5% slack)", double(l4.violations), 0);
    v.at_most("p = 4 largest ratio / cot(pi/8)", l4.lower_bound / sharp, 1.05);
    v.at_least("p = 4 attained ratio / cot(pi/8)", l4.lower_bound / sharp, 0.9);
    return v.pass;
}

// ---------------------------------------------------------------- 3

bool ap_harness(Verdict& v)
{
    const Grid2D g = make_grid(64, 64, 48, 48);
    double unit = 0;
    for (double p : {2.0, 4.0})
        for (int level : {0, 1}) unit = std::max(unit, std::abs(ap_constant_log(Field(g), p, make_ball_family(g, level)).q_value - 1));
    v.at_most("|Q_p(1) - 1|, p = 2, 4", unit, 0);

    const double R = 16;
    const CutoffWeight cw{R, std::pow(R, 1.5), TimeProfile(0.4)};
    const Field lw = cutoff_log_weight(g, cw, 0.5, 1e-3, 1e-3);
    std::vector<double> log_q;
    for (int level : {0, 1, 2}) {
        const ApEstimate e = ap_constant_log(lw, 2, make_ball_family(g, level));
        std::printf("  level %d: %zu balls, log q = %.10f, q_value %s\n", level, e.ball_count, e.log_q,
                    std::isfinite(e.q_value) ? "finite" : "overflows double");
        log_q.push_back(e.log_q);
    }
    v.at_most("log q finite (1 = finite)", std::isfinite(log_q[1]) ? 0 : 1, 0);
    std::printf("  level 0 -> 1 change: %.2f%% (coarse family, reported only)\n", 100 * (std::exp(std::abs(log_q[1] - log_q[0])) - 1));
    v.at_most("q change under 2x refinement, level 1 -> 2", std::exp(std::abs(log_q[2] - log_q[1])) - 1, 0.10);

    // field set: band-limited noise, Gaussians inside and outside supp(theta mu)
    std::vector<std::pair<std::string, Field>> fields;
    std::mt19937_64 rng(31);
    for (int i = 0; i < 4; ++i) fields.emplace_back("band-limited " + std::to_string(i), random_band_limited(g, 8, rng));
    for (double cx : {-12.0, 0.0, 12.0}) fields.emplace_back("gaussian at x = " + std::to_string(int(cx)), gaussian(g, 1, 2, 2, cx, 0));
    fields.emplace_back("gaussian at x = -22 (outside supp mu)", gaussian(g, 1, 1, 1, -22, 0));
    double worst = 0;
    for (const auto& [name, f] : fields) {
        const WeightedNonlocalSides s = weighted_nonlocal_sides(f, cw, Axis::x, 64);
        std::printf("  weighted dxL ratio %-40s %.6e\n", name.c_str(), s.ratio);
        worst = std::max(worst, s.ratio);
    }
    v.at_most("max weighted dxL ratio over the field set", worst, 1 + 1e-8);
    return v.pass;
}

// ---------------------------------------------------------------- 4

double centroid(const Field& u)
{
    double a = 0, b = 0;
    for (std::size_t iy = 0; iy < u.grid.ny; ++iy)
        for (std::size_t ix = 0; ix < u.grid.nx; ++ix) {
            const double w = u(ix, iy) * u(ix, iy);
            a += u.grid.x(ix) * w;
            b += w;
        }
    return a / b;
}

bool solver_correctness(Verdict& v)
{
    const Grid2D g = make_grid(512, 8, 80, 8);
    const double c = 1, x0 = -20, T = 10;
    const Field u0 = soliton_field(g, c, x0);
    const Trajectory zk = run(u0, Model::ZK, 1e-3, T, 1000);
    v.at_most("ZK L2 shape error vs analytic translate at T = 10", rel_l2(zk.snapshots.back(), soliton_field(g, c, x0 + c * T)), 1e-4);
    const double speed = (centroid(zk.snapshots.back()) - centroid(zk.snapshots.front())) / T;
    v.at_most("ZK measured speed relative error", std::abs(speed - c) / c, 0.01);
    const Invariants& a = zk.invariant_log.front();
    double dm = 0, dq = 0, dh = 0;
    for (const Invariants& b : zk.invariant_log) {
        dm = std::max(dm, std::abs(b.mass - a.mass) / std::abs(a.mass));
        dq = std::max(dq, std::abs(b.l2 - a.l2) / std::abs(a.l2));
        dh = std::max(dh, std::abs(*b.hamiltonian - *a.hamiltonian) / std::abs(*a.hamiltonian));
    }
    v.at_most("ZK mass drift (relative)", dm, 1e-8);
    v.at_most("ZK L2 drift (relative)", dq, 1e-8);
    v.at_most("ZK Hamiltonian drift (relative)", dh, 1e-6);

    // zero-mean data: u + m0 solves KdV in a frame moving at -m0
    const Field s0 = subtract_mean(u0);
    const double m0 = mean(u0), Ts = 5;
    const Trajectory sem = run(s0, Model::SEM, 1e-3, Ts, 1000);
    const Field oracle = Field::sample(g, [&](double x, double) {
        return kdv_soliton_periodic(x, c, x0 + (c - m0) * Ts, g.Lx) - m0;
    });
    v.at_most("SEM vs boosted KdV oracle, relative L2 at T = 5", rel_l2(sem.snapshots.back(), oracle), 1e-6);
    double sm = 0;
    for (const Invariants& b : sem.invariant_log) sm = std::max(sm, std::abs(b.mass - sem.invariant_log[0].mass) / l1_norm(s0));
    v.at_most("SEM mass drift (relative to L1 norm)", sm, 1e-8);

    const Grid2D gc = make_grid(64, 64, 30, 30);
    for (Model m : {Model::ZK, Model::SEM}) {
        const Field f = gaussian(gc, 1.5, 2.0, 2.0);
        std::vector<Field> finals;
        for (double dt : {0.04, 0.02, 0.01}) finals.push_back(run(f, m, dt, 1.0, 1000).snapshots.back());
        const double o1 = std::log2(l2_norm(finals[0] - finals[1]) / l2_norm(finals[1] - finals[2]));
        const std::string what = to_string(m) + " RK4 self-convergence order, dt 0.04/0.02/0.01";
        v.at_least(what.c_str(), o1, 3.8);
    }
    return v.pass;
}

// ---------------------------------------------------------------- 5

bool linearization(Verdict& v)
{
    const Grid2D g = make_grid(48, 48, 24, 24);
    const Field a = gaussian(g, 1.0, 2.0, 2.0);
    const Field b = gaussian(g, 0.8, 2.5, 1.5, 1.0, 0.5);
    std::vector<double> res;
    for (double dt : {0.02, 0.01, 0.005}) {
        const Trajectory u1 = run(a, Model::SEM, dt, 0.4, 2), u2 = run(b, Model::SEM, dt, 0.4, 2);
        const ResidualSeries r = residual_eq_v(difference(u1, u2), linearized_coefficients(u1, u2));
        res.push_back(*std::max_element(r.norms.begin(), r.norms.end()));
        std::printf("  dt = %.3f: max residual %.6e\n", dt, res.back());
    }
    v.at_least("observed order, dt 0.02 -> 0.01", std::log2(res[0] / res[1]), 2);
    v.at_least("observed order, dt 0.01 -> 0.005", std::log2(res[1] / res[2]), 2);
    return v.pass;
}

// ---------------------------------------------------------------- 6

bool carleman_suite(Verdict& v)
{
    std::vector<double> max_ratio;
    double worst_margin = std::numeric_limits<double>::infinity();
    bool finite = true;
    for (double R : {8.0, 16.0, 32.0}) {
        const CarlemanParams p = make_carleman_params(R);
        double m = 0;
        for (const TestFunction& g : carleman_test_family(p, 100, 1)) {
            const CarlemanSides s = carleman_sides(g, p);
            finite = finite && std::isfinite(s.ratio);
            m = std::max(m, s.ratio);
            const CommutatorForm c = commutator_form(g, p);
            worst_margin = std::min(worst_margin, (c.reduced_form - c.reduced_lower_bound) / std::abs(c.reduced_form));
        }
        const PhiBoundReport pb = phi_support_bounds(p);
        std::printf("  R = %g: alpha = %.4f, max ratio %.6e, max phi annulus %.4f (%ld pts), band %.4f (%ld pts)\n", R,
                    p.alpha, m, pb.max_phi_annulus, pb.samples_annulus, pb.max_phi_band, pb.samples_band);
        v.at_most("max phi over the annulus region", pb.max_phi_annulus, 25);
        v.at_most("max phi over the band region", pb.max_phi_band, 10);
        max_ratio.push_back(m);
    }
    v.at_most("non-finite Carleman ratios (1 = some)", finite ? 0 : 1, 0);
    const auto [lo, hi] = std::minmax_element(max_ratio.begin(), max_ratio.end());
    v.at_most("spread of max ratios across R = 8, 16, 32", *hi / *lo, 2);
    v.at_least("min relative margin of commutator form over lower bound", worst_margin, -1e-8);
    return v.pass;
}

// ---------------------------------------------------------------- 7

bool interpolation(Verdict& v)
{
    const double beta = 0.5;
    const int k = 4;
    const auto family = gaussian_family(50, 3);
    const Grid2D coarse = make_grid(64, 64, 64, 64), fine = make_grid(128, 128, 64, 64);
    double endpoint = 0, worst = 0, change = 0;
    bool finite = true;
    for (const auto& q : family) {
        const Field fc = gaussian_field(coarse, q), ff = gaussian_field(fine, q);
        for (double th : {0.0, 1.0})
            endpoint = std::max(endpoint, std::abs(interpolation_sides(fc, th, beta, k).ratio - 1));
        for (double th : {0.25, 0.5, 0.75}) {
            const double rc = interpolation_sides(fc, th, beta, k).ratio, rf = interpolation_sides(ff, th, beta, k).ratio;
            finite = finite && std::isfinite(rc) && std::isfinite(rf) && rc > 0;
            worst = std::max({worst, rc, rf});
            change = std::max(change, std::abs(rf / rc - 1));
        }
    }
    std::printf("  largest interior ratio %.6e\n", worst);
    v.at_most("|ratio - 1| at theta = 0, 1", endpoint, 0);
    v.at_most("non-finite or non-positive interior ratios (1 = some)", finite ? 0 : 1, 0);
    v.at_most("interior ratio change 64^2 -> 128^2", change, 0.2);
    return v.pass;
}

// ---------------------------------------------------------------- 8

bool uniqueness_contrast(Verdict& v)
{
    // the nonlocal terms leave algebraic tails, so the torus is 128 wide to keep them below 1e-10 at the edge
    ExperimentConfig cfg;
    const Grid2D g = make_grid(256, 256, 128, 128);
    cfg.solver.model = Model::SEM;
    cfg.solver.grid = g;
    cfg.solver.dt = 0.01;
    cfg.solver.t_end = 1;
    cfg.u1 = Field::sample(g, [](double x, double y) { return 0.5 * std::exp(-(x * x + y * y) / 18); });
    cfg.u2 = cfg.u1;
    cfg.radii = {4, 6, 8, 10, 12, 14, 16};
    const ExperimentReport same = uniqueness_experiment(cfg);
    std::printf("  identical data: verdict %s\n", same.verdict.c_str());
    v.at_most("identical data verdict is \"identical\" (0 = yes)", same.verdict == "identical" ? 0 : 1, 0);
    v.at_most("identical data max A_R", *std::max_element(same.profile.a_values.begin(), same.profile.a_values.end()), 1e-12);

    cfg.u2 = cfg.u1 + Field::sample(g, [](double x, double y) {
                 return 0.01 * std::exp(-((x - 4) * (x - 4) + y * y) / 4.5);
             });
    const ExperimentReport diff = uniqueness_experiment(cfg);
    std::printf("  perturbed pair: verdict %s, max |v| %.6e\n", diff.verdict.c_str(), diff.max_difference);
    for (std::size_t i = 0; i < diff.profile.radii.size(); ++i)
        std::printf("    R = %5.1f  A_R = %.6e\n", diff.profile.radii[i], diff.profile.a_values[i]);
    const double amin = *std::min_element(diff.profile.a_values.begin(), diff.profile.a_values.end());
    v.at_least("perturbed pair min A_R", amin, std::numeric_limits<double>::min());
    const bool fitted = diff.fit_full.has_value() && std::isfinite(diff.fit_full->residual);
    v.at_most("log-space fit with reported residual (0 = present)", fitted ? 0 : 1, 0);
    if (fitted) {
        std::printf("  fit: c0 = %.6e, c1 = %.6e, residual = %.6e, a0 form = %.6e\n", diff.fit_full->c0, diff.fit_full->c1,
                    diff.fit_full->residual, diff.a0_form.value_or(std::nan("")));
        const double expect = 16 * std::pow(28.0, 1.5) * diff.fit_full->c1;
        v.at_most("a0 form vs 16 * 28^(3/2) * c1 (relative)",
                  diff.a0_form ? std::abs(*diff.a0_form - expect) / std::abs(expect) : 1.0, 1e-12);
    }
    v.at_most("boundary certificate, identical run", same.boundary_certificate, 1e-10);
    v.at_most("boundary certificate, perturbed run", diff.boundary_certificate, 1e-10);
    return v.pass;
}

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<bool(Verdict&)> body;
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    int n = 0;
    app.add_option("--criterion", n, "criterion number 1..8")->required()->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all = {
        {"spectral substrate", 5, spectral_substrate},
        {"Riesz identities and norms", 60, riesz_norms},
        {"A_p harness", 1e300, ap_harness},
        {"solver correctness", 180, solver_correctness},
        {"linearization consistency", 120, linearization},
        {"Carleman suite", 300, carleman_suite},
        {"interpolation", 1e300, interpolation},
        {"uniqueness contrast", 300, uniqueness_contrast},
    };
    const Criterion& c = all[n - 1];
    std::printf("criterion %d: %s\n", n, c.name);
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        c.body(v);
    } catch (const std::exception& e) {
        std::printf("  aborted: %s\n", e.what());
        v.pass = false;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds < 1e300) v.at_most("runtime seconds", secs, c.budget_seconds);
    else std::printf("  runtime %.2f s (no budget)\n", secs);
    std::printf("criterion %d %s: %s\n", n, c.name, v.pass ? "PASS" : "FAIL");
    return v.pass ? 0 : 1;
}
