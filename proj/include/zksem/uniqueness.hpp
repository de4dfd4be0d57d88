#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "zksem/solver.hpp"

namespace zksem {

// |v|^2 + |v_x|^2 + |v_y|^2 + |v_xy|^2 + |lap v|^2 at every grid point
inline Field annulus_integrand(const Field& v)
{
    const SpectralField V = transform(v);
    const Field vx = inverse_transform(apply_multiplier(V, MultiplierKind::DX));
    const Field vy = inverse_transform(apply_multiplier(V, MultiplierKind::DY));
    const Field vxy = inverse_transform(apply_multiplier(apply_multiplier(V, MultiplierKind::DX), MultiplierKind::DY));
    const Field lap = inverse_transform(apply_multiplier(V, MultiplierKind::LAPLACIAN));
    Field out(v.grid);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = v.data[i] * v.data[i] + vx.data[i] * vx.data[i] + vy.data[i] * vy.data[i] +
                      vxy.data[i] * vxy.data[i] + lap.data[i] * lap.data[i];
    return out;
}

struct AnnulusCenter {
    double x = 0, y = 0;
};

inline void require_annulus_inside(const Grid2D& g, double R, AnnulusCenter c)
{
    require(R >= 1 && std::isfinite(R), "annulus radius must be at least 1");
    const double margin = 2 * std::max(g.dx(), g.dy());
    const bool inside = c.x - R - margin >= -0.5 * g.Lx && c.x + R + margin <= 0.5 * g.Lx - g.dx() &&
                        c.y - R - margin >= -0.5 * g.Ly && c.y + R + margin <= 0.5 * g.Ly - g.dy();
    require(inside, "annulus exceeds domain");
}

// sum over grid points with R - 1 <= rho <= R of the integrand, times the cell area
inline double annulus_sum(const Field& integrand, double R, AnnulusCenter c = {})
{
    const Grid2D& g = integrand.grid;
    require_annulus_inside(g, R, c);
    double s = 0;
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const double rho = std::hypot(g.x(ix) - c.x, g.y(iy) - c.y);
            if (rho >= R - 1 && rho <= R) s += integrand(ix, iy);
        }
    return s * g.dx() * g.dy();
}

// single-time annulus quantity
inline double annulus_norm_at(const Field& v, double R, AnnulusCenter c = {})
{
    return std::sqrt(annulus_sum(annulus_integrand(v), R, c));
}

// A_R(v) over the trajectory's time span, trapezoid over snapshots
inline double annulus_norm(const Trajectory& v, double R, AnnulusCenter c = {})
{
    require(!v.snapshots.empty() && v.times.size() == v.snapshots.size(), "empty trajectory");
    if (v.snapshots.size() == 1) return annulus_norm_at(v.snapshots[0], R, c);
    double s = 0;
    double prev = annulus_sum(annulus_integrand(v.snapshots[0]), R, c);
    for (std::size_t i = 1; i < v.snapshots.size(); ++i) {
        const double cur = annulus_sum(annulus_integrand(v.snapshots[i]), R, c);
        s += 0.5 * (v.times[i] - v.times[i - 1]) * (prev + cur);
        prev = cur;
    }
    return std::sqrt(s);
}

struct AnnulusReport {
    std::vector<double> radii;
    std::vector<double> a_values;   // over the full time span
    std::vector<double> a_initial;  // at the first snapshot
    std::vector<double> a_final;    // at the last snapshot
};

inline AnnulusReport decay_profile(const Trajectory& v, const std::vector<double>& radii)
{
    require(!radii.empty(), "empty radii ladder");
    for (std::size_t i = 1; i < radii.size(); ++i) require(radii[i] > radii[i - 1], "radii must be strictly ascending");
    require(!v.snapshots.empty() && v.times.size() == v.snapshots.size(), "empty trajectory");
    for (double R : radii) require_annulus_inside(v.snapshots[0].grid, R, {});
    std::vector<Field> integrands;
    for (const Field& f : v.snapshots) integrands.push_back(annulus_integrand(f));
    AnnulusReport rep;
    rep.radii = radii;
    for (double R : radii) {
        std::vector<double> per(integrands.size());
        for (std::size_t i = 0; i < integrands.size(); ++i) per[i] = annulus_sum(integrands[i], R);
        double s = 0;
        for (std::size_t i = 1; i < per.size(); ++i) s += 0.5 * (v.times[i] - v.times[i - 1]) * (per[i - 1] + per[i]);
        rep.a_values.push_back(per.size() == 1 ? std::sqrt(per[0]) : std::sqrt(s));
        rep.a_initial.push_back(std::sqrt(per.front()));
        rep.a_final.push_back(std::sqrt(per.back()));
    }
    return rep;
}

struct DecayFit {
    double c0 = 0, c1 = 0;
    double residual = 0;  // root mean square of the log-space misfit
    std::vector<double> radii_used;
};

// least squares of log A = log c0 - c1 R^{3/2} over the strictly positive values
inline DecayFit fit_exponent(const std::vector<double>& radii, const std::vector<double>& values)
{
    require(radii.size() == values.size(), "radii and values differ in length");
    std::vector<double> s, l;
    DecayFit fit;
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (values[i] > 0 && std::isfinite(values[i])) {
            s.push_back(std::pow(radii[i], 1.5));
            l.push_back(std::log(values[i]));
            fit.radii_used.push_back(radii[i]);
        }
    require(s.size() >= 3, "insufficient positive data for the decay fit");
    const double n = double(s.size());
    double ms = 0, ml = 0;
    for (std::size_t i = 0; i < s.size(); ++i) ms += s[i] / n, ml += l[i] / n;
    double sss = 0, ssl = 0;
    for (std::size_t i = 0; i < s.size(); ++i) sss += (s[i] - ms) * (s[i] - ms), ssl += (s[i] - ms) * (l[i] - ml);
    require(sss > 0, "decay fit needs distinct radii");
    const double slope = ssl / sss;
    fit.c1 = -slope;
    fit.c0 = std::exp(ml - slope * ms);
    double r = 0;
    for (std::size_t i = 0; i < s.size(); ++i) r += std::pow(l[i] - (ml + slope * (s[i] - ms)), 2);
    fit.residual = std::sqrt(r / n);
    return fit;
}

inline DecayFit fit_exponent(const AnnulusReport& rep) { return fit_exponent(rep.radii, rep.a_values); }

struct ExperimentConfig {
    SolverConfig solver;
    Field u1, u2;
    std::vector<double> radii;
    double boundary_fraction = 0.05;  // outer band width per side, as a fraction of the domain
};

struct ExperimentReport {
    std::string verdict;  // "identical" or "distinct"
    double max_difference = 0;
    AnnulusReport profile;
    std::optional<DecayFit> fit_full, fit_initial, fit_final;
    // contradiction thresholds 16 (28)^{3/2} c1 (annulus radius 28R) and 16 c1 (radius R)
    std::optional<double> a0_form, a0_form_radius_r;
    double boundary_certificate = 0;  // max |u1|, |u2| over the outer band and all snapshots
};

inline double boundary_band_max(const Field& f, double fraction)
{
    const Grid2D& g = f.grid;
    double m = 0;
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nx; ++ix)
            if (std::abs(g.x(ix)) >= (0.5 - fraction) * g.Lx || std::abs(g.y(iy)) >= (0.5 - fraction) * g.Ly)
                m = std::max(m, std::abs(f(ix, iy)));
    return m;
}

inline std::optional<DecayFit> try_fit(const std::vector<double>& radii, const std::vector<double>& values)
{
    std::size_t positive = 0;
    for (double v : values) positive += v > 0 ? 1 : 0;
    if (positive < 3) return std::nullopt;
    return fit_exponent(radii, values);
}

inline ExperimentReport uniqueness_experiment(const ExperimentConfig& cfg)
{
    require(cfg.solver.model == Model::SEM, "the uniqueness experiment evolves SEM");
    require(cfg.boundary_fraction > 0 && cfg.boundary_fraction < 0.5, "boundary fraction must lie in (0, 1/2)");
    const Grid2D& g = cfg.u1.grid;
    for (double R : cfg.radii) require(R <= 0.25 * std::min(g.Lx, g.Ly), "radii must stay in the inner half of the domain");
    const Trajectory t1 = evolve(cfg.u1, cfg.solver);
    const Trajectory t2 = evolve(cfg.u2, cfg.solver);
    const Trajectory v = difference(t1, t2);
    ExperimentReport rep;
    for (std::size_t i = 0; i < v.snapshots.size(); ++i) {
        rep.max_difference = std::max(rep.max_difference, max_abs(v.snapshots[i]));
        rep.boundary_certificate = std::max({rep.boundary_certificate,
                                             boundary_band_max(t1.snapshots[i], cfg.boundary_fraction),
                                             boundary_band_max(t2.snapshots[i], cfg.boundary_fraction)});
    }
    rep.verdict = rep.max_difference < 1e-12 ? "identical" : "distinct";
    rep.profile = decay_profile(v, cfg.radii);
    rep.fit_full = try_fit(rep.profile.radii, rep.profile.a_values);
    rep.fit_initial = try_fit(rep.profile.radii, rep.profile.a_initial);
    rep.fit_final = try_fit(rep.profile.radii, rep.profile.a_final);
    if (rep.fit_full) {
        rep.a0_form = 16 * std::pow(28.0, 1.5) * rep.fit_full->c1;
        rep.a0_form_radius_r = 16 * rep.fit_full->c1;
    }
    return rep;
}

} // namespace zksem
