#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "zksem/multiplier.hpp"

namespace zksem {

enum class Axis { x, y };

inline Field riesz(const Field& f, Axis axis)
{
    return apply(f, axis == Axis::x ? MultiplierKind::RIESZ_X : MultiplierKind::RIESZ_Y);
}

// d_x L (axis x) and d_y L (axis y)
inline Field nonlocal(const Field& f, Axis axis)
{
    return apply(f, axis == Axis::x ? MultiplierKind::NONLOCAL_X : MultiplierKind::NONLOCAL_Y);
}

// ---------------------------------------------------------------- log-space sums

inline double log_sum_exp(const std::vector<double>& v)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// ---------------------------------------------------------------- A_p constant

struct Ball {
    std::size_t cx = 0, cy = 0;   // grid indices of the center
    double radius = 0;
};

struct BallFamily {
    std::vector<Ball> balls;
    int refinement = 0;
};

// radii dx*2^(k/2^level) capped at min(L)/4; centers on a sub-lattice of stride radius/2^level cells
inline BallFamily make_ball_family(const Grid2D& g, int level = 0)
{
    require(level >= 0, "negative ball refinement level");
    BallFamily fam;
    fam.refinement = level;
    const double h = std::min(g.dx(), g.dy());
    const double cap = std::min(g.Lx, g.Ly) / 4;
    const double ratio = std::pow(2.0, 1.0 / double(1 << level));
    for (int k = 0;; ++k) {
        const double r = h * std::pow(ratio, k);
        if (r > cap * (1 + 1e-12)) break;
        const double cells = r / h / double(1 << level);
        const std::size_t stride = std::max<std::size_t>(1, std::size_t(std::llround(cells)));
        for (std::size_t iy = 0; iy < g.ny; iy += stride)
            for (std::size_t ix = 0; ix < g.nx; ix += stride) fam.balls.push_back({ix, iy, r});
    }
    return fam;
}

struct ApEstimate {
    double p = 2;
    double q_value = 1;   // exp(log_q); may be +inf when Q exceeds double range
    double log_q = 0;
    std::size_t ball_count = 0;
    std::size_t skipped_balls = 0;
    Ball max_ball;
};

// grid points within periodic distance r of the center
inline std::vector<std::size_t> ball_points(const Grid2D& g, const Ball& b)
{
    std::vector<std::size_t> idx;
    const long rx = long(std::ceil(b.radius / g.dx()));
    const long ry = long(std::ceil(b.radius / g.dy()));
    const long nx = long(g.nx), ny = long(g.ny);
    const long sx = std::min(rx, (nx - 1) / 2), sy = std::min(ry, (ny - 1) / 2);
    for (long j = -sy; j <= sy; ++j)
        for (long i = -sx; i <= sx; ++i) {
            const double d2 = std::pow(double(i) * g.dx(), 2) + std::pow(double(j) * g.dy(), 2);
            if (d2 > b.radius * b.radius * (1 + 1e-12)) continue;
            const long ix = ((long(b.cx) + i) % nx + nx) % nx;
            const long iy = ((long(b.cy) + j) % ny + ny) % ny;
            idx.push_back(std::size_t(iy * nx + ix));
        }
    return idx;
}

// Q_p over the ball family, weight given by its logarithm
inline ApEstimate ap_constant_log(const Field& log_w, double p, const BallFamily& balls)
{
    require(p > 1 && std::isfinite(p), "A_p exponent must satisfy 1 < p < inf");
    require(!balls.balls.empty(), "empty ball family");
    for (double v : log_w.data) require(std::isfinite(v), "weight must be positive and finite");
    ApEstimate est;
    est.p = p;
    est.log_q = -std::numeric_limits<double>::infinity();
    for (const Ball& b : balls.balls) {
        auto idx = ball_points(log_w.grid, b);
        if (idx.size() < 4) {
            ++est.skipped_balls;
            continue;
        }
        ++est.ball_count;
        double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
        for (auto k : idx) {
            hi = std::max(hi, log_w.data[k]);
            lo = std::min(lo, log_w.data[k]);
        }
        double s1 = 0, s2 = 0;
        for (auto k : idx) {
            s1 += std::exp(log_w.data[k] - hi);
            s2 += std::exp((lo - log_w.data[k]) / (p - 1));
        }
        const double n = double(idx.size());
        const double lq = (hi - lo) + std::log(s1 / n) + (p - 1) * std::log(s2 / n);
        if (lq > est.log_q) {
            est.log_q = lq;
            est.max_ball = b;
        }
    }
    require(est.ball_count > 0, "no ball in the family has 4 or more interior grid points");
    est.q_value = std::exp(est.log_q);
    return est;
}

inline ApEstimate ap_constant(const Field& w, double p, const BallFamily& balls)
{
    Field lw(w.grid);
    for (std::size_t i = 0; i < w.data.size(); ++i) {
        require(w.data[i] > 0 && std::isfinite(w.data[i]), "non-positive weight");
        lw.data[i] = std::log(w.data[i]);
    }
    return ap_constant_log(lw, p, balls);
}

// ---------------------------------------------------------------- operator norm search

// cot(pi / 2p*), p* = max(p, p')
inline double sharp_riesz_constant(double p)
{
    const double pp = p / (p - 1);
    const double ps = std::max(p, pp);
    return 1.0 / std::tan(std::numbers::pi / (2 * ps));
}

struct NormEstimate {
    double p = 2;
    double lower_bound = 0;     // best ratio found
    double sharp_value = 1;
    double slack = 0.05;
    std::size_t sample_count = 0;
    std::size_t violations = 0;   // ratios above sharp_value*(1+slack)
    std::string best_family;
};

struct NormSearchConfig {
    MultiplierKind kind = MultiplierKind::RIESZ_X;
    double p = 2;
    int budget = 64;
    std::uint64_t seed = 1;
    std::size_t line_points = 0;   // 0: line reduction uses grid.nx
    int ascent_iterations = 10;
    double slack = 0.05;
};

namespace detail {

// symbol of the kind restricted to a single line of modes (y-independent data for x kinds)
inline cplx line_symbol(MultiplierKind kind, std::size_t i, std::size_t n)
{
    if (i == 0) return 0.0;
    const bool nyq = i == n / 2;
    switch (kind) {
    case MultiplierKind::RIESZ_X:
    case MultiplierKind::RIESZ_Y: return nyq ? cplx(0.0) : cplx(0, -1);   // -i sgn(xi), xi > 0 on the half line
    case MultiplierKind::NONLOCAL_X: return 1.0;
    default: return 0.0;
    }
}

inline std::vector<double> line_apply(MultiplierKind kind, const std::vector<double>& f, bool adjoint = false)
{
    auto F = transform_line(f);
    for (std::size_t i = 0; i < F.size(); ++i) {
        cplx s = line_symbol(kind, i, f.size());
        F[i] *= adjoint ? std::conj(s) : s;
    }
    return inverse_transform_line(F, f.size());
}

inline double line_lp(const std::vector<double>& f, double p)
{
    double m = 0;
    for (double v : f) m = std::max(m, std::abs(v));
    if (m == 0) return 0;
    double s = 0;
    for (double v : f) s += std::pow(std::abs(v) / m, p);
    return m * std::pow(s / double(f.size()), 1.0 / p);
}

inline double line_ratio(MultiplierKind kind, const std::vector<double>& f, double p)
{
    const double d = line_lp(f, p);
    return d == 0 ? 0.0 : line_lp(line_apply(kind, f), p) / d;
}

// nonlinear power step x <- dual(T^*(dual_p(T x)))
inline std::vector<double> power_step_line(MultiplierKind kind, const std::vector<double>& x, double p)
{
    auto y = line_apply(kind, x);
    for (double& v : y) v = std::copysign(std::pow(std::abs(v), p - 1), v);
    auto w = line_apply(kind, y, true);
    const double q = p / (p - 1);
    for (double& v : w) v = std::copysign(std::pow(std::abs(v), q - 1), v);
    const double n = line_lp(w, p);
    if (n > 0)
        for (double& v : w) v /= n;
    return w;
}

inline Field power_step_field(MultiplierKind kind, const Field& x, double p)
{
    SpectralField X = transform(x);
    Field y = inverse_transform(apply_multiplier(X, kind));
    for (double& v : y.data) v = std::copysign(std::pow(std::abs(v), p - 1), v);
    SpectralField Y = transform(y);
    const auto& g = x.grid;
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nxh(); ++ix) Y(ix, iy) *= std::conj(symbol(g, Multiplier(kind), ix, iy));
    Field w = inverse_transform(Y);
    const double q = p / (p - 1);
    for (double& v : w.data) v = std::copysign(std::pow(std::abs(v), q - 1), v);
    const double n = lp_norm(w, p);
    if (n > 0)
        for (double& v : w.data) v /= n;
    return w;
}

// ||f||_{L^p(w)} with log-weight, in log form
inline double log_weighted_lp(const Field& f, const Field& log_w, double p)
{
    std::vector<double> terms;
    terms.reserve(f.data.size());
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        const double a = std::abs(f.data[i]);
        if (a == 0 || log_w.data[i] == -std::numeric_limits<double>::infinity()) continue;
        terms.push_back(p * std::log(a) + log_w.data[i]);
    }
    if (terms.empty()) return -std::numeric_limits<double>::infinity();
    return (log_sum_exp(terms) + std::log(f.grid.dx() * f.grid.dy())) / p;
}

} // namespace detail

// random zero-mean field restricted to |m| <= band in both directions, no Nyquist content
inline Field random_band_limited(const Grid2D& g, std::size_t band, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd;
    Field f(g);
    for (double& v : f.data) v = nd(rng);
    SpectralField F = transform(f);
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nxh(); ++ix) {
            const bool keep = std::size_t(std::abs(g.my(iy))) <= band && ix <= band && ix < g.nx / 2 &&
                              iy != g.ny / 2 && !(ix == 0 && iy == 0);
            if (!keep) F(ix, iy) = 0.0;
        }
    return inverse_transform(F);
}

// y-independent near-extremizer of the Hilbert transform on n points: sgn(sin s)|cot(s/2)|^(1/p*),
// mean and Nyquist mode removed
inline std::vector<double> hilbert_extremizer_line(std::size_t n, double p)
{
    const double ps = std::max(p, p / (p - 1));
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = 2 * std::numbers::pi * (double(i) + 0.5) / double(n);
        v[i] = (std::sin(s) >= 0 ? 1.0 : -1.0) * std::pow(std::abs(1.0 / std::tan(s / 2)), 1.0 / ps);
    }
    auto V = transform_line(v);
    V[0] = 0.0;
    V[n / 2] = 0.0;
    return inverse_transform_line(V, n);
}

/* Lower-bound search for ||T||_{L^p(w) -> L^p(w)}.
   Unweighted x/y kinds also scan y-independent (resp. x-independent) candidates
   through the exact line reduction on cfg.line_points points. */
inline NormEstimate operator_norm_search(const Grid2D& g, const NormSearchConfig& cfg,
                                         const std::optional<Field>& log_weight = std::nullopt)
{
    const auto k = cfg.kind;
    require(k == MultiplierKind::RIESZ_X || k == MultiplierKind::RIESZ_Y || k == MultiplierKind::NONLOCAL_X ||
                k == MultiplierKind::NONLOCAL_Y,
            "operator_norm_search supports RIESZ_X, RIESZ_Y, NONLOCAL_X, NONLOCAL_Y");
    require(cfg.p > 1 && std::isfinite(cfg.p), "p must satisfy 1 < p < inf");
    require(cfg.budget >= 1, "budget must be >= 1");
    if (log_weight) {
        require_same_grid(log_weight->grid, g);
        for (double v : log_weight->data)
            require(!std::isnan(v) && v < std::numeric_limits<double>::infinity(), "weight not positive");
    }

    NormEstimate est;
    est.p = cfg.p;
    est.sharp_value = sharp_riesz_constant(cfg.p);
    est.slack = cfg.slack;
    const double limit = est.sharp_value * (1 + cfg.slack);
    auto record = [&](double r, const std::string& fam) {
        ++est.sample_count;
        if (!log_weight && r > limit) ++est.violations;
        if (r > est.lower_bound) {
            est.lower_bound = r;
            est.best_family = fam;
        }
    };
    auto ratio2d = [&](const Field& f) {
        Field tf = apply(f, k);
        if (log_weight) {
            const double a = detail::log_weighted_lp(tf, *log_weight, cfg.p);
            const double b = detail::log_weighted_lp(f, *log_weight, cfg.p);
            if (b == -std::numeric_limits<double>::infinity())
                return a == b ? 0.0 : std::numeric_limits<double>::infinity();
            return std::exp(a - b);
        }
        const double d = lp_norm(f, cfg.p);
        return d == 0 ? 0.0 : lp_norm(tf, cfg.p) / d;
    };

    std::mt19937_64 rng(cfg.seed);
    int used = 0;

    // line reduction candidates
    const bool line_ok = !log_weight && k != MultiplierKind::NONLOCAL_Y;
    if (line_ok && used < cfg.budget) {
        const std::size_t n = cfg.line_points ? cfg.line_points : (k == MultiplierKind::RIESZ_Y ? g.ny : g.nx);
        require(n >= 8 && n % 2 == 0, "line_points must be even and >= 8");
        const MultiplierKind lk = k == MultiplierKind::RIESZ_Y ? MultiplierKind::RIESZ_X : k;
        std::vector<double> v = hilbert_extremizer_line(n, cfg.p);
        record(detail::line_ratio(lk, v, cfg.p), "line_extremizer");
        ++used;
        if (cfg.p != 2) {
            for (int it = 0; it < cfg.ascent_iterations && used < cfg.budget; ++it, ++used) {
                v = detail::power_step_line(lk, v, cfg.p);
                record(detail::line_ratio(lk, v, cfg.p), "line_ascent");
            }
        }
    }

    // 2D candidates
    std::uniform_real_distribution<double> ud(0, 1);
    Field best2d;
    double best2d_ratio = -1;
    while (used < cfg.budget) {
        Field f;
        std::string fam;
        if (used % 2 == 0) {
            const std::size_t band = 1 + std::size_t(ud(rng) * double(std::max<std::size_t>(1, std::min(g.nx, g.ny) / 4)));
            f = random_band_limited(g, band, rng);
            fam = "random_band_limited";
        } else {
            const double cx = (ud(rng) - 0.5) * g.Lx * 0.5, cy = (ud(rng) - 0.5) * g.Ly * 0.5;
            const double s = (0.02 + 0.1 * ud(rng)) * std::min(g.Lx, g.Ly);
            const double sgn_lobe = ud(rng) < 0.5 ? 0.0 : 1.0;
            f = Field::sample(g, [&](double x, double y) {
                const double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (s * s);
                return std::exp(-r2) * (1.0 + sgn_lobe * (x - cx) / s);
            });
            fam = "gaussian_bump";
        }
        const double r = ratio2d(f);
        record(r, fam);
        if (r > best2d_ratio) {
            best2d_ratio = r;
            best2d = f;
        }
        ++used;
        // ascent refinement of the best 2D candidate (unweighted only)
        if (!log_weight && cfg.p != 2 && used % 8 == 0 && used < cfg.budget && best2d_ratio > 0) {
            Field x = detail::power_step_field(k, best2d, cfg.p);
            const double rr = ratio2d(x);
            record(rr, "ascent");
            ++used;
            if (rr > best2d_ratio) {
                best2d_ratio = rr;
                best2d = x;
            }
        }
    }
    return est;
}

} // namespace zksem
