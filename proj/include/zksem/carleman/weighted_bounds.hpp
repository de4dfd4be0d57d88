#pragma once

#include <cmath>
#include <limits>

#include "zksem/carleman/smooth.hpp"
#include "zksem/carleman/quadrature.hpp"
#include "zksem/riesz.hpp"

namespace zksem {

// the weight exp(alpha phi) with cutoffs theta(rho) and mu(x/R + phi(t)), not subject to Carleman admissibility
struct CutoffWeight {
    double R = 16;
    double alpha = 64;
    TimeProfile profile{};

    double log_exp_part(double x, double y, double t) const
    {
        const double X = x / R + profile(t)[0];
        return alpha * (X * X + y * y / (R * R));
    }
    double mu_arg(double x, double t) const { return x / R + profile(t)[0]; }
};

inline double safe_log(double v) { return v > 0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

// log of w = (exp(alpha phi) theta + eps) (mu + delta), the regularized A_2 weight at time t
inline Field cutoff_log_weight(const Grid2D& g, const CutoffWeight& cw, double t, double eps = 1e-3,
                               double delta = 1e-3)
{
    require(eps > 0 && delta > 0, "eps and delta must be positive");
    const CutoffSet cut(cw.R, cw.R + 2, cw.profile.r(), false);
    const double le = std::log(eps);
    return Field::sample(g, [&](double x, double y) {
        const double lt = cw.log_exp_part(x, y, t) + safe_log(cut.theta(x, y).value);
        const double m = std::max(lt, le);
        return std::log(cut.mu(cw.mu_arg(x, t))[0] + delta) + m + std::log(std::exp(lt - m) + std::exp(le - m));
    });
}

struct WeightedNonlocalSides {
    double log_lhs = -std::numeric_limits<double>::infinity();
    double log_rhs = -std::numeric_limits<double>::infinity();
    double ratio = 0;  // exp(log_lhs - log_rhs)
};

/* |exp(alpha phi) theta mu dL v| against |exp(alpha phi) theta mu v| in L2 over the torus x [0, 1],
   v constant in time, Simpson in t, all sums in log space */
inline WeightedNonlocalSides weighted_nonlocal_sides(const Field& v, const CutoffWeight& cw, Axis axis = Axis::x,
                                                     int time_intervals = 64)
{
    const Grid2D& g = v.grid;
    require(all_finite(v.data), "non-finite field");
    const Field lv = nonlocal(v, axis);
    const CutoffSet cut(cw.R, cw.R + 2, cw.profile.r(), false);
    Field ltheta = Field::sample(g, [&](double x, double y) { return safe_log(cut.theta(x, y).value); });
    const Nodes1D tn = simpson_nodes(0, 1, time_intervals);
    std::vector<double> lhs_terms, rhs_terms;
    const double cell = std::log(g.dx() * g.dy());
    for (std::size_t it = 0; it < tn.x.size(); ++it) {
        const double t = tn.x[it], lw = std::log(tn.w[it]) + cell;
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix) {
                const double x = g.x(ix), y = g.y(iy);
                const double base = ltheta(ix, iy) + safe_log(cut.mu(cw.mu_arg(x, t))[0]);
                if (!std::isfinite(base)) continue;
                const double lwt = 2 * (base + cw.log_exp_part(x, y, t)) + lw;
                if (lv(ix, iy) != 0) lhs_terms.push_back(lwt + 2 * std::log(std::abs(lv(ix, iy))));
                if (v(ix, iy) != 0) rhs_terms.push_back(lwt + 2 * std::log(std::abs(v(ix, iy))));
            }
    }
    WeightedNonlocalSides out;
    out.log_lhs = 0.5 * log_sum_exp(lhs_terms);
    out.log_rhs = 0.5 * log_sum_exp(rhs_terms);
    out.ratio = std::isfinite(out.log_rhs) ? std::exp(out.log_lhs - out.log_rhs)
                                           : (std::isfinite(out.log_lhs) ? std::numeric_limits<double>::infinity() : 0);
    return out;
}

} // namespace zksem
