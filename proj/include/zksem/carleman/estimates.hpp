#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "zksem/carleman/quadrature.hpp"
#include "zksem/carleman/test_function.hpp"

namespace zksem {

// constant lower-order coefficients of P = dt + dx^3 + dx dy^2 + a1 dx + b1 dy + c0
struct CarlemanCoefficients {
    double a1 = 0, b1 = 0, c0 = 0;
};

namespace detail {

// x-t factor quantities, all carrying the common weight exp(l)
enum XT { G0, G1, PA, F0, F1, F2, P0F0, P2F0, Q1F1, S0F0, PXF1, A1, PXF0, S1, XT_COUNT };
// y factor quantities
enum YQ { B0, B1, B2, H0, HY, HYY, PYH0, PY2H0, PYHY, Y_COUNT };

// fills v and returns the log scale l; f = exp(psi) g, g-derivatives are taken after removing exp(Q)
inline double sample_xt(const TestFunction& g, const CarlemanParams& p, const CarlemanCoefficients& c, double x,
                        double t, double* v)
{
    const WeightEval w = weight_phi(p, x, 0, t);
    const double sg = g.conjugate_x ? 1 : 0;
    const double px = w.psi_x, pxx = w.psi_xx, pyy = w.psi_yy, pxt = w.psi_xt, ptt = w.psi_tt, pt = w.psi_t;
    const Jet ex = g.ex(x);
    const Jet et = g.et(t);
    const double amp = g.amplitude;
    const Jet gj = amp * et[0] * (exp_normalized(Jet(0, -sg * px, -sg * pxx)) * ex);
    const Jet fj = amp * et[0] * (exp_normalized(Jet(0, (1 - sg) * px, (1 - sg) * pxx)) * ex);
    const double gt = amp * ex[0] * (-sg * pt * et[0] + et[1]);
    const double ft = amp * ex[0] * ((1 - sg) * pt * et[0] + et[1]);
    const double px2 = px * px;
    const double P0 = 9 * px2 * px2 * pxx - 3 * pxx * pxx * pxx + 6 * pxt * px2 + ptt + pxx * pyy * pyy -
                      6 * pxx * pxx * pyy;
    const double P2 = 6 * px2 * pxx + 2 * pxt + 4 * px2 * pyy;
    const double Q1 = 18 * px2 * pxx - 6 * pxt;
    const double S0 = -6 * px2 * pxx - 2 * pxt + 4 * px2 * pyy;
    v[G0] = gj[0];
    v[G1] = gj[1];
    v[PA] = gt + gj[3] + c.a1 * gj[1] + c.c0 * gj[0];
    v[F0] = fj[0];
    v[F1] = fj[1];
    v[F2] = fj[2];
    v[P0F0] = P0 * fj[0];
    v[P2F0] = P2 * fj[0];
    v[Q1F1] = Q1 * fj[1];
    v[S0F0] = S0 * fj[0];
    v[PXF1] = px * fj[1];
    v[A1] = fj[3] + 3 * px2 * fj[1] + (3 * px * pxx + pyy * px) * fj[0] + ft;
    v[PXF0] = px * fj[0];
    v[S1] = (-3 * pxx - pyy) * fj[1] - 3 * px * fj[2] - (px2 * px + pt) * fj[0];
    return (1 - sg) * p.alpha * w.X * w.X;
}

inline double sample_y(const TestFunction& g, const CarlemanParams& p, double y, double* v)
{
    const double a = p.alpha, R = p.R;
    const double py = 2 * a * y / (R * R), pyy = 2 * a / (R * R);
    const double sg = g.conjugate_y ? 1 : 0;
    const Jet ey = g.ey(y);
    const Jet bj = exp_normalized(Jet(0, -sg * py, -sg * pyy)) * ey;
    const Jet hj = exp_normalized(Jet(0, (1 - sg) * py, (1 - sg) * pyy)) * ey;
    v[B0] = bj[0];
    v[B1] = bj[1];
    v[B2] = bj[2];
    v[H0] = hj[0];
    v[HY] = hj[1];
    v[HYY] = hj[2];
    v[PYH0] = py * hj[0];
    v[PY2H0] = py * py * hj[0];
    v[PYHY] = py * hj[1];
    return (1 - sg) * a * y * y / (R * R);
}

// divides v by its largest entry and returns l + log(max), or -inf when v vanishes
inline double normalize(double l, double* v, int n)
{
    double m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
    if (m == 0 || !std::isfinite(m)) {
        require(m == 0, "non-finite test function sample");
        return -std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < n; ++i) v[i] /= m;
    return l + std::log(m);
}

} // namespace detail

struct CarlemanQuadrature {
    int time_intervals = 128;  // Simpson, even, at least 64
};

// the x-t and y Gram matrices of every quantity the estimates need
struct SeparableGrams {
    LogGram xt{detail::XT_COUNT};
    LogGram y{detail::Y_COUNT};

    double shift() const { return xt.shift() + y.shift(); }
    double xy(int i, int j, int k, int l) const { return xt(i, j) * y(k, l); }
};

inline SeparableGrams separable_grams(const TestFunction& g, const CarlemanParams& p,
                                      const CarlemanCoefficients& c = {}, const CarlemanQuadrature& q = {})
{
    using namespace detail;
    require(q.time_intervals >= 64, "at least 64 time intervals");
    check_support(g, p);
    SeparableGrams out;
    if (g.zero()) return out;
    double v[XT_COUNT];
    const Nodes1D tn = simpson_nodes(g.et.lo(), g.et.hi(), q.time_intervals + q.time_intervals % 2);
    for (std::size_t it = 0; it < tn.x.size(); ++it) {
        const double t = tn.x[it];
        auto guide = [&](double x) { return 2 * normalize(sample_xt(g, p, c, x, t, v), v, XT_COUNT); };
        const Nodes1D xn = adaptive_nodes(guide, g.ex.lo(), g.ex.hi(), g.ex.freq);
        for (std::size_t ix = 0; ix < xn.x.size(); ++ix) {
            const double l = normalize(sample_xt(g, p, c, xn.x[ix], t, v), v, XT_COUNT);
            if (std::isfinite(l)) out.xt.add(std::log(tn.w[it] * xn.w[ix]) + 2 * l, v);
        }
    }
    double u[Y_COUNT];
    auto guide = [&](double y) { return 2 * normalize(sample_y(g, p, y, u), u, Y_COUNT); };
    const Nodes1D yn = adaptive_nodes(guide, g.ey.lo(), g.ey.hi(), g.ey.freq);
    for (std::size_t iy = 0; iy < yn.x.size(); ++iy) {
        const double l = normalize(sample_y(g, p, yn.x[iy], u), u, Y_COUNT);
        if (std::isfinite(l)) out.y.add(std::log(yn.w[iy]) + 2 * l, u);
    }
    return out;
}

/* Every integral over D is exp(log_scale) times a reduced value; the reduced values are
   what the inequalities compare, the absolute ones may overflow to inf. */
struct CarlemanSides {
    double lhs = 0, rhs = 0, ratio = 0;
    double log_scale = -std::numeric_limits<double>::infinity();
    double reduced_lhs = 0, reduced_rhs = 0;
};

// weighted Carleman norms; lhs = a^{5/2}/R^3 |e g| + a^{3/2}/R^2 (|e g_x| + |e g_y|), rhs = |e P g|
inline CarlemanSides carleman_sides(const SeparableGrams& s, const CarlemanParams& p,
                                    const CarlemanCoefficients& c = {})
{
    using namespace detail;
    CarlemanSides out;
    if (s.xt.empty() || s.y.empty()) return out;
    const double a = p.alpha, R = p.R;
    out.reduced_lhs = std::pow(a, 2.5) / (R * R * R) * std::sqrt(s.xy(G0, G0, B0, B0)) +
                      std::pow(a, 1.5) / (R * R) *
                          (std::sqrt(s.xy(G1, G1, B0, B0)) + std::sqrt(s.xy(G0, G0, B1, B1)));
    const int xi[3] = {PA, G1, G0};
    const double xc[3] = {1, 1, c.b1};
    const int yi[3] = {B0, B2, B1};
    double r2 = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r2 += xc[i] * xc[j] * s.xy(xi[i], xi[j], yi[i], yi[j]);
    out.reduced_rhs = std::sqrt(std::max(r2, 0.0));
    out.log_scale = 0.5 * s.shift();
    out.lhs = out.reduced_lhs * std::exp(out.log_scale);
    out.rhs = out.reduced_rhs * std::exp(out.log_scale);
    out.ratio = out.reduced_lhs / out.reduced_rhs;
    return out;
}

inline CarlemanSides carleman_sides(const TestFunction& g, const CarlemanParams& p,
                                    const CarlemanCoefficients& c = {}, const CarlemanQuadrature& q = {})
{
    return carleman_sides(separable_grams(g, p, c, q), p, c);
}

struct CommutatorForm {
    double quadratic_form = 0, lower_bound = 0;
    double log_scale = -std::numeric_limits<double>::infinity();
    double reduced_form = 0, reduced_lower_bound = 0;
    std::array<double, 7> reduced_terms{};  // the seven grouped terms of the expansion
};

// <[S, A] f, f> assembled from its explicit expansion, and 134 a^5/R^6 |f|^2 + 4 a^3/R^4 (|(dx - psi_x) f|^2 + |(dy - psi_y) f|^2)
inline CommutatorForm commutator_form(const SeparableGrams& s, const CarlemanParams& p)
{
    using namespace detail;
    CommutatorForm out;
    if (s.xt.empty() || s.y.empty()) return out;
    const double a = p.alpha, R = p.R;
    const double pxx = 2 * a / (R * R), pyy = pxx;
    auto& t = out.reduced_terms;
    t[0] = s.xy(P0F0, F0, H0, H0) + s.xy(P2F0, F0, PYH0, PYH0) + pxx * s.xy(F0, F0, PY2H0, PY2H0);
    t[1] = s.xy(Q1F1, F1, H0, H0) + (-6 * pxx + 4 * pyy) * s.xy(F1, F1, PYH0, PYH0);
    t[2] = s.xy(S0F0, F0, HY, HY) + 2 * pxx * s.xy(F0, F0, PYHY, PYHY);
    t[3] = 24 * pxx * s.xy(PXF1, F0, H0, PYHY);
    t[4] = (4 * pyy + 6 * pxx) * s.xy(F1, F1, HY, HY);
    t[5] = 9 * pxx * s.xy(F2, F2, H0, H0);
    t[6] = pxx * s.xy(F0, F0, HYY, HYY);
    for (double v : t) out.reduced_form += v;
    out.reduced_lower_bound = 134 * std::pow(a, 5) / std::pow(R, 6) * s.xy(F0, F0, H0, H0) +
                              4 * std::pow(a, 3) / std::pow(R, 4) * (s.xy(G1, G1, H0, H0) + s.xy(F0, F0, B1, B1));
    out.log_scale = s.shift();
    out.quadratic_form = out.reduced_form * std::exp(out.log_scale);
    out.lower_bound = out.reduced_lower_bound * std::exp(out.log_scale);
    return out;
}

inline CommutatorForm commutator_form(const TestFunction& f, const CarlemanParams& p, const CarlemanQuadrature& q = {})
{
    return commutator_form(separable_grams(f, p, {}, q), p);
}

// 2<A f, S f> and |(A + S) f|^2 from the conjugated operators themselves, on the same reduced scale
struct OperatorRoute {
    double reduced_form = 0;
    double reduced_norm_sq = 0;
    double reduced_a_sq = 0, reduced_s_sq = 0;  // |A f|^2, |S f|^2
};

inline OperatorRoute commutator_via_operators(const SeparableGrams& s)
{
    using namespace detail;
    OperatorRoute out;
    if (s.xt.empty() || s.y.empty()) return out;
    // A f = sum_k ai[k] (x) yb[k], S f = sum_k si[k] (x) yb[k]
    const int ai[4] = {A1, F1, PXF0, F1};
    const double ac[4] = {1, 1, 2, 1};
    const int si[4] = {S1, PXF0, F1, PXF0};
    const double sc[4] = {1, -1, -2, -1};
    const int yb[4] = {H0, PY2H0, PYHY, HYY};
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            const double yy = s.y(yb[k], yb[l]);
            const double as = ac[k] * sc[l] * s.xt(ai[k], si[l]);
            const double aa = ac[k] * ac[l] * s.xt(ai[k], ai[l]);
            const double ss = sc[k] * sc[l] * s.xt(si[k], si[l]);
            out.reduced_form += 2 * as * yy;
            out.reduced_norm_sq += (aa + 2 * as + ss) * yy;
            out.reduced_a_sq += aa * yy;
            out.reduced_s_sq += ss * yy;
        }
    return out;
}

// the squared completions used in the lower bound chain, each as (grouped, expanded)
inline std::array<std::pair<double, double>, 4> completion_identities(double psi_x, double psi_y, double f, double fx,
                                                                      double fy, double fxx, double fxy, double fyy)
{
    const double a = psi_x * psi_y * f, b = fxy;
    const double A = psi_x * fx, B = psi_y * fy;
    const double py2 = psi_y * psi_y, px2 = psi_x * psi_x;
    return {{{10 * a * a - 16 * a * b + 10 * b * b, std::pow(8.0 / 3 * a - 3 * b, 2) + 26.0 / 9 * a * a + b * b},
             {18 * A * A + 8 * A * B + 2 * B * B, std::pow(4 * A + B, 2) + 2 * A * A + B * B},
             {py2 * py2 * f * f + 2 * py2 * f * fxx + 9 * fxx * fxx, std::pow(py2 * f + fxx, 2) + 8 * fxx * fxx},
             {9 * px2 * px2 * f * f + 3 * px2 * f * fyy + fyy * fyy,
              std::pow(1.5 * px2 * f + fyy, 2) + 6.75 * px2 * px2 * f * f}}};
}

} // namespace zksem
