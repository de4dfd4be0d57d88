#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "zksem/error.hpp"

namespace zksem {

// value and first three derivatives of a function of one variable
struct Jet {
    std::array<double, 4> d{0, 0, 0, 0};

    Jet() = default;
    Jet(double v, double d1 = 0, double d2 = 0, double d3 = 0) : d{v, d1, d2, d3} {}
    double operator[](int k) const { return d[std::size_t(k)]; }

    static Jet variable(double x) { return Jet(x, 1); }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }
inline Jet operator*(double s, const Jet& a) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }

inline Jet operator*(const Jet& f, const Jet& g)
{
    return {f[0] * g[0], f[1] * g[0] + f[0] * g[1], f[2] * g[0] + 2 * f[1] * g[1] + f[0] * g[2],
            f[3] * g[0] + 3 * f[2] * g[1] + 3 * f[1] * g[2] + f[0] * g[3]};
}

// h(f) given the derivatives h0..h3 of h at f[0]
inline Jet compose(const std::array<double, 4>& h, const Jet& f)
{
    return {h[0], h[1] * f[1], h[2] * f[1] * f[1] + h[1] * f[2],
            h[3] * f[1] * f[1] * f[1] + 3 * h[2] * f[1] * f[2] + h[1] * f[3]};
}

inline Jet exp(const Jet& f)
{
    const double e = std::exp(f[0]);
    return compose({e, e, e, e}, f);
}

// exp(f) / exp(f[0])
inline Jet exp_normalized(const Jet& f) { return compose({1, 1, 1, 1}, f); }

inline Jet cos(const Jet& f)
{
    const double c = std::cos(f[0]), s = std::sin(f[0]);
    return compose({c, -s, -c, s}, f);
}

inline Jet sqrt(const Jet& f)
{
    const double r = std::sqrt(f[0]);
    return compose({r, 0.5 / r, -0.25 / (r * f[0]), 0.375 / (r * f[0] * f[0])}, f);
}

// exp(-1/(1-s^2)) on (-1, 1), with derivatives in s
inline Jet bump_profile(double s)
{
    if (!(std::abs(s) < 1)) return {};
    const double q = 1.0 / (1.0 - s * s);
    if (q > 700) return {};
    const double b = std::exp(-q);
    // q' = 2 s q^2, q'' = 2 q^2 + 8 s^2 q^3, q''' = 24 s q^3 + 48 s^3 q^4
    const double q1 = 2 * s * q * q;
    const double q2 = 2 * q * q + 8 * s * s * q * q * q;
    const double q3 = 24 * s * q * q * q + 48 * s * s * s * q * q * q * q;
    return {b, -q1 * b, (q1 * q1 - q2) * b, (-q1 * q1 * q1 + 3 * q1 * q2 - q3) * b};
}

// normalized integral of the bump: S(u) = 0 for u <= 0, 1 for u >= 1, C-infinity, increasing
class SmoothStep {
public:
    static const SmoothStep& instance()
    {
        static SmoothStep s;
        return s;
    }

    double integral_of_bump() const { return z_; }

    Jet operator()(double u) const
    {
        if (u <= 0) return {};
        if (u >= 1) return {1.0};
        const double s = 2 * u - 1;
        const Jet b = bump_profile(s);
        return {cumulative(s) / z_, 2 * b[0] / z_, 4 * b[1] / z_, 8 * b[2] / z_};
    }

private:
    static constexpr int cells = 4096;
    std::vector<double> table_;
    double z_ = 0;

    static const std::array<double, 16>& gl_x()
    {
        static const std::array<double, 16> x = {-0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
                                                 -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
                                                 -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
                                                 0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
                                                 0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
                                                 0.9894009349916499};
        return x;
    }
    static const std::array<double, 16>& gl_w()
    {
        static const std::array<double, 16> w = {0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
                                                 0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
                                                 0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
                                                 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                                                 0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
                                                 0.0271524594117541};
        return w;
    }

    static double segment(double a, double b)
    {
        const double m = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0;
        for (int i = 0; i < 16; ++i) s += gl_w()[std::size_t(i)] * bump_profile(m + h * gl_x()[std::size_t(i)])[0];
        return s * h;
    }

    double cumulative(double s) const
    {
        const double pos = (s + 1) / 2 * cells;
        int i = std::min(cells - 1, std::max(0, int(pos)));
        const double a = -1 + 2.0 * i / cells;
        return table_[std::size_t(i)] + segment(a, s);
    }

    SmoothStep()
    {
        table_.resize(cells + 1);
        table_[0] = 0;
        for (int i = 0; i < cells; ++i)
            table_[std::size_t(i) + 1] = table_[std::size_t(i)] + segment(-1 + 2.0 * i / cells, -1 + 2.0 * (i + 1) / cells);
        z_ = table_[cells];
    }
};

inline Jet smooth_step(double u) { return SmoothStep::instance()(u); }

// phi(t): 0 on [0, r/2] and [1 - r/2, 1], 4 on [r, 1 - r], monotone ramps in between
class TimeProfile {
public:
    explicit TimeProfile(double r = 0.4) : r_(r)
    {
        require(r > 0 && r < 0.5, "time margin r must lie in (0, 1/2)");
    }

    double r() const { return r_; }

    // value, phi', phi''
    Jet operator()(double t) const
    {
        const double h = r_ / 2;
        if (t <= h || t >= 1 - h) return {};
        if (t >= r_ && t <= 1 - r_) return {4.0};
        if (t < r_) {
            const Jet s = smooth_step((t - h) / h);
            return {4 * s[0], 4 * s[1] / h, 4 * s[2] / (h * h), 4 * s[3] / (h * h * h)};
        }
        const Jet s = smooth_step((1 - h - t) / h);
        return {4 * s[0], -4 * s[1] / h, 4 * s[2] / (h * h), -4 * s[3] / (h * h * h)};
    }

    // max(|phi'|, |phi''|, 1) by dense sampling of the rising ramp (the falling one mirrors it)
    double cbar(int samples = 200001) const
    {
        double m = 1;
        const double h = r_ / 2;
        for (int i = 0; i <= samples; ++i) {
            const Jet p = (*this)(h + h * double(i) / samples);
            m = std::max({m, std::abs(p[1]), std::abs(p[2])});
        }
        return m;
    }

    double min_on(double t0, double t1, int samples = 2001) const
    {
        double m = 1e300;
        for (int i = 0; i <= samples; ++i) m = std::min(m, (*this)(t0 + (t1 - t0) * i / samples)[0]);
        return m;
    }
    double max_on(double t0, double t1, int samples = 2001) const
    {
        double m = -1e300;
        for (int i = 0; i <= samples; ++i) m = std::max(m, (*this)(t0 + (t1 - t0) * i / samples)[0]);
        return m;
    }

private:
    double r_;
};

// value and Cartesian derivatives of a function on the plane
struct PlaneEval {
    double value = 0, dx = 0, dy = 0, dxx = 0, dxy = 0, dyy = 0;
};

inline PlaneEval radial(const Jet& f, double x, double y)
{
    PlaneEval e;
    e.value = f[0];
    const double rho = std::hypot(x, y);
    if (rho == 0) {
        // all radial profiles used here are flat near the origin
        e.dxx = e.dyy = f[2];
        return e;
    }
    const double cx = x / rho, cy = y / rho;
    e.dx = f[1] * cx;
    e.dy = f[1] * cy;
    e.dxx = f[2] * cx * cx + f[1] * (1 - cx * cx) / rho;
    e.dyy = f[2] * cy * cy + f[1] * (1 - cy * cy) / rho;
    e.dxy = f[2] * cx * cy - f[1] * cx * cy / rho;
    return e;
}

/* theta: 1 for rho <= R - 1, 0 for rho >= R
   mu: 0 on (-inf, 2], 1 on [3, inf)
   phi_RN: 1 on [R + 1, N], support in (R, N + 1) */
class CutoffSet {
public:
    CutoffSet(double R, double N, double r, bool upper_bound_use = true) : R_(R), N_(N), profile_(r)
    {
        require(R > 1, "R must exceed 1");
        if (upper_bound_use) require(N > 28 * R, "N must exceed 28 R");
        require(N > R + 1, "N must exceed R + 1");
    }

    double R() const { return R_; }
    double N() const { return N_; }
    const TimeProfile& profile() const { return profile_; }

    Jet theta_radial(double rho) const
    {
        const Jet s = smooth_step(rho - (R_ - 1));
        return {1 - s[0], -s[1], -s[2], -s[3]};
    }
    PlaneEval theta(double x, double y) const { return radial(theta_radial(std::hypot(x, y)), x, y); }

    Jet mu(double s) const { return smooth_step(s - 2); }

    Jet phi_rn_radial(double rho) const
    {
        const Jet a = smooth_step(rho - R_);
        const Jet b = smooth_step(rho - N_);
        return a * Jet(1 - b[0], -b[1], -b[2], -b[3]);
    }
    PlaneEval phi_rn(double x, double y) const { return radial(phi_rn_radial(std::hypot(x, y)), x, y); }

private:
    double R_, N_;
    TimeProfile profile_;
};

inline CutoffSet cutoffs(double R, double N, double r) { return CutoffSet(R, N, r, true); }

} // namespace zksem
