#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "zksem/carleman/smooth.hpp"

namespace zksem {

struct Nodes1D {
    std::vector<double> x, w;
};

inline const std::array<double, 16>& gl16_x()
{
    static const std::array<double, 16> x = {-0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
                                             -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
                                             -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
                                             0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
                                             0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
                                             0.9894009349916499};
    return x;
}
inline const std::array<double, 16>& gl16_w()
{
    static const std::array<double, 16> w = {0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
                                             0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
                                             0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
                                             0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                                             0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
                                             0.0271524594117541};
    return w;
}

/* Gauss-Legendre panels on [lo, hi] for an integrand whose log-magnitude is `guide`
   (-inf where it vanishes). Panels are bisected until the guide varies by at most `step`
   e-folds between quarter points and at most `max_phase` radians of oscillation fit in one;
   panels far below the coarse maximum are dropped. */
template <class Guide>
Nodes1D adaptive_nodes(Guide&& guide, double lo, double hi, double freq = 0, int coarse = 1024,
                       int min_panels = 16, double step = 2.5, double max_phase = 10, double drop = 100)
{
    Nodes1D out;
    if (!(hi > lo)) return out;
    const double ninf = -std::numeric_limits<double>::infinity();
    const double h = (hi - lo) / coarse;
    std::vector<double> g(std::size_t(coarse) + 1);
    double gmax = ninf;
    for (int i = 0; i <= coarse; ++i) {
        g[std::size_t(i)] = guide(lo + i * h);
        gmax = std::max(gmax, g[std::size_t(i)]);
    }
    if (gmax == ninf) return out;
    int i0 = coarse, i1 = 0;
    for (int i = 0; i <= coarse; ++i)
        if (g[std::size_t(i)] >= gmax - drop) i0 = std::min(i0, i), i1 = std::max(i1, i);
    const double a0 = lo + std::max(0, i0 - 1) * h, b0 = lo + std::min(coarse, i1 + 1) * h;

    struct Panel {
        double a, b;
        int depth;
    };
    std::vector<Panel> stack;
    for (int k = min_panels - 1; k >= 0; --k)
        stack.push_back({a0 + (b0 - a0) * k / min_panels, a0 + (b0 - a0) * (k + 1) / min_panels, 0});
    std::vector<std::pair<double, double>> accepted;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        double s[5];
        double smax = ninf;
        bool any_inf = false;
        for (int q = 0; q < 5; ++q) {
            s[q] = guide(p.a + (p.b - p.a) * q / 4);
            smax = std::max(smax, s[q]);
            any_inf = any_inf || s[q] == ninf;
        }
        const bool monotone = (s[0] <= s[1] && s[1] <= s[2] && s[2] <= s[3] && s[3] <= s[4]) ||
                              (s[0] >= s[1] && s[1] >= s[2] && s[2] >= s[3] && s[3] >= s[4]);
        if (smax < gmax - drop && (monotone || p.depth > 6)) continue;
        bool fine = !any_inf && (p.b - p.a) * std::abs(freq) <= max_phase;
        for (int q = 0; q < 4 && fine; ++q) fine = std::abs(s[q + 1] - s[q]) <= step;
        if (fine || p.depth >= 40) {
            accepted.push_back({p.a, p.b});
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        stack.push_back({m, p.b, p.depth + 1});
        stack.push_back({p.a, m, p.depth + 1});
    }
    out.x.reserve(accepted.size() * 16);
    out.w.reserve(accepted.size() * 16);
    for (auto [a, b] : accepted) {
        const double m = 0.5 * (a + b), r = 0.5 * (b - a);
        for (std::size_t q = 0; q < 16; ++q) {
            out.x.push_back(m + r * gl16_x()[q]);
            out.w.push_back(r * gl16_w()[q]);
        }
    }
    return out;
}

// composite Simpson nodes on [a, b] with n (even) intervals
inline Nodes1D simpson_nodes(double a, double b, int n)
{
    require(n >= 2 && n % 2 == 0, "Simpson needs an even number of intervals");
    Nodes1D out;
    const double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
        out.x.push_back(a + i * h);
        out.w.push_back(h / 3 * ((i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2)));
    }
    return out;
}

/* Gram matrix sum_k w_k exp(l_k - shift) v_k v_k^T with a running log shift,
   so integrands of size exp(1e6) never leave double range. */
class LogGram {
public:
    explicit LogGram(int n) : n_(n), s_(std::size_t(n * n), 0.0) {}

    int size() const { return n_; }
    double shift() const { return shift_; }
    bool empty() const { return shift_ == -std::numeric_limits<double>::infinity(); }
    double operator()(int i, int j) const { return s_[std::size_t(i * n_ + j)]; }

    void add(double logw, const double* v)
    {
        if (logw > shift_) {
            const double c = std::exp(shift_ - logw);
            for (double& x : s_) x *= c;
            shift_ = logw;
        }
        const double c = std::exp(logw - shift_);
        if (c == 0) return;
        for (int i = 0; i < n_; ++i) {
            const double ci = c * v[i];
            if (ci == 0) continue;
            for (int j = 0; j < n_; ++j) s_[std::size_t(i * n_ + j)] += ci * v[j];
        }
    }

private:
    int n_;
    double shift_ = -std::numeric_limits<double>::infinity();
    std::vector<double> s_;
};

} // namespace zksem
