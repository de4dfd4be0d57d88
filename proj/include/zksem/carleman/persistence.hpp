#pragma once

#include <cmath>
#include <vector>

#include "zksem/carleman/quadrature.hpp"
#include "zksem/carleman/smooth.hpp"

namespace zksem {

// exp(-(s - center)^2 / (2 width^2)) cut off smoothly between |s - center| = cutoff and cutoff + 1
struct TruncatedGaussian {
    double center = 0;
    double width = 1;
    double cutoff = 3;

    double lo() const { return center - cutoff - 1; }
    double hi() const { return center + cutoff + 1; }

    Jet operator()(double s) const
    {
        const double u = s - center;
        if (std::abs(u) >= cutoff + 1) return {};
        const double w2 = width * width;
        const Jet gauss = exp(Jet(-u * u / (2 * w2), -u / w2, -1 / w2, 0));
        const Jet step = smooth_step(std::abs(u) - cutoff);
        const double sg = u < 0 ? -1 : 1;
        const Jet cut(1 - step[0], -sg * step[1], -step[2], -sg * step[3]);
        return gauss * cut;
    }
};

// c(t) = mean + amp sin(freq t + phase)
struct TimeCoefficient {
    double mean = 1, amp = 0.5, freq = 3, phase = 0.3;
    double value(double t) const { return mean + amp * std::sin(freq * t + phase); }
    double deriv(double t) const { return amp * freq * std::cos(freq * t + phase); }
};

// w(x, y, t) = c(t) a(x) b(y)
struct SpaceTimeBump {
    TruncatedGaussian a{}, b{};
    TimeCoefficient c{};
    double amplitude = 1;
};

struct PersistenceSides {
    double lhs = 0, rhs = 0;
};

/* sup_t |W w(t)| against |W w(0)| + |W w(1)| + int_0^1 |W (dt + dx^3 + dx dy^2) w| dt,
   W = exp(lambda |x|_s + beta |y|_s), |x|_s = sqrt(x^2 + s^2) with s the grid step */
inline PersistenceSides persistence_sides(const SpaceTimeBump& w, double lambda, double beta, double dx = 0.02,
                                          int time_intervals = 128)
{
    require(lambda > 0 && beta > 0, "lambda and beta must be positive");
    require(dx > 0, "grid step must be positive");
    for (const TruncatedGaussian* f : {&w.a, &w.b})
        require(std::isfinite(f->cutoff) && f->cutoff > 0 && f->width > 0, "non-compact support");
    PersistenceSides out;
    if (w.amplitude == 0) return out;

    // 1D weighted Gram entries <f^(i), f^(j)> for i, j in {0, 1, 2, 3}
    auto gram = [&](const TruncatedGaussian& f, double rate) {
        std::array<std::array<double, 4>, 4> m{};
        const long n = long(std::ceil((f.hi() - f.lo()) / dx));
        for (long k = 0; k <= n; ++k) {
            const double s = f.lo() + double(k) * dx;
            const Jet j = f(s);
            const double wt = std::exp(2 * rate * std::sqrt(s * s + dx * dx)) * dx;
            for (int p = 0; p < 4; ++p)
                for (int q = 0; q < 4; ++q) m[std::size_t(p)][std::size_t(q)] += wt * j[p] * j[q];
        }
        return m;
    };
    const auto A = gram(w.a, lambda);
    const auto B = gram(w.b, beta);
    const double amp2 = w.amplitude * w.amplitude;
    const double ab = std::sqrt(amp2 * A[0][0] * B[0][0]);

    double sup = 0;
    for (int i = 0; i <= 4000; ++i) sup = std::max(sup, std::abs(w.c.value(i / 4000.0)));
    out.lhs = sup * ab;

    const double cross = A[0][3] * B[0][0] + A[0][1] * B[0][2];
    const double op2 = A[3][3] * B[0][0] + 2 * A[3][1] * B[0][2] + A[1][1] * B[2][2];
    const Nodes1D tn = simpson_nodes(0, 1, time_intervals);
    double integral = 0;
    for (std::size_t i = 0; i < tn.x.size(); ++i) {
        const double c = w.c.value(tn.x[i]), cp = w.c.deriv(tn.x[i]);
        const double q = cp * cp * A[0][0] * B[0][0] + 2 * cp * c * cross + c * c * op2;
        integral += tn.w[i] * std::sqrt(std::max(0.0, amp2 * q));
    }
    out.rhs = (std::abs(w.c.value(0)) + std::abs(w.c.value(1))) * ab + integral;
    return out;
}

} // namespace zksem
