#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "zksem/fft.hpp"
#include "zksem/multiplier.hpp"

namespace zksem {

// |J^s f| in L2, with s = 0 taken directly in physical space
inline double bessel_norm(const Field& f, double s)
{
    if (s == 0) return l2_norm(f);
    const SpectralField F = apply_multiplier(transform(f), bessel(s));
    return std::sqrt(spectral_mean_square(F) * f.grid.Lx * f.grid.Ly);
}

struct InterpolationSides {
    double lhs = 0, rhs_product = 0, ratio = 0;
};

// |J^{theta k}(exp((1 - theta) beta (|x| + |y|)) f)| against |J^k f|^theta |exp(beta (|x| + |y|)) f|^{1 - theta}
inline InterpolationSides interpolation_sides(const Field& f, double theta, double beta, int k)
{
    require(theta >= 0 && theta <= 1, "theta must lie in [0, 1]");
    require(beta > 0, "beta must be positive");
    require(k >= 1 && k <= 4, "k must lie in 1..4");
    const Grid2D& g = f.grid;
    require(all_finite(f.data), "non-finite field");
    const double fmax = max_abs(f);
    double edge = 0;
    for (std::size_t i = 0; i < g.nx; ++i) edge = std::max({edge, std::abs(f(i, 0)), std::abs(f(i, g.ny - 1))});
    for (std::size_t j = 0; j < g.ny; ++j) edge = std::max({edge, std::abs(f(0, j)), std::abs(f(g.nx - 1, j))});
    require(edge <= 1e-12 * fmax, "field does not decay below 1e-12 before the torus boundary");

    const double sx = g.dx(), sy = g.dy();
    auto exponent = [&](double x, double y, double b) {
        return b * (std::sqrt(x * x + sx * sx) + std::sqrt(y * y + sy * sy));
    };
    const double top = exponent(0.5 * g.Lx, 0.5 * g.Ly, beta);
    if (top > 700) {
        std::ostringstream os;
        os << "weighted field overflow: max exponent " << top;
        throw NumericalError(os.str());
    }
    auto weighted = [&](double b) {
        Field w(g);
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix) w(ix, iy) = std::exp(exponent(g.x(ix), g.y(iy), b)) * f(ix, iy);
        return w;
    };
    InterpolationSides out;
    const double jk = bessel_norm(f, k);
    const double wf = bessel_norm(weighted(beta), 0);
    out.lhs = theta == 1 ? jk : bessel_norm(weighted((1 - theta) * beta), theta * k);
    out.rhs_product = std::pow(jk, theta) * std::pow(wf, 1 - theta);
    out.ratio = out.rhs_product > 0 ? out.lhs / out.rhs_product : 0;
    return out;
}

// seeded Gaussians exp(-((x - x0)^2 + (y - y0)^2 / e^2) / (2 w^2)) for sweeps
inline std::vector<std::array<double, 4>> gaussian_family(int count, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::array<double, 4>> out;
    for (int i = 0; i < count; ++i)
        out.push_back({8 * (u(rng) - 0.5), 8 * (u(rng) - 0.5), 1.5 + u(rng), 0.7 + 0.6 * u(rng)});
    return out;
}

inline Field gaussian_field(const Grid2D& g, const std::array<double, 4>& p)
{
    return Field::sample(g, [&](double x, double y) {
        const double dx = x - p[0], dy = (y - p[1]) / p[3];
        return std::exp(-(dx * dx + dy * dy) / (2 * p[2] * p[2]));
    });
}

} // namespace zksem
