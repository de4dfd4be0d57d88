#pragma once

#include <cmath>
#include <optional>
#include <random>

#include "zksem/carleman/smooth.hpp"

namespace zksem {

struct CarlemanParams {
    double R = 16;
    double alpha = 0;
    TimeProfile profile{};
    double cbar = 1;

    double admissible_alpha() const { return cbar * std::pow(R, 1.5); }
};

// alpha defaults to the admissibility threshold Cbar R^{3/2}
inline CarlemanParams make_carleman_params(double R, double r = 0.4, std::optional<double> alpha = std::nullopt)
{
    require(R > 1, "R must exceed 1");
    CarlemanParams p;
    p.R = R;
    p.profile = TimeProfile(r);
    p.cbar = p.profile.cbar();
    p.alpha = alpha.value_or(p.admissible_alpha());
    require(std::isfinite(p.alpha) && p.alpha >= p.admissible_alpha() * (1 - 1e-12), "alpha below admissibility");
    return p;
}

// phi = (x/R + phi(t))^2 + y^2/R^2 and the partials of psi = alpha phi
struct WeightEval {
    double phi = 0, X = 0;
    double psi = 0, psi_x = 0, psi_y = 0, psi_t = 0;
    double psi_xx = 0, psi_yy = 0, psi_xt = 0, psi_tt = 0;
};

inline WeightEval weight_phi(const CarlemanParams& p, double x, double y, double t)
{
    const Jet f = p.profile(t);
    const double a = p.alpha, R = p.R;
    WeightEval w;
    w.X = x / R + f[0];
    w.phi = w.X * w.X + y * y / (R * R);
    w.psi = a * w.phi;
    w.psi_x = 2 * a * w.X / R;
    w.psi_y = 2 * a * y / (R * R);
    w.psi_t = 2 * a * w.X * f[1];
    w.psi_xx = w.psi_yy = 2 * a / (R * R);
    w.psi_xt = 2 * a * f[1] / R;
    w.psi_tt = 2 * a * (f[1] * f[1] + w.X * f[2]);
    return w;
}

struct PhiBoundReport {
    double max_phi_annulus = 0;  // over {R - 1 <= rho <= R} x [0, 1]
    double max_phi_band = 0;     // over {2 <= |X| <= 3} x {rho <= R}
    long samples_annulus = 0;
    long samples_band = 0;
};

// dense sampling: a polar-time lattice plus seeded random points
inline PhiBoundReport phi_support_bounds(const CarlemanParams& p, int lattice = 64, long random_samples = 200000,
                                         unsigned seed = 7)
{
    PhiBoundReport rep;
    const double R = p.R;
    auto visit = [&](double x, double y, double t) {
        const double rho = std::hypot(x, y);
        if (rho > R) return;
        const double phi = weight_phi(p, x, y, t).phi;
        if (rho >= R - 1) {
            rep.max_phi_annulus = std::max(rep.max_phi_annulus, phi);
            ++rep.samples_annulus;
        }
        const double X = std::abs(x / R + p.profile(t)[0]);
        if (X >= 2 && X <= 3) {
            rep.max_phi_band = std::max(rep.max_phi_band, phi);
            ++rep.samples_band;
        }
    };
    const double pi = std::acos(-1.0);
    for (int it = 0; it <= lattice; ++it) {
        const double t = double(it) / lattice;
        for (int ir = 0; ir <= lattice; ++ir) {
            const double rho = R * ir / lattice;
            for (int ia = 0; ia < 4 * lattice; ++ia) {
                const double a = 2 * pi * ia / (4 * lattice);
                visit(rho * std::cos(a), rho * std::sin(a), t);
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    for (long i = 0; i < random_samples; ++i) {
        const double t = u(rng), a = 2 * pi * u(rng);
        // half the points in the annulus, half uniform in the disk
        const double rho = (i % 2 == 0) ? R - u(rng) : R * std::sqrt(u(rng));
        visit(rho * std::cos(a), rho * std::sin(a), t);
    }
    return rep;
}

} // namespace zksem
