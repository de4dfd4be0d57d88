#pragma once

#include <string>

#include "zksem/fft.hpp"

namespace zksem {

enum class MultiplierKind {
    DX,
    DY,
    LAPLACIAN,
    DX_LAPLACIAN,
    NONLOCAL_X,              // xi^2 / |zeta|^2
    NONLOCAL_X_COMPLEMENT,   // eta^2 / |zeta|^2
    NONLOCAL_Y,              // xi eta / |zeta|^2
    RIESZ_X,                 // -i xi / |zeta|
    RIESZ_Y,                 // -i eta / |zeta|
    BESSEL,                  // (1 + |zeta|^2)^{s/2}
    PROPAGATOR               // exp(i t xi |zeta|^2)
};

struct Multiplier {
    MultiplierKind kind;
    double param = 0.0;   // s for BESSEL, t for PROPAGATOR

    Multiplier(MultiplierKind k, double p = 0.0) : kind(k), param(p) {}
};

inline Multiplier bessel(double s) { return {MultiplierKind::BESSEL, s}; }
inline Multiplier propagator(double t) { return {MultiplierKind::PROPAGATOR, t}; }

inline std::string to_string(MultiplierKind k)
{
    switch (k) {
    case MultiplierKind::DX: return "DX";
    case MultiplierKind::DY: return "DY";
    case MultiplierKind::LAPLACIAN: return "LAPLACIAN";
    case MultiplierKind::DX_LAPLACIAN: return "DX_LAPLACIAN";
    case MultiplierKind::NONLOCAL_X: return "NONLOCAL_X";
    case MultiplierKind::NONLOCAL_X_COMPLEMENT: return "NONLOCAL_X_COMPLEMENT";
    case MultiplierKind::NONLOCAL_Y: return "NONLOCAL_Y";
    case MultiplierKind::RIESZ_X: return "RIESZ_X";
    case MultiplierKind::RIESZ_Y: return "RIESZ_Y";
    case MultiplierKind::BESSEL: return "BESSEL";
    case MultiplierKind::PROPAGATOR: return "PROPAGATOR";
    }
    return "?";
}

inline MultiplierKind multiplier_kind_from_string(const std::string& s)
{
    for (int k = 0; k <= int(MultiplierKind::PROPAGATOR); ++k)
        if (to_string(MultiplierKind(k)) == s) return MultiplierKind(k);
    throw ValidationError("unsupported multiplier kind: " + s);
}

// Symbol at half-spectrum index (ix, iy). Odd factors see 0 on their Nyquist line.
inline cplx symbol(const Grid2D& g, const Multiplier& m, std::size_t ix, std::size_t iy)
{
    const cplx I(0, 1);
    const double xi = g.kx[ix];
    const double eta = g.ky[iy];
    const double xo = ix == g.nx / 2 ? 0.0 : xi;
    const double eo = iy == g.ny / 2 ? 0.0 : eta;
    const double k2 = xi * xi + eta * eta;
    const bool zero = ix == 0 && iy == 0;
    switch (m.kind) {
    case MultiplierKind::DX: return I * xo;
    case MultiplierKind::DY: return I * eo;
    case MultiplierKind::LAPLACIAN: return -k2;
    case MultiplierKind::DX_LAPLACIAN: return -I * xo * k2;
    case MultiplierKind::NONLOCAL_X: return zero ? 0.0 : xi * xi / k2;
    case MultiplierKind::NONLOCAL_X_COMPLEMENT: return zero ? 0.0 : eta * eta / k2;
    case MultiplierKind::NONLOCAL_Y: return zero ? 0.0 : xo * eo / k2;
    case MultiplierKind::RIESZ_X: return zero ? cplx(0.0) : -I * xo / std::sqrt(k2);
    case MultiplierKind::RIESZ_Y: return zero ? cplx(0.0) : -I * eo / std::sqrt(k2);
    case MultiplierKind::BESSEL: return std::pow(1.0 + k2, 0.5 * m.param);
    case MultiplierKind::PROPAGATOR: return std::exp(I * (m.param * xo * k2));
    }
    throw ValidationError("unsupported multiplier kind");
}

inline SpectralField apply_multiplier(const SpectralField& F, const Multiplier& m)
{
    SpectralField out(F.grid);
    const auto& g = F.grid;
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nxh(); ++ix) out(ix, iy) = symbol(g, m, ix, iy) * F(ix, iy);
    return out;
}

inline SpectralField apply_multiplier(const SpectralField& F, MultiplierKind k)
{
    return apply_multiplier(F, Multiplier(k));
}

// physical-space convenience: inverse(symbol * forward(f))
inline Field apply(const Field& f, const Multiplier& m)
{
    return inverse_transform(apply_multiplier(transform(f), m));
}

inline Field apply(const Field& f, MultiplierKind k) { return apply(f, Multiplier(k)); }

// dealiased product D(D(a) D(b))
inline SpectralField dealiased_product(const SpectralField& A, const SpectralField& B)
{
    Field a = inverse_transform(dealias(A));
    Field b = inverse_transform(dealias(B));
    return dealias(transform(pointwise(a, b)));
}

} // namespace zksem
