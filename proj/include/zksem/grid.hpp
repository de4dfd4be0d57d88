#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "zksem/error.hpp"

namespace zksem {

using cplx = std::complex<double>;

struct Grid2D {
    std::size_t nx = 0, ny = 0;
    double Lx = 0, Ly = 0;
    std::vector<double> kx, ky;   // full-length angular wavenumber tables

    double dx() const { return Lx / double(nx); }
    double dy() const { return Ly / double(ny); }
    std::size_t size() const { return nx * ny; }
    std::size_t nxh() const { return nx / 2 + 1; }      // columns of the half spectrum
    std::size_t spectral_size() const { return ny * nxh(); }

    double x(std::size_t ix) const { return double(ix) * dx() - 0.5 * Lx; }
    double y(std::size_t iy) const { return double(iy) * dy() - 0.5 * Ly; }

    // signed integer frequency; the Nyquist index maps to -n/2
    static long signed_mode(std::size_t i, std::size_t n)
    {
        return i < n / 2 ? long(i) : long(i) - long(n);
    }
    long mx(std::size_t ix) const { return signed_mode(ix, nx); }
    long my(std::size_t iy) const { return signed_mode(iy, ny); }
    double kmax() const
    {
        return std::max(std::numbers::pi * double(nx) / Lx, std::numbers::pi * double(ny) / Ly);
    }

    bool operator==(const Grid2D& o) const
    {
        return nx == o.nx && ny == o.ny && Lx == o.Lx && Ly == o.Ly;
    }
};

inline Grid2D make_grid(std::size_t nx, std::size_t ny, double Lx, double Ly)
{
    require(nx % 2 == 0, "odd nx");
    require(ny % 2 == 0, "odd ny");
    require(nx >= 8 && ny >= 8, "grid too small (need nx, ny >= 8)");
    require(std::isfinite(Lx) && Lx > 0, "non-positive Lx");
    require(std::isfinite(Ly) && Ly > 0, "non-positive Ly");
    Grid2D g;
    g.nx = nx;
    g.ny = ny;
    g.Lx = Lx;
    g.Ly = Ly;
    g.kx.resize(nx);
    g.ky.resize(ny);
    for (std::size_t i = 0; i < nx; ++i) g.kx[i] = 2 * std::numbers::pi * double(g.mx(i)) / Lx;
    for (std::size_t j = 0; j < ny; ++j) g.ky[j] = 2 * std::numbers::pi * double(g.my(j)) / Ly;
    return g;
}

struct Field {
    Grid2D grid;
    std::vector<double> data;   // index iy*nx + ix

    Field() = default;
    explicit Field(const Grid2D& g, double v = 0.0) : grid(g), data(g.size(), v) {}

    double& operator()(std::size_t ix, std::size_t iy) { return data[iy * grid.nx + ix]; }
    double operator()(std::size_t ix, std::size_t iy) const { return data[iy * grid.nx + ix]; }

    template <class F>
    static Field sample(const Grid2D& g, F&& f)
    {
        Field out(g);
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix) out(ix, iy) = f(g.x(ix), g.y(iy));
        return out;
    }
};

struct SpectralField {
    Grid2D grid;
    std::vector<cplx> coeffs;   // index iy*(nx/2+1) + ix

    SpectralField() = default;
    explicit SpectralField(const Grid2D& g) : grid(g), coeffs(g.spectral_size()) {}

    cplx& operator()(std::size_t ix, std::size_t iy) { return coeffs[iy * grid.nxh() + ix]; }
    cplx operator()(std::size_t ix, std::size_t iy) const { return coeffs[iy * grid.nxh() + ix]; }
};

inline void require_same_grid(const Grid2D& a, const Grid2D& b)
{
    require(a == b, "grid mismatch");
}

inline bool all_finite(const std::vector<double>& v)
{
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// elementwise helpers

inline Field operator+(const Field& a, const Field& b)
{
    require_same_grid(a.grid, b.grid);
    Field c(a.grid);
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = a.data[i] + b.data[i];
    return c;
}

inline Field operator-(const Field& a, const Field& b)
{
    require_same_grid(a.grid, b.grid);
    Field c(a.grid);
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = a.data[i] - b.data[i];
    return c;
}

inline Field operator*(double s, const Field& a)
{
    Field c(a.grid);
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = s * a.data[i];
    return c;
}

inline Field pointwise(const Field& a, const Field& b)
{
    require_same_grid(a.grid, b.grid);
    Field c(a.grid);
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = a.data[i] * b.data[i];
    return c;
}

inline double integral(const Field& f)
{
    double s = 0;
    for (double v : f.data) s += v;
    return s * f.grid.dx() * f.grid.dy();
}

inline double mean(const Field& f) { return integral(f) / (f.grid.Lx * f.grid.Ly); }

inline double l2_norm(const Field& f)
{
    double s = 0;
    for (double v : f.data) s += v * v;
    return std::sqrt(s * f.grid.dx() * f.grid.dy());
}

inline double lp_norm(const Field& f, double p)
{
    double m = 0;
    for (double v : f.data) m = std::max(m, std::abs(v));
    if (m == 0) return 0;
    double s = 0;
    for (double v : f.data) s += std::pow(std::abs(v) / m, p);
    return m * std::pow(s * f.grid.dx() * f.grid.dy(), 1.0 / p);
}

inline double max_abs(const Field& f)
{
    double m = 0;
    for (double v : f.data) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(const Field& a, const Field& b)
{
    require_same_grid(a.grid, b.grid);
    double m = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

} // namespace zksem
