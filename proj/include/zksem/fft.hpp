#pragma once

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "zksem/grid.hpp"

namespace zksem {

namespace detail {

enum class PlanKind { r2c_2d, c2r_2d, r2c_1d, c2r_1d };

// plans are created once under a lock; fftw_execute_dft_* on fresh arrays is thread safe
class PlanCache {
public:
    static PlanCache& instance()
    {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(PlanKind kind, std::size_t nx, std::size_t ny)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(int(kind), nx, ny);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        const std::size_t nreal = nx * ny;
        const std::size_t nspec = (nx / 2 + 1) * ny;
        double* r = fftw_alloc_real(nreal);
        fftw_complex* c = fftw_alloc_complex(nspec);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan p = nullptr;
        switch (kind) {
        case PlanKind::r2c_2d: p = fftw_plan_dft_r2c_2d(int(ny), int(nx), r, c, flags); break;
        case PlanKind::c2r_2d: p = fftw_plan_dft_c2r_2d(int(ny), int(nx), c, r, flags); break;
        case PlanKind::r2c_1d: p = fftw_plan_dft_r2c_1d(int(nx), r, c, flags); break;
        case PlanKind::c2r_1d: p = fftw_plan_dft_c2r_1d(int(nx), c, r, flags); break;
        }
        fftw_free(r);
        fftw_free(c);
        if (!p) throw NumericalError("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

    ~PlanCache()
    {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, std::size_t, std::size_t>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

} // namespace detail

// unnormalized forward transform
inline SpectralField transform(const Field& f)
{
    if (f.data.size() != f.grid.size()) throw ValidationError("field size does not match grid");
    if (!all_finite(f.data)) throw NumericalError("non-finite value in transform input");
    SpectralField out(f.grid);
    std::vector<double> in = f.data;
    fftw_plan p = detail::PlanCache::instance().get(detail::PlanKind::r2c_2d, f.grid.nx, f.grid.ny);
    fftw_execute_dft_r2c(p, in.data(), detail::as_fftw(out.coeffs.data()));
    return out;
}

// inverse carries 1/(nx*ny)
inline Field inverse_transform(const SpectralField& F)
{
    Field out(F.grid);
    std::vector<cplx> in = F.coeffs;   // c2r destroys its input
    fftw_plan p = detail::PlanCache::instance().get(detail::PlanKind::c2r_2d, F.grid.nx, F.grid.ny);
    fftw_execute_dft_c2r(p, detail::as_fftw(in.data()), out.data.data());
    const double s = 1.0 / double(F.grid.size());
    for (double& v : out.data) v *= s;
    return out;
}

// 1D real transforms on a line of n points (half spectrum of n/2+1 entries)
inline std::vector<cplx> transform_line(const std::vector<double>& f)
{
    const std::size_t n = f.size();
    std::vector<cplx> out(n / 2 + 1);
    std::vector<double> in = f;
    fftw_plan p = detail::PlanCache::instance().get(detail::PlanKind::r2c_1d, n, 1);
    fftw_execute_dft_r2c(p, in.data(), detail::as_fftw(out.data()));
    return out;
}

inline std::vector<double> inverse_transform_line(const std::vector<cplx>& F, std::size_t n)
{
    std::vector<double> out(n);
    std::vector<cplx> in = F;
    fftw_plan p = detail::PlanCache::instance().get(detail::PlanKind::c2r_1d, n, 1);
    fftw_execute_dft_c2r(p, detail::as_fftw(in.data()), out.data());
    const double s = 1.0 / double(n);
    for (double& v : out) v *= s;
    return out;
}

// (1/N^2) * sum over the full spectrum of |F|^2, equal to the mean square of the samples
inline double spectral_mean_square(const SpectralField& F)
{
    const auto& g = F.grid;
    double s = 0;
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nxh(); ++ix) {
            const double w = (ix == 0 || ix == g.nx / 2) ? 1.0 : 2.0;
            s += w * std::norm(F(ix, iy));
        }
    const double n = double(g.size());
    return s / (n * n);
}

inline double mean_square(const Field& f)
{
    double s = 0;
    for (double v : f.data) s += v * v;
    return s / double(f.data.size());
}

// two-thirds rule
inline SpectralField dealias(const SpectralField& F)
{
    SpectralField out = F;
    const auto& g = F.grid;
    for (std::size_t iy = 0; iy < g.ny; ++iy) {
        const bool ycut = 3 * std::abs(g.my(iy)) > long(g.ny);
        for (std::size_t ix = 0; ix < g.nxh(); ++ix) {
            const long m = ix == g.nx / 2 ? long(g.nx / 2) : long(ix);
            if (ycut || 3 * m > long(g.nx)) out(ix, iy) = 0.0;
        }
    }
    return out;
}

} // namespace zksem
