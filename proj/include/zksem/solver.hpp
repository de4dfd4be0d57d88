#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zksem/riesz.hpp"

namespace zksem {

enum class Model { ZK, SEM, LINEARIZED };

inline std::string to_string(Model m)
{
    switch (m) {
    case Model::ZK: return "ZK";
    case Model::SEM: return "SEM";
    case Model::LINEARIZED: return "LINEARIZED";
    }
    return "?";
}

inline Model model_from_string(const std::string& s)
{
    if (s == "ZK") return Model::ZK;
    if (s == "SEM") return Model::SEM;
    if (s == "LINEARIZED") return Model::LINEARIZED;
    throw ValidationError("unknown model: " + s);
}

struct SolverConfig {
    Model model = Model::ZK;
    Grid2D grid;
    double dt = 0;          // 0: use the heuristic
    double t_end = 0;
    int snapshot_every = 1;
    bool dealias = true;
    bool strict = false;
    double drift_tolerance = 1e-6;
    bool override_dt = false;   // allow dt above the heuristic
    bool nonlinear = true;      // false: linear propagation only
};

struct Invariants {
    double mass = 0;
    double l2 = 0;
    std::optional<double> hamiltonian;   // ZK only
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<Invariants> invariant_log;
};

inline double default_dt(const Field& u0)
{
    return std::min(0.1, 0.5 / (u0.grid.kmax() * max_abs(u0) + 1.0));
}

// Delta phi = d_x u
inline Field solve_potential(const Field& u)
{
    SpectralField U = transform(u);
    const auto& g = u.grid;
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nxh(); ++ix) {
            const double xi = ix == g.nx / 2 ? 0.0 : g.kx[ix];
            const double k2 = g.kx[ix] * g.kx[ix] + g.ky[iy] * g.ky[iy];
            U(ix, iy) = (ix == 0 && iy == 0) ? cplx(0.0) : cplx(0, xi) / (-k2) * U(ix, iy);
        }
    return inverse_transform(U);
}

namespace detail {

inline SpectralField maybe_dealias(const SpectralField& F, bool on) { return on ? dealias(F) : F; }

// N(u) in spectral form: u u_x (ZK) or (u u_x + u_x dxL u + u_y dyL u)/2 (SEM)
inline SpectralField nonlinear_term(const SpectralField& U, Model model, bool dealias_on)
{
    const SpectralField Ud = maybe_dealias(U, dealias_on);
    Field u = inverse_transform(Ud);
    Field ux = inverse_transform(apply_multiplier(Ud, MultiplierKind::DX));
    Field prod(U.grid);
    if (model == Model::ZK) {
        for (std::size_t i = 0; i < prod.data.size(); ++i) prod.data[i] = u.data[i] * ux.data[i];
        return maybe_dealias(transform(prod), dealias_on);
    }
    Field uy = inverse_transform(apply_multiplier(Ud, MultiplierKind::DY));
    Field lx = inverse_transform(apply_multiplier(Ud, MultiplierKind::NONLOCAL_X));
    Field ly = inverse_transform(apply_multiplier(Ud, MultiplierKind::NONLOCAL_Y));
    for (std::size_t i = 0; i < prod.data.size(); ++i)
        prod.data[i] = 0.5 * (u.data[i] * ux.data[i] + ux.data[i] * lx.data[i] + uy.data[i] * ly.data[i]);
    return maybe_dealias(transform(prod), dealias_on);
}

// exp(i tau xi |zeta|^2) as a table
inline std::vector<cplx> propagator_table(const Grid2D& g, double tau)
{
    std::vector<cplx> e(g.spectral_size());
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nxh(); ++ix) e[iy * g.nxh() + ix] = symbol(g, propagator(tau), ix, iy);
    return e;
}

} // namespace detail

// -d_x Laplacian u - N(u)
inline Field rhs(const Field& u, Model model, bool dealias_on = true)
{
    require(model != Model::LINEARIZED, "rhs is defined for ZK and SEM only");
    SpectralField U = transform(u);
    SpectralField L = apply_multiplier(U, MultiplierKind::DX_LAPLACIAN);
    SpectralField N = detail::nonlinear_term(U, model, dealias_on);
    for (std::size_t i = 0; i < L.coeffs.size(); ++i) L.coeffs[i] = -L.coeffs[i] - N.coeffs[i];
    return inverse_transform(L);
}

class Stepper {
public:
    Stepper(const Grid2D& g, double dt, Model model, bool dealias_on, bool nonlinear = true)
        : grid_(g), dt_(dt), model_(model), dealias_(dealias_on), nonlinear_(nonlinear),
          e_(detail::propagator_table(g, dt)), e2_(detail::propagator_table(g, dt / 2))
    {
        require(dt > 0 && std::isfinite(dt), "dt must be positive");
        require(model != Model::LINEARIZED, "LINEARIZED is evaluated as a residual only");
    }

    // one integrating-factor RK4 step in spectral space
    SpectralField step(const SpectralField& U) const
    {
        const std::size_t n = U.coeffs.size();
        if (!nonlinear_) {
            SpectralField out(grid_);
            for (std::size_t i = 0; i < n; ++i) out.coeffs[i] = e_[i] * U.coeffs[i];
            return out;
        }
        auto f = [&](const SpectralField& V) {
            SpectralField N = detail::nonlinear_term(V, model_, dealias_);
            for (auto& c : N.coeffs) c *= -dt_;
            return N;
        };
        SpectralField a = f(U);
        SpectralField tmp(grid_);
        for (std::size_t i = 0; i < n; ++i) tmp.coeffs[i] = e2_[i] * (U.coeffs[i] + 0.5 * a.coeffs[i]);
        SpectralField b = f(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp.coeffs[i] = e2_[i] * U.coeffs[i] + 0.5 * b.coeffs[i];
        SpectralField c = f(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp.coeffs[i] = e_[i] * U.coeffs[i] + e2_[i] * c.coeffs[i];
        SpectralField d = f(tmp);
        SpectralField out(grid_);
        for (std::size_t i = 0; i < n; ++i)
            out.coeffs[i] = e_[i] * U.coeffs[i] +
                            (e_[i] * a.coeffs[i] + 2.0 * e2_[i] * (b.coeffs[i] + c.coeffs[i]) + d.coeffs[i]) / 6.0;
        return out;
    }

private:
    Grid2D grid_;
    double dt_;
    Model model_;
    bool dealias_, nonlinear_;
    std::vector<cplx> e_, e2_;
};

inline Field step(const Field& u, double dt, Model model, bool dealias_on = true)
{
    return inverse_transform(Stepper(u.grid, dt, model, dealias_on).step(transform(u)));
}

inline Invariants conserved(const Field& u, Model model)
{
    Invariants inv;
    inv.mass = integral(u);
    double s = 0;
    for (double v : u.data) s += v * v;
    inv.l2 = s * u.grid.dx() * u.grid.dy();
    if (model == Model::ZK) {
        SpectralField U = transform(u);
        Field ux = inverse_transform(apply_multiplier(U, MultiplierKind::DX));
        Field uy = inverse_transform(apply_multiplier(U, MultiplierKind::DY));
        double h = 0;
        for (std::size_t i = 0; i < u.data.size(); ++i) {
            const double v = u.data[i];
            h += 0.5 * (ux.data[i] * ux.data[i] + uy.data[i] * uy.data[i]) - v * v * v / 6.0;
        }
        inv.hamiltonian = h * u.grid.dx() * u.grid.dy();
    }
    return inv;
}

inline double relative_drift(double value, double ref, double scale)
{
    const double d = std::abs(ref) > 1e-12 * scale ? std::abs(ref) : scale;
    return d == 0 ? std::abs(value - ref) : std::abs(value - ref) / d;
}

inline void validate(const SolverConfig& cfg, const Field& u0)
{
    require(cfg.model != Model::LINEARIZED, "LINEARIZED model is evaluated as a residual functional, not evolved");
    require(u0.grid == cfg.grid, "initial data grid does not match config grid");
    require(cfg.dt > 0 && std::isfinite(cfg.dt), "dt must be positive");
    require(cfg.t_end >= 0 && std::isfinite(cfg.t_end), "t_end must be >= 0");
    require(cfg.snapshot_every >= 1, "snapshot_every must be >= 1");
    if (!cfg.override_dt)
        require(cfg.dt <= default_dt(u0) * (1 + 1e-12), "dt exceeds stability heuristic");
    const double steps = cfg.t_end / cfg.dt;
    require(std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps), "t_end is not a multiple of dt");
}

inline Trajectory evolve(const Field& u0, SolverConfig cfg)
{
    if (cfg.dt == 0) {
        const double h = default_dt(u0);
        cfg.dt = cfg.t_end > 0 ? cfg.t_end / std::ceil(cfg.t_end / h) : h;
    }
    validate(cfg, u0);
    if (!all_finite(u0.data)) throw NumericalError("non-finite initial data");
    const long nsteps = std::lround(cfg.t_end / cfg.dt);
    Stepper stepper(u0.grid, cfg.dt, cfg.model, cfg.dealias, cfg.nonlinear);

    Trajectory tr;
    const Invariants inv0 = conserved(u0, cfg.model);
    double l1 = 0;
    for (double v : u0.data) l1 += std::abs(v);
    l1 *= u0.grid.dx() * u0.grid.dy();
    auto record = [&](const Field& u, double t) {
        Invariants inv = conserved(u, cfg.model);
        if (cfg.strict) {
            const bool bad_mass = relative_drift(inv.mass, inv0.mass, l1) > cfg.drift_tolerance;
            const bool bad_l2 = cfg.model == Model::ZK && relative_drift(inv.l2, inv0.l2, inv0.l2) > cfg.drift_tolerance;
            const bool bad_h = inv.hamiltonian &&
                               relative_drift(*inv.hamiltonian, *inv0.hamiltonian, std::abs(*inv0.hamiltonian) + inv0.l2) >
                                   cfg.drift_tolerance;
            if (bad_mass || bad_l2 || bad_h) {
                std::ostringstream os;
                os << "invariant drift above tolerance at t=" << t;
                throw NumericalError(os.str());
            }
        }
        tr.times.push_back(t);
        tr.snapshots.push_back(u);
        tr.invariant_log.push_back(inv);
    };
    record(u0, 0.0);
    SpectralField U = transform(u0);
    for (long n = 1; n <= nsteps; ++n) {
        U = stepper.step(U);
        const bool snap = n % cfg.snapshot_every == 0 || n == nsteps;
        bool finite = true;
        for (const auto& c : U.coeffs)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                finite = false;
                break;
            }
        if (!finite || snap) {
            Field u = inverse_transform(U);
            if (!finite || !all_finite(u.data)) {
                std::ostringstream os;
                os << "non-finite solution at step " << n << " (max|u| before step " << max_abs(tr.snapshots.back()) << ")";
                throw NumericalError(os.str());
            }
            record(u, double(n) * cfg.dt);
        }
    }
    return tr;
}

// ---------------------------------------------------------------- linearized difference equation

struct CoefficientSet {
    std::vector<double> times;
    std::vector<Field> a1, b1, a0, b0, c0;
};

inline void require_matching(const Trajectory& u1, const Trajectory& u2)
{
    require(!u1.snapshots.empty() && u1.snapshots.size() == u2.snapshots.size(), "mismatched time ladders");
    for (std::size_t i = 0; i < u1.times.size(); ++i) {
        require(u1.times[i] == u2.times[i], "mismatched time ladders");
        require(u1.snapshots[i].grid == u2.snapshots[i].grid, "mismatched grids");
        require(u1.snapshots[i].grid == u1.snapshots[0].grid, "mismatched grids");
    }
}

// a1 = (u1 + dxL u2)/2, b1 = dyL u2 / 2, a0 = d_x u1 / 2, b0 = d_y u1 / 2, c0 = d_x u2 / 2
inline CoefficientSet linearized_coefficients(const Trajectory& u1, const Trajectory& u2)
{
    require_matching(u1, u2);
    CoefficientSet cs;
    cs.times = u1.times;
    for (std::size_t i = 0; i < u1.times.size(); ++i) {
        const SpectralField U1 = transform(u1.snapshots[i]);
        const SpectralField U2 = transform(u2.snapshots[i]);
        cs.a1.push_back(0.5 * (u1.snapshots[i] + inverse_transform(apply_multiplier(U2, MultiplierKind::NONLOCAL_X))));
        cs.b1.push_back(0.5 * inverse_transform(apply_multiplier(U2, MultiplierKind::NONLOCAL_Y)));
        cs.a0.push_back(0.5 * inverse_transform(apply_multiplier(U1, MultiplierKind::DX)));
        cs.b0.push_back(0.5 * inverse_transform(apply_multiplier(U1, MultiplierKind::DY)));
        cs.c0.push_back(0.5 * inverse_transform(apply_multiplier(U2, MultiplierKind::DX)));
    }
    return cs;
}

inline Trajectory difference(const Trajectory& u1, const Trajectory& u2)
{
    require_matching(u1, u2);
    Trajectory v;
    v.times = u1.times;
    for (std::size_t i = 0; i < u1.times.size(); ++i) v.snapshots.push_back(u1.snapshots[i] - u2.snapshots[i]);
    return v;
}

struct ResidualSeries {
    std::vector<double> times;
    std::vector<double> norms;
};

/* L2 norm of dt v + dxLap v + a1 v_x + b1 v_y + a0 dxL v + b0 dyL v + c0 v
   at interior snapshots; dt v by centered differences, products dealiased as in the solver */
inline ResidualSeries residual_eq_v(const Trajectory& v, const CoefficientSet& cs, bool dealias_on = true)
{
    require(v.snapshots.size() >= 3, "residual_eq_v needs at least 3 snapshots");
    require(cs.times.size() == v.times.size(), "mismatched time ladders");
    ResidualSeries out;
    auto prod = [&](const Field& a, const SpectralField& B) {
        if (!dealias_on) return transform(pointwise(a, inverse_transform(B)));
        return dealiased_product(transform(a), B);
    };
    for (std::size_t i = 1; i + 1 < v.snapshots.size(); ++i) {
        const double h1 = v.times[i] - v.times[i - 1], h2 = v.times[i + 1] - v.times[i];
        require(h1 > 0 && h2 > 0, "times must be strictly increasing");
        // three-point derivative, exact for quadratics on a non-uniform ladder
        Field vt(v.snapshots[i].grid);
        for (std::size_t k = 0; k < vt.data.size(); ++k)
            vt.data[k] = -h2 / (h1 * (h1 + h2)) * v.snapshots[i - 1].data[k] + (h2 - h1) / (h1 * h2) * v.snapshots[i].data[k] +
                         h1 / (h2 * (h1 + h2)) * v.snapshots[i + 1].data[k];
        const SpectralField V = transform(v.snapshots[i]);
        SpectralField R = transform(vt);
        const SpectralField disp = apply_multiplier(V, MultiplierKind::DX_LAPLACIAN);
        const SpectralField terms[] = {
            prod(cs.a1[i], apply_multiplier(V, MultiplierKind::DX)),
            prod(cs.b1[i], apply_multiplier(V, MultiplierKind::DY)),
            prod(cs.a0[i], apply_multiplier(V, MultiplierKind::NONLOCAL_X)),
            prod(cs.b0[i], apply_multiplier(V, MultiplierKind::NONLOCAL_Y)),
            prod(cs.c0[i], V),
        };
        for (std::size_t k = 0; k < R.coeffs.size(); ++k) {
            R.coeffs[k] += disp.coeffs[k];
            for (const auto& t : terms) R.coeffs[k] += t.coeffs[k];
        }
        out.times.push_back(v.times[i]);
        out.norms.push_back(l2_norm(inverse_transform(R)));
    }
    return out;
}

// ---------------------------------------------------------------- analytic data

// 3c sech^2(sqrt(c)(x - x0)/2)
inline double kdv_soliton(double x, double c, double x0)
{
    const double s = 1.0 / std::cosh(0.5 * std::sqrt(c) * (x - x0));
    return 3 * c * s * s;
}

// periodic sum of soliton images on a line of length L
inline double kdv_soliton_periodic(double x, double c, double x0, double L)
{
    double s = 0;
    for (int k = -2; k <= 2; ++k) s += kdv_soliton(x + k * L, c, x0);
    return s;
}

} // namespace zksem
