#pragma once

// Leapfrog FDTD kernels, hard/soft sinusoidal source and the time-stepping loop.
//
// Indexing is 0-based. The classic 1-based Matlab loops map as follows:
//   Hy(i), i = 1..xdim-1   ->  hy[i], i = 0..xdim-2   (last Hy sample never updated)
//   Ez(i), i = 2..xdim     ->  ez[i], i = 1..xdim-1   (first Ez sample never updated)
//   Ez(xdim/2)             ->  ez[xdim/2 - 1] for the same physical cell; SimulationConfig
//                              defaults place the source at index xdim/2.
// Cells skipped by those bounds keep their initial value and act as a reflecting wall.
//
// One step n performs, in order: H update, E update, source write. The source value of
// step n therefore appears in the state recorded for step n, and E is at time level n.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <new>
#include <numbers>
#include <span>
#include <vector>

#include "fdtdbench/backend.hpp"
#include "fdtdbench/core.hpp"

namespace fdtdbench {

/// Per-cell update multipliers:
///   H <- cha * H + chb * curl(E),  E <- cea * E + ceb * curl(H).
/// Losses use the time-averaged (semi-implicit) form
///   cea = (1 - sigma dt / 2eps) / (1 + sigma dt / 2eps),  ceb = (dt / (eps delta)) / (1 + sigma dt / 2eps)
/// and the analogous cha/chb with sigma_star and mu. Lossless cells get cea = cha = 1 exactly.
template <std::floating_point Real>
struct UpdateCoefficients
{
    std::vector<Real> cha, chb;
    std::vector<Real> cea, ceb;
};

template <std::floating_point Real>
UpdateCoefficients<Real> make_coefficients(const MaterialGrid<Real>& m, const SimulationConfig& config)
{
    const Real dt = static_cast<Real>(config.time_step());
    const Real delta = static_cast<Real>(config.delta);
    const std::size_t n = m.epsilon.size();
    UpdateCoefficients<Real> c;
    c.cha.resize(n);
    c.chb.resize(n);
    c.cea.resize(n);
    c.ceb.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Real h_loss = m.sigma_star[i] * dt / (Real(2) * m.mu[i]);
        c.cha[i] = (Real(1) - h_loss) / (Real(1) + h_loss);
        c.chb[i] = (dt / (delta * m.mu[i])) / (Real(1) + h_loss);

        const Real e_loss = m.sigma[i] * dt / (Real(2) * m.epsilon[i]);
        c.cea[i] = (Real(1) - e_loss) / (Real(1) + e_loss);
        c.ceb[i] = (dt / (delta * m.epsilon[i])) / (Real(1) + e_loss);
    }
    return c;
}

/// amplitude * sin(2 pi (1/n_lambda) (n - tstart) deltat), evaluated left to right.
template <std::floating_point Real>
Real source_value(const SourceSpec& source, std::int64_t n, Real deltat)
{
    const Real two_pi = Real(2) * std::numbers::pi_v<Real>;
    const Real phase = two_pi * (Real(1) / static_cast<Real>(source.n_lambda))
                       * static_cast<Real>(n - source.tstart) * deltat;
    return static_cast<Real>(source.amplitude) * std::sin(phase);
}

namespace detail {

// Writes value(i, j, k, flat) into a copy of `target` over plan.box(), then swaps the copy
// in. Cells outside the box keep their previous value.
template <std::floating_point Real, class Value>
void apply_buffered(std::vector<Real>& target, std::vector<Real>& scratch, const Extent& extent,
                    const KernelPlan& plan, Executor& executor, Value&& value)
{
    scratch.resize(target.size());
    parallel_copy<Real>(std::span<const Real>(target), std::span<Real>(scratch), executor);
    Real* out = scratch.data();
    execute_stencil(plan, executor, [&](std::size_t i, std::size_t j, std::size_t k) {
        const std::size_t c = extent.index(i, j, k);
        out[c] = value(c);
    });
    target.swap(scratch);
}

} // namespace detail

/// hy[i] <- cha[i] hy[i] + chb[i] (ez[i+1] - ez[i]) for i in [0, xdim-2].
template <std::floating_point Real>
void update_h_1d(Field1D<Real>& f, const UpdateCoefficients<Real>& c, Executor& executor,
                 std::vector<Real>& scratch)
{
    const std::size_t xdim = f.size();
    if (xdim < 2) {
        return;
    }
    const Real* ez = f.ez.data();
    const Real* hy = f.hy.data();
    detail::apply_buffered(f.hy, scratch, Extent{xdim, 1, 1}, KernelPlan::range(0, xdim - 1),
                           executor, [&](std::size_t i) {
                               return c.cha[i] * hy[i] + c.chb[i] * (ez[i + 1] - ez[i]);
                           });
}

/// ez[i] <- cea[i] ez[i] + ceb[i] (hy[i] - hy[i-1]) for i in [1, xdim-1].
template <std::floating_point Real>
void update_e_1d(Field1D<Real>& f, const UpdateCoefficients<Real>& c, Executor& executor,
                 std::vector<Real>& scratch)
{
    const std::size_t xdim = f.size();
    if (xdim < 2) {
        return;
    }
    const Real* ez = f.ez.data();
    const Real* hy = f.hy.data();
    detail::apply_buffered(f.ez, scratch, Extent{xdim, 1, 1}, KernelPlan::range(1, xdim),
                           executor, [&](std::size_t i) {
                               return c.cea[i] * ez[i] + c.ceb[i] * (hy[i] - hy[i - 1]);
                           });
}

template <std::floating_point Real>
void update_h_1d(Field1D<Real>& f, const UpdateCoefficients<Real>& c)
{
    Executor serial;
    std::vector<Real> scratch;
    update_h_1d(f, c, serial, scratch);
}

template <std::floating_point Real>
void update_e_1d(Field1D<Real>& f, const UpdateCoefficients<Real>& c)
{
    Executor serial;
    std::vector<Real> scratch;
    update_e_1d(f, c, serial, scratch);
}

/// Writes (hard) or adds (soft) the source sample at step n. Inactive steps leave f untouched.
template <std::floating_point Real>
void inject_source(Field1D<Real>& f, const SourceSpec& source, std::int64_t n, Real deltat)
{
    if (!source.active_at(n)) {
        return;
    }
    const Real v = source_value(source, n, deltat);
    Real& cell = f.ez.at(source.location[0]);
    cell = source.soft ? cell + v : v;
}

template <std::floating_point Real>
void inject_source(Field3D<Real>& f, const SourceSpec& source, std::int64_t n, Real deltat)
{
    if (!source.active_at(n)) {
        return;
    }
    const Real v = source_value(source, n, deltat);
    const Extent& e = f.extent;
    auto write = [&](std::size_t c) { f.ez[c] = source.soft ? f.ez[c] + v : v; };
    const auto [si, sj, sk] = source.location;
    if (source.plane) {
        for (std::size_t j = 0; j < e.ny; ++j) {
            for (std::size_t k = 0; k < e.nz; ++k) {
                write(e.index(si, j, k));
            }
        }
    } else {
        write(e.index(si, sj, sk));
    }
}

/// H half-step of the six-component curl equations. Forward differences; a sample whose
/// forward neighbour falls outside the grid is not updated.
template <std::floating_point Real>
void update_h_3d(Field3D<Real>& f, const UpdateCoefficients<Real>& c, Executor& executor,
                 std::vector<Real>& scratch)
{
    const Extent e = f.extent;
    const std::size_t sj = e.nz;
    const std::size_t si = e.ny * e.nz;
    const Real* ex = f.ex.data();
    const Real* ey = f.ey.data();
    const Real* ez = f.ez.data();

    const Real* hx = f.hx.data();
    detail::apply_buffered(f.hx, scratch, e, KernelPlan({{0, 0, 0}, {e.nx, e.ny - 1, e.nz - 1}}),
                           executor, [&](std::size_t q) {
                               return c.cha[q] * hx[q]
                                      + c.chb[q] * ((ey[q + 1] - ey[q]) - (ez[q + sj] - ez[q]));
                           });
    const Real* hy = f.hy.data();
    detail::apply_buffered(f.hy, scratch, e, KernelPlan({{0, 0, 0}, {e.nx - 1, e.ny, e.nz - 1}}),
                           executor, [&](std::size_t q) {
                               return c.cha[q] * hy[q]
                                      + c.chb[q] * ((ez[q + si] - ez[q]) - (ex[q + 1] - ex[q]));
                           });
    const Real* hz = f.hz.data();
    detail::apply_buffered(f.hz, scratch, e, KernelPlan({{0, 0, 0}, {e.nx - 1, e.ny - 1, e.nz}}),
                           executor, [&](std::size_t q) {
                               return c.cha[q] * hz[q]
                                      + c.chb[q] * ((ex[q + sj] - ex[q]) - (ey[q + si] - ey[q]));
                           });
}

/// E half-step. Backward differences; a sample whose backward neighbour falls outside the
/// grid is not updated.
template <std::floating_point Real>
void update_e_3d(Field3D<Real>& f, const UpdateCoefficients<Real>& c, Executor& executor,
                 std::vector<Real>& scratch)
{
    const Extent e = f.extent;
    const std::size_t sj = e.nz;
    const std::size_t si = e.ny * e.nz;
    const Real* hx = f.hx.data();
    const Real* hy = f.hy.data();
    const Real* hz = f.hz.data();

    const Real* ex = f.ex.data();
    detail::apply_buffered(f.ex, scratch, e, KernelPlan({{0, 1, 1}, {e.nx, e.ny, e.nz}}), executor,
                           [&](std::size_t q) {
                               return c.cea[q] * ex[q]
                                      + c.ceb[q] * ((hz[q] - hz[q - sj]) - (hy[q] - hy[q - 1]));
                           });
    const Real* ey = f.ey.data();
    detail::apply_buffered(f.ey, scratch, e, KernelPlan({{1, 0, 1}, {e.nx, e.ny, e.nz}}), executor,
                           [&](std::size_t q) {
                               return c.cea[q] * ey[q]
                                      + c.ceb[q] * ((hx[q] - hx[q - 1]) - (hz[q] - hz[q - si]));
                           });
    const Real* ez = f.ez.data();
    detail::apply_buffered(f.ez, scratch, e, KernelPlan({{1, 1, 0}, {e.nx, e.ny, e.nz}}), executor,
                           [&](std::size_t q) {
                               return c.cea[q] * ez[q]
                                      + c.ceb[q] * ((hy[q] - hy[q - si]) - (hx[q] - hx[q - sj]));
                           });
}

template <std::floating_point Real>
void update_h_3d(Field3D<Real>& f, const UpdateCoefficients<Real>& c)
{
    Executor serial;
    std::vector<Real> scratch;
    update_h_3d(f, c, serial, scratch);
}

template <std::floating_point Real>
void update_e_3d(Field3D<Real>& f, const UpdateCoefficients<Real>& c)
{
    Executor serial;
    std::vector<Real> scratch;
    update_e_3d(f, c, serial, scratch);
}

/// One leapfrog cycle at step n: H update, E update, source write; bumps f.step.
template <std::floating_point Real>
void step_1d(Field1D<Real>& f, const UpdateCoefficients<Real>& c, const SourceSpec& source,
             std::int64_t n, Real deltat, Executor& executor, std::vector<Real>& scratch)
{
    update_h_1d(f, c, executor, scratch);
    update_e_1d(f, c, executor, scratch);
    inject_source(f, source, n, deltat);
    ++f.step;
}

template <std::floating_point Real>
void step_3d(Field3D<Real>& f, const UpdateCoefficients<Real>& c, const SourceSpec& source,
             std::int64_t n, Real deltat, Executor& executor, std::vector<Real>& scratch)
{
    update_h_3d(f, c, executor, scratch);
    update_e_3d(f, c, executor, scratch);
    inject_source(f, source, n, deltat);
    ++f.step;
}

template <class FieldT>
struct Snapshot
{
    std::int64_t step = 0;
    FieldT fields;
};

template <class FieldT>
struct SnapshotSeries
{
    std::vector<Snapshot<FieldT>> entries;
    SimulationConfig config;
};

namespace detail {

// The source phase uses the normalized time step (courant, in units of delta / c) so that
// n_lambda stays a wavelength in cells in both unit systems.
inline double source_time_step(const SimulationConfig& config)
{
    return config.courant;
}

} // namespace detail

/// Owns the fields, coefficients and execution resources of one simulation.
template <class FieldT>
class Simulation
{
  public:
    using Real = std::remove_cvref_t<decltype(std::declval<FieldT>().ez[0])>;
    static constexpr int dims = std::is_same_v<FieldT, Field1D<Real>> ? 1 : 3;

    /// Validates config (structure and stability) and materials. Throws ConfigError,
    /// UnstableCourant or ResourceError.
    Simulation(const SimulationConfig& config, const MaterialGrid<Real>& materials,
               const Backend& backend = Backend::serial())
        : config_(config), executor_(backend)
    {
        validate_config(config);
        validate_stability(config);
        if (config.dims != dims) {
            throw ConfigError("configuration dimensionality does not match the field type");
        }
        validate_materials(materials, config.extent);
        try {
            coeffs_ = make_coefficients(materials, config);
            if constexpr (dims == 1) {
                fields_ = FieldT(config.extent.nx);
            } else {
                fields_ = FieldT(config.extent);
            }
            scratch_.reserve(config.extent.cells());
        } catch (const std::bad_alloc&) {
            throw ResourceError("cannot allocate field arrays for "
                                + std::to_string(config.extent.cells()) + " cells");
        }
        deltat_ = static_cast<Real>(detail::source_time_step(config));
    }

    /// Advances one full cycle; the step index is fields().step + 1.
    void step()
    {
        const std::int64_t n = fields_.step + 1;
        if constexpr (dims == 1) {
            step_1d(fields_, coeffs_, config_.source, n, deltat_, executor_, scratch_);
        } else {
            step_3d(fields_, coeffs_, config_.source, n, deltat_, executor_, scratch_);
        }
    }

    const FieldT& fields() const noexcept { return fields_; }
    FieldT& fields() noexcept { return fields_; }
    const UpdateCoefficients<Real>& coefficients() const noexcept { return coeffs_; }
    const SimulationConfig& config() const noexcept { return config_; }

  private:
    SimulationConfig config_;
    Executor executor_;
    UpdateCoefficients<Real> coeffs_;
    FieldT fields_;
    std::vector<Real> scratch_;
    Real deltat_{};
};

template <std::floating_point Real>
using Simulation1D = Simulation<Field1D<Real>>;
template <std::floating_point Real>
using Simulation3D = Simulation<Field3D<Real>>;

/// Runs steps 1..time_tot and records deep copies every snapshot_every steps plus the final
/// state. Output depends only on the inputs, never on the backend.
template <class FieldT, std::floating_point Real>
SnapshotSeries<FieldT> run_simulation(const SimulationConfig& config,
                                      const MaterialGrid<Real>& materials, const Backend& backend)
{
    Simulation<FieldT> sim(config, materials, backend);
    SnapshotSeries<FieldT> series;
    series.config = config;
    try {
        for (std::int64_t n = 1; n <= config.time_tot; ++n) {
            sim.step();
            const bool due = config.snapshot_every > 0 && n % config.snapshot_every == 0;
            if (due || n == config.time_tot) {
                series.entries.push_back({n, sim.fields()});
            }
        }
    } catch (const std::bad_alloc&) {
        throw ResourceError("out of memory while recording snapshots");
    }
    return series;
}

template <std::floating_point Real>
SnapshotSeries<Field1D<Real>> run_1d(const SimulationConfig& config,
                                     const MaterialGrid<Real>& materials,
                                     const Backend& backend = Backend::serial())
{
    return run_simulation<Field1D<Real>>(config, materials, backend);
}

template <std::floating_point Real>
SnapshotSeries<Field3D<Real>> run_3d(const SimulationConfig& config,
                                     const MaterialGrid<Real>& materials,
                                     const Backend& backend = Backend::serial())
{
    return run_simulation<Field3D<Real>>(config, materials, backend);
}

/// Sum over cells of eps * Ez^2 + mu * Hy^2, accumulated in double.
template <std::floating_point Real>
double energy_proxy(const Field1D<Real>& f, const MaterialGrid<Real>& m)
{
    double w = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        w += double(m.epsilon[i]) * double(f.ez[i]) * double(f.ez[i])
             + double(m.mu[i]) * double(f.hy[i]) * double(f.hy[i]);
    }
    return w;
}

/// Largest absolute sample over all components.
template <std::floating_point Real>
double max_abs(const Field1D<Real>& f)
{
    double m = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        m = std::max({m, std::abs(double(f.ez[i])), std::abs(double(f.hy[i]))});
    }
    return m;
}

extern template class Simulation<Field1D<float>>;
extern template class Simulation<Field1D<double>>;
extern template class Simulation<Field3D<float>>;
extern template class Simulation<Field3D<double>>;

} // namespace fdtdbench
