#pragma once

// Domain types shared by the FDTD engine and the benchmarks.
//
// The field model is Maxwell's curl pair with electric conductivity sigma and
// magnetic loss sigma_star:
//
//   dH/dt = -(1/mu)  * (curl E + sigma_star * H)
//   dE/dt =  (1/eps) * (curl H - sigma * E)
//
// discretized on a Yee grid with central differences in space and time.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fdtdbench/errors.hpp"

namespace fdtdbench {

enum class Precision { Single, Double };

std::string_view to_string(Precision p);
Precision parse_precision(std::string_view text);

template <class Real> constexpr Precision precision_of();
template <> constexpr Precision precision_of<float>() { return Precision::Single; }
template <> constexpr Precision precision_of<double>() { return Precision::Double; }

/// Normalized units set c = 1 and treat delta as a cell count, so the time step equals the
/// Courant number. Physical units use SI vacuum constants.
enum class Units { Normalized, Physical };

namespace constants {
inline constexpr double epsilon0 = 8.8541878128e-12; // F/m
inline constexpr double mu0 = 1.25663706212e-6;      // H/m
inline const double c0 = 1.0 / std::sqrt(mu0 * epsilon0);
} // namespace constants

/// Cell counts per axis. A 1D grid has ny = nz = 1.
struct Extent
{
    std::size_t nx = 1;
    std::size_t ny = 1;
    std::size_t nz = 1;

    std::size_t cells() const noexcept { return nx * ny * nz; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept
    {
        return (i * ny + j) * nz + k;
    }

    friend bool operator==(const Extent&, const Extent&) = default;
};

struct SourceSpec
{
    /// Cell index; only the first entry is used on 1D grids.
    std::array<std::size_t, 3> location{};
    /// Wavelength in cells.
    double n_lambda = 20.0;
    /// Step at which the sinusoid has zero phase; the source is inactive before it.
    std::int64_t tstart = 1;
    double amplitude = 1.0;
    /// Last step at which the source is applied; unset means "until the end".
    std::optional<std::int64_t> tstop;
    /// Additive instead of overwriting.
    bool soft = false;
    /// 3D only: drive every Ez sample on the x = location[0] plane.
    bool plane = false;

    bool active_at(std::int64_t n) const noexcept
    {
        return n >= tstart && (!tstop || n <= *tstop);
    }
};

struct SimulationConfig
{
    int dims = 1;
    Extent extent{200, 1, 1};
    double delta = 1.0;
    double courant = 1.0;
    std::int64_t time_tot = 350;
    SourceSpec source{};
    Precision precision = Precision::Double;
    /// Steps between snapshots; 0 keeps only the final state.
    std::int64_t snapshot_every = 0;
    Units units = Units::Normalized;

    /// Wave speed in the configured units.
    double wave_speed() const noexcept { return units == Units::Normalized ? 1.0 : constants::c0; }
    /// Time step implied by the Courant number: courant * delta / c.
    double time_step() const noexcept { return courant * delta / wave_speed(); }

    /// 1D grid of `xdim` cells with the source at xdim/2.
    static SimulationConfig default_1d(std::size_t xdim = 200);
    /// 3D cube with the source at its center and Courant number 0.5.
    static SimulationConfig default_3d(std::size_t n = 32);
};

/// Largest stable Courant number for an explicit Yee scheme: 1/sqrt(dims).
double stability_bound(int dims);

/// Structural checks: dims, extents >= 3, time_tot >= 1, source interior, n_lambda > 2.
void validate_config(const SimulationConfig& config);

/// Throws UnstableCourant unless 0 < courant <= bound (relative slack 1e-12 at the bound).
void validate_stability(const SimulationConfig& config);

template <std::floating_point Real>
struct MaterialGrid
{
    Extent extent;
    std::vector<Real> epsilon;
    std::vector<Real> mu;
    std::vector<Real> sigma;
    std::vector<Real> sigma_star;
};

/// Lossless vacuum: eps0/mu0 in physical units, 1/1 in normalized units.
template <std::floating_point Real>
MaterialGrid<Real> make_vacuum_materials(const Extent& extent, Units units = Units::Normalized)
{
    const std::size_t n = extent.cells();
    const bool normalized = units == Units::Normalized;
    const Real eps = normalized ? Real(1) : static_cast<Real>(constants::epsilon0);
    const Real mu = normalized ? Real(1) : static_cast<Real>(constants::mu0);
    return MaterialGrid<Real>{extent, std::vector<Real>(n, eps), std::vector<Real>(n, mu),
                              std::vector<Real>(n, Real(0)), std::vector<Real>(n, Real(0))};
}

/// Throws ConfigError if shapes mismatch `extent` or a value is out of range
/// (eps, mu > 0; sigma, sigma_star >= 0).
template <std::floating_point Real>
void validate_materials(const MaterialGrid<Real>& m, const Extent& extent)
{
    const std::size_t n = extent.cells();
    if (m.extent != extent || m.epsilon.size() != n || m.mu.size() != n || m.sigma.size() != n
        || m.sigma_star.size() != n) {
        throw ConfigError("material arrays do not match the grid extent");
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (!(m.epsilon[c] > 0) || !(m.mu[c] > 0) || !(m.sigma[c] >= 0) || !(m.sigma_star[c] >= 0)) {
            throw ConfigError("material value out of range at cell " + std::to_string(c));
        }
    }
}

/// 1D Ez/Hy line. Hy(i) sits half a cell to the right of Ez(i).
template <std::floating_point Real>
struct Field1D
{
    std::vector<Real> ez;
    std::vector<Real> hy;
    std::int64_t step = 0;

    Field1D() = default;
    explicit Field1D(std::size_t xdim) : ez(xdim, Real(0)), hy(xdim, Real(0)) {}

    std::size_t size() const noexcept { return ez.size(); }
    friend bool operator==(const Field1D&, const Field1D&) = default;
};

/// Six staggered components, each stored as an nx*ny*nz array indexed by Extent::index.
/// Ex(i,j,k) lives at (i+1/2, j, k), Hx(i,j,k) at (i, j+1/2, k+1/2), and so on.
template <std::floating_point Real>
struct Field3D
{
    Extent extent;
    std::vector<Real> ex, ey, ez;
    std::vector<Real> hx, hy, hz;
    std::int64_t step = 0;

    Field3D() = default;
    explicit Field3D(const Extent& e)
        : extent(e),
          ex(e.cells(), Real(0)), ey(e.cells(), Real(0)), ez(e.cells(), Real(0)),
          hx(e.cells(), Real(0)), hy(e.cells(), Real(0)), hz(e.cells(), Real(0))
    {
    }

    friend bool operator==(const Field3D&, const Field3D&) = default;
};

/// (f(x0 + delta/2) - f(x0 - delta/2)) / delta, second-order accurate in delta.
template <std::floating_point Real, std::invocable<Real> F>
Real central_difference(F&& f, Real x0, Real delta)
{
    if (!(delta > 0)) {
        throw std::domain_error("central_difference: delta must be positive");
    }
    const Real half = delta / Real(2);
    return (static_cast<Real>(f(x0 + half)) - static_cast<Real>(f(x0 - half))) / delta;
}

} // namespace fdtdbench
