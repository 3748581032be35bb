#include "fdtdbench/core.hpp"

#include <cmath>
#include <cstdio>

namespace fdtdbench {

namespace {

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    std::string s = buf;
    if (s.find_first_of(".eninf") == std::string::npos) {
        s += ".0";
    }
    return s;
}

} // namespace

UnstableCourant::UnstableCourant(double given, double bound)
    : ConfigError("unstable Courant number " + format_double(given) + " exceeds the stability bound "
                  + format_double(bound)),
      given_(given), bound_(bound)
{
}

SingularMatrix::SingularMatrix(std::size_t column)
    : Error("singular matrix: zero pivot in column " + std::to_string(column)), column_(column)
{
}

IoError::IoError(const std::string& path, const std::string& what)
    : Error(path + ": " + what), path_(path)
{
}

std::string_view to_string(Precision p)
{
    return p == Precision::Single ? "single" : "double";
}

Precision parse_precision(std::string_view text)
{
    if (text == "single") {
        return Precision::Single;
    }
    if (text == "double") {
        return Precision::Double;
    }
    throw ConfigError("unknown precision '" + std::string(text) + "'");
}

SimulationConfig SimulationConfig::default_1d(std::size_t xdim)
{
    SimulationConfig c;
    c.dims = 1;
    c.extent = Extent{xdim, 1, 1};
    c.courant = 1.0;
    c.source.location = {xdim / 2, 0, 0};
    return c;
}

SimulationConfig SimulationConfig::default_3d(std::size_t n)
{
    SimulationConfig c;
    c.dims = 3;
    c.extent = Extent{n, n, n};
    c.courant = 0.5;
    c.time_tot = 100;
    c.source.location = {n / 2, n / 2, n / 2};
    return c;
}

double stability_bound(int dims)
{
    if (dims != 1 && dims != 3) {
        throw ConfigError("dims must be 1 or 3, got " + std::to_string(dims));
    }
    return 1.0 / std::sqrt(static_cast<double>(dims));
}

void validate_config(const SimulationConfig& config)
{
    if (config.dims != 1 && config.dims != 3) {
        throw ConfigError("dims must be 1 or 3, got " + std::to_string(config.dims));
    }
    const Extent& e = config.extent;
    if (config.dims == 1 && (e.ny != 1 || e.nz != 1)) {
        throw ConfigError("1D grids must have ny = nz = 1");
    }
    const std::array<std::size_t, 3> axes{e.nx, e.ny, e.nz};
    for (int a = 0; a < config.dims; ++a) {
        if (axes[a] < 3) {
            throw ConfigError("extent along axis " + std::to_string(a) + " must be at least 3");
        }
    }
    if (config.time_tot < 1) {
        throw ConfigError("time_tot must be at least 1");
    }
    if (config.snapshot_every < 0) {
        throw ConfigError("snapshot_every must be non-negative");
    }
    if (!(config.delta > 0) || !std::isfinite(config.delta)) {
        throw ConfigError("delta must be positive and finite");
    }
    if (!(config.courant > 0) || !std::isfinite(config.courant)) {
        throw ConfigError("courant must be positive and finite");
    }

    const SourceSpec& s = config.source;
    if (!(s.n_lambda > 2) || !std::isfinite(s.n_lambda)) {
        throw ConfigError("n_lambda must exceed 2 cells per wavelength");
    }
    if (s.tstart < 0) {
        throw ConfigError("tstart must be non-negative");
    }
    if (!std::isfinite(s.amplitude)) {
        throw ConfigError("source amplitude must be finite");
    }
    if (s.plane && config.dims != 3) {
        throw ConfigError("plane sources require a 3D grid");
    }
    for (int a = 0; a < config.dims; ++a) {
        if (a > 0 && s.plane) {
            break;
        }
        if (s.location[a] == 0 || s.location[a] + 1 >= axes[a]) {
            throw ConfigError("source location must be strictly inside the grid (axis "
                              + std::to_string(a) + ")");
        }
    }
}

void validate_stability(const SimulationConfig& config)
{
    const double bound = stability_bound(config.dims);
    if (!(config.courant > 0) || config.courant > bound * (1.0 + 1e-12)) {
        throw UnstableCourant(config.courant, bound);
    }
}

} // namespace fdtdbench
