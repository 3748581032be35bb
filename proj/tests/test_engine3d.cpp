#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fdtdbench/engine.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fdtdbench;

namespace {

SimulationConfig cube(std::size_t nx, std::size_t ny, std::size_t nz, double courant)
{
    auto cfg = SimulationConfig::default_3d(8);
    cfg.extent = Extent{nx, ny, nz};
    cfg.courant = courant;
    cfg.source.location = {nx / 2, ny / 2, nz / 2};
    return cfg;
}

UpdateCoefficients<double> vacuum(const SimulationConfig& cfg)
{
    return make_coefficients(make_vacuum_materials<double>(cfg.extent), cfg);
}

double max_abs3(const Field3D<double>& f)
{
    double m = 0;
    for (const auto* v : {&f.ex, &f.ey, &f.ez, &f.hx, &f.hy, &f.hz}) {
        for (double x : *v) {
            m = std::max(m, std::abs(x));
        }
    }
    return m;
}

} // namespace

TEST_CASE("zero fields stay zero")
{
    const auto cfg = cube(5, 5, 5, 0.5);
    Field3D<double> f(cfg.extent);
    const auto zero = f;
    update_h_3d(f, vacuum(cfg));
    update_e_3d(f, vacuum(cfg));
    CHECK(f == zero);
}

TEST_CASE("a single Ez sample drives exactly four H samples")
{
    const double s = 0.5;
    const auto cfg = cube(5, 5, 5, s);
    const Extent e = cfg.extent;
    Field3D<double> f(e);
    f.ez[e.index(2, 2, 2)] = 1.0;
    update_h_3d(f, vacuum(cfg));

    int nonzero = 0;
    for (std::size_t c = 0; c < e.cells(); ++c) {
        nonzero += (f.hx[c] != 0) + (f.hy[c] != 0) + (f.hz[c] != 0);
    }
    CHECK(nonzero == 4);
    CHECK(f.hx[e.index(2, 2, 2)] == s);
    CHECK(f.hx[e.index(2, 1, 2)] == -s);
    CHECK(f.hy[e.index(2, 2, 2)] == -s);
    CHECK(f.hy[e.index(1, 2, 2)] == s);
    CHECK(std::all_of(f.hz.begin(), f.hz.end(), [](double v) { return v == 0; }));
}

TEST_CASE("uniform E leaves H unchanged")
{
    const auto cfg = cube(6, 5, 4, 0.5);
    Field3D<double> f(cfg.extent);
    std::fill(f.ex.begin(), f.ex.end(), 0.3);
    std::fill(f.ey.begin(), f.ey.end(), -1.1);
    std::fill(f.ez.begin(), f.ez.end(), 2.0);
    std::fill(f.hy.begin(), f.hy.end(), 0.7);
    const auto before = f;
    update_h_3d(f, vacuum(cfg));
    CHECK(f.hx == before.hx);
    CHECK(f.hy == before.hy);
    CHECK(f.hz == before.hz);
}

TEST_CASE("3D kernels match a cell-by-cell oracle")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int nx = 3 + int(rng() % 6), ny = 3 + int(rng() % 6), nz = 3 + int(rng() % 6);
        const double s = std::uniform_real_distribution<double>(0.05, 0.57)(rng);
        const auto cfg = cube(nx, ny, nz, s);
        const auto coeffs = vacuum(cfg);
        const std::size_t n = cfg.extent.cells();

        Field3D<double> f(cfg.extent);
        oracle::Yee3D o(nx, ny, nz, s, s);
        for (auto [mine, theirs] : {std::pair{&f.ex, &o.Ex}, {&f.ey, &o.Ey}, {&f.ez, &o.Ez},
                                    {&f.hx, &o.Hx}, {&f.hy, &o.Hy}, {&f.hz, &o.Hz}}) {
            *mine = testutil::uniform(rng, n, -1, 1);
            *theirs = *mine;
        }
        for (int step = 0; step < 3; ++step) {
            update_h_3d(f, coeffs);
            update_e_3d(f, coeffs);
            o.update_h();
            o.update_e();
        }
        CHECK(testutil::same_bits(f.ex, o.Ex));
        CHECK(testutil::same_bits(f.ey, o.Ey));
        CHECK(testutil::same_bits(f.ez, o.Ez));
        CHECK(testutil::same_bits(f.hx, o.Hx));
        CHECK(testutil::same_bits(f.hy, o.Hy));
        CHECK(testutil::same_bits(f.hz, o.Hz));
    }
}

TEST_CASE("3D runs diverge above the stability bound and not below it")
{
    std::mt19937_64 rng(3);
    auto run = [&](double s) {
        const auto cfg = cube(16, 16, 16, s);
        const auto coeffs = vacuum(cfg);
        // Random E on interior cells only: nonzero wall samples never update and would act
        // as constant drives.
        const Extent e = cfg.extent;
        Field3D<double> f(e);
        std::uniform_real_distribution<double> u(-1, 1);
        for (std::size_t i = 1; i + 1 < e.nx; ++i)
            for (std::size_t j = 1; j + 1 < e.ny; ++j)
                for (std::size_t k = 1; k + 1 < e.nz; ++k)
                    for (auto* v : {&f.ex, &f.ey, &f.ez}) {
                        (*v)[e.index(i, j, k)] = u(rng);
                    }
        const double initial = max_abs3(f);
        for (int n = 0; n < 300; ++n) {
            update_h_3d(f, coeffs);
            update_e_3d(f, coeffs);
        }
        return max_abs3(f) / initial;
    };
    CHECK(run(0.6) > 1e6);
    CHECK(run(0.57) < 10.0);
}

TEST_CASE("y,z-uniform 3D run reproduces the 1D profile away from the transverse walls")
{
    // Wide transverse extent so the frozen y/z wall cells cannot reach the centre line in
    // the simulated time.
    const std::size_t nx = 32, nt = 41;
    const int steps = 10;
    auto c3 = cube(nx, nt, nt, 0.5);
    c3.time_tot = steps;
    c3.source.plane = true;
    c3.source.location = {nx / 2, 0, 0};
    const auto f3 = run_3d(c3, make_vacuum_materials<double>(c3.extent)).entries.back().fields;

    auto c1 = SimulationConfig::default_1d(nx);
    c1.courant = 0.5;
    c1.time_tot = steps;
    const auto f1 = run_1d(c1, make_vacuum_materials<double>(c1.extent)).entries.back().fields;

    const std::size_t j = nt / 2, k = nt / 2;
    double worst = 0;
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t q = c3.extent.index(i, j, k);
        worst = std::max({worst, std::abs(f3.ez[q] - f1.ez[i]), std::abs(f3.hy[q] - f1.hy[i])});
    }
    CHECK(worst <= 1e-10);
    CHECK(max_abs(f1) > 0.1);
}

TEST_CASE("3D run is deterministic and finite")
{
    auto cfg = SimulationConfig::default_3d(12);
    cfg.time_tot = 15;
    const auto m = make_vacuum_materials<double>(cfg.extent);
    const auto a = run_3d(cfg, m);
    const auto b = run_3d(cfg, m, Backend::parallel(3));
    CHECK(testutil::same_bits(a, b));
    CHECK(std::isfinite(max_abs3(a.entries.back().fields)));
    CHECK(max_abs3(a.entries.back().fields) > 0);
}
