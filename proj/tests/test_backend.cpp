#include <atomic>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "fdtdbench/backend.hpp"
#include "fdtdbench/engine.hpp"
#include "test_util.hpp"

using namespace fdtdbench;

TEST_CASE("Backend parsing and naming")
{
    CHECK(Backend::parse("serial") == Backend::serial());
    CHECK(Backend::parse("parallel:4") == Backend::parallel(4));
    CHECK(Backend::parse("parallel:4").name() == "parallel:4");
    CHECK(Backend::serial().name() == "serial");
    CHECK(Backend::parse("parallel").workers >= 1);
    CHECK_THROWS_AS(Backend::parse("gpu"), ConfigError);
    CHECK_THROWS_AS(Backend::parse("parallel:0"), ConfigError);
    CHECK_THROWS_AS(Backend::parse("parallel:x"), ConfigError);
}

TEST_CASE("KernelPlan units are disjoint and cover the box")
{
    for (std::size_t nx : {0u, 1u, 3u, 17u, 64u, 1000u}) {
        for (std::size_t min_cells : {1u, 7u, 4096u}) {
            const IndexBox box{{2, 0, 1}, {2 + nx, 5, 4}};
            const KernelPlan plan(box, min_cells);
            std::size_t next = box.lo[0];
            for (const auto& u : plan.units()) {
                CHECK(u.begin == next);
                CHECK(u.end > u.begin);
                next = u.end;
            }
            CHECK(next == (nx == 0 ? box.lo[0] : box.hi[0]));
        }
    }
}

TEST_CASE("execute_stencil writes every cell exactly once and nothing else")
{
    const Extent e{37, 9, 11};
    const IndexBox box{{1, 2, 0}, {35, 9, 10}};
    for (unsigned k : {1u, 2u, 4u, 8u}) {
        Executor ex(k == 1 ? Backend::serial() : Backend::parallel(k));
        std::vector<std::atomic<int>> hits(e.cells());
        execute_stencil(KernelPlan(box, 64), ex, [&](std::size_t i, std::size_t j, std::size_t kk) {
            hits[e.index(i, j, kk)].fetch_add(1, std::memory_order_relaxed);
        });
        for (std::size_t i = 0; i < e.nx; ++i)
            for (std::size_t j = 0; j < e.ny; ++j)
                for (std::size_t kk = 0; kk < e.nz; ++kk) {
                    const bool inside = i >= box.lo[0] && i < box.hi[0] && j >= box.lo[1] && j < box.hi[1]
                                        && kk >= box.lo[2] && kk < box.hi[2];
                    CHECK(hits[e.index(i, j, kk)].load() == (inside ? 1 : 0));
                }
    }
}

TEST_CASE("empty range leaves the input unchanged")
{
    Executor ex(Backend::parallel(4));
    int calls = 0;
    execute_stencil(KernelPlan::range(5, 5), ex, [&](std::size_t, std::size_t, std::size_t) { ++calls; });
    CHECK(calls == 0);
    CHECK(KernelPlan::range(5, 5).units().empty());
}

TEST_CASE("kernels are bitwise identical across backends")
{
    std::mt19937_64 rng(7);
    const std::size_t n = 1'000'000;
    Field1D<double> base(n);
    base.ez = testutil::uniform(rng, n, -1, 1);
    base.hy = testutil::uniform(rng, n, -1, 1);
    auto cfg = SimulationConfig::default_1d(n);
    cfg.courant = 0.9;
    auto mats = make_vacuum_materials<double>(cfg.extent);
    mats.sigma = testutil::uniform(rng, n, 0, 0.02);
    const auto coeffs = make_coefficients(mats, cfg);

    Field1D<double> reference = base;
    update_h_1d(reference, coeffs);
    update_e_1d(reference, coeffs);
    for (unsigned k : {1u, 2u, 4u, 8u}) {
        Executor ex(Backend::parallel(k));
        std::vector<double> scratch;
        Field1D<double> f = base;
        update_h_1d(f, coeffs, ex, scratch);
        update_e_1d(f, coeffs, ex, scratch);
        CHECK(testutil::same_bits(f, reference));
    }
}

TEST_CASE("worker pool propagates task exceptions and stays usable")
{
    Executor ex(Backend::parallel(4));
    CHECK_THROWS_AS(ex.for_each(64, [](std::size_t t) {
        if (t == 13) {
            throw std::runtime_error("boom");
        }
    }),
                    std::runtime_error);
    std::atomic<int> sum{0};
    ex.for_each(100, [&](std::size_t t) { sum += static_cast<int>(t); });
    CHECK(sum.load() == 4950);
}

TEST_CASE("backend_report examples")
{
    const double ones[] = {1.0, 1.0, 1.0};
    CHECK(backend_report(Backend::serial(), 1e6, ones).updates_per_s == 1e6);
    const double spread[] = {10.0, 1.0, 2.0};
    const auto r = backend_report(Backend::parallel(2), 1e6, spread);
    CHECK(r.median_s == 2.0);
    CHECK(r.updates_per_s == 5e5);
    const double two[] = {1.0, 2.0};
    CHECK_THROWS_AS(backend_report(Backend::serial(), 1e6, two), InsufficientSamples);
}
