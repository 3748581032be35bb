#include "fdtdbench/bench.hpp"

#include <cstring>
#include <memory>
#include <new>
#include <unistd.h>

#include "fdtdbench/engine.hpp"
#include "fdtdbench/linsolve.hpp"

namespace fdtdbench {

std::string_view to_string(CopyTier tier)
{
    return tier == CopyTier::WarmBuffer ? "warm-buffer" : "fresh-allocation";
}

CopyTier parse_copy_tier(std::string_view text)
{
    if (text == "warm-buffer" || text == "warm") {
        return CopyTier::WarmBuffer;
    }
    if (text == "fresh-allocation" || text == "fresh") {
        return CopyTier::FreshAllocation;
    }
    throw ConfigError("unknown copy tier '" + std::string(text) + "'");
}

double compute_bandwidth(std::uint64_t bytes, double elapsed_s, std::uint64_t repeats)
{
    if (bytes == 0 || repeats == 0 || !(elapsed_s > 0)) {
        throw NonPositiveInput("bandwidth inputs must be positive");
    }
    return (double(bytes) * double(repeats) / double(1 << 20)) / elapsed_s;
}

namespace {

using Buffer = std::unique_ptr<std::byte[]>;

Buffer allocate(std::uint64_t bytes)
{
    try {
        return Buffer(new std::byte[bytes]);
    } catch (const std::bad_alloc&) {
        throw ResourceError("cannot allocate " + std::to_string(bytes) + " bytes for the copy test");
    }
}

// Keeps copies observable so they cannot be elided.
volatile std::byte g_sink{};

} // namespace

BandwidthRecord measure_copy_bandwidth(std::uint64_t bytes, std::uint64_t repeats, CopyTier tier,
                                       int samples)
{
    if (bytes < 4096) {
        throw ConfigError("copy bandwidth needs at least 4096 bytes");
    }
    if (repeats < 3) {
        throw ConfigError("copy bandwidth needs at least 3 repeats");
    }
    Buffer src = allocate(bytes);
    std::memset(src.get(), 0x5a, bytes);
    Buffer warm;
    if (tier == CopyTier::WarmBuffer) {
        warm = allocate(bytes);
        std::memset(warm.get(), 0, bytes);
    }

    auto one_sample = [&] {
        for (std::uint64_t r = 0; r < repeats; ++r) {
            if (tier == CopyTier::WarmBuffer) {
                std::memcpy(warm.get(), src.get(), bytes);
                g_sink = warm[r % bytes];
            } else {
                Buffer dst = allocate(bytes);
                std::memcpy(dst.get(), src.get(), bytes);
                g_sink = dst[r % bytes];
            }
        }
    };

    using clock = std::chrono::steady_clock;
    one_sample();
    std::vector<double> times;
    for (int s = 0; s < std::max(3, samples); ++s) {
        const auto t0 = clock::now();
        one_sample();
        times.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    }

    BandwidthRecord rec;
    rec.tier = tier;
    rec.bytes = bytes;
    rec.repeats = repeats;
    rec.elapsed_s = std::max(median(times), 1e-12);
    rec.mb_per_s = compute_bandwidth(bytes, rec.elapsed_s, repeats);
    return rec;
}

std::uint64_t default_memory_cap()
{
    const long pages = ::sysconf(_SC_PHYS_PAGES);
    const long page_size = ::sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || page_size <= 0) {
        return std::uint64_t{1} << 30;
    }
    return std::uint64_t(pages) * std::uint64_t(page_size) / 2;
}

std::uint64_t estimate_linsolve_bytes(std::size_t n, Precision precision)
{
    const double width = precision == Precision::Single ? 4.0 : 8.0;
    const double nn = double(n);
    // Original matrix (kept for the residual) + factorization copy + b, x, pivots.
    const double bytes = width * (2.0 * nn * nn + 2.0 * nn) + 8.0 * nn;
    return bytes >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(bytes);
}

namespace {

template <std::floating_point Real>
SolveBenchRecord bench_one(std::size_t n, const Backend& backend, std::uint64_t seed,
                           const TimingPolicy& timing)
{
    SolveBenchRecord rec;
    rec.n = n;
    rec.precision = precision_of<Real>();
    rec.backend = backend;

    const LinearSystem<Real> sys = random_system<Real>(n, seed);
    Executor executor(backend);
    std::vector<Real> x;
    // Each timed call factors a fresh copy; the O(n^2) copy is included in the timing.
    const auto samples = time_samples(
        [&] {
            LuFactorization<Real> f = lu_factor(sys.a, executor);
            x = lu_solve(f, std::span<const Real>(sys.b));
        },
        timing);

    rec.elapsed_s = std::max(median(samples), 1e-12);
    rec.flops = flop_count_left_division(n);
    rec.gigaflops = rec.flops / rec.elapsed_s / 1e9;
    rec.residual = relative_residual(sys.a, std::span<const Real>(x), std::span<const Real>(sys.b));
    return rec;
}

} // namespace

std::vector<SolveBenchRecord> run_linsolve_bench(const LinsolveBenchOptions& options)
{
    const std::uint64_t cap = options.memory_cap_bytes ? options.memory_cap_bytes : default_memory_cap();
    std::vector<SolveBenchRecord> out;
    for (const std::size_t n : options.sizes) {
        if (n < 2) {
            throw ConfigError("linsolve sizes must be at least 2");
        }
        for (const Precision p : options.precisions) {
            for (const Backend& b : options.backends) {
                auto skip = [&](std::string_view reason, std::string detail) {
                    SolveBenchRecord rec;
                    rec.n = n;
                    rec.precision = p;
                    rec.backend = b;
                    rec.skipped = std::string(reason);
                    rec.skip_detail = std::move(detail);
                    out.push_back(std::move(rec));
                };
                const std::uint64_t need = estimate_linsolve_bytes(n, p);
                if (need > cap) {
                    skip(kMemoryLimit, "estimated " + std::to_string(need) + " bytes exceeds cap of "
                                           + std::to_string(cap) + " bytes");
                    continue;
                }
                try {
                    out.push_back(p == Precision::Single
                                      ? bench_one<float>(n, b, options.seed, options.timing)
                                      : bench_one<double>(n, b, options.seed, options.timing));
                } catch (const std::bad_alloc&) {
                    skip(kAllocationFailure, "allocation failed for n = " + std::to_string(n));
                }
            }
        }
    }
    return out;
}

namespace {

SpeedupRecord make_speedup(std::string bench, std::size_t n, Precision p, const Backend& parallel,
                           double serial_rate, double parallel_rate)
{
    if (!(serial_rate > 0) || !(parallel_rate > 0)) {
        throw NonPositiveInput("speedup needs positive throughputs");
    }
    return SpeedupRecord{std::move(bench), n, p, parallel.name(), serial_rate, parallel_rate,
                         parallel_rate / serial_rate};
}

} // namespace

SpeedupRecord compute_speedup(const SolveBenchRecord& parallel, const SolveBenchRecord& serial)
{
    if (parallel.n != serial.n || parallel.precision != serial.precision) {
        throw MismatchedPair("speedup pair differs in size or precision (n " + std::to_string(parallel.n)
                             + " vs " + std::to_string(serial.n) + ")");
    }
    if (parallel.skipped || serial.skipped) {
        throw MismatchedPair("speedup pair contains a skipped record");
    }
    return make_speedup("linsolve", parallel.n, parallel.precision, parallel.backend,
                        serial.gigaflops, parallel.gigaflops);
}

std::vector<SpeedupRecord> linsolve_speedups(const std::vector<SolveBenchRecord>& records)
{
    std::vector<SpeedupRecord> out;
    for (const auto& par : records) {
        if (par.skipped || par.backend.kind == Backend::Kind::Serial) {
            continue;
        }
        for (const auto& ser : records) {
            if (!ser.skipped && ser.backend.kind == Backend::Kind::Serial && ser.n == par.n
                && ser.precision == par.precision) {
                out.push_back(compute_speedup(par, ser));
                break;
            }
        }
    }
    return out;
}

namespace {

template <class FieldT, std::floating_point Real>
void bench_config(const SimulationConfig& config, const std::vector<Backend>& backends,
                  const TimingPolicy& timing, FdtdBenchResult& result)
{
    SimulationConfig cfg = config;
    cfg.snapshot_every = 0;
    const auto materials = make_vacuum_materials<Real>(cfg.extent, cfg.units);
    const double updates = double(cfg.extent.cells()) * 2.0 * double(cfg.time_tot);

    const std::size_t first = result.records.size();
    std::optional<FieldT> reference;
    std::optional<FdtdBenchRecord> serial;
    for (const Backend& b : backends) {
        SnapshotSeries<FieldT> series;
        const auto samples =
            time_samples([&] { series = run_simulation<FieldT>(cfg, materials, b); }, timing);
        const ThroughputReport report = backend_report(b, updates, samples);

        FdtdBenchRecord rec;
        rec.dims = cfg.dims;
        rec.extent = cfg.extent;
        rec.steps = cfg.time_tot;
        rec.precision = precision_of<Real>();
        rec.backend = b;
        rec.elapsed_s = report.median_s;
        rec.cell_updates = updates;
        rec.updates_per_s = report.updates_per_s;
        const FieldT& final_fields = series.entries.back().fields;
        if (!reference) {
            reference = final_fields;
        }
        rec.matches_reference = *reference == final_fields;
        result.records.push_back(rec);
        if (b.kind == Backend::Kind::Serial && !serial) {
            serial = rec;
        }
    }
    if (!serial) {
        return;
    }
    for (std::size_t r = first; r < result.records.size(); ++r) {
        const FdtdBenchRecord rec = result.records[r];
        if (rec.backend.kind == Backend::Kind::Parallel) {
            result.speedups.push_back(make_speedup("fdtd", cfg.extent.cells(), rec.precision,
                                                   rec.backend, serial->updates_per_s,
                                                   rec.updates_per_s));
        }
    }
}

} // namespace

FdtdBenchResult run_fdtd_bench(const std::vector<SimulationConfig>& configs,
                               const std::vector<Backend>& backends, const TimingPolicy& timing)
{
    FdtdBenchResult result;
    for (const auto& cfg : configs) {
        validate_config(cfg);
        validate_stability(cfg);
        const bool single = cfg.precision == Precision::Single;
        if (cfg.dims == 1) {
            single ? bench_config<Field1D<float>, float>(cfg, backends, timing, result)
                   : bench_config<Field1D<double>, double>(cfg, backends, timing, result);
        } else {
            single ? bench_config<Field3D<float>, float>(cfg, backends, timing, result)
                   : bench_config<Field3D<double>, double>(cfg, backends, timing, result);
        }
    }
    return result;
}

} // namespace fdtdbench
