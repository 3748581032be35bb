#pragma once

// Benchmarks: memory-copy bandwidth, dense left-division gigaflops, FDTD throughput and
// serial-vs-parallel speedup.
//
// Conventions:
//   MB        = 2^20 bytes
//   gigaflops = flop_count_left_division(n) / seconds / 1e9, one factor + solve per timing
//   timing    = median over >= 3 samples; short workloads are repeated inside each sample
//               until the samples together cover at least 0.2 s.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdtdbench/backend.hpp"
#include "fdtdbench/core.hpp"

namespace fdtdbench {

struct TimingPolicy
{
    int min_samples = 3;
    double min_window_s = 0.2;
};

/// Per-invocation seconds for each sample, after one untimed-for-statistics calibration call.
template <class Fn>
std::vector<double> time_samples(Fn&& fn, const TimingPolicy& policy = {})
{
    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };

    auto t0 = clock::now();
    fn();
    const double once = std::max(seconds(clock::now() - t0), 1e-9);
    const int samples = std::max(3, policy.min_samples);
    const double per_sample = policy.min_window_s / samples;
    const auto inner = static_cast<std::int64_t>(std::max(1.0, std::ceil(per_sample / once)));

    std::vector<double> out;
    out.reserve(samples);
    for (int s = 0; s < samples; ++s) {
        t0 = clock::now();
        for (std::int64_t r = 0; r < inner; ++r) {
            fn();
        }
        out.push_back(seconds(clock::now() - t0) / double(inner));
    }
    return out;
}

// --- bandwidth ---------------------------------------------------------------------------

enum class CopyTier {
    /// Destination allocated per copy, so page faults are part of the cost.
    FreshAllocation,
    /// Both buffers touched beforehand and reused.
    WarmBuffer,
};

std::string_view to_string(CopyTier tier);
CopyTier parse_copy_tier(std::string_view text);

struct BandwidthRecord
{
    CopyTier tier = CopyTier::WarmBuffer;
    std::uint64_t bytes = 0;
    std::uint64_t repeats = 0;
    /// Wall seconds for all `repeats` copies in the median sample.
    double elapsed_s = 0;
    double mb_per_s = 0;
};

/// (bytes * repeats / 2^20) / elapsed_s. Throws NonPositiveInput.
double compute_bandwidth(std::uint64_t bytes, double elapsed_s, std::uint64_t repeats);

/// Times `repeats` block copies of `bytes` per sample over at least three samples and keeps
/// the median sample. Requires bytes >= 4096 and repeats >= 3. Throws ResourceError when the
/// buffers cannot be allocated.
BandwidthRecord measure_copy_bandwidth(std::uint64_t bytes, std::uint64_t repeats, CopyTier tier,
                                       int samples = 5);

// --- dense solve ---------------------------------------------------------------------------

inline constexpr std::string_view kMemoryLimit = "MemoryLimit";
inline constexpr std::string_view kAllocationFailure = "AllocationFailure";

struct SolveBenchRecord
{
    std::size_t n = 0;
    Precision precision = Precision::Double;
    Backend backend;
    double elapsed_s = 0;
    double flops = 0;
    double gigaflops = 0;
    double residual = 0;
    /// Set when the size was not run; the numeric fields are then meaningless.
    std::optional<std::string> skipped;
    std::string skip_detail;
};

struct LinsolveBenchOptions
{
    std::vector<std::size_t> sizes;
    std::vector<Precision> precisions{Precision::Double};
    std::vector<Backend> backends{Backend::serial()};
    std::uint64_t seed = 42;
    /// Upper bound on the estimated footprint of one benchmark point.
    std::uint64_t memory_cap_bytes = 0;
    TimingPolicy timing{};
};

/// Half of the physical memory, or 1 GiB when it cannot be determined.
std::uint64_t default_memory_cap();

/// Matrix + working copy + vectors for one (n, precision) point.
std::uint64_t estimate_linsolve_bytes(std::size_t n, Precision precision);

/// One record per (n, precision, backend), sizes outermost. Sizes whose estimate exceeds the
/// cap, or whose allocation fails, produce a skip record instead of running.
std::vector<SolveBenchRecord> run_linsolve_bench(const LinsolveBenchOptions& options);

// --- speedup -------------------------------------------------------------------------------

struct SpeedupRecord
{
    std::string bench;
    std::size_t n = 0;
    Precision precision = Precision::Double;
    std::string parallel_backend;
    double serial = 0;
    double parallel = 0;
    double speedup = 0;
};

/// parallel.gigaflops / serial.gigaflops. Throws MismatchedPair when n or precision differ,
/// NonPositiveInput when either throughput is not positive.
SpeedupRecord compute_speedup(const SolveBenchRecord& parallel, const SolveBenchRecord& serial);

/// Pairs every non-serial record with the serial record of the same (n, precision).
std::vector<SpeedupRecord> linsolve_speedups(const std::vector<SolveBenchRecord>& records);

// --- FDTD throughput -----------------------------------------------------------------------

struct FdtdBenchRecord
{
    int dims = 1;
    Extent extent;
    std::int64_t steps = 0;
    Precision precision = Precision::Double;
    Backend backend;
    double elapsed_s = 0;
    /// cells * 2 half-steps * steps.
    double cell_updates = 0;
    double updates_per_s = 0;
    /// Final fields equal those of the first backend in the sweep, bit for bit.
    bool matches_reference = true;
};

struct FdtdBenchResult
{
    std::vector<FdtdBenchRecord> records;
    std::vector<SpeedupRecord> speedups;
};

/// Times run() per backend on identical configs. Throws what the engine throws.
FdtdBenchResult run_fdtd_bench(const std::vector<SimulationConfig>& configs,
                               const std::vector<Backend>& backends, const TimingPolicy& timing = {});

} // namespace fdtdbench
