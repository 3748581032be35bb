#pragma once

// Serial and fork-join parallel execution of per-cell stencil kernels.
//
// Every output cell is produced by one fixed expression that reads only the previous
// generation, so the result does not depend on how cells are split across workers:
// Serial and Parallel(k) agree bit for bit for every k.

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fdtdbench/core.hpp"

namespace fdtdbench {

struct Backend
{
    enum class Kind { Serial, Parallel };

    Kind kind = Kind::Serial;
    unsigned workers = 1;

    static Backend serial() { return {}; }
    /// Throws ConfigError if workers == 0.
    static Backend parallel(unsigned workers);
    /// "serial" or "parallel:k"; parallel with no count uses the hardware concurrency.
    static Backend parse(std::string_view text);

    /// "serial" or "parallel:k".
    std::string name() const;

    friend bool operator==(const Backend&, const Backend&) = default;
};

unsigned default_worker_count();

/// Half-open index box [lo, hi) per axis.
struct IndexBox
{
    std::array<std::size_t, 3> lo{};
    std::array<std::size_t, 3> hi{};

    bool empty() const noexcept { return lo[0] >= hi[0] || lo[1] >= hi[1] || lo[2] >= hi[2]; }
    std::size_t volume() const noexcept
    {
        return empty() ? 0 : (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    }
};

/// A contiguous run of x-planes inside a plan's box.
struct WorkUnit
{
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Splits an index box into disjoint slabs along x that together cover it exactly.
class KernelPlan
{
  public:
    static constexpr std::size_t default_min_cells = 4096;

    KernelPlan() = default;
    explicit KernelPlan(const IndexBox& box, std::size_t min_cells_per_unit = default_min_cells);

    /// 1D convenience: cells [begin, end).
    static KernelPlan range(std::size_t begin, std::size_t end,
                            std::size_t min_cells_per_unit = default_min_cells);

    const IndexBox& box() const noexcept { return box_; }
    std::span<const WorkUnit> units() const noexcept { return units_; }

  private:
    IndexBox box_{};
    std::vector<WorkUnit> units_;
};

/// Fixed set of threads that execute indexed tasks in fork-join fashion. The calling
/// thread takes part, so a pool of size k starts k - 1 threads.
class WorkerPool
{
  public:
    explicit WorkerPool(unsigned workers);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    unsigned size() const noexcept { return static_cast<unsigned>(threads_.size()) + 1; }

    /// Runs task(0..count-1), each exactly once, and returns after all have finished.
    /// The first exception thrown by a task is rethrown here.
    void run(std::size_t count, const std::function<void(std::size_t)>& task);

  private:
    void worker_loop(std::stop_token stop);
    void drain();

    std::mutex mutex_;
    std::condition_variable_any wake_;
    std::condition_variable done_;
    const std::function<void(std::size_t)>* task_ = nullptr;
    std::size_t count_ = 0;
    std::atomic<std::size_t> next_{0};
    std::uint64_t generation_ = 0;
    unsigned busy_ = 0;
    std::exception_ptr error_;
    std::vector<std::jthread> threads_;
};

/// A backend bound to its worker pool. One caller at a time.
class Executor
{
  public:
    explicit Executor(const Backend& backend = Backend::serial());

    const Backend& backend() const noexcept { return backend_; }

    template <class Task>
    void for_each(std::size_t count, Task&& task)
    {
        if (!pool_ || count <= 1) {
            for (std::size_t t = 0; t < count; ++t) {
                task(t);
            }
            return;
        }
        const std::function<void(std::size_t)> fn = std::ref(task);
        pool_->run(count, fn);
    }

  private:
    Backend backend_;
    std::unique_ptr<WorkerPool> pool_;
};

/// Calls kernel(i, j, k) exactly once for every cell of plan.box(). Returns after all calls
/// have completed.
template <class Kernel>
void execute_stencil(const KernelPlan& plan, Executor& executor, Kernel&& kernel)
{
    const auto units = plan.units();
    const IndexBox& box = plan.box();
    executor.for_each(units.size(), [&](std::size_t u) {
        const WorkUnit w = units[u];
        for (std::size_t i = w.begin; i < w.end; ++i) {
            for (std::size_t j = box.lo[1]; j < box.hi[1]; ++j) {
                for (std::size_t k = box.lo[2]; k < box.hi[2]; ++k) {
                    kernel(i, j, k);
                }
            }
        }
    });
}

/// Copies src into dst in chunks spread over the executor's workers.
template <class T>
void parallel_copy(std::span<const T> src, std::span<T> dst, Executor& executor)
{
    constexpr std::size_t chunk = 1 << 16;
    const std::size_t n = src.size();
    executor.for_each((n + chunk - 1) / chunk, [&](std::size_t c) {
        const std::size_t b = c * chunk;
        const std::size_t e = std::min(n, b + chunk);
        std::copy(src.begin() + b, src.begin() + e, dst.begin() + b);
    });
}

/// Median of a sample set; throws InsufficientSamples when empty.
double median(std::span<const double> samples);

struct ThroughputReport
{
    Backend backend;
    double cell_updates = 0;
    double median_s = 0;
    double updates_per_s = 0;
};

/// Median cell-updates/second over at least three timing samples.
ThroughputReport backend_report(const Backend& backend, double cell_updates,
                                std::span<const double> samples_s);

} // namespace fdtdbench
