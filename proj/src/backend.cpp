#include "fdtdbench/backend.hpp"

#include <algorithm>
#include <charconv>
#include <system_error>

namespace fdtdbench {

Backend Backend::parallel(unsigned workers)
{
    if (workers == 0) {
        throw ConfigError("parallel backend needs at least one worker");
    }
    return Backend{Kind::Parallel, workers};
}

Backend Backend::parse(std::string_view text)
{
    if (text == "serial") {
        return serial();
    }
    if (text == "parallel") {
        return parallel(default_worker_count());
    }
    constexpr std::string_view prefix = "parallel:";
    if (text.starts_with(prefix)) {
        const std::string_view digits = text.substr(prefix.size());
        unsigned k = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && k > 0) {
            return parallel(k);
        }
    }
    throw ConfigError("unknown backend '" + std::string(text) + "' (expected serial or parallel:k)");
}

std::string Backend::name() const
{
    return kind == Kind::Serial ? "serial" : "parallel:" + std::to_string(workers);
}

unsigned default_worker_count()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

KernelPlan::KernelPlan(const IndexBox& box, std::size_t min_cells_per_unit) : box_(box)
{
    if (box.empty()) {
        return;
    }
    const std::size_t slab = (box.hi[1] - box.lo[1]) * (box.hi[2] - box.lo[2]);
    const std::size_t min_cells = std::max<std::size_t>(1, min_cells_per_unit);
    const std::size_t planes_per_unit = std::max<std::size_t>(1, (min_cells + slab - 1) / slab);
    for (std::size_t b = box.lo[0]; b < box.hi[0]; b += planes_per_unit) {
        units_.push_back({b, std::min(box.hi[0], b + planes_per_unit)});
    }
    // A short tail is folded into its predecessor so every unit meets the minimum size.
    if (units_.size() > 1 && (units_.back().end - units_.back().begin) * slab < min_cells) {
        const std::size_t end = units_.back().end;
        units_.pop_back();
        units_.back().end = end;
    }
}

KernelPlan KernelPlan::range(std::size_t begin, std::size_t end, std::size_t min_cells_per_unit)
{
    return KernelPlan(IndexBox{{begin, 0, 0}, {end, 1, 1}}, min_cells_per_unit);
}

WorkerPool::WorkerPool(unsigned workers)
{
    if (workers == 0) {
        throw ConfigError("worker pool needs at least one worker");
    }
    try {
        threads_.reserve(workers - 1);
        for (unsigned t = 1; t < workers; ++t) {
            threads_.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
        }
    } catch (const std::system_error& e) {
        for (auto& t : threads_) {
            t.request_stop();
        }
        wake_.notify_all();
        threads_.clear();
        throw ResourceError(std::string("cannot start worker threads: ") + e.what());
    } catch (const std::bad_alloc&) {
        throw ResourceError("cannot allocate worker threads");
    }
}

WorkerPool::~WorkerPool()
{
    for (auto& t : threads_) {
        t.request_stop();
    }
    wake_.notify_all();
}

void WorkerPool::run(std::size_t count, const std::function<void(std::size_t)>& task)
{
    {
        std::lock_guard lock(mutex_);
        task_ = &task;
        count_ = count;
        next_.store(0, std::memory_order_relaxed);
        busy_ = static_cast<unsigned>(threads_.size());
        error_ = nullptr;
        ++generation_;
    }
    wake_.notify_all();
    drain();

    std::unique_lock lock(mutex_);
    done_.wait(lock, [this] { return busy_ == 0; });
    task_ = nullptr;
    if (error_) {
        std::rethrow_exception(std::exchange(error_, nullptr));
    }
}

void WorkerPool::drain()
{
    for (;;) {
        const std::size_t t = next_.fetch_add(1, std::memory_order_relaxed);
        if (t >= count_) {
            return;
        }
        try {
            (*task_)(t);
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_) {
                error_ = std::current_exception();
            }
        }
    }
}

void WorkerPool::worker_loop(std::stop_token stop)
{
    std::uint64_t seen = 0;
    for (;;) {
        {
            std::unique_lock lock(mutex_);
            if (!wake_.wait(lock, stop, [&] { return generation_ != seen; })) {
                return;
            }
            seen = generation_;
        }
        drain();
        {
            std::lock_guard lock(mutex_);
            --busy_;
        }
        done_.notify_one();
    }
}

Executor::Executor(const Backend& backend) : backend_(backend)
{
    if (backend.kind == Backend::Kind::Parallel) {
        if (backend.workers == 0) {
            throw ConfigError("parallel backend needs at least one worker");
        }
        if (backend.workers > 1) {
            pool_ = std::make_unique<WorkerPool>(backend.workers);
        }
    }
}

double median(std::span<const double> samples)
{
    if (samples.empty()) {
        throw InsufficientSamples("median of an empty sample set");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    return sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
}

ThroughputReport backend_report(const Backend& backend, double cell_updates,
                                std::span<const double> samples_s)
{
    if (samples_s.size() < 3) {
        throw InsufficientSamples("backend_report needs at least 3 timing samples, got "
                                  + std::to_string(samples_s.size()));
    }
    const double m = median(samples_s);
    if (!(m > 0)) {
        throw NonPositiveInput("median elapsed time must be positive");
    }
    return ThroughputReport{backend, cell_updates, m, cell_updates / m};
}

} // namespace fdtdbench
