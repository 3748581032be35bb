#include "fdtdbench/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace fdtdbench {

namespace {

// Columns per trailing-update task.
constexpr std::size_t kPanelWidth = 128;
// Below this many trailing entries the update runs on the calling thread.
constexpr std::size_t kParallelThreshold = 1 << 14;

} // namespace

template <std::floating_point Real>
LuFactorization<Real> lu_factor(DenseMatrix<Real> a, Executor& executor)
{
    const std::size_t n = a.size();
    std::vector<std::size_t> pivots(n);
    Executor serial;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        Real best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const Real v = std::abs(a(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best == Real(0)) {
            throw SingularMatrix(k);
        }
        pivots[k] = p;
        if (p != k) {
            std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(p).begin());
        }

        const Real pivot = a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) /= pivot;
        }

        const std::size_t first = k + 1;
        const std::size_t width = n - first;
        if (width == 0) {
            continue;
        }
        const std::size_t panels = (width + kPanelWidth - 1) / kPanelWidth;
        Executor& ex = width * width >= kParallelThreshold ? executor : serial;
        const std::span<const Real> pivot_row = a.row(k);
        ex.for_each(panels, [&](std::size_t panel) {
            const std::size_t j0 = first + panel * kPanelWidth;
            const std::size_t j1 = std::min(n, j0 + kPanelWidth);
            for (std::size_t i = first; i < n; ++i) {
                const Real l = a(i, k);
                Real* row = a.row(i).data();
                for (std::size_t j = j0; j < j1; ++j) {
                    row[j] -= l * pivot_row[j];
                }
            }
        });
    }
    return LuFactorization<Real>{std::move(a), std::move(pivots)};
}

template <std::floating_point Real>
std::vector<Real> lu_solve(const LuFactorization<Real>& f, std::span<const Real> b)
{
    const std::size_t n = f.lu.size();
    if (b.size() != n) {
        throw ConfigError("right-hand side length " + std::to_string(b.size())
                          + " does not match matrix order " + std::to_string(n));
    }
    std::vector<Real> x(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        std::swap(x[k], x[f.pivots[k]]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = f.lu.row(i);
        Real s = x[i];
        for (std::size_t j = 0; j < i; ++j) {
            s -= row[j] * x[j];
        }
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        const auto row = f.lu.row(i);
        Real s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            s -= row[j] * x[j];
        }
        x[i] = s / row[i];
    }
    return x;
}

template <std::floating_point Real>
double relative_residual(const DenseMatrix<Real>& a, std::span<const Real> x, std::span<const Real> b)
{
    const std::size_t n = a.size();
    double r_norm = 0;
    double a_norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = a.row(i);
        double ax = 0;
        double row_sum = 0;
        for (std::size_t j = 0; j < n; ++j) {
            ax += double(row[j]) * double(x[j]);
            row_sum += std::abs(double(row[j]));
        }
        r_norm = std::max(r_norm, std::abs(ax - double(b[i])));
        a_norm = std::max(a_norm, row_sum);
    }
    double x_norm = 0;
    double b_norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x_norm = std::max(x_norm, std::abs(double(x[i])));
        b_norm = std::max(b_norm, std::abs(double(b[i])));
    }
    const double denom = a_norm * x_norm + b_norm;
    return denom > 0 ? r_norm / denom : r_norm;
}

template <std::floating_point Real>
double residual_bound(std::size_t n)
{
    return double(n) * 100.0 * double(std::numeric_limits<Real>::epsilon());
}

template <std::floating_point Real>
LinearSystem<Real> random_system(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (n + 1)));
    // 53 random bits mapped to [0, 1); identical on every standard library.
    auto uniform = [&rng] { return static_cast<Real>(double(rng() >> 11) * 0x1.0p-53); };

    LinearSystem<Real> s{DenseMatrix<Real>(n), std::vector<Real>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            s.a(i, j) = uniform();
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.a(i, i) += static_cast<Real>(n);
    }
    for (auto& v : s.b) {
        v = uniform();
    }
    return s;
}

double flop_count_left_division(std::size_t n)
{
    const double d = static_cast<double>(n);
    return 2.0 / 3.0 * d * d * d + 2.0 * d * d;
}

#define FDTDBENCH_LINSOLVE_INSTANTIATE(R)                                                          \
    template LuFactorization<R> lu_factor<R>(DenseMatrix<R>, Executor&);                          \
    template std::vector<R> lu_solve<R>(const LuFactorization<R>&, std::span<const R>);           \
    template double relative_residual<R>(const DenseMatrix<R>&, std::span<const R>,               \
                                         std::span<const R>);                                     \
    template double residual_bound<R>(std::size_t);                                               \
    template LinearSystem<R> random_system<R>(std::size_t, std::uint64_t);
FDTDBENCH_LINSOLVE_INSTANTIATE(float)
FDTDBENCH_LINSOLVE_INSTANTIATE(double)

} // namespace fdtdbench
