#pragma once

// Dense "left division" x = A \ b via LU factorization with partial pivoting.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fdtdbench/backend.hpp"
#include "fdtdbench/core.hpp"

namespace fdtdbench {

/// Square row-major matrix.
template <std::floating_point Real>
class DenseMatrix
{
  public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, Real fill = Real(0)) : n_(n), data_(n * n, fill) {}

    static DenseMatrix identity(std::size_t n)
    {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = Real(1);
        }
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    Real& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    Real operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
    std::span<Real> row(std::size_t i) noexcept { return {data_.data() + i * n_, n_}; }
    std::span<const Real> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }
    std::span<const Real> data() const noexcept { return data_; }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

  private:
    std::size_t n_ = 0;
    std::vector<Real> data_;
};

/// Compact P*A = L*U: unit-lower L below the diagonal, U on and above it.
/// At step k, row k was exchanged with row pivots[k] (LAPACK ipiv convention, 0-based).
template <std::floating_point Real>
struct LuFactorization
{
    DenseMatrix<Real> lu;
    std::vector<std::size_t> pivots;
};

/// Right-looking elimination. The pivot search and the multiplier column are computed in
/// serial order; the trailing update is split into column panels across the executor's
/// workers, each entry computed by the same expression, so every backend yields identical
/// bits. Throws SingularMatrix when a pivot column is exactly zero on and below the diagonal.
template <std::floating_point Real>
LuFactorization<Real> lu_factor(DenseMatrix<Real> a, Executor& executor);

template <std::floating_point Real>
LuFactorization<Real> lu_factor(DenseMatrix<Real> a)
{
    Executor serial;
    return lu_factor(std::move(a), serial);
}

/// Forward then back substitution. b.size() must equal the matrix order.
template <std::floating_point Real>
std::vector<Real> lu_solve(const LuFactorization<Real>& f, std::span<const Real> b);

/// ||A x - b||_inf / (||A||_inf ||x||_inf + ||b||_inf), evaluated in double.
template <std::floating_point Real>
double relative_residual(const DenseMatrix<Real>& a, std::span<const Real> x, std::span<const Real> b);

/// n * 100 * machine epsilon of Real.
template <std::floating_point Real>
double residual_bound(std::size_t n);

/// Uniform [0, 1) entries plus n on the diagonal; b uniform [0, 1). Depends only on (seed, n).
template <std::floating_point Real>
struct LinearSystem
{
    DenseMatrix<Real> a;
    std::vector<Real> b;
};

template <std::floating_point Real>
LinearSystem<Real> random_system(std::size_t n, std::uint64_t seed);

/// (2/3) n^3 + 2 n^2: LU factorization plus two triangular solves.
double flop_count_left_division(std::size_t n);

#define FDTDBENCH_LINSOLVE_EXTERN(R)                                                               \
    extern template LuFactorization<R> lu_factor<R>(DenseMatrix<R>, Executor&);                   \
    extern template std::vector<R> lu_solve<R>(const LuFactorization<R>&, std::span<const R>);    \
    extern template double relative_residual<R>(const DenseMatrix<R>&, std::span<const R>,        \
                                                std::span<const R>);                              \
    extern template double residual_bound<R>(std::size_t);                                        \
    extern template LinearSystem<R> random_system<R>(std::size_t, std::uint64_t);
FDTDBENCH_LINSOLVE_EXTERN(float)
FDTDBENCH_LINSOLVE_EXTERN(double)
#undef FDTDBENCH_LINSOLVE_EXTERN

} // namespace fdtdbench
