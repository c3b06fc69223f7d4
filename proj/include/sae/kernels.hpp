#pragma once

#include <cstddef>
#include <span>

// Dense product kernels. Each output element is accumulated over the inner
// index in ascending order in both variants, so the parallel kernels produce
// results bitwise identical to the serial reference for any thread count.
namespace sae::kernels {

// All matrices row-major. Shapes use (rows, cols) of the output c.
//   gemm_nn: c(m x n) = a(m x k) * b(k x n)
//   gemm_nt: c(m x n) = a(m x k) * b(n x k)^T
//   gemm_tn: c(m x n) = a(k x m)^T * b(k x n)
namespace serial {
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
}  // namespace serial

namespace parallel {
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
}  // namespace parallel

bool parallel_available() noexcept;
int max_threads() noexcept;
// Clamp the OpenMP thread count; no-op without OpenMP.
void set_threads(int n) noexcept;

}  // namespace sae::kernels
