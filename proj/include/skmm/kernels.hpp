#pragma once

#include <cstddef>
#include <string>

namespace skmm::kernels {

enum class Backend { scalar, avx2 };

// Vectorizable primitives behind a runtime-selected dispatch table. Every entry
// has a scalar reference implementation and an AVX2+FMA variant; accumulation
// order is fixed per (backend, call), so repeated calls are bit-identical.
struct Kernels {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sumsq)(const double* a, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*scal)(double alpha, double* x, std::size_t n);
    // C (n x m) = A (n x k) * B (k x m), all row-major; C is overwritten.
    void (*matmul)(const double* a, const double* b, double* c,
                   std::size_t n, std::size_t k, std::size_t m);
    // C (n x n) = A * A^T for row-major A (n x k); symmetric output.
    void (*gram)(const double* a, std::size_t n, std::size_t k, double* c);
    // C (m x m) = A^T * A for row-major A (n x m); symmetric output.
    void (*crossgram)(const double* a, std::size_t n, std::size_t m, double* c);
    // q_j = sum_i w_i * P_ij^2 for row-major P (n x m).
    void (*weighted_colsq)(const double* p, const double* w,
                           std::size_t n, std::size_t m, double* q);
    // g_i = sum_j c_j * P_ij^2 for row-major P (n x m).
    void (*colsq_combine)(const double* p, const double* coef,
                          std::size_t n, std::size_t m, double* g);
    // Givens rotation: (x, y) <- (c*x - s*y, s*x + c*y), elementwise.
    void (*rot)(double* x, double* y, double c, double s, std::size_t n);
};

const Kernels& scalar_kernels();
// Throws std::logic_error when the AVX2 backend is not compiled in; guard
// calls with backend_supported(Backend::avx2).
const Kernels& avx2_kernels();

bool backend_supported(Backend b);
Backend active_backend();
// Throws std::invalid_argument if the backend is not compiled in or the CPU
// lacks the feature set.
void set_backend(Backend b);
const Kernels& active();

std::string backend_name(Backend b);

}  // namespace skmm::kernels
