#include "skmm/kernels.hpp"

#include <cstring>

namespace skmm::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sumsq_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matmul_scalar(const double* a, const double* b, double* c,
                   std::size_t n, std::size_t k, std::size_t m) {
    std::memset(c, 0, n * m * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * m;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double aik = arow[kk];
            if (aik == 0.0) continue;
            const double* brow = b + kk * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += aik * brow[j];
        }
    }
}

// Row tiles keep a working set of lhs rows cache-resident while the full matrix
// streams past once per tile.
constexpr std::size_t kGramTile = 48;

void gram_scalar(const double* a, std::size_t n, std::size_t k, double* c) {
    for (std::size_t t0 = 0; t0 < n; t0 += kGramTile) {
        const std::size_t t1 = (t0 + kGramTile < n) ? t0 + kGramTile : n;
        for (std::size_t i = t0; i < n; ++i) {
            const double* ri = a + i * k;
            const std::size_t jmax = (i < t1) ? i + 1 : t1;
            for (std::size_t j = t0; j < jmax; ++j) {
                const double v = dot_scalar(ri, a + j * k, k);
                c[i * n + j] = v;
                c[j * n + i] = v;
            }
        }
    }
}

void crossgram_scalar(const double* a, std::size_t n, std::size_t m, double* c) {
    std::memset(c, 0, m * m * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double v = row[j];
            if (v == 0.0) continue;
            double* crow = c + j * m;
            for (std::size_t l = j; l < m; ++l) crow[l] += v * row[l];
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < j; ++l) c[j * m + l] = c[l * m + j];
}

void weighted_colsq_scalar(const double* p, const double* w,
                           std::size_t n, std::size_t m, double* q) {
    std::memset(q, 0, m * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w[i];
        if (wi == 0.0) continue;
        const double* row = p + i * m;
        for (std::size_t j = 0; j < m; ++j) q[j] += wi * row[j] * row[j];
    }
}

void colsq_combine_scalar(const double* p, const double* coef,
                          std::size_t n, std::size_t m, double* g) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = p + i * m;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += coef[j] * row[j] * row[j];
        g[i] = acc;
    }
}

void rot_scalar(double* x, double* y, double c, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels table = {
        dot_scalar,    sumsq_scalar,     axpy_scalar,           scal_scalar,
        matmul_scalar, gram_scalar,      crossgram_scalar,      weighted_colsq_scalar,
        colsq_combine_scalar, rot_scalar,
    };
    return table;
}

}  // namespace skmm::kernels
