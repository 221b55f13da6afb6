#include "skmm/kernels.hpp"

#if defined(SKMM_HAVE_AVX2)

#include <immintrin.h>

#include <cstring>

namespace skmm::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double total = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

double sumsq_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_avx2(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void matmul_avx2(const double* a, const double* b, double* c,
                 std::size_t n, std::size_t k, std::size_t m) {
    std::memset(c, 0, n * m * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * m;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const __m256d va = _mm256_set1_pd(arow[kk]);
            const double* brow = b + kk * m;
            std::size_t j = 0;
            for (; j + 4 <= m; j += 4) {
                __m256d vc = _mm256_loadu_pd(crow + j);
                vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), vc);
                _mm256_storeu_pd(crow + j, vc);
            }
            for (; j < m; ++j) crow[j] += arow[kk] * brow[j];
        }
    }
}

constexpr std::size_t kGramTile = 48;

void gram_avx2(const double* a, std::size_t n, std::size_t k, double* c) {
    for (std::size_t t0 = 0; t0 < n; t0 += kGramTile) {
        const std::size_t t1 = (t0 + kGramTile < n) ? t0 + kGramTile : n;
        for (std::size_t i = t0; i < n; ++i) {
            const double* ri = a + i * k;
            const std::size_t jmax = (i < t1) ? i + 1 : t1;
            for (std::size_t j = t0; j < jmax; ++j) {
                const double v = dot_avx2(ri, a + j * k, k);
                c[i * n + j] = v;
                c[j * n + i] = v;
            }
        }
    }
}

void crossgram_avx2(const double* a, std::size_t n, std::size_t m, double* c) {
    std::memset(c, 0, m * m * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double v = row[j];
            if (v == 0.0) continue;
            const __m256d vv = _mm256_set1_pd(v);
            double* crow = c + j * m;
            std::size_t l = j;
            for (; l + 4 <= m; l += 4) {
                __m256d vc = _mm256_loadu_pd(crow + l);
                vc = _mm256_fmadd_pd(vv, _mm256_loadu_pd(row + l), vc);
                _mm256_storeu_pd(crow + l, vc);
            }
            for (; l < m; ++l) crow[l] += v * row[l];
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < j; ++l) c[j * m + l] = c[l * m + j];
}

void weighted_colsq_avx2(const double* p, const double* w,
                         std::size_t n, std::size_t m, double* q) {
    std::memset(q, 0, m * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w[i];
        if (wi == 0.0) continue;
        const __m256d vw = _mm256_set1_pd(wi);
        const double* row = p + i * m;
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            const __m256d vp = _mm256_loadu_pd(row + j);
            __m256d vq = _mm256_loadu_pd(q + j);
            vq = _mm256_fmadd_pd(vw, _mm256_mul_pd(vp, vp), vq);
            _mm256_storeu_pd(q + j, vq);
        }
        for (; j < m; ++j) q[j] += wi * row[j] * row[j];
    }
}

void colsq_combine_avx2(const double* p, const double* coef,
                        std::size_t n, std::size_t m, double* g) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = p + i * m;
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            const __m256d vp = _mm256_loadu_pd(row + j);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(coef + j), _mm256_mul_pd(vp, vp), acc);
        }
        double total = hsum(acc);
        for (; j < m; ++j) total += coef[j] * row[j] * row[j];
        g[i] = total;
    }
}

void rot_avx2(double* x, double* y, double c, double s, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(x + i, _mm256_fmsub_pd(vc, vx, _mm256_mul_pd(vs, vy)));
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, vx, _mm256_mul_pd(vc, vy)));
    }
    for (; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels table = {
        dot_avx2,    sumsq_avx2,     axpy_avx2,           scal_avx2,
        matmul_avx2, gram_avx2,      crossgram_avx2,      weighted_colsq_avx2,
        colsq_combine_avx2, rot_avx2,
    };
    return table;
}

}  // namespace skmm::kernels

#endif  // SKMM_HAVE_AVX2
