#include "skmm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "skmm/kernels.hpp"

namespace skmm {
namespace {

// Reduces symmetric A (destroyed) to tridiagonal form; returns diagonal d,
// subdiagonal e (e[0] unused), and the orthogonal accumulation Q stored
// row-major. The active block stays explicitly symmetric so all inner loops
// walk contiguous rows.
void tridiagonalize(DenseMatrix& a, std::vector<double>& d, std::vector<double>& e,
                    DenseMatrix& q) {
    const auto& k = kernels::active();
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    std::vector<double> u(n), p(n), w(n);
    std::vector<double> house_h(n, 0.0);

    for (std::size_t i = n; i-- > 1;) {
        double* arow_i = a.row(i);
        double scale = 0.0;
        for (std::size_t j = 0; j < i; ++j) scale += std::fabs(arow_i[j]);
        if (scale == 0.0 || i == 1) {
            e[i] = arow_i[i - 1];
            house_h[i] = 0.0;
            continue;
        }
        double h0 = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            u[j] = arow_i[j] / scale;
            h0 += u[j] * u[j];
        }
        double f = u[i - 1];
        double g = (f >= 0.0) ? -std::sqrt(h0) : std::sqrt(h0);
        e[i] = scale * g;
        const double h = h0 - f * g;
        u[i - 1] = f - g;

        for (std::size_t r = 0; r < i; ++r) p[r] = k.dot(a.row(r), u.data(), i) / h;
        const double kk = k.dot(u.data(), p.data(), i) / (2.0 * h);
        for (std::size_t r = 0; r < i; ++r) w[r] = p[r] - kk * u[r];
        for (std::size_t r = 0; r < i; ++r) {
            double* arow = a.row(r);
            k.axpy(-u[r], w.data(), arow, i);
            k.axpy(-w[r], u.data(), arow, i);
        }
        for (std::size_t j = 0; j < i; ++j) arow_i[j] = u[j];
        house_h[i] = h;
    }

    for (std::size_t j = 0; j < n; ++j) d[j] = a(j, j);

    // Q = H_{n-1} * ... * H_2 built by ascending left-multiplications; rows of
    // the partial product are dense only over the leading block.
    q = DenseMatrix::identity(n);
    for (std::size_t i = 2; i < n; ++i) {
        const double h = house_h[i];
        if (h == 0.0) continue;
        const double* ui = a.row(i);
        std::fill(w.begin(), w.begin() + i, 0.0);
        for (std::size_t r = 0; r < i; ++r) k.axpy(ui[r], q.row(r), w.data(), i);
        for (std::size_t r = 0; r < i; ++r) k.axpy(-ui[r] / h, w.data(), q.row(r), i);
    }
}

// Implicit-shift QL on (d, e) with rotation accumulation onto the rows of vt
// (row j of vt evolves into eigenvector j of the original matrix).
void tql2(std::vector<double>& d, std::vector<double>& e, DenseMatrix& vt) {
    const auto& k = kernels::active();
    const std::size_t n = d.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    const double eps = std::numeric_limits<double>::epsilon();
    double f = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
        std::size_t m = l;
        while (m < n && std::fabs(e[m]) > eps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 64) throw numeric_error("symmetric QL failed to converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0.0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    k.rot(vt.row(i), vt.row(i + 1), c, s, n);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::fabs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace

SymEig sym_eig(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: matrix must be square");
    const std::size_t n = a.rows();
    SymEig out;
    if (n == 0) {
        out.vectors = DenseMatrix(0, 0);
        return out;
    }

    DenseMatrix work = a;
    std::vector<double> d, e;
    DenseMatrix q;
    tridiagonalize(work, d, e, q);
    DenseMatrix vt = q.transposed();
    tql2(d, e, vt);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });

    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t src = order[jj];
        out.values[jj] = d[src];
        const double* vec = vt.row(src);
        std::size_t imax = 0;
        double best = std::fabs(vec[0]);
        for (std::size_t i = 1; i < n; ++i) {
            const double mag = std::fabs(vec[i]);
            if (mag > best) {
                best = mag;
                imax = i;
            }
        }
        const double sign = (vec[imax] < 0.0) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, jj) = sign * vec[i];
    }
    return out;
}

DenseMatrix cholesky_factor(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: matrix must be square");
    const auto& k = kernels::active();
    const std::size_t n = a.rows();
    DenseMatrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double s = a(i, j) - k.dot(l.row(i), l.row(j), j);
            if (j < i) {
                l(i, j) = s / l(j, j);
            } else {
                if (s <= 0.0 || !std::isfinite(s))
                    throw numeric_error("cholesky: matrix is not positive definite");
                l(i, i) = std::sqrt(s);
            }
        }
    }
    return l;
}

std::vector<double> cholesky_solve_factored(const DenseMatrix& l, std::vector<double> b) {
    const auto& k = kernels::active();
    const std::size_t n = l.rows();
    if (b.size() != n) throw std::invalid_argument("cholesky solve: size mismatch");
    for (std::size_t i = 0; i < n; ++i)
        b[i] = (b[i] - k.dot(l.row(i), b.data(), i)) / l(i, i);
    for (std::size_t i = n; i-- > 0;) {
        b[i] /= l(i, i);
        k.axpy(-b[i], l.row(i), b.data(), i);
    }
    return b;
}

std::vector<double> cholesky_solve(const DenseMatrix& a, const std::vector<double>& b) {
    return cholesky_solve_factored(cholesky_factor(a), b);
}

}  // namespace skmm
