#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "skmm/matrix.hpp"

namespace oracle {

struct EigResult {
    skmm::DenseMatrix vectors;  // columns are eigenvectors, same order as values
    std::vector<double> values;  // descending
};

// Cyclic Jacobi eigensolver; slow and simple, for small symmetric matrices.
inline EigResult jacobi_eig(const skmm::DenseMatrix& input) {
    const std::size_t n = input.rows();
    skmm::DenseMatrix a = input;
    skmm::DenseMatrix v = skmm::DenseMatrix::identity(n);
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30 * (1.0 + std::abs(a(0, 0)))) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });
    EigResult out{skmm::DenseMatrix(n, n), std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

// Brute-force Euclidean projection onto {0 <= s_i <= cap, sum s = 1}: enumerate
// all lower/free/upper active-set patterns, keep the feasible candidate closest
// to v. Exponential; N <= 12 or so.
inline std::vector<double> project_capped_simplex_bruteforce(const std::vector<double>& v,
                                                             double cap) {
    const std::size_t n = v.size();
    std::size_t patterns = 1;
    for (std::size_t i = 0; i < n; ++i) patterns *= 3;
    std::vector<double> best;
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<int> state(n);
    for (std::size_t code = 0; code < patterns; ++code) {
        std::size_t c = code;
        std::size_t n_free = 0, n_upper = 0;
        double sum_free_v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            state[i] = static_cast<int>(c % 3);  // 0 lower, 1 free, 2 upper
            c /= 3;
            if (state[i] == 1) {
                ++n_free;
                sum_free_v += v[i];
            } else if (state[i] == 2) {
                ++n_upper;
            }
        }
        std::vector<double> s(n, 0.0);
        if (n_free == 0) {
            if (std::abs(static_cast<double>(n_upper) * cap - 1.0) > 1e-9) continue;
            for (std::size_t i = 0; i < n; ++i) s[i] = state[i] == 2 ? cap : 0.0;
        } else {
            const double tau = (sum_free_v + static_cast<double>(n_upper) * cap - 1.0) /
                               static_cast<double>(n_free);
            bool ok = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (state[i] == 0) s[i] = 0.0;
                else if (state[i] == 2) s[i] = cap;
                else {
                    s[i] = v[i] - tau;
                    ok = ok && s[i] >= -1e-12 && s[i] <= cap + 1e-12;
                }
            }
            if (!ok) continue;
            for (double& x : s) x = std::clamp(x, 0.0, cap);
        }
        double total = 0.0;
        for (double x : s) total += x;
        if (std::abs(total - 1.0) > 1e-9) continue;
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) obj += (s[i] - v[i]) * (s[i] - v[i]);
        if (obj < best_obj) {
            best_obj = obj;
            best = s;
        }
    }
    return best;
}

// Central finite differences.
inline std::vector<double> fd_gradient(
    const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& s,
    double h) {
    std::vector<double> g(s.size());
    std::vector<double> probe = s;
    for (std::size_t i = 0; i < s.size(); ++i) {
        probe[i] = s[i] + h;
        const double up = f(probe);
        probe[i] = s[i] - h;
        const double down = f(probe);
        probe[i] = s[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

// All size-k subsets of {0..n-1}, lexicographic.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        out.push_back(pick);
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return out;
}

}  // namespace oracle
