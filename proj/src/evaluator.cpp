#include "skmm/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "skmm/kernels.hpp"
#include "skmm/linalg.hpp"
#include "skmm/rng.hpp"

namespace skmm {
namespace {

constexpr std::uint64_t kCvTag = 0x43564f4cULL;

void validate_xy(const DenseMatrix& x, const std::vector<double>& y) {
    if (x.rows() == 0 || x.cols() == 0)
        throw std::invalid_argument("ridge: design matrix must be nonempty");
    if (y.size() != x.rows())
        throw std::invalid_argument("ridge: label length must equal row count");
}

// Local fold index sets: seeded permutation cut into contiguous chunks, the
// remainder going to the earlier folds; each fold sorted ascending.
std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t folds,
                                                     std::uint64_t seed) {
    Rng rng = Rng(seed).substream(kCvTag);
    std::vector<std::size_t> perm;
    sample_indices_uniform(n, n, rng, perm);
    std::vector<std::vector<std::size_t>> out(folds);
    const std::size_t base = n / folds;
    const std::size_t rem = n % folds;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t size = base + (f < rem ? 1 : 0);
        out[f].assign(perm.begin() + pos, perm.begin() + pos + size);
        std::sort(out[f].begin(), out[f].end());
        pos += size;
    }
    return out;
}

std::vector<double> gather(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    std::vector<double> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

// Per-alpha validation MSE for one fold through the eigendecomposition of the
// train Gram: coefficients c(alpha) = U (D + n_tr alpha)^{-1} U^T y_tr and
// predictions K_cross c(alpha).
void dual_fold_losses(const DenseMatrix& k_tr, const DenseMatrix& k_cross,
                      const std::vector<double>& y_tr, const std::vector<double>& y_val,
                      const std::vector<double>& grid, std::vector<double>& losses) {
    const auto& kn = kernels::active();
    const std::size_t n_tr = k_tr.rows();
    const std::size_t n_val = y_val.size();
    SymEig eig = sym_eig(k_tr);
    DenseMatrix ut = eig.vectors.transposed();
    std::vector<double> z(n_tr);
    for (std::size_t j = 0; j < n_tr; ++j) z[j] = kn.dot(ut.row(j), y_tr.data(), n_tr);

    std::vector<double> coef(n_tr), pred(n_val);
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const double shift = static_cast<double>(n_tr) * grid[a];
        std::fill(coef.begin(), coef.end(), 0.0);
        for (std::size_t j = 0; j < n_tr; ++j)
            kn.axpy(z[j] / (eig.values[j] + shift), ut.row(j), coef.data(), n_tr);
        double sq = 0.0;
        for (std::size_t i = 0; i < n_val; ++i) {
            const double p = kn.dot(k_cross.row(i), coef.data(), n_tr);
            const double diff = p - y_val[i];
            sq += diff * diff;
        }
        losses[a] += sq / static_cast<double>(n_val);
    }
}

// Primal-side analogue through the eigendecomposition of X_tr^T X_tr.
void primal_fold_losses(const DenseMatrix& x_tr, const DenseMatrix& x_val,
                        const std::vector<double>& y_tr, const std::vector<double>& y_val,
                        const std::vector<double>& grid, std::vector<double>& losses) {
    const auto& kn = kernels::active();
    const std::size_t n_tr = x_tr.rows();
    const std::size_t n_val = x_val.rows();
    const std::size_t r = x_tr.cols();
    DenseMatrix cov(r, r);
    kn.crossgram(x_tr.data(), n_tr, r, cov.data());
    SymEig eig = sym_eig(cov);
    DenseMatrix vt = eig.vectors.transposed();
    std::vector<double> b(r, 0.0);
    for (std::size_t i = 0; i < n_tr; ++i) kn.axpy(y_tr[i], x_tr.row(i), b.data(), r);
    std::vector<double> z(r);
    for (std::size_t j = 0; j < r; ++j) z[j] = kn.dot(vt.row(j), b.data(), r);

    std::vector<double> theta(r), pred(n_val);
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const double shift = static_cast<double>(n_tr) * grid[a];
        std::fill(theta.begin(), theta.end(), 0.0);
        for (std::size_t j = 0; j < r; ++j)
            kn.axpy(z[j] / (std::max(eig.values[j], 0.0) + shift), vt.row(j), theta.data(), r);
        double sq = 0.0;
        for (std::size_t i = 0; i < n_val; ++i) {
            const double p = kn.dot(x_val.row(i), theta.data(), r);
            const double diff = p - y_val[i];
            sq += diff * diff;
        }
        losses[a] += sq / static_cast<double>(n_val);
    }
}

void validate_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("cv: alpha grid must be nonempty");
    for (double a : grid)
        if (!std::isfinite(a) || a < 0.0)
            throw std::invalid_argument("cv: alpha values must be finite and nonnegative");
}

CvResult pick_best(const std::vector<double>& grid, const std::vector<double>& losses,
                   std::size_t folds) {
    CvResult out;
    out.cv_grid.reserve(grid.size());
    double best_loss = std::numeric_limits<double>::infinity();
    double best_alpha = grid.front();
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const double mean = losses[a] / static_cast<double>(folds);
        out.cv_grid.emplace_back(grid[a], mean);
        const bool better =
            mean < best_loss || (mean == best_loss && grid[a] < best_alpha);
        if (better) {
            best_loss = mean;
            best_alpha = grid[a];
        }
    }
    out.best_alpha = best_alpha;
    return out;
}

}  // namespace

std::vector<double> default_alpha_grid() {
    std::vector<double> grid(100);
    const double lo = 1e-2, hi = 1e2;
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / 99.0;
    return grid;
}

RidgeModel ridge_fit(const DenseMatrix& x, const std::vector<double>& y, double alpha,
                     SolveRoute route) {
    validate_xy(x, y);
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("ridge: alpha must be finite and nonnegative");
    const std::size_t n = x.rows();
    const std::size_t r = x.cols();
    if (alpha == 0.0 && n < r)
        throw std::invalid_argument("ridge: alpha = 0 requires at least r rows");
    if (route == SolveRoute::automatic)
        route = (r <= n) ? SolveRoute::primal : SolveRoute::dual;

    const auto& kn = kernels::active();
    RidgeModel model;
    model.alpha = alpha;
    model.route_used = route;
    if (route == SolveRoute::primal) {
        DenseMatrix a(r, r);
        kn.crossgram(x.data(), n, r, a.data());
        const double inv_n = 1.0 / static_cast<double>(n);
        kn.scal(inv_n, a.data(), r * r);
        for (std::size_t j = 0; j < r; ++j) a(j, j) += alpha;
        std::vector<double> b(r, 0.0);
        for (std::size_t i = 0; i < n; ++i) kn.axpy(y[i] * inv_n, x.row(i), b.data(), r);
        model.theta = cholesky_solve(a, b);
    } else {
        DenseMatrix kmat(n, n);
        kn.gram(x.data(), n, r, kmat.data());
        const double shift = static_cast<double>(n) * alpha;
        for (std::size_t i = 0; i < n; ++i) kmat(i, i) += shift;
        std::vector<double> c = cholesky_solve(kmat, y);
        model.theta.assign(r, 0.0);
        for (std::size_t i = 0; i < n; ++i) kn.axpy(c[i], x.row(i), model.theta.data(), r);
    }
    for (double t : model.theta)
        if (!std::isfinite(t)) throw numeric_error("ridge: solution is not finite");
    return model;
}

CvResult cv_grid_search(const DenseMatrix& x, const std::vector<double>& y,
                        const std::vector<double>& grid, std::size_t folds,
                        std::uint64_t seed) {
    validate_xy(x, y);
    validate_grid(grid);
    const std::size_t n = x.rows();
    if (folds < 2) throw std::invalid_argument("cv: folds must be at least 2");
    if (n < folds) throw std::invalid_argument("cv: need at least `folds` rows");

    const auto part = fold_partition(n, folds, seed);
    std::vector<double> losses(grid.size(), 0.0);
    const auto& kn = kernels::active();
    for (std::size_t f = 0; f < folds; ++f) {
        const auto& val_idx = part[f];
        std::vector<std::size_t> tr_idx;
        tr_idx.reserve(n - val_idx.size());
        for (std::size_t g = 0; g < folds; ++g)
            if (g != f) tr_idx.insert(tr_idx.end(), part[g].begin(), part[g].end());
        std::sort(tr_idx.begin(), tr_idx.end());

        DenseMatrix x_tr = x.gather_rows(tr_idx);
        DenseMatrix x_val = x.gather_rows(val_idx);
        std::vector<double> y_tr = gather(y, tr_idx);
        std::vector<double> y_val = gather(y, val_idx);
        if (x.cols() <= tr_idx.size()) {
            primal_fold_losses(x_tr, x_val, y_tr, y_val, grid, losses);
        } else {
            DenseMatrix k_tr(tr_idx.size(), tr_idx.size());
            kn.gram(x_tr.data(), tr_idx.size(), x.cols(), k_tr.data());
            DenseMatrix k_cross(val_idx.size(), tr_idx.size());
            for (std::size_t i = 0; i < val_idx.size(); ++i)
                for (std::size_t j = 0; j < tr_idx.size(); ++j)
                    k_cross(i, j) = kn.dot(x_val.row(i), x_tr.row(j), x.cols());
            dual_fold_losses(k_tr, k_cross, y_tr, y_val, grid, losses);
        }
    }
    return pick_best(grid, losses, folds);
}

double empirical_risk(const RidgeModel& model, const DenseMatrix& x,
                      const std::vector<double>& y) {
    validate_xy(x, y);
    if (model.theta.size() != x.cols())
        throw std::invalid_argument("risk: model width must equal feature count");
    const auto& kn = kernels::active();
    double sq = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double diff = kn.dot(x.row(i), model.theta.data(), x.cols()) - y[i];
        sq += diff * diff;
    }
    return sq / static_cast<double>(x.rows());
}

TradeoffDiagnostics tradeoff_diagnostics(const DenseMatrix& sketched,
                                         const std::vector<std::size_t>& indices,
                                         std::size_t k, double c_s_probe) {
    if (indices.empty()) throw std::invalid_argument("diagnostics: selection is empty");
    const std::size_t m = sketched.cols();
    if (k < 1 || k > m) throw std::invalid_argument("diagnostics: k must be in [1, m]");
    if (!(c_s_probe > 0.0)) throw std::invalid_argument("diagnostics: c_S probe must be positive");

    MomentMatrix full = second_moment(sketched);
    MomentMatrix sub = second_moment(sketched.gather_rows(indices));
    TraceRatio tr = trace_ratio(full, sub, k);

    TradeoffDiagnostics out;
    out.variance_term = tr.trace;
    out.spectral_term = tr.spectral;
    out.intrinsic_dim = intrinsic_dimension(full, sketched.rows());

    SpectralDecomposition sub_spec = spectral_decomposition(sub);
    out.gamma_s = sub_spec.eigenvalues[k - 1];

    SpectralDecomposition full_spec = spectral_decomposition(full);
    const auto& kn = kernels::active();
    const double lam_max = full_spec.eigenvalues.empty() ? 0.0 : full_spec.eigenvalues.front();
    const double cutoff = kPinvCutoff * lam_max;
    double min_ratio = std::numeric_limits<double>::infinity();
    std::vector<double> v(m), sv(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (full_spec.eigenvalues[j] <= cutoff) continue;
        for (std::size_t i = 0; i < m; ++i) v[i] = full_spec.eigenvectors(i, j);
        for (std::size_t i = 0; i < m; ++i) sv[i] = kn.dot(sub.entries.row(i), v.data(), m);
        const double q = kn.dot(v.data(), sv.data(), m);
        min_ratio = std::min(min_ratio, q / full_spec.eigenvalues[j]);
    }
    if (!std::isfinite(min_ratio)) min_ratio = 0.0;  // zero sketched moment
    out.min_q_over_lambda = min_ratio;
    out.moment_condition = min_ratio >= 1.0 / c_s_probe;
    return out;
}

EvalReport evaluate_selection(const DenseMatrix& x, const std::vector<double>& y,
                              const std::vector<std::size_t>& indices,
                              const std::vector<double>& grid, std::size_t folds,
                              std::uint64_t seed) {
    if (indices.empty()) throw std::invalid_argument("evaluate: selection is empty");
    DenseMatrix x_s = x.gather_rows(indices);
    std::vector<double> y_s = gather(y, indices);
    CvResult cv = cv_grid_search(x_s, y_s, grid, folds, seed);
    RidgeModel model = ridge_fit(x_s, y_s, cv.best_alpha);
    EvalReport report;
    report.empirical_risk = empirical_risk(model, x, y);
    report.chosen_alpha = cv.best_alpha;
    report.cv_grid = std::move(cv.cv_grid);
    return report;
}

GramCache::GramCache(const DenseMatrix& x, const std::vector<double>& y) : x_(x), y_(y) {
    validate_xy(x, y);
    gram_ = DenseMatrix(x.rows(), x.rows());
    kernels::active().gram(x.data(), x.rows(), x.cols(), gram_.data());
}

EvalReport GramCache::evaluate(const std::vector<std::size_t>& indices,
                               const std::vector<double>& grid, std::size_t folds,
                               std::uint64_t seed) const {
    if (indices.empty()) throw std::invalid_argument("evaluate: selection is empty");
    validate_grid(grid);
    const std::size_t n = indices.size();
    if (folds < 2) throw std::invalid_argument("cv: folds must be at least 2");
    if (n < folds) throw std::invalid_argument("cv: need at least `folds` rows");
    for (std::size_t i : indices)
        if (i >= x_.rows()) throw std::invalid_argument("evaluate: index out of range");

    const auto& kn = kernels::active();
    const auto part = fold_partition(n, folds, seed);
    std::vector<double> losses(grid.size(), 0.0);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> val_g, tr_g;
        for (std::size_t g = 0; g < folds; ++g) {
            for (std::size_t local : part[g]) {
                (g == f ? val_g : tr_g).push_back(indices[local]);
            }
        }
        std::sort(val_g.begin(), val_g.end());
        std::sort(tr_g.begin(), tr_g.end());

        DenseMatrix k_tr(tr_g.size(), tr_g.size());
        for (std::size_t i = 0; i < tr_g.size(); ++i)
            for (std::size_t j = 0; j < tr_g.size(); ++j)
                k_tr(i, j) = gram_(tr_g[i], tr_g[j]);
        DenseMatrix k_cross(val_g.size(), tr_g.size());
        for (std::size_t i = 0; i < val_g.size(); ++i)
            for (std::size_t j = 0; j < tr_g.size(); ++j)
                k_cross(i, j) = gram_(val_g[i], tr_g[j]);
        std::vector<double> y_tr = gather(y_, tr_g);
        std::vector<double> y_val = gather(y_, val_g);
        dual_fold_losses(k_tr, k_cross, y_tr, y_val, grid, losses);
    }
    CvResult cv = pick_best(grid, losses, folds);

    // Final dual fit on the full selection, risk through Gram columns.
    std::vector<std::size_t> s_sorted = indices;
    std::sort(s_sorted.begin(), s_sorted.end());
    DenseMatrix k_s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) k_s(i, j) = gram_(s_sorted[i], s_sorted[j]);
    const double shift = static_cast<double>(n) * cv.best_alpha;
    for (std::size_t i = 0; i < n; ++i) k_s(i, i) += shift;
    std::vector<double> c = cholesky_solve(k_s, gather(y_, s_sorted));

    DenseMatrix k_cols(x_.rows(), n);
    for (std::size_t i = 0; i < x_.rows(); ++i) {
        const double* grow = gram_.row(i);
        double* krow = k_cols.row(i);
        for (std::size_t j = 0; j < n; ++j) krow[j] = grow[s_sorted[j]];
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < x_.rows(); ++i) {
        const double diff = kn.dot(k_cols.row(i), c.data(), n) - y_[i];
        sq += diff * diff;
    }

    EvalReport report;
    report.empirical_risk = sq / static_cast<double>(x_.rows());
    report.chosen_alpha = cv.best_alpha;
    report.cv_grid = std::move(cv.cv_grid);
    return report;
}

}  // namespace skmm
