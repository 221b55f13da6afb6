#include "skmm/moments.hpp"

#include <algorithm>
#include <cmath>

#include "skmm/kernels.hpp"
#include "skmm/linalg.hpp"

namespace skmm {
namespace {

double max_abs(const DenseMatrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::fabs(a.data()[i]));
    return best;
}

}  // namespace

MomentMatrix second_moment(const DenseMatrix& samples) {
    if (samples.rows() == 0 || samples.cols() == 0)
        throw std::invalid_argument("second_moment: sample matrix must be nonempty");
    const std::size_t k = samples.rows();
    const std::size_t d = samples.cols();
    MomentMatrix out;
    out.sample_count = k;
    out.entries = DenseMatrix(d, d);
    kernels::active().crossgram(samples.data(), k, d, out.entries.data());
    const double inv = 1.0 / static_cast<double>(k);
    kernels::active().scal(inv, out.entries.data(), d * d);
    // crossgram mirrors the upper triangle, so symmetry is exact by
    // construction; enforce it anyway for inputs assembled elsewhere.
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            const double v = 0.5 * (out.entries(i, j) + out.entries(j, i));
            out.entries(i, j) = v;
            out.entries(j, i) = v;
        }
    return out;
}

SpectralDecomposition spectral_decomposition(const MomentMatrix& moment) {
    const DenseMatrix& a = moment.entries;
    if (a.rows() != a.cols() || a.rows() == 0)
        throw std::invalid_argument("spectral_decomposition: moment matrix must be square");
    const double scale = max_abs(a);
    const double sym_tol = 1e-10 * (scale > 0.0 ? scale : 1.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::fabs(a(i, j) - a(j, i)) > sym_tol)
                throw std::invalid_argument("spectral_decomposition: matrix is not symmetric");

    SymEig eig = sym_eig(a);
    SpectralDecomposition out;
    out.eigenvectors = std::move(eig.vectors);
    out.eigenvalues = std::move(eig.values);

    const double lam_max = out.eigenvalues.empty() ? 0.0 : std::max(out.eigenvalues.front(), 0.0);
    const double clamp_floor = -1e-8 * lam_max;
    for (double& lam : out.eigenvalues) {
        if (lam < clamp_floor)
            throw numeric_error("spectral_decomposition: matrix is not positive semidefinite");
        if (lam < 0.0) lam = 0.0;
    }
    return out;
}

std::size_t intrinsic_dimension(const MomentMatrix& moment, std::size_t population_size) {
    if (population_size == 0)
        throw std::invalid_argument("intrinsic_dimension: population size must be positive");
    SpectralDecomposition spec = spectral_decomposition(moment);
    const auto& lam = spec.eigenvalues;
    const std::size_t d = lam.size();
    double trace = 0.0;
    for (double v : lam) trace += v;
    if (trace <= 0.0) return 0;
    const double budget = trace / static_cast<double>(population_size);
    // Tail sums accumulated from the small end for stability.
    std::vector<double> tail(d + 1, 0.0);
    for (std::size_t j = d; j-- > 0;) tail[j] = tail[j + 1] + lam[j];
    for (std::size_t t = 1; t <= d; ++t)
        if (tail[t] <= budget) return t;
    return d;
}

std::vector<double> leverage_scores(const DenseMatrix& m, LeverageVariant variant,
                                    std::optional<std::size_t> k_opt,
                                    std::optional<double> rho_opt, LeverageRoute route) {
    if (m.rows() == 0 || m.cols() == 0)
        throw std::invalid_argument("leverage_scores: matrix must be nonempty");
    if (variant == LeverageVariant::truncated && !k_opt)
        throw std::invalid_argument("leverage_scores: truncated variant needs k");
    if (variant == LeverageVariant::ridge) {
        if (!rho_opt) throw std::invalid_argument("leverage_scores: ridge variant needs rho");
        if (*rho_opt <= 0.0)
            throw std::invalid_argument("leverage_scores: rho must be positive");
    }
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    if (route == LeverageRoute::automatic)
        route = (d <= n) ? LeverageRoute::covariance : LeverageRoute::gram;

    const auto& kn = kernels::active();
    std::vector<double> scores(n, 0.0);

    if (route == LeverageRoute::gram) {
        DenseMatrix gram(n, n);
        kn.gram(m.data(), n, d, gram.data());
        SymEig eig = sym_eig(gram);
        const double lam_max = std::max(eig.values.empty() ? 0.0 : eig.values.front(), 0.0);
        const double cutoff = kPinvCutoff * lam_max;
        std::size_t rank = 0;
        while (rank < eig.values.size() && eig.values[rank] > cutoff) ++rank;
        std::size_t limit = rank;
        if (variant == LeverageVariant::truncated) {
            if (*k_opt < 1 || *k_opt > rank)
                throw std::invalid_argument("leverage_scores: k must be in [1, rank]");
            limit = *k_opt;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            if (variant == LeverageVariant::ridge) {
                for (std::size_t j = 0; j < rank; ++j) {
                    const double u = eig.vectors(i, j);
                    acc += eig.values[j] / (eig.values[j] + *rho_opt) * u * u;
                }
            } else {
                for (std::size_t j = 0; j < limit; ++j) {
                    const double u = eig.vectors(i, j);
                    acc += u * u;
                }
            }
            scores[i] = acc;
        }
        return scores;
    }

    DenseMatrix cov(d, d);
    kn.crossgram(m.data(), n, d, cov.data());
    SymEig eig = sym_eig(cov);
    const double lam_max = std::max(eig.values.empty() ? 0.0 : eig.values.front(), 0.0);
    const double cutoff = kPinvCutoff * lam_max;
    std::size_t rank = 0;
    while (rank < eig.values.size() && eig.values[rank] > cutoff) ++rank;
    std::size_t limit = rank;
    if (variant == LeverageVariant::truncated) {
        if (*k_opt < 1 || *k_opt > rank)
            throw std::invalid_argument("leverage_scores: k must be in [1, rank]");
        limit = *k_opt;
    }
    // Projections P = M V, then weight column j by the variant's spectral filter.
    DenseMatrix proj(n, d);
    kn.matmul(m.data(), eig.vectors.data(), proj.data(), n, d, d);
    std::vector<double> filter(d, 0.0);
    if (variant == LeverageVariant::ridge) {
        for (std::size_t j = 0; j < d; ++j) filter[j] = 1.0 / (std::max(eig.values[j], 0.0) + *rho_opt);
    } else {
        for (std::size_t j = 0; j < limit; ++j) filter[j] = 1.0 / eig.values[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = proj.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += filter[j] * row[j] * row[j];
        scores[i] = acc;
    }
    return scores;
}

TraceRatio trace_ratio(const MomentMatrix& full, const MomentMatrix& sub,
                       std::optional<std::size_t> k_opt) {
    const std::size_t d = full.dim();
    if (sub.dim() != d)
        throw std::invalid_argument("trace_ratio: moment dimensions disagree");
    SpectralDecomposition spec = spectral_decomposition(sub);
    const double lam_max = spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues.front();
    const double cutoff = kPinvCutoff * lam_max;
    std::size_t rank = 0;
    while (rank < spec.eigenvalues.size() && spec.eigenvalues[rank] > cutoff) ++rank;
    std::size_t keep = rank;
    if (k_opt) {
        if (*k_opt < 1 || *k_opt > d)
            throw std::invalid_argument("trace_ratio: k must be in [1, dim]");
        keep = std::min(*k_opt, rank);
    }

    TraceRatio out;
    if (keep == 0) return out;  // zero pseudoinverse

    const auto& kn = kernels::active();
    // trace: sum_j v_j^T full v_j / lambda_j over kept eigenpairs.
    std::vector<double> fv(d);
    for (std::size_t j = 0; j < keep; ++j) {
        std::vector<double> v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = spec.eigenvectors(i, j);
        for (std::size_t i = 0; i < d; ++i) fv[i] = kn.dot(full.entries.row(i), v.data(), d);
        out.trace += kn.dot(v.data(), fv.data(), d) / spec.eigenvalues[j];
    }

    // spectral: sigma_max of B = full * pinv, via the top eigenvalue of B^T B,
    // with pinv = V_keep diag(1/lambda) V_keep^T.
    DenseMatrix pinv(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            double acc = 0.0;
            for (std::size_t j = 0; j < keep; ++j)
                acc += spec.eigenvectors(a, j) * spec.eigenvectors(b, j) / spec.eigenvalues[j];
            pinv(a, b) = acc;
        }
    DenseMatrix b(d, d);
    kn.matmul(full.entries.data(), pinv.data(), b.data(), d, d, d);
    DenseMatrix btb(d, d);
    kn.crossgram(b.data(), d, d, btb.data());
    SymEig top = sym_eig(btb);
    out.spectral = std::sqrt(std::max(top.values.empty() ? 0.0 : top.values.front(), 0.0));
    return out;
}

}  // namespace skmm
