#pragma once

#include <optional>
#include <vector>

#include "skmm/matrix.hpp"

namespace skmm {

// Relative cutoff under which eigenvalues are treated as zero when forming
// pseudoinverses and ranks: lambda <= kPinvCutoff * lambda_max.
inline constexpr double kPinvCutoff = 1e-10;

// Empirical second moment M^T M / k of a k x d sample matrix, explicitly
// symmetrized.
struct MomentMatrix {
    DenseMatrix entries;          // d x d, symmetric PSD up to roundoff
    std::size_t sample_count = 0;  // k
    std::size_t dim() const { return entries.rows(); }
};

MomentMatrix second_moment(const DenseMatrix& samples);

struct SpectralDecomposition {
    DenseMatrix eigenvectors;      // columns, orthonormal
    std::vector<double> eigenvalues;  // descending, nonnegative after clamping
};

// Eigendecomposition of a moment matrix. Validates symmetry (1e-10 relative),
// clamps eigenvalues in [-1e-8 * lambda_max, 0) to zero, and throws
// numeric_error on anything more negative.
SpectralDecomposition spectral_decomposition(const MomentMatrix& moment);

// Smallest t >= 1 such that the eigenvalue tail sum_{j>t} lambda_j is at most
// trace / population_size; 0 for a zero-trace moment.
std::size_t intrinsic_dimension(const MomentMatrix& moment, std::size_t population_size);

enum class LeverageVariant { plain, truncated, ridge };
enum class LeverageRoute { automatic, covariance, gram };

// Row leverage scores of M: diagonal of M (M^T M)^+ M^T (plain), its rank-k
// truncation, or the ridge form M (M^T M + rho I)^{-1} M^T. When rows() <
// cols() the Gram-side identity avoids any d x d work.
std::vector<double> leverage_scores(const DenseMatrix& m, LeverageVariant variant,
                                    std::optional<std::size_t> k = std::nullopt,
                                    std::optional<double> rho = std::nullopt,
                                    LeverageRoute route = LeverageRoute::automatic);

struct TraceRatio {
    double trace = 0.0;     // tr(full * pinv(sub_k))
    double spectral = 0.0;  // sigma_max(full * pinv(sub_k))
};

// Trace and spectral norm of full * <sub>_k^+, where <sub>_k keeps the top-k
// eigenpairs (all numerically nonzero ones when k is absent).
TraceRatio trace_ratio(const MomentMatrix& full, const MomentMatrix& sub,
                       std::optional<std::size_t> k = std::nullopt);

}  // namespace skmm
