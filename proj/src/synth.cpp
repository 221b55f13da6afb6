#include "skmm/synth.hpp"

#include <stdexcept>

#include "skmm/kernels.hpp"
#include "skmm/rng.hpp"

namespace skmm {
namespace {

constexpr std::uint64_t kPartitionTag = 0x50415254ULL;
constexpr std::uint64_t kMeanTag = 0x4d45414eULL;
constexpr std::uint64_t kStdTag = 0x53544453ULL;
constexpr std::uint64_t kThetaTag = 0x54484554ULL;
constexpr std::uint64_t kRowTag = 0x474d524fULL;
constexpr int kPartitionRetries = 1000;

}  // namespace

GeneratedDataset generate_gmm(const GmmSpec& spec) {
    const std::size_t n = spec.n_samples;
    const std::size_t r = spec.ambient_dim;
    const std::size_t k = spec.clusters;
    if (n == 0 || r == 0 || k == 0)
        throw std::invalid_argument("gmm: sizes must be positive");
    if (k > n || k > r)
        throw std::invalid_argument("gmm: cluster count must not exceed samples or dimension");
    if (!(spec.sigma_max >= 0.0))
        throw std::invalid_argument("gmm: sigma_max must be nonnegative");

    const Rng root(spec.seed);
    GeneratedDataset out;
    out.cluster_assignment.resize(n);

    // Uniform multinomial assignment, redrawn until every cluster is hit.
    bool ok = false;
    for (int attempt = 0; attempt < kPartitionRetries && !ok; ++attempt) {
        Rng rng = root.substream(kPartitionTag, static_cast<std::uint64_t>(attempt));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = rng.next_below(k);
            out.cluster_assignment[i] = c;
            ++counts[c];
        }
        ok = true;
        for (std::size_t c = 0; c < k; ++c) ok = ok && counts[c] > 0;
    }
    if (!ok) throw numeric_error("gmm: could not draw a partition with nonempty clusters");

    out.means = DenseMatrix(k, r);
    out.stds.resize(k);
    {
        Rng mean_rng = root.substream(kMeanTag);
        for (std::size_t j = 0; j < k; ++j) {
            const double z = static_cast<double>(1 + mean_rng.next_below(k));
            out.means(j, j) = z * static_cast<double>(k);
        }
        Rng std_rng = root.substream(kStdTag);
        for (std::size_t j = 0; j < k; ++j) out.stds[j] = std_rng.next_double() * spec.sigma_max;
    }

    out.theta_g.resize(r);
    {
        Rng theta_rng = root.substream(kThetaTag);
        for (std::size_t d = 0; d < r; ++d) out.theta_g[d] = theta_rng.next_normal();
    }

    const auto& kn = kernels::active();
    std::vector<double> cluster_label(k);
    for (std::size_t j = 0; j < k; ++j)
        cluster_label[j] = kn.dot(out.means.row(j), out.theta_g.data(), r);

    out.features = DenseMatrix(n, r);
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = out.cluster_assignment[i];
        Rng row_rng = root.substream(kRowTag, static_cast<std::uint64_t>(i));
        double* row = out.features.row(i);
        const double* mu = out.means.row(j);
        const double sigma = out.stds[j];
        for (std::size_t d = 0; d < r; ++d) row[d] = mu[d] + sigma * row_rng.next_normal();
        out.labels[i] = cluster_label[j];
    }
    return out;
}

}  // namespace skmm
