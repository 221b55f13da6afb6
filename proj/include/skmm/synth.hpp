#pragma once

#include <cstdint>
#include <vector>

#include "skmm/matrix.hpp"

namespace skmm {

// Gaussian-mixture regression benchmark: axis-aligned cluster means, per-cluster
// isotropic noise, labels linear in the noiseless means.
struct GmmSpec {
    std::size_t n_samples = 2000;
    std::size_t ambient_dim = 2400;
    std::size_t clusters = 8;
    double sigma_max = 0.04;
    std::uint64_t seed = 0;
};

struct GeneratedDataset {
    DenseMatrix features;                       // n_samples x ambient_dim
    std::vector<double> labels;                 // n_samples
    std::vector<std::size_t> cluster_assignment;  // n_samples, values in [0, clusters)
    DenseMatrix means;                          // clusters x ambient_dim
    std::vector<double> stds;                   // clusters
    std::vector<double> theta_g;                // ambient_dim
};

GeneratedDataset generate_gmm(const GmmSpec& spec);

}  // namespace skmm
