#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skmm/matrix.hpp"
#include "skmm/moments.hpp"

namespace skmm {

// Point on the capped simplex {0 <= s_i <= 1/budget, sum s_i = 1}.
struct SelectionWeights {
    std::vector<double> values;
    std::size_t budget = 0;
};

// Throws std::invalid_argument unless weights lie on the capped simplex
// (sum within 1e-8, bounds within 1e-12).
void validate_weights(const SelectionWeights& s);

struct Selection {
    std::vector<std::size_t> indices;  // strictly ascending
    std::string method;
    std::uint64_t seed = 0;
    std::optional<SelectionWeights> weights;
    // (iteration, objective value) pairs recorded at a stride.
    std::vector<std::pair<std::size_t, double>> objective_trace;
    // True when a weighted sampler ran out of positive mass and filled the
    // remainder uniformly.
    bool padded = false;
    // How indices were extracted ("weighted", "top_n", "deterministic", ...).
    std::string sampling_mode;
};

enum class SkmmOptimizer { adam, pgd };
enum class SamplingMode { weighted, top_n };

struct SkmmConfig {
    double c_s = 0.999;
    std::size_t iterations = 10000;
    double learning_rate = 1e-7;
    SkmmOptimizer optimizer = SkmmOptimizer::adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    bool keep_best = true;
    SamplingMode sampling = SamplingMode::weighted;
    // When set, directions with a zero eigenvalue are ignored instead of
    // penalizing selected mass placed in them.
    bool drop_null_directions = false;
    std::size_t trace_stride = 100;
};

struct SkmmObjective {
    double value = 0.0;
    std::vector<double> q;      // q_j = v_j^T Gs^T diag(s) Gs v_j
    std::vector<double> gamma;  // inner-minimization optimum per direction
};

// Relaxed moment-matching objective: sum over directions of
// (q_j - gamma_j lambda_j)^2 minimized over gamma_j >= 1/c_s in closed form.
SkmmObjective skmm_objective(const SelectionWeights& s, const DenseMatrix& sketched,
                             const SpectralDecomposition& spec, double c_s,
                             bool drop_null = false);

// Analytic gradient of skmm_objective with respect to s.
std::vector<double> skmm_gradient(const SelectionWeights& s, const DenseMatrix& sketched,
                                  const SpectralDecomposition& spec, double c_s,
                                  bool drop_null = false);

// Euclidean projection onto the capped simplex, exact sorted-threshold scan.
std::vector<double> project_capped_simplex(const std::vector<double>& v, double cap);

// Full pipeline: second moment of `sketched`, spectral decomposition,
// projected first-order optimization from a seeded uniform-subset start, then
// index extraction per config.sampling.
Selection skmm_optimize(const DenseMatrix& sketched, std::size_t n, const SkmmConfig& config,
                        std::uint64_t seed);

// n distinct indices drawn by sequential renormalization (weighted mode) or
// deterministically by weight with ties to the lowest index (top_n mode).
// Falls back to uniform filling over the zero-weight complement when positive
// mass runs out (reported through `padded`).
std::vector<std::size_t> sample_without_replacement(const SelectionWeights& s, std::size_t n,
                                                    std::uint64_t seed,
                                                    SamplingMode mode = SamplingMode::weighted,
                                                    bool* padded = nullptr);

Selection uniform_select(std::size_t population, std::size_t n, std::uint64_t seed);

// Kernel herding on raw feature rows; deterministic.
Selection herding_select(const DenseMatrix& features, std::size_t n);

// Greedy 2-approximate k-center with a seeded start.
Selection kcenter_select(const DenseMatrix& features, std::size_t n, std::uint64_t seed);

// Residual-norm adaptive sampling with Gram-Schmidt deflation of the span of
// the selected rows.
Selection adaptive_select(const DenseMatrix& features, std::size_t n, std::uint64_t seed);

// Leverage-score sampling; variant picks plain / truncated(k) / ridge(rho).
Selection leverage_select(const DenseMatrix& features, std::size_t n, LeverageVariant variant,
                          std::optional<std::size_t> k, std::optional<double> rho,
                          std::uint64_t seed);

// Same sampling step over precomputed scores (one score per row).
Selection leverage_select_scored(const std::vector<double>& scores, std::size_t n,
                                 LeverageVariant variant, std::uint64_t seed);

}  // namespace skmm
