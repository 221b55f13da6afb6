#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "skmm/matrix.hpp"
#include "skmm/moments.hpp"

namespace skmm {

enum class SolveRoute { automatic, primal, dual };

struct RidgeModel {
    std::vector<double> theta;
    double alpha = 0.0;
    SolveRoute route_used = SolveRoute::primal;
};

// theta = argmin (1/n)||X theta - y||^2 + alpha ||theta||^2. Primal solves the
// r x r normal system; dual uses theta = X^T (X X^T + n alpha I)^{-1} y.
// automatic picks primal when r <= n.
RidgeModel ridge_fit(const DenseMatrix& x, const std::vector<double>& y, double alpha,
                     SolveRoute route = SolveRoute::automatic);

struct CvResult {
    double best_alpha = 0.0;
    std::vector<std::pair<double, double>> cv_grid;  // (alpha, mean fold MSE)
};

// 100 linearly spaced values in [1e-2, 1e2].
std::vector<double> default_alpha_grid();

// Mean validation MSE per alpha over a seeded permutation split into `folds`
// contiguous chunks (remainder rows land in earlier folds); ties prefer the
// smaller alpha.
CvResult cv_grid_search(const DenseMatrix& x, const std::vector<double>& y,
                        const std::vector<double>& grid, std::size_t folds,
                        std::uint64_t seed);

// (1/N) ||X theta - y||^2.
double empirical_risk(const RidgeModel& model, const DenseMatrix& x,
                      const std::vector<double>& y);

struct TradeoffDiagnostics {
    double variance_term = 0.0;   // tr(sketched_moment * pinv_k(sub_moment))
    double spectral_term = 0.0;   // matching spectral norm
    double gamma_s = 0.0;         // lambda_k of the sub moment
    std::size_t intrinsic_dim = 0;  // of the sketched moment
    bool moment_condition = false;  // min_{lambda_j>0} q_j/lambda_j >= 1/c_s_probe
    double min_q_over_lambda = 0.0;
};

// Reported (never asserted) variance-bias indicators for a selection, all in
// the sketched space.
TradeoffDiagnostics tradeoff_diagnostics(const DenseMatrix& sketched,
                                         const std::vector<std::size_t>& indices,
                                         std::size_t k, double c_s_probe);

struct EvalReport {
    double empirical_risk = 0.0;
    double chosen_alpha = 0.0;
    std::vector<std::pair<double, double>> cv_grid;
    std::optional<TradeoffDiagnostics> diagnostics;
    // tr of the raw feature second moment; filled by callers holding the full
    // feature matrix.
    std::optional<double> trace_sigma;
};

// Full protocol: CV on the selected rows, refit at the best alpha, empirical
// risk over the complete dataset.
EvalReport evaluate_selection(const DenseMatrix& x, const std::vector<double>& y,
                              const std::vector<std::size_t>& indices,
                              const std::vector<double>& grid, std::size_t folds,
                              std::uint64_t seed);

// Same protocol evaluated through one precomputed N x N Gram matrix; identical
// numbers to evaluate_selection whenever the dual route applies (r > fold
// size), at a fraction of the cost for repeated selections over one dataset.
// Keeps references to the dataset; the caller owns their lifetime.
class GramCache {
public:
    GramCache(const DenseMatrix& x, const std::vector<double>& y);

    EvalReport evaluate(const std::vector<std::size_t>& indices,
                        const std::vector<double>& grid, std::size_t folds,
                        std::uint64_t seed) const;

    const DenseMatrix& gram() const { return gram_; }

private:
    const DenseMatrix& x_;
    const std::vector<double>& y_;
    DenseMatrix gram_;
};

}  // namespace skmm
