#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skmm/matrix.hpp"
#include "skmm/moments.hpp"
#include "skmm/selectors.hpp"
#include "skmm/sketch.hpp"

namespace skmm {

struct MethodConfig {
    std::string name;  // uniform | skmm | herding | kcenter | adaptive |
                       // leverage | t_leverage | r_leverage
    std::size_t sketch_dim = 32;
    SketchKind sketch_kind = SketchKind::gaussian;
    std::size_t sketch_sparsity = 8;
    SkmmConfig skmm;
    std::size_t leverage_k = 32;
    double leverage_rho = 1e3;
};

struct BenchPlan {
    std::string dataset_path;
    std::string labels_path;
    std::vector<MethodConfig> methods;
    std::vector<std::size_t> budgets;    // strictly ascending
    std::vector<std::uint64_t> seeds;    // distinct
    std::vector<double> alpha_grid;      // empty -> default grid
    std::size_t folds = 2;
    std::string output_path;
};

BenchPlan parse_bench_plan(const std::string& json_text);

struct BenchCell {
    std::string method;
    std::size_t budget;
    std::size_t seed_count;
    double mean_risk;
    double std_risk;  // sample std over seeds; 0 for a single seed
};

// Runs every (method, budget, seed) cell, evaluating risk through a shared
// Gram cache; cell results are position-indexed, so the output is independent
// of the worker count.
std::vector<BenchCell> run_bench(const BenchPlan& plan, const DenseMatrix& x,
                                 const std::vector<double>& y, std::size_t jobs);

std::string bench_csv(const std::vector<BenchCell>& cells);

Selection run_selector(const MethodConfig& method, const DenseMatrix& x,
                       const DenseMatrix* sketched, const std::vector<double>* scores,
                       std::size_t budget, std::uint64_t seed);

}  // namespace skmm
