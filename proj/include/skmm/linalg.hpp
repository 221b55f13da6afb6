#pragma once

#include <vector>

#include "skmm/matrix.hpp"

namespace skmm {

struct SymEig {
    // Columns are orthonormal eigenvectors, ordered to match `values`.
    DenseMatrix vectors;
    // Descending; ties keep the original block order.
    std::vector<double> values;
};

// Full eigendecomposition of a symmetric matrix: Householder tridiagonalization
// followed by implicit-shift QL with accumulated transforms. Deterministic; no
// symmetry check here (callers validate). Sign convention: in each eigenvector
// the largest-|entry| coordinate (first on ties) is nonnegative.
SymEig sym_eig(const DenseMatrix& a);

// Lower-triangular Cholesky factor of an SPD matrix, in place over a copy.
// Throws numeric_error on a non-positive pivot.
DenseMatrix cholesky_factor(const DenseMatrix& a);

// Solves A x = b with A SPD via Cholesky.
std::vector<double> cholesky_solve(const DenseMatrix& a, const std::vector<double>& b);

// Solves L L^T x = b given a precomputed factor.
std::vector<double> cholesky_solve_factored(const DenseMatrix& l, std::vector<double> b);

}  // namespace skmm
