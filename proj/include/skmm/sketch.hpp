#pragma once

#include <cstdint>
#include <vector>

#include "skmm/matrix.hpp"

namespace skmm {

enum class SketchKind { gaussian, sparse_sign };

// Seed-addressed random embedding Gamma (rows x target_dim) applied from the
// right: sketched = input * Gamma. Both kinds are normalized so that
// E||Gamma^T u||^2 = ||u||^2. Generation draws an independent substream per
// operator row, so any row blocking reproduces identical entries.
struct SketchOperator {
    SketchKind kind = SketchKind::gaussian;
    std::size_t rows = 0;        // input dimension r
    std::size_t target_dim = 0;  // sketch dimension m
    std::uint64_t seed = 0;
    std::size_t sparsity = 0;  // xi, nonzeros per row (sparse_sign only)

    // gaussian: dense entries, rows x target_dim.
    std::vector<double> dense;
    // sparse_sign: per row, `sparsity` distinct column indices and values
    // +-1/sqrt(xi), flattened.
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;

    DenseMatrix to_dense() const;
};

// Entries i.i.d. N(0, 1/m).
SketchOperator build_gaussian_sketch(std::size_t rows, std::size_t target_dim,
                                     std::uint64_t seed);

// Exactly `sparsity` nonzeros per row at distinct columns, values +-1/sqrt(xi).
SketchOperator build_sparse_sign_sketch(std::size_t rows, std::size_t target_dim,
                                        std::size_t sparsity, std::uint64_t seed);

// sketched (n x m) = input (n x r) * Gamma (r x m).
DenseMatrix apply_sketch(const DenseMatrix& input, const SketchOperator& op);

// Same product with an explicitly provided dense embedding (fixture path).
DenseMatrix apply_sketch(const DenseMatrix& input, const DenseMatrix& gamma);

// Streaming form: processes `input` in row blocks of `block_rows`, writing into
// `out` (n x m, preallocated). Bit-identical to the one-shot apply for any
// block size; accumulation order within a row is fixed.
void apply_sketch_blocked(const DenseMatrix& input, const SketchOperator& op,
                          std::size_t block_rows, DenseMatrix& out);

}  // namespace skmm
