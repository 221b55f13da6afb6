#include "skmm/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "skmm/kernels.hpp"
#include "skmm/rng.hpp"

namespace skmm {
namespace {

constexpr std::uint64_t kSketchRowTag = 0x534b4554ULL;  // substream namespace

void validate_dims(std::size_t rows, std::size_t target_dim) {
    if (rows == 0 || target_dim == 0)
        throw std::invalid_argument("sketch: dimensions must be positive");
}

}  // namespace

DenseMatrix SketchOperator::to_dense() const {
    DenseMatrix out(rows, target_dim);
    if (kind == SketchKind::gaussian) {
        std::memcpy(out.data(), dense.data(), dense.size() * sizeof(double));
    } else {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t t = 0; t < sparsity; ++t)
                out(i, cols[i * sparsity + t]) = vals[i * sparsity + t];
    }
    return out;
}

SketchOperator build_gaussian_sketch(std::size_t rows, std::size_t target_dim,
                                     std::uint64_t seed) {
    validate_dims(rows, target_dim);
    SketchOperator op;
    op.kind = SketchKind::gaussian;
    op.rows = rows;
    op.target_dim = target_dim;
    op.seed = seed;
    op.dense.resize(rows * target_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(target_dim));
    Rng root(seed);
    for (std::size_t i = 0; i < rows; ++i) {
        Rng row_rng = root.substream(kSketchRowTag, i);
        double* row = op.dense.data() + i * target_dim;
        for (std::size_t j = 0; j < target_dim; ++j) row[j] = scale * row_rng.next_normal();
    }
    return op;
}

SketchOperator build_sparse_sign_sketch(std::size_t rows, std::size_t target_dim,
                                        std::size_t sparsity, std::uint64_t seed) {
    validate_dims(rows, target_dim);
    if (sparsity < 1 || sparsity > target_dim)
        throw std::invalid_argument("sparse sketch: sparsity must be in [1, target_dim]");
    SketchOperator op;
    op.kind = SketchKind::sparse_sign;
    op.rows = rows;
    op.target_dim = target_dim;
    op.seed = seed;
    op.sparsity = sparsity;
    op.cols.resize(rows * sparsity);
    op.vals.resize(rows * sparsity);
    const double mag = 1.0 / std::sqrt(static_cast<double>(sparsity));
    Rng root(seed);
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < rows; ++i) {
        Rng row_rng = root.substream(kSketchRowTag, i);
        sample_indices_uniform(target_dim, sparsity, row_rng, picked);
        for (std::size_t t = 0; t < sparsity; ++t) {
            op.cols[i * sparsity + t] = static_cast<std::uint32_t>(picked[t]);
            op.vals[i * sparsity + t] = (row_rng.next_u64() & 1ULL) ? mag : -mag;
        }
    }
    return op;
}

DenseMatrix apply_sketch(const DenseMatrix& input, const DenseMatrix& gamma) {
    if (input.cols() != gamma.rows())
        throw std::invalid_argument("apply_sketch: inner dimensions disagree");
    DenseMatrix out(input.rows(), gamma.cols());
    kernels::active().matmul(input.data(), gamma.data(), out.data(), input.rows(),
                             input.cols(), gamma.cols());
    return out;
}

DenseMatrix apply_sketch(const DenseMatrix& input, const SketchOperator& op) {
    DenseMatrix out(input.rows(), op.target_dim);
    apply_sketch_blocked(input, op, input.rows() == 0 ? 1 : input.rows(), out);
    return out;
}

void apply_sketch_blocked(const DenseMatrix& input, const SketchOperator& op,
                          std::size_t block_rows, DenseMatrix& out) {
    if (input.cols() != op.rows)
        throw std::invalid_argument("apply_sketch: input width must equal operator rows");
    if (block_rows == 0) throw std::invalid_argument("apply_sketch: block_rows must be positive");
    if (out.rows() != input.rows() || out.cols() != op.target_dim)
        throw std::invalid_argument("apply_sketch: output shape mismatch");

    const auto& k = kernels::active();
    const std::size_t n = input.rows();
    const std::size_t r = op.rows;
    const std::size_t m = op.target_dim;
    for (std::size_t start = 0; start < n; start += block_rows) {
        const std::size_t count = std::min(block_rows, n - start);
        if (op.kind == SketchKind::gaussian) {
            k.matmul(input.row(start), op.dense.data(), out.row(start), count, r, m);
        } else {
            std::memset(out.row(start), 0, count * m * sizeof(double));
            for (std::size_t b = 0; b < count; ++b) {
                const double* grow = input.row(start + b);
                double* orow = out.row(start + b);
                for (std::size_t i = 0; i < r; ++i) {
                    const double g = grow[i];
                    if (g == 0.0) continue;
                    const std::uint32_t* ci = op.cols.data() + i * op.sparsity;
                    const double* vi = op.vals.data() + i * op.sparsity;
                    for (std::size_t t = 0; t < op.sparsity; ++t) orow[ci[t]] += g * vi[t];
                }
            }
        }
    }
}

}  // namespace skmm
