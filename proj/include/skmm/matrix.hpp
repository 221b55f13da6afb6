#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace skmm {

// Thrown when a computation leaves its numeric domain (indefinite matrix where
// SPD is required, diverged optimization, exhausted rejection sampling).
// Distinct from std::invalid_argument, which covers malformed inputs.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Dense row-major matrix of doubles. Contiguous storage, no alignment promises;
// kernels use unaligned loads.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    bool operator==(const DenseMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

    // New matrix holding the given rows, in the given order.
    DenseMatrix gather_rows(const std::vector<std::size_t>& idx) const {
        DenseMatrix out(idx.size(), cols_);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] >= rows_) throw std::invalid_argument("gather_rows: row index out of range");
            const double* src = row(idx[k]);
            double* dst = out.row(k);
            for (std::size_t j = 0; j < cols_; ++j) dst[j] = src[j];
        }
        return out;
    }

    DenseMatrix transposed() const {
        DenseMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace skmm
