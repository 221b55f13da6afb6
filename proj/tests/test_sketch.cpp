#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "skmm/kernels.hpp"
#include "skmm/rng.hpp"
#include "skmm/sketch.hpp"

using namespace skmm;

namespace {

DenseMatrix random_mat(std::size_t r, std::size_t c, Rng& rng) {
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_normal();
    return m;
}

}  // namespace

TEST_CASE("gaussian sketch shape, scale, determinism") {
    SketchOperator op = build_gaussian_sketch(300, 16, 9);
    CHECK(op.dense.size() == 300 * 16);
    SketchOperator op2 = build_gaussian_sketch(300, 16, 9);
    CHECK(op.dense == op2.dense);
    SketchOperator other = build_gaussian_sketch(300, 16, 10);
    CHECK(op.dense != other.dense);

    // Entries are N(0, 1/m): sample variance close to 1/16.
    double sumsq = 0.0;
    for (double v : op.dense) sumsq += v * v;
    const double var = sumsq / static_cast<double>(op.dense.size());
    CHECK(var == doctest::Approx(1.0 / 16.0).epsilon(0.05));

    DenseMatrix d = op.to_dense();
    CHECK(d.rows() == 300);
    CHECK(d.cols() == 16);
    CHECK(d(5, 3) == op.dense[5 * 16 + 3]);
}

TEST_CASE("sparse sign sketch structure") {
    SketchOperator op = build_sparse_sign_sketch(200, 16, 4, 5);
    CHECK(op.cols.size() == 200 * 4);
    CHECK(op.vals.size() == 200 * 4);
    const double mag = 1.0 / std::sqrt(4.0);
    for (std::size_t i = 0; i < 200; ++i) {
        std::set<std::uint32_t> uniq;
        for (std::size_t t = 0; t < 4; ++t) {
            const std::uint32_t c = op.cols[i * 4 + t];
            CHECK(c < 16);
            uniq.insert(c);
            CHECK(std::abs(op.vals[i * 4 + t]) == doctest::Approx(mag));
        }
        CHECK(uniq.size() == 4);
    }

    DenseMatrix dense = op.to_dense();
    std::size_t nonzeros = 0;
    for (std::size_t i = 0; i < dense.size(); ++i) nonzeros += dense.data()[i] != 0.0;
    CHECK(nonzeros == 200 * 4);

    // xi = m: every column occupied in every row.
    SketchOperator full = build_sparse_sign_sketch(50, 8, 8, 1);
    DenseMatrix fd = full.to_dense();
    for (std::size_t i = 0; i < fd.size(); ++i) CHECK(fd.data()[i] != 0.0);

    CHECK_THROWS_AS(build_sparse_sign_sketch(50, 8, 9, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_sparse_sign_sketch(50, 8, 0, 1), std::invalid_argument);
}

TEST_CASE("apply_sketch equals dense product") {
    Rng rng(2);
    DenseMatrix x = random_mat(40, 64, rng);

    SketchOperator g = build_gaussian_sketch(64, 8, 3);
    DenseMatrix got = apply_sketch(x, g);
    DenseMatrix want = apply_sketch(x, g.to_dense());
    CHECK(got == want);  // same code path: matmul against dense entries

    SketchOperator s = build_sparse_sign_sketch(64, 8, 3, 3);
    DenseMatrix got_s = apply_sketch(x, s);
    DenseMatrix dense_s = apply_sketch(x, s.to_dense());
    for (std::size_t i = 0; i < got_s.size(); ++i)
        CHECK(got_s.data()[i] == doctest::Approx(dense_s.data()[i]).epsilon(1e-12));
}

TEST_CASE("apply_sketch hand product") {
    DenseMatrix x(1, 2);
    x(0, 0) = 3;
    x(0, 1) = 1;
    DenseMatrix gamma(2, 2);
    gamma(0, 0) = 3; gamma(0, 1) = 2; gamma(1, 0) = 1; gamma(1, 1) = 2;
    DenseMatrix out = apply_sketch(x, gamma);
    CHECK(out(0, 0) == 10.0);
    CHECK(out(0, 1) == 8.0);

    DenseMatrix zero(3, 2);
    SketchOperator op = build_gaussian_sketch(2, 2, 0);
    DenseMatrix z = apply_sketch(zero, op);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z.data()[i] == 0.0);
}

TEST_CASE("apply_sketch linearity") {
    Rng rng(4);
    DenseMatrix a = random_mat(10, 32, rng);
    DenseMatrix b = random_mat(10, 32, rng);
    DenseMatrix sum(10, 32);
    for (std::size_t i = 0; i < sum.size(); ++i) sum.data()[i] = a.data()[i] + 2.0 * b.data()[i];
    SketchOperator op = build_sparse_sign_sketch(32, 6, 3, 8);
    DenseMatrix sa = apply_sketch(a, op);
    DenseMatrix sb = apply_sketch(b, op);
    DenseMatrix ss = apply_sketch(sum, op);
    for (std::size_t i = 0; i < ss.size(); ++i)
        CHECK(ss.data()[i] ==
              doctest::Approx(sa.data()[i] + 2.0 * sb.data()[i]).epsilon(1e-11));
}

TEST_CASE("blocked apply is bit-identical for any block size") {
    Rng rng(6);
    DenseMatrix x = random_mat(37, 48, rng);
    for (SketchKind kind : {SketchKind::gaussian, SketchKind::sparse_sign}) {
        SketchOperator op = kind == SketchKind::gaussian
                                ? build_gaussian_sketch(48, 8, 12)
                                : build_sparse_sign_sketch(48, 8, 5, 12);
        DenseMatrix ref = apply_sketch(x, op);
        for (std::size_t block : {std::size_t{1}, std::size_t{3}, std::size_t{16},
                                  std::size_t{256}}) {
            DenseMatrix out(37, 8);
            apply_sketch_blocked(x, op, block, out);
            CHECK(out == ref);
        }
    }
}

TEST_CASE("sketch isometry in expectation, light version") {
    // Full Monte-Carlo budget lives in the acceptance suite.
    Rng rng(14);
    std::vector<double> u(64);
    for (auto& v : u) v = rng.next_normal();
    double norm = 0.0;
    for (double v : u) norm += v * v;
    DenseMatrix urow(1, 64);
    for (std::size_t i = 0; i < 64; ++i) urow(0, i) = u[i];

    for (SketchKind kind : {SketchKind::gaussian, SketchKind::sparse_sign}) {
        double acc = 0.0;
        const int trials = 2000;
        for (int t = 0; t < trials; ++t) {
            SketchOperator op = kind == SketchKind::gaussian
                                    ? build_gaussian_sketch(64, 16, 1000 + t)
                                    : build_sparse_sign_sketch(64, 16, 8, 1000 + t);
            DenseMatrix s = apply_sketch(urow, op);
            acc += kernels::active().sumsq(s.row(0), 16);
        }
        const double ratio = acc / trials / norm;
        CHECK(ratio > 0.9);
        CHECK(ratio < 1.1);
    }
}
