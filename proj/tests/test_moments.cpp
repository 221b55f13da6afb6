#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "skmm/moments.hpp"
#include "skmm/rng.hpp"

using namespace skmm;

namespace {

DenseMatrix random_mat(std::size_t r, std::size_t c, Rng& rng) {
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_normal();
    return m;
}

MomentMatrix moment_from(const DenseMatrix& entries, std::size_t count = 1) {
    MomentMatrix m;
    m.entries = entries;
    m.sample_count = count;
    return m;
}

MomentMatrix random_psd_moment(std::size_t d, std::size_t rank, Rng& rng) {
    DenseMatrix x = random_mat(rank, d, rng);
    return second_moment(x);
}

std::size_t definitional_intrinsic_dim(const DenseMatrix& entries, std::size_t population) {
    oracle::EigResult eig = oracle::jacobi_eig(entries);
    double trace = 0.0;
    for (double v : eig.values) trace += std::max(v, 0.0);
    if (trace <= 0.0) return 0;
    const double budget = trace / static_cast<double>(population);
    for (std::size_t t = 1; t <= eig.values.size(); ++t) {
        double tail = 0.0;
        for (std::size_t j = t; j < eig.values.size(); ++j) tail += std::max(eig.values[j], 0.0);
        if (tail <= budget) return t;
    }
    return eig.values.size();
}

}  // namespace

TEST_CASE("second_moment hand values") {
    MomentMatrix id = second_moment(DenseMatrix::identity(2));
    CHECK(id.sample_count == 2);
    CHECK(id.dim() == 2);
    CHECK(id.entries(0, 0) == 0.5);
    CHECK(id.entries(0, 1) == 0.0);
    CHECK(id.entries(1, 1) == 0.5);

    DenseMatrix h(2, 2);
    h(0, 0) = 1; h(0, 1) = 1; h(1, 0) = 1; h(1, 1) = -1;
    MomentMatrix mh = second_moment(h);
    CHECK(mh.entries(0, 0) == doctest::Approx(1.0));
    CHECK(mh.entries(0, 1) == doctest::Approx(0.0));
    CHECK(mh.entries(1, 1) == doctest::Approx(1.0));

    CHECK_THROWS_AS(second_moment(DenseMatrix()), std::invalid_argument);
}

TEST_CASE("spectral_decomposition behavior") {
    DenseMatrix d3(3, 3);
    d3(0, 0) = 1; d3(1, 1) = 3; d3(2, 2) = 2;
    SpectralDecomposition spec = spectral_decomposition(moment_from(d3));
    CHECK(spec.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(spec.eigenvalues[1] == doctest::Approx(2.0));
    CHECK(spec.eigenvalues[2] == doctest::Approx(1.0));
    CHECK(std::abs(spec.eigenvectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(spec.eigenvectors(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(spec.eigenvectors(0, 2)) == doctest::Approx(1.0));

    DenseMatrix asym(2, 2);
    asym(0, 0) = 1; asym(0, 1) = 0.5; asym(1, 0) = 0.2; asym(1, 1) = 1;
    CHECK_THROWS_AS(spectral_decomposition(moment_from(asym)), std::invalid_argument);

    DenseMatrix indef(2, 2);
    indef(0, 0) = 1; indef(1, 1) = -1;
    CHECK_THROWS_AS(spectral_decomposition(moment_from(indef)), numeric_error);

    // Tiny negatives inside the clamp band become exact zeros.
    DenseMatrix near(2, 2);
    near(0, 0) = 1.0; near(1, 1) = -1e-9;
    SpectralDecomposition cl = spectral_decomposition(moment_from(near));
    CHECK(cl.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(cl.eigenvalues[1] == 0.0);
}

TEST_CASE("intrinsic_dimension hand values") {
    CHECK(intrinsic_dimension(moment_from(DenseMatrix::identity(4)), 4) == 3);
    CHECK(intrinsic_dimension(moment_from(DenseMatrix(3, 3)), 10) == 0);
    // Dominant direction: tail after rank 1 is tiny.
    DenseMatrix d(3, 3);
    d(0, 0) = 100.0; d(1, 1) = 1e-9; d(2, 2) = 1e-9;
    CHECK(intrinsic_dimension(moment_from(d), 50) == 1);
    CHECK_THROWS_AS(intrinsic_dimension(moment_from(d), 0), std::invalid_argument);
}

TEST_CASE("intrinsic_dimension matches the definitional computation") {
    Rng rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + rng.next_below(10);
        const std::size_t rank = 1 + rng.next_below(d + 2);
        const std::size_t population = 2 + rng.next_below(999);
        MomentMatrix m = random_psd_moment(d, rank, rng);
        CHECK(intrinsic_dimension(m, population) ==
              definitional_intrinsic_dim(m.entries, population));
    }
}

TEST_CASE("leverage hand values") {
    // Orthogonal rows all have unit plain leverage.
    DenseMatrix ortho(3, 5);
    ortho(0, 0) = 2.0;
    ortho(1, 1) = 5.0;
    ortho(2, 2) = 0.1;
    std::vector<double> s = leverage_scores(ortho, LeverageVariant::plain);
    for (double v : s) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

    DenseMatrix col(2, 1);
    col(0, 0) = 1.0;
    col(1, 0) = 2.0;
    std::vector<double> sc = leverage_scores(col, LeverageVariant::plain);
    CHECK(sc[0] == doctest::Approx(0.2));
    CHECK(sc[1] == doctest::Approx(0.8));

    // Plain scores sum to the rank.
    Rng rng(5);
    DenseMatrix x = random_mat(12, 4, rng);
    std::vector<double> sr = leverage_scores(x, LeverageVariant::plain);
    double total = 0.0;
    for (double v : sr) total += v;
    CHECK(total == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("leverage gram and covariance routes agree") {
    Rng rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        DenseMatrix x = random_mat(12, 30, rng);  // n < d
        for (LeverageVariant variant :
             {LeverageVariant::plain, LeverageVariant::truncated, LeverageVariant::ridge}) {
            std::optional<std::size_t> k;
            std::optional<double> rho;
            if (variant == LeverageVariant::truncated) k = 5;
            if (variant == LeverageVariant::ridge) rho = 0.37;
            std::vector<double> via_gram =
                leverage_scores(x, variant, k, rho, LeverageRoute::gram);
            std::vector<double> via_cov =
                leverage_scores(x, variant, k, rho, LeverageRoute::covariance);
            for (std::size_t i = 0; i < via_gram.size(); ++i)
                CHECK(via_gram[i] == doctest::Approx(via_cov[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("ridge leverage is monotone in rho") {
    Rng rng(13);
    DenseMatrix x = random_mat(10, 6, rng);
    std::vector<double> prev = leverage_scores(x, LeverageVariant::ridge, std::nullopt, 0.1);
    for (double rho : {1.0, 10.0, 100.0}) {
        std::vector<double> cur = leverage_scores(x, LeverageVariant::ridge, std::nullopt, rho);
        for (std::size_t i = 0; i < cur.size(); ++i) CHECK(cur[i] <= prev[i] + 1e-12);
        prev = cur;
    }
}

TEST_CASE("leverage validations") {
    Rng rng(2);
    DenseMatrix x = random_mat(6, 3, rng);
    CHECK_THROWS_AS(leverage_scores(x, LeverageVariant::truncated), std::invalid_argument);
    CHECK_THROWS_AS(leverage_scores(x, LeverageVariant::truncated, 9), std::invalid_argument);
    CHECK_THROWS_AS(leverage_scores(x, LeverageVariant::ridge), std::invalid_argument);
    CHECK_THROWS_AS(leverage_scores(x, LeverageVariant::ridge, std::nullopt, -1.0),
                    std::invalid_argument);
}

TEST_CASE("trace_ratio hand values") {
    Rng rng(31);
    DenseMatrix x = random_mat(20, 6, rng);
    MomentMatrix full = second_moment(x);
    TraceRatio same = trace_ratio(full, full);
    CHECK(same.trace == doctest::Approx(6.0).epsilon(1e-8));
    CHECK(same.spectral == doctest::Approx(1.0).epsilon(1e-8));

    DenseMatrix f(2, 2), s(2, 2);
    f(0, 0) = 2.0;
    s(0, 0) = 1.0; s(1, 1) = 5.0;
    TraceRatio t = trace_ratio(moment_from(f), moment_from(s));
    CHECK(t.trace == doctest::Approx(2.0));
    CHECK(t.spectral == doctest::Approx(2.0));

    // keep = min(k, effective rank)
    DenseMatrix sub(2, 2);
    sub(0, 0) = 1.0;
    TraceRatio capped = trace_ratio(moment_from(DenseMatrix::identity(2)), moment_from(sub), 2);
    CHECK(capped.trace == doctest::Approx(1.0));
    CHECK(capped.spectral == doctest::Approx(1.0));

    TraceRatio zero = trace_ratio(moment_from(f), moment_from(DenseMatrix(2, 2)));
    CHECK(zero.trace == 0.0);
    CHECK(zero.spectral == 0.0);

    CHECK_THROWS_AS(trace_ratio(moment_from(f), moment_from(DenseMatrix(3, 3))),
                    std::invalid_argument);
    CHECK_THROWS_AS(trace_ratio(moment_from(f), moment_from(s), 0), std::invalid_argument);
    CHECK_THROWS_AS(trace_ratio(moment_from(f), moment_from(s), 3), std::invalid_argument);
}

TEST_CASE("trace_ratio matches a direct pseudoinverse oracle") {
    Rng rng(44);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t d = 3 + rng.next_below(5);
        MomentMatrix full = random_psd_moment(d, d + 2, rng);
        MomentMatrix sub = random_psd_moment(d, 1 + rng.next_below(d + 1), rng);

        oracle::EigResult eig = oracle::jacobi_eig(sub.entries);
        const double cutoff = kPinvCutoff * std::max(eig.values[0], 0.0);
        DenseMatrix pinv(d, d);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                    if (eig.values[j] > cutoff)
                        acc += eig.vectors(a, j) * eig.vectors(b, j) / eig.values[j];
                pinv(a, b) = acc;
            }
        DenseMatrix b(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < d; ++k) acc += full.entries(i, k) * pinv(k, j);
                b(i, j) = acc;
            }
        double trace = 0.0;
        for (std::size_t i = 0; i < d; ++i) trace += b(i, i);
        DenseMatrix btb(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < d; ++k) acc += b(k, i) * b(k, j);
                btb(i, j) = acc;
            }
        const double sigma = std::sqrt(std::max(oracle::jacobi_eig(btb).values[0], 0.0));

        TraceRatio got = trace_ratio(full, sub);
        CHECK(got.trace == doctest::Approx(trace).epsilon(1e-8));
        CHECK(got.spectral == doctest::Approx(sigma).epsilon(1e-8));
    }
}
