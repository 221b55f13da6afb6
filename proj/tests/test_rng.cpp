#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "skmm/rng.hpp"

using namespace skmm;

TEST_CASE("rng determinism and substreams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng root(7);
    Rng s0 = root.substream(1, 0);
    Rng s1 = root.substream(1, 1);
    Rng t0 = root.substream(2, 0);
    CHECK(s0.next_u64() != s1.next_u64());
    CHECK(root.substream(1, 0).next_u64() == Rng(7).substream(1, 0).next_u64());
    CHECK(s0.next_u64() != t0.next_u64());

    // substream is const: deriving does not advance the parent.
    Rng p(9), q(9);
    (void)p.substream(5, 5);
    CHECK(p.next_u64() == q.next_u64());
}

TEST_CASE("uniform draws") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double d = rng.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.next_below(7)];
    for (int c : counts) {
        CHECK(c > 9500);
        CHECK(c < 10500);
    }
    CHECK(rng.next_below(1) == 0);
}

TEST_CASE("normal draws moments") {
    Rng rng(11);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.next_normal();
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("sample_indices_uniform") {
    Rng rng(17);
    std::vector<std::size_t> out;
    sample_indices_uniform(50, 10, rng, out);
    CHECK(out.size() == 10);
    std::set<std::size_t> uniq(out.begin(), out.end());
    CHECK(uniq.size() == 10);
    for (std::size_t i : out) CHECK(i < 50);

    sample_indices_uniform(6, 6, rng, out);
    std::sort(out.begin(), out.end());
    for (std::size_t i = 0; i < 6; ++i) CHECK(out[i] == i);

    // First draw is uniform over the population.
    std::vector<int> first(5, 0);
    for (std::uint64_t s = 0; s < 50000; ++s) {
        Rng r(s);
        sample_indices_uniform(5, 2, r, out);
        ++first[out[0]];
    }
    for (int c : first) {
        CHECK(c > 9500);
        CHECK(c < 10500);
    }
}
