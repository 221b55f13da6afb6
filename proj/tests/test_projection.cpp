#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "skmm/rng.hpp"
#include "skmm/selectors.hpp"

using namespace skmm;

namespace {

void check_feasible(const std::vector<double>& s, double cap, double tol = 1e-9) {
    double total = 0.0;
    for (double x : s) {
        CHECK(x >= -tol);
        CHECK(x <= cap + tol);
        total += x;
    }
    CHECK(std::abs(total - 1.0) <= tol);
}

}  // namespace

TEST_CASE("projection fixes nothing that is already feasible") {
    std::vector<double> v = {0.25, 0.1, 0.3, 0.2, 0.15};
    std::vector<double> s = project_capped_simplex(v, 0.4);
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(s[i] == doctest::Approx(v[i]).epsilon(1e-12));
}

TEST_CASE("projection hand values") {
    std::vector<double> s = project_capped_simplex({1.0, 0.0}, 0.5);
    CHECK(s[0] == doctest::Approx(0.5));
    CHECK(s[1] == doctest::Approx(0.5));

    // Uniform input stays uniform.
    std::vector<double> u = project_capped_simplex({7.0, 7.0, 7.0, 7.0}, 0.5);
    for (double x : u) CHECK(x == doctest::Approx(0.25));

    // n * cap == 1 forces the unique vertex.
    std::vector<double> vert = project_capped_simplex({9.0, -3.0, 0.2}, 1.0 / 3.0);
    for (double x : vert) CHECK(x == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("projection validations") {
    CHECK_THROWS_AS(project_capped_simplex({}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(project_capped_simplex({0.5, 0.5}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(project_capped_simplex({0.5, 0.5}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(project_capped_simplex({0.5, 0.5, 0.5}, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(
        project_capped_simplex({std::numeric_limits<double>::quiet_NaN(), 0.0}, 1.0),
        numeric_error);
    CHECK_THROWS_AS(
        project_capped_simplex({std::numeric_limits<double>::infinity(), 0.0}, 1.0),
        numeric_error);
}

TEST_CASE("projection matches the brute-force active-set oracle") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.next_below(5);  // up to 6
        const std::size_t budget = 1 + rng.next_below(n);
        const double cap = 1.0 / static_cast<double>(budget);
        std::vector<double> v(n);
        const double scale = std::pow(10.0, static_cast<double>(rng.next_below(5)) - 2.0);
        for (auto& x : v) x = rng.next_normal() * scale;
        if (trial % 7 == 0) v[0] = v[n - 1];  // inject ties
        std::vector<double> got = project_capped_simplex(v, cap);
        std::vector<double> want = oracle::project_capped_simplex_bruteforce(v, cap);
        REQUIRE(!want.empty());
        check_feasible(got, cap);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-8);
    }
}

TEST_CASE("projection output is always feasible on harsh inputs") {
    Rng rng(78);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.next_below(30);
        const std::size_t budget = 1 + rng.next_below(n);
        const double cap = 1.0 / static_cast<double>(budget);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.next_normal() * 1e6;
        // Coordinates at 1e6 scale leave ~1e-10 of cancellation noise per
        // entry; keep the feasibility budget proportional.
        check_feasible(project_capped_simplex(v, cap), cap, 1e-7);
    }
}

TEST_CASE("projection optimality at perturbed outputs") {
    // Projection is the closest feasible point: random feasible perturbations
    // must not be closer to v.
    Rng rng(79);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + rng.next_below(4);
        const double cap = 1.0 / static_cast<double>(1 + rng.next_below(n));
        std::vector<double> v(n);
        for (auto& x : v) x = rng.next_normal();
        std::vector<double> s = project_capped_simplex(v, cap);
        double base = 0.0;
        for (std::size_t i = 0; i < n; ++i) base += (s[i] - v[i]) * (s[i] - v[i]);
        for (int p = 0; p < 50; ++p) {
            std::vector<double> w(n);
            for (auto& x : w) x = rng.next_double();
            double total = 0.0;
            for (double x : w) total += x;
            bool feasible = true;
            for (auto& x : w) {
                x /= total;
                feasible = feasible && x <= cap;
            }
            if (!feasible) continue;
            double obj = 0.0;
            for (std::size_t i = 0; i < n; ++i) obj += (w[i] - v[i]) * (w[i] - v[i]);
            CHECK(obj >= base - 1e-10);
        }
    }
}
