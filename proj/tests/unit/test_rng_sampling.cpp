#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tdsim/exp/stats.hpp"
#include "tdsim/rng.hpp"
#include "tdsim/sampling.hpp"

using namespace tdsim;

TEST_CASE("identical seeds give identical draws", "[rng]") {
    auto a = seed_rng(42);
    auto b = seed_rng(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.uniform() == b.uniform());
}

TEST_CASE("different seeds diverge within 100 draws", "[rng]") {
    auto a = seed_rng(42);
    auto b = seed_rng(43);
    bool differ = false;
    for (int i = 0; i < 100 && !differ; ++i) differ = a.uniform() != b.uniform();
    REQUIRE(differ);
}

TEST_CASE("uniform draws stay in [0,1)", "[rng]") {
    auto rng = seed_rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("forked streams ignore parent consumption", "[rng]") {
    auto a = seed_rng(11);
    auto b = seed_rng(11);
    (void)a.uniform();
    auto fa = a.fork(3);
    auto fb = b.fork(3);
    REQUIRE(fa.uniform() == fb.uniform());
    REQUIRE(a.fork(3).uniform() != a.fork(4).uniform());
}

TEST_CASE("hashed_uniform is a pure function of its key", "[rng]") {
    REQUIRE(hashed_uniform(5, 10, 20) == hashed_uniform(5, 10, 20));
    REQUIRE(hashed_uniform(5, 10, 20) != hashed_uniform(5, 10, 21));
    REQUIRE(hashed_uniform(5, 10, 20) >= 0.0);
    REQUIRE(hashed_uniform(5, 10, 20) < 1.0);
}

TEST_CASE("uniform_int covers [0,n) without bias artifacts", "[rng]") {
    auto rng = seed_rng(99);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_int(7)];
    for (int c : counts) {
        REQUIRE(c > 9000);
        REQUIRE(c < 11000);
    }
}

TEST_CASE("degenerate activity bounds return the constant", "[sampling]") {
    auto rng = seed_rng(1);
    REQUIRE(sample_activity(rng, 2.85, 0.4, 0.4) == 0.4);
}

TEST_CASE("activity draws respect bounds", "[sampling]") {
    auto rng = seed_rng(2);
    for (int i = 0; i < 10000; ++i) {
        const double a = sample_activity(rng, 2.85, 0.1, 100.0);
        REQUIRE(a >= 0.1);
        REQUIRE(a <= 100.0);
    }
}

TEST_CASE("invalid activity bounds are rejected", "[sampling]") {
    auto rng = seed_rng(3);
    REQUIRE_THROWS_AS(sample_activity(rng, 2.85, 0.0, 1.0), ParamError);
    REQUIRE_THROWS_AS(sample_activity(rng, 2.85, 2.0, 1.0), ParamError);
    REQUIRE_THROWS_AS(sample_activity(rng, 1.0, 0.1, 1.0), ParamError);
}

// CCDF of a power law with density ~ a^-2.85 falls with log-log slope
// -(gamma - 1) = -1.85 away from the bounds.
TEST_CASE("activity CCDF has slope gamma minus one", "[sampling]") {
    auto rng = seed_rng(2024);
    const int n = 1'000'000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = sample_activity(rng, 2.85, 0.1, 100.0);
    std::sort(draws.begin(), draws.end());

    std::vector<double> xs, ys;
    for (int i = 0; i < 40; ++i) {
        const double x = 0.2 * std::pow(3.0 / 0.2, i / 39.0);
        const auto it = std::lower_bound(draws.begin(), draws.end(), x);
        const double ccdf = static_cast<double>(draws.end() - it) / n;
        xs.push_back(x);
        ys.push_back(ccdf);
    }
    const auto [slope, se] = exp::loglog_slope(xs, ys);
    (void)se;
    REQUIRE(slope == Catch::Approx(-1.85).margin(0.05));
}

TEST_CASE("appeal is right-skewed on (0,1]", "[sampling]") {
    auto rng = seed_rng(5);
    const int n = 200000;
    double sum = 0.0;
    int below_half = 0;
    for (int i = 0; i < n; ++i) {
        const double a = sample_appeal(rng);
        REQUIRE(a > 0.0);
        REQUIRE(a <= 1.0);
        sum += a;
        if (a < 0.5) ++below_half;
    }
    // Density 2(1-x): mean 1/3, P(X < 1/2) = 3/4.
    REQUIRE(sum / n == Catch::Approx(1.0 / 3.0).margin(0.01));
    REQUIRE(static_cast<double>(below_half) / n == Catch::Approx(0.75).margin(0.01));
}
