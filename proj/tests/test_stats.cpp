#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "z2hc/rng.hpp"
#include "z2hc/stats.hpp"

using namespace z2hc;

namespace {

// Closed-form one-sided tail of Student's t with 3 degrees of freedom,
// an independent check on the betai-based tail used by spearman_trend.
double t3_tail(double t) {
    double u = t / std::sqrt(3.0);
    return 1.0 - (0.5 + (std::atan(u) + u / (1.0 + u * u)) / M_PI);
}

} // namespace

TEST_CASE("ols recovers exact lines") {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
        x.push_back(i);
        y.push_back(2.5 * i - 1.0);
    }
    OlsFit fit = ols_fit(x, y);
    REQUIRE(fit.slope == Catch::Approx(2.5).epsilon(1e-13));
    REQUIRE(fit.intercept == Catch::Approx(-1.0).epsilon(1e-12));
    REQUIRE(fit.rss <= 1e-20);
    REQUIRE(fit.n == 10);
}

TEST_CASE("ols matches a hand-worked example") {
    OlsFit fit = ols_fit({1, 2, 3}, {1, 3, 2});
    REQUIRE(fit.slope == Catch::Approx(0.5).epsilon(1e-14));
    REQUIRE(fit.intercept == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(fit.rss == Catch::Approx(1.5).epsilon(1e-13));

    REQUIRE_THROWS_AS(ols_fit({1, 2}, {1, 2, 3}), invalid_argument);
    REQUIRE_THROWS_AS(ols_fit({1}, {1}), invalid_argument);
    REQUIRE_THROWS_AS(ols_fit({2, 2, 2}, {1, 2, 3}), invalid_argument);
}

TEST_CASE("incomplete beta identities") {
    for (double x : {0.05, 0.2, 0.5, 0.8, 0.95}) {
        REQUIRE(betai(1.0, 1.0, x) == Catch::Approx(x).epsilon(1e-12));
        REQUIRE(betai(2.0, 1.0, x) == Catch::Approx(x * x).epsilon(1e-11));
        REQUIRE(betai(1.0, 3.0, x) ==
                Catch::Approx(1.0 - (1 - x) * (1 - x) * (1 - x)).epsilon(1e-11));
        REQUIRE(betai(0.5, 0.5, x) ==
                Catch::Approx(2.0 / M_PI * std::asin(std::sqrt(x))).epsilon(1e-10));
    }

    // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        double a = 0.2 + 5.0 * rng.next_double();
        double b = 0.2 + 5.0 * rng.next_double();
        double x = 0.02 + 0.96 * rng.next_double();
        REQUIRE(betai(a, b, x) == Catch::Approx(1.0 - betai(b, a, 1.0 - x)).margin(1e-12));
    }

    REQUIRE(betai(2.0, 3.0, 0.0) == 0.0);
    REQUIRE(betai(2.0, 3.0, -0.5) == 0.0);
    REQUIRE(betai(2.0, 3.0, 1.0) == 1.0);
    REQUIRE(betai(2.0, 3.0, 1.5) == 1.0);
    REQUIRE_THROWS_AS(betai(0.0, 1.0, 0.5), invalid_argument);
    REQUIRE_THROWS_AS(betai(1.0, -2.0, 0.5), invalid_argument);
}

TEST_CASE("average ranks with ties") {
    REQUIRE(average_ranks({10, 20, 20, 30}) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
    REQUIRE(average_ranks({5, 5, 5}) == std::vector<double>{2.0, 2.0, 2.0});
    REQUIRE(average_ranks({3, 1, 2}) == std::vector<double>{3.0, 1.0, 2.0});
    REQUIRE(average_ranks({7}) == std::vector<double>{1.0});
    REQUIRE(average_ranks({1, 2, 2, 2, 9}) == std::vector<double>{1.0, 3.0, 3.0, 3.0, 5.0});
}

TEST_CASE("spearman trend endpoints") {
    std::vector<double> x{1, 2, 3, 4, 5, 6};
    std::vector<double> up{2, 4, 9, 16, 25, 36};
    SpearmanResult pos = spearman_trend(x, up);
    REQUIRE(pos.rho == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(pos.p_one_sided == 0.0);

    std::vector<double> down{36, 25, 16, 9, 4, 2};
    SpearmanResult neg = spearman_trend(x, down);
    REQUIRE(neg.rho == Catch::Approx(-1.0).epsilon(1e-14));
    REQUIRE(neg.p_one_sided == 1.0);

    // Tied but still perfectly concordant ranks.
    SpearmanResult tied = spearman_trend({1, 1, 2, 3, 4}, {2, 2, 3, 4, 5});
    REQUIRE(tied.rho == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(tied.p_one_sided == 0.0);

    REQUIRE_THROWS_AS(spearman_trend({1, 2, 3}, {1, 2, 3}), invalid_argument);
    REQUIRE_THROWS_AS(spearman_trend({1, 2, 3, 4}, {1, 2, 3}), invalid_argument);
    REQUIRE_THROWS_AS(spearman_trend({2, 2, 2, 2}, {1, 2, 3, 4}), invalid_argument);
}

TEST_CASE("spearman p-value agrees with the t3 closed form") {
    // One transposition in five points: rho = 0.9, nu = 3.
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y{1, 2, 4, 3, 5};
    SpearmanResult r = spearman_trend(x, y);
    REQUIRE(r.rho == Catch::Approx(0.9).epsilon(1e-13));
    double t = 0.9 * std::sqrt(3.0 / (1.0 - 0.81));
    REQUIRE(r.p_one_sided == Catch::Approx(t3_tail(t)).margin(1e-10));
    REQUIRE(r.p_one_sided > 0.012);
    REQUIRE(r.p_one_sided < 0.028);

    // Anticorrelated variant: p reflects to the upper side.
    std::vector<double> yr{5, 4, 2, 3, 1};
    SpearmanResult rr = spearman_trend(x, yr);
    REQUIRE(rr.rho == Catch::Approx(-0.9).epsilon(1e-13));
    REQUIRE(rr.p_one_sided == Catch::Approx(1.0 - t3_tail(t)).margin(1e-10));
}

TEST_CASE("mean and standard error") {
    std::vector<double> v{1, 2, 3, 4};
    REQUIRE(mean_of(v) == Catch::Approx(2.5).epsilon(1e-15));
    REQUIRE(stderr_of(v) == Catch::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-13));
    REQUIRE_THROWS_AS(mean_of({}), invalid_argument);
    REQUIRE_THROWS_AS(stderr_of({1.0}), invalid_argument);
}
