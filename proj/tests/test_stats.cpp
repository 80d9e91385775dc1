#include "doctest.h"
#include "fwave/core.hpp"
#include "fwave/stats.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace fwave;

TEST_CASE("mann-whitney exact branch matches exhaustive enumeration") {
    // scipy.stats.mannwhitneyu(method='exact'), cross-checked against a
    // direct walk over all C(7,3) label assignments.
    std::vector<double> a{1.2, 3.4, 2.2};
    std::vector<double> b{4.5, 0.1, 5.5, 2.0};
    CHECK(mann_whitney(a, b) == doctest::Approx(0.8571428571428571).epsilon(1e-12));

    // all C(6,3) assignments put |U - mu| >= 4.5 in exactly 2 of 20 cases
    CHECK(mann_whitney({1, 2, 3}, {4, 5, 6}) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("mann-whitney on identical samples sits at its mean") {
    std::vector<double> a{1.0, 2.0, 3.0};
    CHECK(mann_whitney(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mann-whitney exact branch handles ties") {
    // exhaustive permutation over the multiset {1,2,2,2,3,4}: 6 of 20
    // assignments are at least as extreme as U = 1
    CHECK(mann_whitney({1.0, 2.0, 2.0}, {2.0, 3.0, 4.0}) ==
          doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("mann-whitney approximation matches the tie-corrected reference") {
    std::vector<double> c{3.1, 4.2, 1.0, 5.5, 2.2, 3.3, 4.4, 2.0,
                          6.1, 3.7, 2.9, 4.0, 5.2, 1.8, 3.5};
    std::vector<double> d{4.9, 5.8, 6.2, 3.9, 7.0, 5.1, 4.7, 6.6, 5.5, 4.3, 6.0, 5.9};
    // scipy.stats.mannwhitneyu(method='asymptotic', use_continuity=True)
    CHECK(mann_whitney(c, d) == doctest::Approx(0.0012776114123075597).epsilon(1e-12));
}

TEST_CASE("mann-whitney is symmetric in its arguments") {
    std::vector<double> a{0.3, 1.9, 2.8, 0.7, 1.1};
    std::vector<double> b{2.2, 3.1, 0.9, 4.0, 2.7, 3.3};
    CHECK(mann_whitney(a, b) == mann_whitney(b, a));
    std::vector<double> big_a(20), big_b(25);
    for (std::size_t i = 0; i < big_a.size(); ++i) big_a[i] = std::sin(0.7 * static_cast<double>(i));
    for (std::size_t i = 0; i < big_b.size(); ++i) big_b[i] = std::cos(0.3 * static_cast<double>(i)) + 0.2;
    CHECK(mann_whitney(big_a, big_b) == mann_whitney(big_b, big_a));
}

TEST_CASE("mann-whitney degenerates to 1 when every value ties") {
    std::vector<double> a(6, 5.0), b(6, 5.0);
    CHECK(mann_whitney(a, b) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pooled t-test matches the reference value") {
    std::vector<double> g1{2.1, 3.5, 1.8, 4.2, 2.9, 3.3, 2.5};
    std::vector<double> g2{1.0, 5.9, 0.5, 6.3, 2.2, 4.8};
    // scipy.stats.ttest_ind(equal_var=True)
    CHECK(t_test(g1, g2) == doctest::Approx(0.59783317311559625).epsilon(1e-12));
    CHECK(t_test(g1, g2) == t_test(g2, g1));
}

TEST_CASE("t-test detects a five-sigma separation") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss;
    std::vector<double> a(50), b(50);
    for (double& v : a) v = gauss(rng);
    for (double& v : b) v = gauss(rng) + 5.0;
    CHECK(t_test(a, b) < 1e-6);
}

TEST_CASE("levene matches the reference value") {
    std::vector<double> g1{2.1, 3.5, 1.8, 4.2, 2.9, 3.3, 2.5};
    std::vector<double> g2{1.0, 5.9, 0.5, 6.3, 2.2, 4.8};
    // scipy.stats.levene(center='mean')
    CHECK(levene({g1, g2}) == doctest::Approx(0.00066138439536157073).epsilon(1e-12));
    CHECK(levene({g1, g2}) == levene({g2, g1}));
    CHECK(levene({g1, g1}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fisher exact matches the reference values") {
    CHECK(fisher_exact({{{79, 24}, {37, 11}}}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fisher_exact({{{10, 2}, {3, 9}}}) ==
          doctest::Approx(0.012278137799742322).epsilon(1e-12));
    // two extreme tables out of C(10,5) = 252 equally likely ones
    CHECK(fisher_exact({{{5, 0}, {0, 5}}}) == doctest::Approx(2.0 / 252.0).epsilon(1e-12));
}

TEST_CASE("fisher exact is invariant to swapping the rows") {
    CHECK(fisher_exact({{{10, 2}, {3, 9}}}) == fisher_exact({{{3, 9}, {10, 2}}}));
    CHECK_THROWS_AS(fisher_exact({{{-1, 2}, {3, 4}}}), Error);
}

TEST_CASE("normality statistic matches the reference value") {
    std::vector<double> x{1.2, -0.4, 0.8, 2.1, -1.3, 0.3, 0.9, -0.7, 1.6, 0.1};
    // numpy: max deviation between the empirical CDF and the fitted normal CDF
    CHECK(lilliefors_statistic(x) == doctest::Approx(0.12537375542549967).epsilon(1e-12));
}

TEST_CASE("normality p-value is deterministic and location-scale free") {
    std::vector<double> x{1.2, -0.4, 0.8, 2.1, -1.3, 0.3, 0.9, -0.7, 1.6, 0.1};
    const double p1 = lilliefors(x);
    const double p2 = lilliefors(x);
    CHECK(p1 == p2);
    CHECK(p1 > 0.0);
    CHECK(p1 <= 1.0);

    auto scaled = x;
    for (double& v : scaled) v = 3.5 * v - 2.0;
    CHECK(lilliefors(scaled) == p1);
}

TEST_CASE("normality test accepts normal draws at the nominal rate") {
    std::mt19937_64 rng(123);
    std::normal_distribution<double> gauss;
    int reject = 0;
    const int repeats = 100;
    for (int r = 0; r < repeats; ++r) {
        std::vector<double> x(30);
        for (double& v : x) v = gauss(rng);
        if (lilliefors(x) < 0.05) ++reject;
    }
    const double rate = static_cast<double>(reject) / repeats;
    CHECK(rate >= 0.0);
    CHECK(rate <= 0.12);
}

TEST_CASE("normality test rejects an exponential sample") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(1e-12, 1.0);
    std::vector<double> x(100);
    for (double& v : x) v = -std::log(unif(rng));
    CHECK(lilliefors(x) < 0.01);
}

TEST_CASE("statistical tests reject undersized samples") {
    std::vector<double> three{1.0, 2.0, 3.0};
    std::vector<double> one{1.0};
    CHECK_THROWS_AS(lilliefors(three), Error);
    CHECK_THROWS_AS(t_test(one, three), Error);
    CHECK_THROWS_AS(mann_whitney(one, three), Error);
    CHECK_THROWS_AS(levene({three}), Error);
    CHECK_THROWS_AS(levene({three, one}), Error);
}
