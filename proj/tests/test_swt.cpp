#include "doctest.h"
#include "fwave/core.hpp"
#include "fwave/swt.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace fwave;

namespace {

double rms(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

TEST_CASE("db4 filters are orthonormal and quadrature") {
    const auto& h = db4_lowpass();
    const auto& g = db4_highpass();
    REQUIRE(h.size() == 8);

    double sumsq = 0.0, sum = 0.0;
    for (double c : h) {
        sumsq += c * c;
        sum += c;
    }
    CHECK(sumsq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sum == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));

    // Shift orthogonality at even lags.
    for (int m = 1; m <= 3; ++m) {
        double dot = 0.0;
        for (std::size_t k = 0; k + 2 * static_cast<std::size_t>(m) < h.size(); ++k)
            dot += h[k] * h[k + 2 * static_cast<std::size_t>(m)];
        CHECK(dot == doctest::Approx(0.0).epsilon(1e-12));
    }

    // |H(w)|^2 + |G(w)|^2 == 2 at arbitrary frequencies.
    for (double w : {0.0, 0.3, 1.1, 2.0, 3.0}) {
        double hr = 0.0, hi = 0.0, gr = 0.0, gi = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            double c = std::cos(w * static_cast<double>(k));
            double s = std::sin(w * static_cast<double>(k));
            hr += h[k] * c;
            hi -= h[k] * s;
            gr += g[k] * c;
            gi -= g[k] * s;
        }
        CHECK(hr * hr + hi * hi + gr * gr + gi * gi == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("swt reconstruction is exact when nothing is thresholded") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> x(2000);
    for (double& v : x) v = dist(rng);

    auto d = swt_decompose(x, 4);
    auto y = swt_reconstruct(d);
    REQUIRE(y.size() == x.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::fabs(y[i] - x[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("band_level finds the detail band containing a frequency") {
    // At 977 Hz: level 4 covers [30.5, 61) so both mains variants land there.
    CHECK(band_level(977.0, 50.0) == 4);
    CHECK(band_level(977.0, 60.0) == 4);
    CHECK(band_level(977.0, 100.0) == 3);
    CHECK(band_level(977.0, 300.0) == 1);
    CHECK_THROWS_AS(band_level(977.0, 0.0), Error);
}

TEST_CASE("levels_containing widens each band by twenty percent") {
    // 50 Hz sits inside level 4 and inside the widened level 3 band
    // ([61,122] widened to [48.8, 134.2]).
    auto lv = levels_containing(977.0, 4, {50.0});
    REQUIRE(lv.size() == 2);
    CHECK(lv[0] == 3);
    CHECK(lv[1] == 4);

    auto lv60 = levels_containing(977.0, 4, {60.0});
    REQUIRE(lv60.size() == 2);
    CHECK(lv60[0] == 3);
    CHECK(lv60[1] == 4);
}

TEST_CASE("denoiser removes a pure mains tone by at least 30 dB") {
    const double fs = 977.0;
    const std::size_t n = 5862;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = 0.05 * std::sin(2.0 * std::numbers::pi * 50.0 * static_cast<double>(i) / fs);

    auto y = swt_denoise(x, 4, {3, 4});
    CHECK(rms(y) < 0.05 / std::numbers::sqrt2 * 0.0316);  // >= 30 dB down from input RMS
    CHECK(rms(y) < 0.0016);
}

TEST_CASE("denoiser leaves a mains-free band-limited signal almost alone") {
    const double fs = 977.0;
    const std::size_t n = 5862;
    std::vector<double> x(n);
    // An f-wave-like mixture well below the thresholded bands.
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / fs;
        x[i] = 0.1 * std::sin(2.0 * std::numbers::pi * 6.0 * t) +
               0.03 * std::sin(2.0 * std::numbers::pi * 12.0 * t + 0.7);
    }
    auto y = swt_denoise(x, 4, {3, 4});
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = y[i] - x[i];
    CHECK(rms(diff) / rms(x) < 0.02);
}

TEST_CASE("denoiser passes zero through unchanged") {
    std::vector<double> x(5862, 0.0);
    auto y = swt_denoise(x, 4, {3, 4});
    for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("soft threshold shrinks toward zero") {
    std::vector<double> v = {3.0, -3.0, 0.5, -0.5, 0.0};
    soft_threshold(v, 1.0);
    CHECK(v[0] == doctest::Approx(2.0));
    CHECK(v[1] == doctest::Approx(-2.0));
    CHECK(v[2] == 0.0);
    CHECK(v[3] == 0.0);
    CHECK(v[4] == 0.0);
}

TEST_CASE("universal threshold matches the closed form on known data") {
    // details = [pad | 1, -2, 3, -4, 5 | pad]: |.| = {1..5}, median 3,
    // sigma = 3/0.6745, t = sigma * sqrt(2 ln 5).
    std::vector<double> det = {99.0, 99.0, 1.0, -2.0, 3.0, -4.0, 5.0, 99.0, 99.0};
    double t = universal_threshold(det, 2, 5);
    double expect = 3.0 / 0.6745 * std::sqrt(2.0 * std::log(5.0));
    CHECK(t == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("swt keeps a large transient that a notch would ring on") {
    const double fs = 977.0;
    const std::size_t n = 5862;
    std::vector<double> x(n, 0.0);
    // A sharp biphasic spike (QRS-like) plus mains.
    for (int k = -5; k <= 5; ++k) {
        double v = std::exp(-0.5 * (k / 2.0) * (k / 2.0));
        x[static_cast<std::size_t>(2931 + k)] += (k < 0 ? -0.3 : 1.0) * v;
    }
    std::vector<double> mains(n);
    for (std::size_t i = 0; i < n; ++i)
        mains[i] = 0.05 * std::sin(2.0 * std::numbers::pi * 50.0 * static_cast<double>(i) / fs);
    std::vector<double> mixed(n);
    for (std::size_t i = 0; i < n; ++i) mixed[i] = x[i] + mains[i];

    auto y = swt_denoise(mixed, 4, {3, 4});
    // Spike peak survives within 25%.
    CHECK(y[2931] > 0.7 * x[2931]);
}
