#include "doctest.h"
#include "fwave/core.hpp"
#include "fwave/preprocess.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace fwave;

namespace {

EcgRecord record_from(std::vector<double> samples, double fs = 977.0) {
    EcgRecord r;
    r.patient_id = "t";
    r.sampling_rate = fs;
    r.samples = std::move(samples);
    return r;
}

std::vector<double> sine(double freq, double fs, std::size_t n, double amp, double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs + phase);
    return x;
}

double rms(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * x[i];
    return std::sqrt(s / static_cast<double>(hi - lo));
}

constexpr std::size_t kN = 4 * 5862;  // 24 s at 977 Hz

}  // namespace

TEST_CASE("baseline removal flattens a constant offset") {
    PreprocessConfig cfg;
    auto out = remove_baseline(record_from(std::vector<double>(kN, 1.0)), cfg);
    for (double v : out.samples) CHECK(std::fabs(v) < 1e-3);
}

TEST_CASE("baseline removal strips slow drift but keeps the f-wave band") {
    const double fs = 977.0;
    PreprocessConfig cfg;

    auto drift = remove_baseline(record_from(sine(0.3, fs, kN, 1.0)), cfg);
    std::size_t lo = kN / 10, hi = kN - kN / 10;
    CHECK(rms(drift.samples, lo, hi) < 0.05 / std::numbers::sqrt2);

    auto kept = remove_baseline(record_from(sine(8.0, fs, kN, 0.1)), cfg);
    CHECK(rms(kept.samples, lo, hi) ==
          doctest::Approx(0.1 / std::numbers::sqrt2).epsilon(0.01));
}

TEST_CASE("baseline removal is idempotent") {
    // Holds to 1e-6 in the central 80% when the signal avoids the
    // estimator's transition band (any realizable filter has gain g with
    // g - g^2 up to 0.25 there); slow drift plus in-band f-wave content is
    // the intended regime, and the edges carry the usual filter transients.
    const double fs = 977.0;
    const std::size_t n = 60 * 977;
    PreprocessConfig cfg;
    std::vector<double> x = sine(0.1, fs, n, 0.8);
    for (std::size_t i = 0; i < n; ++i)
        x[i] += 0.1 * std::sin(2.0 * std::numbers::pi * 6.0 * static_cast<double>(i) / fs) +
                0.03 * std::sin(2.0 * std::numbers::pi * 12.0 * static_cast<double>(i) / fs + 0.9);

    auto once = remove_baseline(record_from(x), cfg);
    auto twice = remove_baseline(once, cfg);
    double num = 0.0, den = 0.0;
    for (std::size_t i = n / 10; i < n - n / 10; ++i) {
        double d = twice.samples[i] - once.samples[i];
        num += d * d;
        den += once.samples[i] * once.samples[i];
    }
    CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("powerline removal knocks a pure mains tone down 30 dB") {
    const double fs = 977.0;
    for (auto mode : {MainsRemoval::swt, MainsRemoval::notch}) {
        PreprocessConfig cfg;
        cfg.mains_removal = mode;
        auto out = remove_powerline(record_from(sine(50.0, fs, 5862, 0.05)), cfg);
        std::size_t lo = 500, hi = 5362;
        CHECK(rms(out.samples, lo, hi) < 0.0016);
    }
}

TEST_CASE("powerline removal preserves the DF of a mains-free f-wave") {
    const double fs = 977.0;
    // Rough spectral centroid stands in for the DF estimator here; the
    // spectral module owns the real one.
    std::vector<double> x = sine(6.0, fs, 5862, 0.1);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] += 0.03 * std::sin(2.0 * std::numbers::pi * 12.0 * static_cast<double>(i) / fs + 1.0);
    PreprocessConfig cfg;
    auto out = remove_powerline(record_from(x), cfg);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = out.samples[i] - x[i];
        num += d * d;
        den += x[i] * x[i];
    }
    // Total in-band change under 2% RMS implies the spectral peak is intact.
    CHECK(std::sqrt(num / den) < 0.02);
}

TEST_CASE("low-pass keeps 10 Hz and crushes 120 Hz") {
    const double fs = 977.0;
    PreprocessConfig cfg;
    std::size_t lo = 500, hi = 5362;

    auto kept = lowpass_70(record_from(sine(10.0, fs, 5862, 1.0)), cfg);
    CHECK(rms(kept.samples, lo, hi) ==
          doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(0.01));

    auto cut = lowpass_70(record_from(sine(120.0, fs, 5862, 1.0)), cfg);
    CHECK(rms(cut.samples, lo, hi) < 0.01 / std::numbers::sqrt2);
}

TEST_CASE("full chain handles drift plus mains plus f-wave") {
    const double fs = 977.0;
    std::vector<double> fw = sine(6.0, fs, kN, 0.1);
    std::vector<double> x(kN);
    for (std::size_t i = 0; i < kN; ++i)
        x[i] = fw[i] + 0.5 * std::sin(2.0 * std::numbers::pi * 0.3 * static_cast<double>(i) / fs) +
               0.05 * std::sin(2.0 * std::numbers::pi * 50.0 * static_cast<double>(i) / fs);

    PreprocessConfig cfg;
    auto out = preprocess(record_from(x), cfg);
    CHECK(out.stage == Stage::preprocessed);

    std::size_t lo = kN / 10, hi = kN - kN / 10;
    double err = 0.0, ref = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        double d = out.samples[i] - fw[i];
        err += d * d;
        ref += fw[i] * fw[i];
    }
    // Drift and mains attenuated enough that the f-wave dominates the
    // residual comparison.
    CHECK(std::sqrt(err / ref) < 0.05);
}

TEST_CASE("full chain passes zero through") {
    PreprocessConfig cfg;
    auto out = preprocess(record_from(std::vector<double>(5862, 0.0)), cfg);
    for (double v : out.samples) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("notch-mode chain is linear") {
    const double fs = 977.0;
    PreprocessConfig cfg;
    cfg.mains_removal = MainsRemoval::notch;

    std::mt19937_64 rng(11);
    std::normal_distribution<double> dist(0.0, 0.2);
    std::vector<double> x(5862), y(5862);
    for (std::size_t i = 0; i < 5862; ++i) {
        x[i] = dist(rng);
        y[i] = dist(rng);
    }
    const double a = 1.7, b = -0.4;
    std::vector<double> mix(5862);
    for (std::size_t i = 0; i < 5862; ++i) mix[i] = a * x[i] + b * y[i];

    auto px = preprocess(record_from(x), cfg);
    auto py = preprocess(record_from(y), cfg);
    auto pmix = preprocess(record_from(mix), cfg);

    double scale = 0.0;
    for (double v : pmix.samples) scale = std::max(scale, std::fabs(v));
    for (std::size_t i = 0; i < 5862; ++i) {
        double lin = a * px.samples[i] + b * py.samples[i];
        CHECK(std::fabs(pmix.samples[i] - lin) <= 1e-9 * scale);
    }
}

TEST_CASE("mains_tones lists harmonics below the low-pass cutoff") {
    PreprocessConfig cfg;  // 50 Hz mains, 70 Hz cutoff
    auto t = mains_tones(cfg);
    REQUIRE(t.size() == 1);
    CHECK(t[0] == doctest::Approx(50.0));

    cfg.lowpass_cutoff = 180.0;
    t = mains_tones(cfg);
    REQUIRE(t.size() == 3);
    CHECK(t[2] == doctest::Approx(150.0));

    cfg.notch_harmonics = 2;
    t = mains_tones(cfg);
    REQUIRE(t.size() == 2);
    CHECK(t[1] == doctest::Approx(100.0));
}

TEST_CASE("config sanity checks reject nonsense") {
    PreprocessConfig cfg;
    cfg.baseline_cutoff = 60.0;  // above mains
    CHECK_THROWS_AS(remove_baseline(record_from(std::vector<double>(5862, 0.0)), cfg), Error);

    PreprocessConfig cfg2;
    cfg2.lowpass_cutoff = 600.0;  // above Nyquist
    CHECK_THROWS_AS(lowpass_70(record_from(std::vector<double>(5862, 0.0)), cfg2), Error);
}

TEST_CASE("too-short records raise the filter-length error") {
    PreprocessConfig cfg;
    std::vector<double> x(200, 0.0);
    try {
        remove_baseline(record_from(x), cfg);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RecordTooShortForFilter);
    }
}
