#include "doctest.h"
#include "fwave/core.hpp"
#include "fwave/learn.hpp"
#include "fwave/spectral.hpp"
#include "fwave/synth.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

using namespace fwave;

TEST_CASE("fwave synthesis is seed deterministic") {
    FWaveParams p;
    p.freq_jitter = 0.2;
    p.phase_noise = 0.1;
    auto a = synth_fwave(p, 6.0, 977.0, 42);
    auto b = synth_fwave(p, 6.0, 977.0, 42);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);

    auto c = synth_fwave(p, 6.0, 977.0, 43);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        diff += std::fabs(a.samples[i] - c.samples[i]);
    CHECK(diff > 0.0);
}

TEST_CASE("pure-tone f-wave lands on the expected grid bin") {
    FWaveParams p;
    p.f0 = 5.73;  // nearest grid bin is 5.7
    p.gamma_true = 2.0;
    auto rec = synth_fwave(p, 6.0, 977.0, 7);
    CHECK(rec.stage == Stage::fwave);

    FWaveSegment seg;
    seg.sampling_rate = rec.sampling_rate;
    seg.samples = rec.samples;
    auto feats = extract_features(seg, WelchConfig{});
    CHECK(feats.f0 == doctest::Approx(5.7).epsilon(1e-12));
}

TEST_CASE("clean synthesis recovers the programmed harmonic decay") {
    FWaveParams p;
    p.f0 = 6.0;
    p.gamma_true = 2.0;
    auto rec = synth_fwave(p, 6.0, 977.0, 19);
    FWaveSegment seg;
    seg.sampling_rate = rec.sampling_rate;
    seg.samples = rec.samples;
    auto feats = extract_features(seg, WelchConfig{});
    CHECK(feats.gamma == doctest::Approx(2.0).epsilon(0.075));  // +-0.15 absolute
}

TEST_CASE("fwave parameter guards") {
    FWaveParams p;
    p.f0 = 2.0;
    CHECK_THROWS_AS(synth_fwave(p, 6.0, 977.0, 1), Error);
    p = {};
    p.n_harmonics = 0;
    CHECK_THROWS_AS(synth_fwave(p, 6.0, 977.0, 1), Error);
    p = {};
    p.amplitude = 0.0;
    CHECK_THROWS_AS(synth_fwave(p, 6.0, 977.0, 1), Error);
    p = {};
    p.n_harmonics = 50;  // 50 * 6 Hz = 300 Hz > 488.5/... fine; use low fs
    CHECK_THROWS_AS(synth_fwave(p, 6.0, 500.0, 1), Error);
}

TEST_CASE("ecg synthesis is exactly additive") {
    FWaveParams p;
    p.freq_jitter = 0.1;
    ArtifactSpec art;
    art.drift_mv = 0.2;
    art.mains_mv = 0.05;
    art.noise_mv = 0.02;
    auto ecg = synth_ecg(p, 90.0, 0.2, art, 12.0, 977.0, 11);
    REQUIRE(ecg.raw.samples.size() == ecg.fwave_truth.samples.size());
    for (std::size_t i = 0; i < ecg.raw.samples.size(); ++i) {
        double sum = ecg.fwave_truth.samples[i] + ecg.qrst_truth.samples[i] +
                     ecg.artifact_truth.samples[i];
        CHECK(std::fabs(ecg.raw.samples[i] - sum) < 1e-12);
    }
}

TEST_CASE("artifact-free synthesis is f-wave plus QRST exactly") {
    FWaveParams p;
    auto ecg = synth_ecg(p, 80.0, 0.15, ArtifactSpec{}, 10.0, 977.0, 3);
    for (double v : ecg.artifact_truth.samples) CHECK(v == 0.0);
    for (std::size_t i = 0; i < ecg.raw.samples.size(); ++i)
        CHECK(ecg.raw.samples[i] ==
              ecg.fwave_truth.samples[i] + ecg.qrst_truth.samples[i]);
}

TEST_CASE("zero irregularity gives strictly periodic beats") {
    FWaveParams p;
    auto ecg = synth_ecg(p, 75.0, 0.0, ArtifactSpec{}, 20.0, 977.0, 5);
    REQUIRE(ecg.r_peaks.size() > 10);
    auto rr0 = ecg.r_peaks[1] - ecg.r_peaks[0];
    for (std::size_t b = 1; b + 1 < ecg.r_peaks.size(); ++b) {
        auto rr = ecg.r_peaks[b + 1] - ecg.r_peaks[b];
        CHECK(std::llabs(static_cast<long long>(rr) - static_cast<long long>(rr0)) <= 1);
    }
    // Beat count tracks the programmed heart rate.
    CHECK(std::fabs(static_cast<double>(ecg.r_peaks.size()) - 20.0 * 75.0 / 60.0) <= 2.0);
}

TEST_CASE("irregular RR intervals vary around the programmed mean") {
    FWaveParams p;
    auto ecg = synth_ecg(p, 90.0, 0.2, ArtifactSpec{}, 30.0, 977.0, 8);
    const double mean_rr = 60.0 / 90.0 * 977.0;
    double lo = 1e18, hi = 0.0;
    for (std::size_t b = 0; b + 1 < ecg.r_peaks.size(); ++b) {
        double rr = static_cast<double>(ecg.r_peaks[b + 1] - ecg.r_peaks[b]);
        lo = std::min(lo, rr);
        hi = std::max(hi, rr);
        CHECK(rr >= mean_rr * 0.8 - 2.0);
        CHECK(rr <= mean_rr * 1.2 + 2.0);
    }
    CHECK(hi - lo > 0.05 * mean_rr);  // actually irregular
}

TEST_CASE("qrst template peaks at R and fades at the window edges") {
    CHECK(qrst_template_value(0.0) > 0.98);
    CHECK(std::fabs(qrst_template_value(-0.10)) < 1e-3);
    CHECK(std::fabs(qrst_template_value(0.45)) < 1e-3);
    // T wave is present and positive around 0.28 s.
    CHECK(qrst_template_value(0.28) > 0.2);
}

TEST_CASE("ecg synthesis rejects out-of-range vital parameters") {
    FWaveParams p;
    CHECK_THROWS_AS(synth_ecg(p, 30.0, 0.1, ArtifactSpec{}, 10.0, 977.0, 1), Error);
    CHECK_THROWS_AS(synth_ecg(p, 200.0, 0.1, ArtifactSpec{}, 10.0, 977.0, 1), Error);
    CHECK_THROWS_AS(synth_ecg(p, 90.0, 1.5, ArtifactSpec{}, 10.0, 977.0, 1), Error);
}

TEST_CASE("cohort synthesis is deterministic and labels both groups") {
    CohortSpec spec;
    spec.n_sr = 4;
    spec.n_af = 3;
    spec.duration_s = 12.0;
    const auto a = synth_cohort(spec, 1);
    const auto b = synth_cohort(spec, 1);
    const auto c = synth_cohort(spec, 0);
    REQUIRE(a.patients.size() == 7);
    CHECK(a.patients[0].features.patient_id == "sr000");
    CHECK(a.patients[3].features.patient_id == "sr003");
    CHECK(a.patients[4].features.patient_id == "af000");
    CHECK(a.patients[6].features.patient_id == "af002");
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(a.patients[i].features.outcome == (i < 4 ? Outcome::sr : Outcome::af));
        CHECK(a.patients[i].features.n_segments == 2);  // 12 s holds two 6 s slices
        const auto fa = a.patients[i].features.features.as_array();
        const auto fb = b.patients[i].features.features.as_array();
        const auto fc = c.patients[i].features.features.as_array();
        for (std::size_t j = 0; j < fa.size(); ++j) {
            CHECK(fa[j] == fb[j]);
            CHECK(fa[j] == fc[j]);
        }
    }
    CohortSpec other = spec;
    other.rng_seed += 1;
    const auto d = synth_cohort(other, 1);
    CHECK(d.patients[0].features.features.f0 != a.patients[0].features.features.f0);
}

TEST_CASE("cohorts with disjoint decay ranges separate almost perfectly") {
    CohortSpec spec;
    spec.n_sr = 12;
    spec.n_af = 12;
    spec.duration_s = 12.0;
    spec.sr = {5.7, 0.5, 1.0, 0.05, 0.018, 0.003};
    spec.af = {6.1, 0.5, 4.0, 0.05, 0.018, 0.003};
    const auto cohort = synth_cohort(spec, 0);
    CvConfig cfg;
    cfg.n_folds = 4;
    cfg.n_repeats = 5;
    const auto report = repeated_cv(cohort, {"gamma"}, cfg);
    CHECK(report.acc > 0.98);
}

TEST_CASE("default group distributions shape the cohort as configured") {
    CohortSpec spec;
    spec.n_sr = 20;
    spec.n_af = 12;
    const auto cohort = synth_cohort(spec, 0);
    double g_sr = 0.0, g_af = 0.0, f_sr = 0.0, f_af = 0.0;
    for (const auto& p : cohort.patients) {
        if (p.features.outcome == Outcome::af) {
            g_af += p.features.features.gamma;
            f_af += p.features.features.f_tf;
        } else {
            g_sr += p.features.features.gamma;
            f_sr += p.features.features.f_tf;
        }
    }
    g_sr /= spec.n_sr;
    g_af /= spec.n_af;
    f_sr /= spec.n_sr;
    f_af /= spec.n_af;
    CHECK(std::fabs(g_sr - 2.20) < 0.60);  // ~3.5 standard errors at n = 20
    CHECK(std::fabs(g_af - 2.80) < 0.75);
    CHECK(g_af > g_sr);
    CHECK(f_sr > f_af);  // the broadband gap shows up as flatness
}

TEST_CASE("cohort synthesis rejects malformed specs") {
    CohortSpec spec;
    spec.n_sr = 0;
    CHECK_THROWS_AS(synth_cohort(spec), Error);
    spec.n_sr = 2;
    spec.af.gamma_sd = -0.1;
    CHECK_THROWS_AS(synth_cohort(spec), Error);
}
