#include "fwave/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "fwave/parallel.hpp"
#include "fwave/preprocess.hpp"
#include "fwave/spectral.hpp"
#include "fwave/ventricular.hpp"

namespace fwave {

namespace {

void check_fwave_params(const FWaveParams& p, double fs) {
    if (p.f0 < 3.0 || p.f0 > 12.0)
        throw Error(ErrorCode::BadParams, "f0 must lie in [3, 12] Hz");
    if (p.n_harmonics < 1)
        throw Error(ErrorCode::BadParams, "need at least one harmonic");
    if (!(p.amplitude > 0.0))
        throw Error(ErrorCode::BadParams, "amplitude must be positive");
    if (static_cast<double>(p.n_harmonics) * p.f0 >= fs / 2.0)
        throw Error(ErrorCode::BadParams, "highest harmonic exceeds the Nyquist rate");
    if (p.freq_jitter < 0.0 || p.phase_noise < 0.0)
        throw Error(ErrorCode::BadParams, "jitter and phase noise must be >= 0");
}

}  // namespace

EcgRecord synth_fwave(const FWaveParams& params, double duration_s, double fs,
                      std::uint64_t seed) {
    check_fwave_params(params, fs);
    if (!(duration_s > 0.0) || !(fs > 0.0))
        throw Error(ErrorCode::BadParams, "duration and sampling rate must be positive");

    const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> umod(0.15, 0.45);  // Hz, slow modulators

    // One slow sinusoidal frequency modulation shared by all harmonics (each
    // tracks the fundamental), peak deviation sqrt(2) * RMS.
    const double fm_freq = umod(rng);
    const double fm_phase = uphase(rng);
    const double fm_dev = std::numbers::sqrt2 * params.freq_jitter;

    const double rho = std::exp(-params.gamma_true / 2.0);  // amplitude decay per tone
    struct Tone {
        double amp, phase0, pm_freq, pm_phase;
    };
    std::vector<Tone> tones(static_cast<std::size_t>(params.n_harmonics));
    for (std::size_t k = 0; k < tones.size(); ++k) {
        tones[k].amp = params.amplitude * std::pow(rho, static_cast<double>(k));
        tones[k].phase0 = uphase(rng);
        tones[k].pm_freq = umod(rng);
        tones[k].pm_phase = uphase(rng);
    }
    const double pm_dev = std::numbers::sqrt2 * params.phase_noise;

    EcgRecord out;
    out.patient_id = "synthetic";
    out.sampling_rate = fs;
    out.stage = Stage::fwave;
    out.samples.resize(n);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        // Integrated instantaneous frequency f0 + dev * sin(2 pi fm t + ph).
        double base_phase = two_pi * params.f0 * t -
                            fm_dev / fm_freq * std::cos(two_pi * fm_freq * t + fm_phase);
        double v = 0.0;
        for (std::size_t k = 0; k < tones.size(); ++k) {
            double wobble =
                pm_dev * std::sin(two_pi * tones[k].pm_freq * t + tones[k].pm_phase);
            v += tones[k].amp * std::sin(static_cast<double>(k + 1) * base_phase +
                                         tones[k].phase0 + wobble);
        }
        out.samples[i] = v;
    }
    return out;
}

double qrst_template_value(double t_s) {
    struct Bump {
        double amp, center, sigma;
    };
    // Q, R, S, T deflections; all bumps decay to ~0 well inside the
    // [-0.10, +0.45] s beat window.
    static const Bump bumps[] = {
        {-0.10, -0.025, 0.010},
        {1.00, 0.000, 0.012},
        {-0.15, 0.030, 0.010},
        {0.25, 0.280, 0.050},
    };
    double v = 0.0;
    for (const auto& b : bumps) {
        double z = (t_s - b.center) / b.sigma;
        v += b.amp * std::exp(-0.5 * z * z);
    }
    return v;
}

SynthEcg synth_ecg(const FWaveParams& fwave, double heart_rate_bpm, double rr_irregularity,
                   const ArtifactSpec& artifacts, double duration_s, double fs,
                   std::uint64_t seed, double qrst_mv) {
    if (heart_rate_bpm < 40.0 || heart_rate_bpm > 180.0)
        throw Error(ErrorCode::BadParams, "heart rate must lie in [40, 180] bpm");
    if (rr_irregularity < 0.0 || rr_irregularity >= 1.0)
        throw Error(ErrorCode::BadParams, "rr_irregularity must lie in [0, 1)");

    SynthEcg out;
    out.fwave_truth = synth_fwave(fwave, duration_s, fs, derive_seed(seed, 0));

    const std::size_t n = out.fwave_truth.samples.size();
    std::mt19937_64 rng(derive_seed(seed, 1));
    std::uniform_real_distribution<double> urr(-rr_irregularity, rr_irregularity);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Ventricular component: beats on the sample grid at irregular RR
    // intervals, each with a slight amplitude variation so per-beat scaling
    // is observable downstream.
    out.qrst_truth = out.fwave_truth;
    out.qrst_truth.stage = Stage::raw;
    std::fill(out.qrst_truth.samples.begin(), out.qrst_truth.samples.end(), 0.0);
    const double mean_rr = 60.0 / heart_rate_bpm;
    double r_time = 0.35 * mean_rr;  // first beat clears the record edge
    while (r_time < duration_s) {
        const auto r_idx = static_cast<std::size_t>(std::llround(r_time * fs));
        if (r_idx >= n) break;
        out.r_peaks.push_back(r_idx);
        double beat_amp = qrst_mv * (1.0 + std::clamp(0.03 * gauss(rng), -0.1, 0.1));
        const auto lo = static_cast<long long>(r_idx) - static_cast<long long>(0.10 * fs) - 1;
        const auto hi = static_cast<long long>(r_idx) + static_cast<long long>(0.45 * fs) + 1;
        for (long long i = std::max(0ll, lo); i <= hi && i < static_cast<long long>(n); ++i) {
            double t = static_cast<double>(i - static_cast<long long>(r_idx)) / fs;
            out.qrst_truth.samples[static_cast<std::size_t>(i)] +=
                beat_amp * qrst_template_value(t);
        }
        r_time += mean_rr * (1.0 + (rr_irregularity > 0.0 ? urr(rng) : 0.0));
    }

    const double drift_phase = uphase(rng);
    const double mains_phase = uphase(rng);
    const double two_pi = 2.0 * std::numbers::pi;

    out.artifact_truth = out.qrst_truth;
    std::fill(out.artifact_truth.samples.begin(), out.artifact_truth.samples.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        double v = 0.0;
        if (artifacts.drift_mv != 0.0)
            v += artifacts.drift_mv * std::sin(two_pi * artifacts.drift_freq * t + drift_phase);
        if (artifacts.mains_mv != 0.0)
            v += artifacts.mains_mv * std::sin(two_pi * artifacts.mains_freq * t + mains_phase);
        if (artifacts.noise_mv != 0.0) v += artifacts.noise_mv * gauss(rng);
        out.artifact_truth.samples[i] = v;
    }

    out.raw = out.fwave_truth;
    out.raw.stage = Stage::raw;
    for (std::size_t i = 0; i < n; ++i)
        out.raw.samples[i] += out.qrst_truth.samples[i] + out.artifact_truth.samples[i];
    return out;
}

PatientDraw draw_patient(const CohortSpec& spec, std::size_t index) {
    if (spec.n_sr < 1 || spec.n_af < 1)
        throw Error(ErrorCode::BadParams, "need at least one patient per group");
    for (const GroupDist* g : {&spec.sr, &spec.af})
        if (g->f0_sd < 0.0 || g->gamma_sd < 0.0 || g->broadband_sd < 0.0)
            throw Error(ErrorCode::BadParams, "group SDs must be >= 0");
    const auto total = static_cast<std::size_t>(spec.n_sr + spec.n_af);
    if (index >= total)
        throw Error(ErrorCode::BadParams, "patient index " + std::to_string(index) +
                                              " out of range for " + std::to_string(total) +
                                              " patients");

    const bool af = index >= static_cast<std::size_t>(spec.n_sr);
    const GroupDist& g = af ? spec.af : spec.sr;
    const std::uint64_t patient_seed = derive_seed(spec.rng_seed, index);
    std::mt19937_64 rng(patient_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    PatientDraw draw;
    draw.outcome = af ? Outcome::af : Outcome::sr;
    draw.params.f0 = std::clamp(g.f0_mean + g.f0_sd * gauss(rng), 3.0, 12.0);
    draw.params.gamma_true = std::max(0.0, g.gamma_mean + g.gamma_sd * gauss(rng));
    draw.broadband_mv = std::max(0.0, g.broadband_mean + g.broadband_sd * gauss(rng));
    draw.params.amplitude = spec.fwave_mv;
    draw.params.freq_jitter = spec.freq_jitter;
    draw.params.phase_noise = spec.phase_noise;

    draw.artifacts.drift_mv = spec.drift_mv;
    draw.artifacts.mains_mv = spec.mains_mv;
    draw.artifacts.noise_mv = std::hypot(spec.noise_mv, draw.broadband_mv);
    draw.waveform_seed = derive_seed(patient_seed, 1);

    const std::size_t group_index = af ? index - static_cast<std::size_t>(spec.n_sr) : index;
    char id[16];
    std::snprintf(id, sizeof id, "%s%03zu", af ? "af" : "sr", group_index);
    draw.patient_id = id;
    return draw;
}

Cohort synth_cohort(const CohortSpec& spec, int jobs) {
    const PatientDraw probe = draw_patient(spec, 0);  // validates the spec
    (void)probe;

    const auto total = static_cast<std::size_t>(spec.n_sr + spec.n_af);
    Cohort cohort;
    cohort.patients.resize(total);
    parallel_for(total, jobs, [&](std::size_t i) {
        const PatientDraw draw = draw_patient(spec, i);
        const SynthEcg ecg =
            synth_ecg(draw.params, spec.heart_rate_bpm, spec.rr_irregularity, draw.artifacts,
                      spec.duration_s, spec.fs, draw.waveform_seed, spec.qrst_mv);

        const EcgRecord clean = preprocess(ecg.raw, PreprocessConfig{});
        const EcgRecord fwaves = extract_fwaves(clean);
        const auto segments = segment_signal(fwaves);
        std::vector<SpectralFeatures> features;
        features.reserve(segments.size());
        for (const auto& seg : segments) features.push_back(extract_features(seg, WelchConfig{}));

        cohort.patients[i].features =
            aggregate_patient(features, draw.patient_id, draw.outcome);
    });
    return cohort;
}

}  // namespace fwave
