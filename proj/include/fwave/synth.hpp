#pragma once

#include <cstdint>
#include <vector>

#include "fwave/cohort.hpp"
#include "fwave/core.hpp"

namespace fwave {

// Sawtooth-like atrial waveform: fundamental plus geometrically decaying
// harmonics, with slow sinusoidal frequency modulation and optional phase
// wobble. gamma_true fixes the fundamental/first-harmonic power ratio
// (ln W0/W1) and the same per-step decay continues up the harmonic ladder.
struct FWaveParams {
    double f0 = 6.0;           // Hz
    int n_harmonics = 3;       // number of tones including the fundamental
    double gamma_true = 2.2;   // ln power ratio between successive tones
    double amplitude = 0.05;   // mV, fundamental peak amplitude
    double freq_jitter = 0.0;  // Hz RMS of the slow frequency modulation
    double phase_noise = 0.0;  // radians RMS of the per-harmonic wobble
};

EcgRecord synth_fwave(const FWaveParams& params, double duration_s, double fs,
                      std::uint64_t seed);

// Additive disturbances for a synthetic recording.
struct ArtifactSpec {
    double drift_mv = 0.0;    // baseline wander amplitude
    double drift_freq = 0.3;  // Hz
    double mains_mv = 0.0;    // powerline amplitude
    double mains_freq = 50.0; // Hz
    double noise_mv = 0.0;    // white noise RMS
};

// raw is the exact sample-wise sum of the three truth components, so
// cancellation quality can be measured against ground truth.
struct SynthEcg {
    EcgRecord raw;             // f-wave + QRST + artifacts
    EcgRecord fwave_truth;     // the clean atrial component
    EcgRecord qrst_truth;      // the ventricular component alone
    EcgRecord artifact_truth;  // drift + mains + noise
    RPeakList r_peaks;         // ground-truth R sample indices
};

// The bundled QRST morphology: Q, R, S and T modeled as Gaussian bumps on a
// window around the R peak, near-zero at both window ends. Returns the value
// at time t_s relative to the R peak, for a 1 mV R amplitude.
double qrst_template_value(double t_s);

// Full synthetic ECG: QRST complexes at AF-like irregular RR intervals
// (RR = 60/hr * (1 + u), u uniform in +-rr_irregularity), the f-wave, and
// the requested artifacts. qrst_mv scales the 1 mV default R peak.
SynthEcg synth_ecg(const FWaveParams& fwave, double heart_rate_bpm, double rr_irregularity,
                   const ArtifactSpec& artifacts, double duration_s, double fs,
                   std::uint64_t seed, double qrst_mv = 1.0);

// Per-group parameter distributions for cohort synthesis. broadband is the
// RMS of disorganized (non-harmonic) atrial activity, added to the record's
// noise channel; it raises the spectral floor without touching the harmonic
// power ratio, so flatness carries group information beyond the decay.
struct GroupDist {
    double f0_mean, f0_sd;
    double gamma_mean, gamma_sd;
    double broadband_mean, broadband_sd;  // mV RMS
};

// Synthetic-cohort settings. The defaults give two overlapping groups whose
// harmonic decay differs by about 0.6 and whose broadband activity differs
// by about a factor of two.
struct CohortSpec {
    int n_sr = 103;
    int n_af = 48;
    GroupDist sr{5.69, 1.12, 2.20, 0.77, 0.026, 0.004};
    GroupDist af{6.14, 0.99, 2.80, 0.57, 0.010, 0.002};
    double duration_s = 30.0;
    double fs = 977.0;
    double fwave_mv = 0.05;
    double qrst_mv = 1.0;
    double heart_rate_bpm = 90.0;
    double rr_irregularity = 0.2;
    double drift_mv = 0.2;
    double mains_mv = 0.05;
    double noise_mv = 0.01;        // recording noise, combined RMS with broadband
    double freq_jitter = 0.05;     // Hz RMS, slow frequency modulation
    double phase_noise = 0.05;     // radians RMS, per-harmonic wobble
    std::uint64_t rng_seed = 4;
};

// One patient's generation draw: waveform parameters sampled from the
// patient's group distribution (Gaussian, clipped to valid ranges), artifact
// levels with the broadband draw folded into the noise channel, and the seed
// for the waveform synthesis. Index runs over SR patients then AF patients.
struct PatientDraw {
    std::string patient_id;
    Outcome outcome = Outcome::unknown;
    FWaveParams params;
    ArtifactSpec artifacts;
    double broadband_mv = 0.0;
    std::uint64_t waveform_seed = 0;
};

PatientDraw draw_patient(const CohortSpec& spec, std::size_t index);

// Labeled feature cohort: synthesizes every draw_patient recording and runs
// preprocessing, QRST cancellation, segmentation and feature extraction.
// Deterministic for a fixed spec at any jobs count.
Cohort synth_cohort(const CohortSpec& spec, int jobs = 1);

}  // namespace fwave
