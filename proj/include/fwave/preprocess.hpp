#pragma once

#include "fwave/core.hpp"

namespace fwave {

// Denoising-chain settings. mains_removal picks between the wavelet denoiser
// (default) and a cascade of zero-phase IIR notches, which is exactly linear
// and useful as an auditable baseline.
enum class MainsRemoval { swt, notch };

struct PreprocessConfig {
    double baseline_cutoff = 0.8;   // Hz, drift estimator cutoff
    double mains_freq = 50.0;       // Hz, powerline fundamental
    double lowpass_cutoff = 70.0;   // Hz
    // Number of powerline tones to suppress including the fundamental;
    // 0 means every harmonic below lowpass_cutoff.
    int notch_harmonics = 0;
    MainsRemoval mains_removal = MainsRemoval::swt;
};

// Subtracts a zero-phase low-pass estimate of the drift (order-4, 0.8 Hz by
// default) from the signal.
EcgRecord remove_baseline(const EcgRecord& record, const PreprocessConfig& cfg);

// Suppresses the powerline fundamental and configured harmonics, either by
// soft-thresholding the wavelet detail bands that contain them or by
// zero-phase notches.
EcgRecord remove_powerline(const EcgRecord& record, const PreprocessConfig& cfg);

// Order-10 zero-phase Butterworth low-pass; >= 40 dB down at 90 Hz for the
// default 70 Hz cutoff after the forward/backward pass.
EcgRecord lowpass_70(const EcgRecord& record, const PreprocessConfig& cfg);

// Full chain: baseline, powerline, low-pass; marks the result preprocessed.
EcgRecord preprocess(const EcgRecord& record, const PreprocessConfig& cfg);

// The mains tones the config asks to suppress: mains_freq * k for
// k = 1..notch_harmonics, or every multiple below lowpass_cutoff when
// notch_harmonics == 0 (always at least the fundamental).
std::vector<double> mains_tones(const PreprocessConfig& cfg);

}  // namespace fwave
