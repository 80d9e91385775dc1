#pragma once

#include <cstddef>
#include <utility>

#include "fwave/core.hpp"

namespace fwave {

// Welch estimator settings. window_len and overlap are defined at the 977 Hz
// reference rate and rescaled proportionally for other sampling rates, so the
// window always spans the same ~4.09 s regardless of fs.
struct WelchConfig {
    std::size_t window_len = 4000;  // samples at 977 Hz
    std::size_t overlap = 3000;     // samples at 977 Hz
    double fft_resolution = 0.1;    // Hz, target grid spacing
    double df_low = 3.0;            // Hz, dominant-frequency search band
    double df_high = 12.0;          // Hz
};

// Averaged modified periodogram over Hamming-windowed overlapped sections,
// zero-padded to round(fs / fft_resolution) points so the grid lands on
// multiples of 0.1 Hz. One-sided, window-power normalized: sum(PSD) * df
// approximates the signal variance.
PowerSpectrum welch_psd(const FWaveSegment& segment, const WelchConfig& cfg);

// A located spectral peak; power is the PSD sample integrated over one grid
// bin (PSD * f_step), in mV^2.
struct Peak {
    double freq = 0.0;
    double power = 0.0;
};

// Highest PSD sample inside the search band; ties break toward the lower
// frequency.
Peak dominant_frequency(const PowerSpectrum& spec, const Band& search_band);

// Highest PSD sample in the 1 Hz window centered on 2*f0.
Peak first_harmonic(const PowerSpectrum& spec, double f0);

// gamma = ln(w_f0 / w_f1).
double harmonic_decay(double w_f0, double w_f1);

// Fraction of [3, 25] Hz power inside 1 Hz windows at f0, at the detected
// first harmonic, and at the local peak near 3*f0 (windows clipped to the
// band; overlapping windows counted once).
double organization_index(const PowerSpectrum& spec, double f0);

struct BandSplit {
    Band lf, hf, tf;
};

// LF/HF cut halfway between the DF and its first harmonic: 1.5 * f0 snapped
// to the 0.1 Hz grid (round half up). LF = [3, cut), HF = [cut, 25],
// TF = [3, 25].
BandSplit band_split(double f0);

// Inclusive index range [first, last] of the spectrum bins belonging to the
// band: center frequencies with f_lower <= f < f_upper, the upper edge
// included for HF and TF (both end at 25.0 Hz).
std::pair<std::size_t, std::size_t> band_bins(const PowerSpectrum& spec, const Band& band);

// Geometric over arithmetic mean of the PSD samples in the band; bins below
// 1e-15 * (band max) are floored to that epsilon for the geometric mean.
double spectral_flatness(const PowerSpectrum& spec, const Band& band);

// Shannon entropy of the band-normalized PSD, over ln(bin count).
double spectral_entropy(const PowerSpectrum& spec, const Band& band);

// Renyi entropy ln(sum p^alpha) / ((1 - alpha) ln N); alpha >= 0, != 1.
double renyi_entropy(const PowerSpectrum& spec, const Band& band, double alpha);

// Fraction of band power in bins at or below twice the mean bin probability:
// the "irregular" remainder once dominant peaks are removed.
double c0_complexity(const PowerSpectrum& spec, const Band& band);

// Full per-segment feature vector: welch_psd, peak detection, band split and
// the four concentration measures over LF/HF/TF.
SpectralFeatures extract_features(const FWaveSegment& segment, const WelchConfig& cfg,
                                  double renyi_alpha = 0.1);

}  // namespace fwave
