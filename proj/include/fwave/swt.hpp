#pragma once

#include <cstddef>
#include <vector>

namespace fwave {

// Orthonormal db4 analysis filters (8 taps, sum of squares == 1).
const std::vector<double>& db4_lowpass();
const std::vector<double>& db4_highpass();

// Undecimated (a-trous) wavelet decomposition of a reflection-padded copy of
// x. details[j-1] holds detail level j, covering roughly
// [fs/2^(j+1), fs/2^j]; approx holds the final approximation. All arrays are
// the padded length; pad and n locate the original samples.
struct SwtDecomposition {
    std::vector<std::vector<double>> details;
    std::vector<double> approx;
    std::size_t pad = 0;
    std::size_t n = 0;
};

SwtDecomposition swt_decompose(const std::vector<double>& x, int levels);

// Inverse of swt_decompose (exact up to rounding when no coefficient was
// modified); returns the central n samples.
std::vector<double> swt_reconstruct(const SwtDecomposition& d);

// Universal threshold sqrt(2 ln n) * MAD/0.6745, the MAD taken over the
// central n coefficients of the detail array.
double universal_threshold(const std::vector<double>& detail, std::size_t pad, std::size_t n);

// In-place soft shrinkage: v -> sign(v) * max(|v| - t, 0).
void soft_threshold(std::vector<double>& detail, double t);

// Detail level whose band [fs/2^(j+1), fs/2^j] contains freq_hz.
int band_level(double fs, double freq_hz);

// Levels (1-based, up to `levels`) whose detail band, widened by 20% of its
// width on each side, contains any of the given frequencies.
std::vector<int> levels_containing(double fs, int levels, const std::vector<double>& freqs);

// Full denoiser: decompose to `levels`, soft-threshold the listed detail
// levels with their universal thresholds, reconstruct.
std::vector<double> swt_denoise(const std::vector<double>& x, int levels,
                                const std::vector<int>& threshold_levels);

}  // namespace fwave
