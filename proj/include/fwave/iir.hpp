#pragma once

#include <cstddef>
#include <vector>

namespace fwave {

// One second-order section, direct form II transposed:
//   y[n] = b0*x[n] + b1*x[n-1] + b2*x[n-2] - a1*y[n-1] - a2*y[n-2]
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

// Cascade of biquads. All design routines normalize each section to unit DC
// gain so a constant input passes through (or is estimated) exactly.
struct IirFilter {
    std::vector<Biquad> sections;

    // |H(e^{j 2 pi f / fs})| of the single-pass cascade.
    double magnitude(double f_hz, double fs) const;
    // Samples for the slowest pole envelope to decay by 1/e (one time
    // constant): ceil(1 / (1 - r_max)).
    std::size_t transient_length() const;
};

// Butterworth low-pass of the given order via analog prototype poles and the
// bilinear transform with cutoff prewarping.
IirFilter butterworth_lowpass(int order, double cutoff_hz, double fs);

// Second-order notch: zeros on the unit circle at freq_hz, poles pulled in
// by the -3 dB bandwidth. Unit gain at DC.
IirFilter notch(double freq_hz, double bandwidth_hz, double fs);

// Single forward pass over x with zero initial state.
std::vector<double> filter_forward(const IirFilter& f, const std::vector<double>& x);

// Zero-phase forward/backward filtering. The input is extended at both ends
// with point-symmetric reflections of length 3 * transient_length() before
// filtering and trimmed after, so 6 s records keep clean edges. Throws
// RecordTooShortForFilter when x is not longer than the pad.
std::vector<double> filtfilt(const IirFilter& f, const std::vector<double>& x);

}  // namespace fwave
