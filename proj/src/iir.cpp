#include "fwave/iir.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fwave/core.hpp"

namespace fwave {

namespace {

// Largest pole magnitude of one section.
double pole_radius(const Biquad& s) {
    double disc = s.a1 * s.a1 - 4.0 * s.a2;
    if (disc < 0.0) return std::sqrt(s.a2);  // conjugate pair: |p|^2 = a2
    double root = std::sqrt(disc);
    return std::max(std::fabs((-s.a1 + root) / 2.0), std::fabs((-s.a1 - root) / 2.0));
}

// Scales the numerator so H(1) == 1.
void normalize_dc(Biquad& s) {
    double num = s.b0 + s.b1 + s.b2;
    double den = 1.0 + s.a1 + s.a2;
    double scale = den / num;
    s.b0 *= scale;
    s.b1 *= scale;
    s.b2 *= scale;
}

// Runs one section in place. With steady_init the delay registers start at
// the steady-state values for a constant input equal to the first sample, so
// a step into the filter produces no startup transient (the same trick the
// usual forward/backward implementations use).
void run_section(const Biquad& s, std::vector<double>& y, bool steady_init) {
    double z1 = 0.0, z2 = 0.0;
    if (steady_init && !y.empty()) {
        z2 = (s.b2 - s.a2) * y[0];
        z1 = (s.b1 - s.a1) * y[0] + z2;
    }
    for (double& v : y) {
        double in = v;
        double out = s.b0 * in + z1;
        z1 = s.b1 * in - s.a1 * out + z2;
        z2 = s.b2 * in - s.a2 * out;
        v = out;
    }
}

}  // namespace

double IirFilter::magnitude(double f_hz, double fs) const {
    const double w = 2.0 * std::numbers::pi * f_hz / fs;
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> z2 = z1 * z1;
    double mag = 1.0;
    for (const auto& s : sections) {
        std::complex<double> num = s.b0 + s.b1 * z1 + s.b2 * z2;
        std::complex<double> den = 1.0 + s.a1 * z1 + s.a2 * z2;
        mag *= std::abs(num) / std::abs(den);
    }
    return mag;
}

std::size_t IirFilter::transient_length() const {
    double r_max = 0.0;
    for (const auto& s : sections) r_max = std::max(r_max, pole_radius(s));
    if (r_max >= 1.0)
        throw Error(ErrorCode::BadParams, "unstable filter (pole radius >= 1)");
    return static_cast<std::size_t>(std::ceil(1.0 / (1.0 - r_max)));
}

IirFilter butterworth_lowpass(int order, double cutoff_hz, double fs) {
    if (order < 1)
        throw Error(ErrorCode::BadParams, "filter order must be >= 1");
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < fs / 2.0))
        throw Error(ErrorCode::BadParams, "cutoff must lie in (0, fs/2)");

    // Prewarp so the bilinear transform lands the -3 dB point exactly on
    // cutoff_hz, then map the analog prototype poles to the z-plane.
    const double warped = 2.0 * fs * std::tan(std::numbers::pi * cutoff_hz / fs);
    const double two_fs = 2.0 * fs;

    std::vector<std::complex<double>> poles;
    for (int k = 0; k < order; ++k) {
        double theta = std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
        std::complex<double> s = warped * std::polar(1.0, theta);  // left half-plane
        poles.push_back((two_fs + s) / (two_fs - s));
    }

    IirFilter f;
    // Conjugate pairs: pole k pairs with pole order-1-k.
    for (int k = 0; k < order / 2; ++k) {
        const auto& p = poles[k];
        Biquad s;
        s.b0 = 1.0;
        s.b1 = 2.0;   // both analog zeros at infinity map to z = -1
        s.b2 = 1.0;
        s.a1 = -2.0 * p.real();
        s.a2 = std::norm(p);
        normalize_dc(s);
        f.sections.push_back(s);
    }
    if (order % 2 == 1) {
        const auto& p = poles[order / 2];  // the real pole
        Biquad s;
        s.b0 = 1.0;
        s.b1 = 1.0;
        s.b2 = 0.0;
        s.a1 = -p.real();
        s.a2 = 0.0;
        normalize_dc(s);
        f.sections.push_back(s);
    }
    return f;
}

IirFilter notch(double freq_hz, double bandwidth_hz, double fs) {
    if (!(freq_hz > 0.0) || !(freq_hz < fs / 2.0))
        throw Error(ErrorCode::BadParams, "notch frequency must lie in (0, fs/2)");
    if (!(bandwidth_hz > 0.0))
        throw Error(ErrorCode::BadParams, "notch bandwidth must be positive");

    const double w0 = 2.0 * std::numbers::pi * freq_hz / fs;
    const double r = 1.0 - std::numbers::pi * bandwidth_hz / fs;
    if (r <= 0.0)
        throw Error(ErrorCode::BadParams, "notch bandwidth too wide for sampling rate");

    Biquad s;
    s.b0 = 1.0;
    s.b1 = -2.0 * std::cos(w0);
    s.b2 = 1.0;
    s.a1 = -2.0 * r * std::cos(w0);
    s.a2 = r * r;
    normalize_dc(s);

    IirFilter f;
    f.sections.push_back(s);
    return f;
}

std::vector<double> filter_forward(const IirFilter& f, const std::vector<double>& x) {
    std::vector<double> y = x;
    for (const auto& s : f.sections) run_section(s, y, false);
    return y;
}

std::vector<double> filtfilt(const IirFilter& f, const std::vector<double>& x) {
    const std::size_t pad = 3 * f.transient_length();
    const std::size_t n = x.size();
    if (n <= pad)
        throw Error(ErrorCode::RecordTooShortForFilter,
                    "need more than " + std::to_string(pad) + " samples, got " +
                        std::to_string(n));

    // Point-symmetric extension about each endpoint: constants stay constant
    // and linear trends continue, which keeps the drift estimator honest at
    // the edges.
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x[0] - x[pad - i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 2 - i]);

    std::vector<double>& y = ext;
    for (const auto& s : f.sections) run_section(s, y, true);
    std::reverse(y.begin(), y.end());
    for (const auto& s : f.sections) run_section(s, y, true);
    std::reverse(y.begin(), y.end());

    return std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(pad),
                               y.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

}  // namespace fwave
