#include "fwave/swt.hpp"

#include <algorithm>
#include <cmath>

#include "fwave/core.hpp"

namespace fwave {

namespace {

// Circular convolution with the filter upsampled by `step`:
//   y[i] = sum_k f[k] * x[(i - k*step) mod m]
std::vector<double> conv_atrous(const std::vector<double>& x, const std::vector<double>& f,
                                std::size_t step) {
    const std::size_t m = x.size();
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            std::size_t shift = (k * step) % m;
            std::size_t idx = i >= shift ? i - shift : i + m - shift;
            acc += f[k] * x[idx];
        }
        y[i] = acc;
    }
    return y;
}

// Adjoint of conv_atrous: y[i] = sum_k f[k] * x[(i + k*step) mod m]
std::vector<double> corr_atrous(const std::vector<double>& x, const std::vector<double>& f,
                                std::size_t step) {
    const std::size_t m = x.size();
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            std::size_t idx = (i + k * step) % m;
            acc += f[k] * x[idx];
        }
        y[i] = acc;
    }
    return y;
}

}  // namespace

const std::vector<double>& db4_lowpass() {
    static const std::vector<double> h = {
        -0.010597401785069002, 0.032883011666885127, 0.030841381835560684,
        -0.18703481171909234,  -0.027983769416858796, 0.63088076792985881,
        0.7148465705529149,    0.23037781330889617,
    };
    return h;
}

const std::vector<double>& db4_highpass() {
    static const std::vector<double> g = [] {
        const auto& h = db4_lowpass();
        std::vector<double> out(h.size());
        for (std::size_t k = 0; k < h.size(); ++k)
            out[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[h.size() - 1 - k];
        return out;
    }();
    return g;
}

SwtDecomposition swt_decompose(const std::vector<double>& x, int levels) {
    if (x.empty()) throw Error(ErrorCode::EmptyRecord, "cannot decompose an empty signal");
    if (levels < 1) throw Error(ErrorCode::BadParams, "need at least one decomposition level");

    const auto& h = db4_lowpass();
    const auto& g = db4_highpass();

    // Reflection pad covering the cumulative filter reach of analysis plus
    // synthesis, 2 * (L-1) * (2^levels - 1), so artifacts at the circular
    // seam cannot propagate back into the central samples.
    const std::size_t n = x.size();
    std::size_t pad = 2 * (h.size() - 1) * ((std::size_t{1} << levels) - 1);
    if (pad >= n) pad = n - 1;  // short signals: reflect as much as exists

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(x[pad - i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(x[n - 2 - i]);

    SwtDecomposition d;
    d.pad = pad;
    d.n = n;
    std::vector<double> approx = std::move(ext);
    for (int j = 1; j <= levels; ++j) {
        std::size_t step = std::size_t{1} << (j - 1);
        d.details.push_back(conv_atrous(approx, g, step));
        approx = conv_atrous(approx, h, step);
    }
    d.approx = std::move(approx);
    return d;
}

std::vector<double> swt_reconstruct(const SwtDecomposition& d) {
    const auto& h = db4_lowpass();
    const auto& g = db4_highpass();

    std::vector<double> approx = d.approx;
    for (int j = static_cast<int>(d.details.size()); j >= 1; --j) {
        std::size_t step = std::size_t{1} << (j - 1);
        auto from_a = corr_atrous(approx, h, step);
        auto from_d = corr_atrous(d.details[static_cast<std::size_t>(j - 1)], g, step);
        for (std::size_t i = 0; i < from_a.size(); ++i)
            from_a[i] = (from_a[i] + from_d[i]) / 2.0;
        approx = std::move(from_a);
    }
    return std::vector<double>(approx.begin() + static_cast<std::ptrdiff_t>(d.pad),
                               approx.begin() + static_cast<std::ptrdiff_t>(d.pad + d.n));
}

double universal_threshold(const std::vector<double>& detail, std::size_t pad, std::size_t n) {
    std::vector<double> mag;
    mag.reserve(n);
    for (std::size_t i = pad; i < pad + n && i < detail.size(); ++i)
        mag.push_back(std::fabs(detail[i]));
    if (mag.empty()) return 0.0;
    std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(mag.size() / 2),
                     mag.end());
    double med = mag[mag.size() / 2];
    if (mag.size() % 2 == 0) {
        double lower = *std::max_element(mag.begin(),
                                         mag.begin() + static_cast<std::ptrdiff_t>(mag.size() / 2));
        med = (med + lower) / 2.0;
    }
    double sigma = med / 0.6745;
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(mag.size())));
}

void soft_threshold(std::vector<double>& detail, double t) {
    for (double& v : detail) {
        double mag = std::fabs(v) - t;
        v = mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
    }
}

int band_level(double fs, double freq_hz) {
    if (!(freq_hz > 0.0) || !(freq_hz < fs / 2.0))
        throw Error(ErrorCode::BadParams, "frequency must lie in (0, fs/2)");
    // Level j covers [fs/2^(j+1), fs/2^j).
    int j = 1;
    while (fs / std::pow(2.0, j + 1) > freq_hz) ++j;
    return j;
}

std::vector<int> levels_containing(double fs, int levels, const std::vector<double>& freqs) {
    std::vector<int> out;
    for (int j = 1; j <= levels; ++j) {
        double lo = fs / std::pow(2.0, j + 1);
        double hi = fs / std::pow(2.0, j);
        double margin = 0.2 * (hi - lo);
        bool hit = false;
        for (double f : freqs)
            if (f >= lo - margin && f <= hi + margin) hit = true;
        if (hit) out.push_back(j);
    }
    return out;
}

std::vector<double> swt_denoise(const std::vector<double>& x, int levels,
                                const std::vector<int>& threshold_levels) {
    auto d = swt_decompose(x, levels);
    for (int j : threshold_levels) {
        if (j < 1 || j > static_cast<int>(d.details.size()))
            throw Error(ErrorCode::BadParams, "threshold level out of range");
        auto& det = d.details[static_cast<std::size_t>(j - 1)];
        soft_threshold(det, universal_threshold(det, d.pad, d.n));
    }
    return swt_reconstruct(d);
}

}  // namespace fwave
