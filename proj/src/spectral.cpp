#include "fwave/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace fwave {

namespace {

// FFTW planning is not thread-safe; executing a plan on fresh buffers is.
// Plans are created unaligned so they can run on any caller-owned storage.
fftw_plan r2c_plan(std::size_t nfft) {
    static std::mutex mtx;
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(nfft);
    if (it != cache.end()) return it->second;
    std::vector<double> in(nfft, 0.0);
    std::vector<std::complex<double>> out(nfft / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.data(),
                                       reinterpret_cast<fftw_complex*>(out.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(nfft, p);
    return p;
}

std::vector<double> hamming(std::size_t n) {
    std::vector<double> w(n);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                      static_cast<double>(n - 1));
    return w;
}

constexpr double kRefRate = 977.0;

// Inclusive bin range for center frequencies in [lo, hi) or [lo, hi].
std::pair<std::size_t, std::size_t> bin_range(const PowerSpectrum& spec, double lo, double hi,
                                              bool upper_inclusive) {
    if (spec.values.empty()) throw Error(ErrorCode::EmptyBand, "empty spectrum");
    const double tol = spec.f_step * 1e-6;
    double first_f = std::max(lo, spec.f_start);
    auto first =
        static_cast<long long>(std::ceil((first_f - spec.f_start - tol) / spec.f_step));
    if (first < 0) first = 0;
    double upper = upper_inclusive ? hi + tol : hi - tol;
    auto last = static_cast<long long>(std::floor((upper - spec.f_start) / spec.f_step));
    auto max_last = static_cast<long long>(spec.values.size()) - 1;
    if (last > max_last) last = max_last;
    if (last < first)
        throw Error(ErrorCode::EmptyBand, "no spectrum bins between " + std::to_string(lo) +
                                              " and " + std::to_string(hi) + " Hz");
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

// Band-normalized probabilities; throws when the band holds no power.
std::vector<double> band_probabilities(const PowerSpectrum& spec, const Band& band) {
    auto [first, last] = band_bins(spec, band);
    std::vector<double> p(spec.values.begin() + static_cast<std::ptrdiff_t>(first),
                          spec.values.begin() + static_cast<std::ptrdiff_t>(last + 1));
    double total = 0.0;
    for (double v : p) total += v;
    if (total <= 0.0)
        throw Error(ErrorCode::AllZeroBand, "band [" + std::to_string(band.f_lower) + ", " +
                                                std::to_string(band.f_upper) + "] has no power");
    for (double& v : p) v /= total;
    return p;
}

}  // namespace

PowerSpectrum welch_psd(const FWaveSegment& segment, const WelchConfig& cfg) {
    const double fs = segment.sampling_rate;
    if (!(fs > 0.0)) throw Error(ErrorCode::BadSamplingRate, "segment sampling rate must be positive");
    if (cfg.overlap >= cfg.window_len)
        throw Error(ErrorCode::BadParams, "overlap must be smaller than the window");

    // Constants are defined at the reference rate; rescale to this record.
    const auto win_len = static_cast<std::size_t>(
        std::llround(static_cast<double>(cfg.window_len) * fs / kRefRate));
    const auto overlap = static_cast<std::size_t>(
        std::llround(static_cast<double>(cfg.overlap) * fs / kRefRate));
    const std::size_t n = segment.samples.size();
    if (n < win_len)
        throw Error(ErrorCode::SegmentTooShort, "need " + std::to_string(win_len) +
                                                    " samples for one window, got " +
                                                    std::to_string(n));

    const auto nfft = static_cast<std::size_t>(std::llround(fs / cfg.fft_resolution));
    if (nfft < win_len)
        throw Error(ErrorCode::BadParams, "fft_resolution too coarse for the window length");

    const auto window = hamming(win_len);
    double win_power = 0.0;
    for (double w : window) win_power += w * w;

    const std::size_t step = win_len - overlap;
    const std::size_t n_sections = (n - win_len) / step + 1;
    const std::size_t n_bins = nfft / 2 + 1;

    std::vector<double> in(nfft, 0.0);
    std::vector<std::complex<double>> out(n_bins);
    std::vector<double> acc(n_bins, 0.0);
    fftw_plan plan = r2c_plan(nfft);

    for (std::size_t s = 0; s < n_sections; ++s) {
        const std::size_t start = s * step;
        for (std::size_t i = 0; i < win_len; ++i)
            in[i] = segment.samples[start + i] * window[i];
        std::fill(in.begin() + static_cast<std::ptrdiff_t>(win_len), in.end(), 0.0);
        fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
        for (std::size_t k = 0; k < n_bins; ++k) acc[k] += std::norm(out[k]);
    }

    // One-sided PSD with window-power normalization: sum(psd) * df recovers
    // the section-averaged variance.
    const double scale = 1.0 / (fs * win_power * static_cast<double>(n_sections));
    PowerSpectrum spec;
    spec.f_start = 0.0;
    spec.f_step = fs / static_cast<double>(nfft);
    spec.values.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        double v = acc[k] * scale;
        const bool is_edge = k == 0 || (nfft % 2 == 0 && k == n_bins - 1);
        spec.values[k] = is_edge ? v : 2.0 * v;
    }
    return spec;
}

Peak dominant_frequency(const PowerSpectrum& spec, const Band& search_band) {
    auto [first, last] = bin_range(spec, search_band.f_lower, search_band.f_upper, true);
    std::size_t best = first;
    for (std::size_t k = first + 1; k <= last; ++k)
        if (spec.values[k] > spec.values[best]) best = k;  // strict: ties stay low
    return {spec.frequency_of(best), spec.values[best] * spec.f_step};
}

Peak first_harmonic(const PowerSpectrum& spec, double f0) {
    const double center = 2.0 * f0;
    if (center + 0.5 > spec.max_frequency() + spec.f_step * 1e-6)
        throw Error(ErrorCode::HarmonicOutOfRange,
                    "harmonic window around " + std::to_string(center) +
                        " Hz exceeds the spectrum");
    auto [first, last] = bin_range(spec, center - 0.5, center + 0.5, true);
    std::size_t best = first;
    for (std::size_t k = first + 1; k <= last; ++k)
        if (spec.values[k] > spec.values[best]) best = k;
    return {spec.frequency_of(best), spec.values[best] * spec.f_step};
}

double harmonic_decay(double w_f0, double w_f1) {
    if (!(w_f0 > 0.0) || !(w_f1 > 0.0))
        throw Error(ErrorCode::NonPositivePower, "peak powers must be positive");
    return std::log(w_f0 / w_f1);
}

double organization_index(const PowerSpectrum& spec, double f0) {
    const Band tf{3.0, 25.0, BandKind::TF};
    auto [tf_first, tf_last] = band_bins(spec, tf);

    double total = 0.0;
    for (std::size_t k = tf_first; k <= tf_last; ++k) total += spec.values[k];
    if (total <= 0.0) throw Error(ErrorCode::AllZeroBand, "no power in [3, 25] Hz");

    // 1 Hz windows at the DF, the detected first harmonic, and the local
    // peak near the second harmonic; all clipped to [3, 25].
    std::vector<double> centers = {f0};
    centers.push_back(first_harmonic(spec, f0).freq);
    double h2 = 3.0 * f0;
    if (h2 - 0.5 <= 25.0) {
        auto lo = std::max(3.0, h2 - 0.5);
        auto hi = std::min(25.0, h2 + 0.5);
        auto [first, last] = bin_range(spec, lo, hi, true);
        std::size_t best = first;
        for (std::size_t k = first + 1; k <= last; ++k)
            if (spec.values[k] > spec.values[best]) best = k;
        centers.push_back(spec.frequency_of(best));
    }

    std::vector<char> in_window(tf_last - tf_first + 1, 0);
    for (double c : centers) {
        double lo = std::max(3.0, c - 0.5);
        double hi = std::min(25.0, c + 0.5);
        if (lo > hi) continue;
        auto [first, last] = bin_range(spec, lo, hi, true);
        for (std::size_t k = std::max(first, tf_first); k <= std::min(last, tf_last); ++k)
            in_window[k - tf_first] = 1;
    }

    double peaks = 0.0;
    for (std::size_t k = tf_first; k <= tf_last; ++k)
        if (in_window[k - tf_first]) peaks += spec.values[k];
    return peaks / total;
}

BandSplit band_split(double f0) {
    if (f0 < 3.0 || f0 > 12.0)
        throw Error(ErrorCode::BadParams, "dominant frequency outside [3, 12] Hz");
    // cut = 1.5 * f0 on the 0.1 Hz grid, round half up, in integer
    // deci-hertz to dodge float snapping artifacts (5.7 -> 8.55 -> 8.6).
    auto f0_deci = static_cast<long long>(std::llround(f0 * 10.0));
    auto cut_deci = (3 * f0_deci + 1) / 2;
    double cut = static_cast<double>(cut_deci) / 10.0;

    BandSplit b;
    b.lf = {3.0, cut, BandKind::LF};
    b.hf = {cut, 25.0, BandKind::HF};
    b.tf = {3.0, 25.0, BandKind::TF};
    return b;
}

std::pair<std::size_t, std::size_t> band_bins(const PowerSpectrum& spec, const Band& band) {
    // Bin centers in [f_lower, f_upper); HF and TF end at the fixed 25.0 Hz
    // edge, which is included so LF + HF tile TF exactly.
    return bin_range(spec, band.f_lower, band.f_upper, band.kind != BandKind::LF);
}

double spectral_flatness(const PowerSpectrum& spec, const Band& band) {
    auto [first, last] = band_bins(spec, band);
    const std::size_t n = last - first + 1;

    double max_v = 0.0;
    for (std::size_t k = first; k <= last; ++k) max_v = std::max(max_v, spec.values[k]);
    if (max_v <= 0.0)
        throw Error(ErrorCode::AllZeroBand, "flatness undefined for an all-zero band");

    const double eps = 1e-15 * max_v;
    double log_sum = 0.0, sum = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
        double v = spec.values[k];
        log_sum += std::log(std::max(v, eps));
        sum += v;
    }
    double gm = std::exp(log_sum / static_cast<double>(n));
    double am = sum / static_cast<double>(n);
    return gm / am;
}

double spectral_entropy(const PowerSpectrum& spec, const Band& band) {
    auto p = band_probabilities(spec, band);
    if (p.size() < 2) return 0.0;  // a single bin carries no uncertainty
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h / std::log(static_cast<double>(p.size()));
}

double renyi_entropy(const PowerSpectrum& spec, const Band& band, double alpha) {
    if (alpha < 0.0 || alpha == 1.0)
        throw Error(ErrorCode::BadAlpha, "alpha must be >= 0 and != 1");
    auto p = band_probabilities(spec, band);
    if (p.size() < 2) return 0.0;
    double s = 0.0;
    for (double v : p)
        if (v > 0.0) s += std::pow(v, alpha);
    return std::log(s) / ((1.0 - alpha) * std::log(static_cast<double>(p.size())));
}

double c0_complexity(const PowerSpectrum& spec, const Band& band) {
    auto p = band_probabilities(spec, band);
    const double threshold = 2.0 / static_cast<double>(p.size());  // 2x the mean probability
    double kept = 0.0;
    for (double v : p)
        if (v <= threshold) kept += v;
    return kept;
}

SpectralFeatures extract_features(const FWaveSegment& segment, const WelchConfig& cfg,
                                  double renyi_alpha) {
    auto spec = welch_psd(segment, cfg);

    // A segment with no power anywhere in [3, 25] Hz has no f-wave content
    // to measure; fail here rather than deep inside a peak search.
    const Band tf{3.0, 25.0, BandKind::TF};
    auto [tf_first, tf_last] = band_bins(spec, tf);
    double tf_power = 0.0;
    for (std::size_t k = tf_first; k <= tf_last; ++k) tf_power += spec.values[k];
    if (tf_power <= 0.0)
        throw Error(ErrorCode::AllZeroBand, "segment has no spectral power in [3, 25] Hz");

    const Band search{cfg.df_low, cfg.df_high, BandKind::TF};
    auto df = dominant_frequency(spec, search);
    auto h1 = first_harmonic(spec, df.freq);

    SpectralFeatures out;
    out.f0 = df.freq;
    out.w_f0 = df.power;
    out.f1 = h1.freq;
    out.w_f1 = h1.power;
    out.gamma = harmonic_decay(df.power, h1.power);
    out.org_index = organization_index(spec, df.freq);

    auto bands = band_split(df.freq);
    out.f_lf = spectral_flatness(spec, bands.lf);
    out.s_lf = spectral_entropy(spec, bands.lf);
    out.r_lf = renyi_entropy(spec, bands.lf, renyi_alpha);
    out.c0_lf = c0_complexity(spec, bands.lf);
    out.f_hf = spectral_flatness(spec, bands.hf);
    out.s_hf = spectral_entropy(spec, bands.hf);
    out.r_hf = renyi_entropy(spec, bands.hf, renyi_alpha);
    out.c0_hf = c0_complexity(spec, bands.hf);
    out.f_tf = spectral_flatness(spec, bands.tf);
    out.s_tf = spectral_entropy(spec, bands.tf);
    out.r_tf = renyi_entropy(spec, bands.tf, renyi_alpha);
    out.c0_tf = c0_complexity(spec, bands.tf);
    return out;
}

}  // namespace fwave
