#include "fwave/ventricular.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fwave/iir.hpp"

namespace fwave {

namespace {

constexpr double k_refractory_s = 0.25;
constexpr double k_window_pre_s = 0.10;
constexpr double k_window_post_s = 0.45;
constexpr double k_rr_cap = 0.85;  // window never reaches past this RR fraction

// Zero-phase 5-25 Hz band-pass as the difference of two low-pass estimates.
std::vector<double> qrs_bandpass(const std::vector<double>& x, double fs) {
    auto lo = filtfilt(butterworth_lowpass(4, 25.0, fs), x);
    auto base = filtfilt(butterworth_lowpass(4, 5.0, fs), x);
    for (std::size_t i = 0; i < lo.size(); ++i) lo[i] -= base[i];
    return lo;
}

// Centred moving average of the squared band-passed signal.
std::vector<double> moving_integration(const std::vector<double>& bp, double fs) {
    const std::size_t n = bp.size();
    const std::ptrdiff_t half = std::max<std::ptrdiff_t>(1, std::llround(0.075 * fs));
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + bp[i] * bp[i];
    std::vector<double> mwi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - half);
        const std::ptrdiff_t b =
            std::min<std::ptrdiff_t>(n, static_cast<std::ptrdiff_t>(i) + half + 1);
        mwi[i] = (prefix[b] - prefix[a]) / static_cast<double>(b - a);
    }
    return mwi;
}

std::size_t template_pre_samples(const QrstTemplate& tmpl) {
    return static_cast<std::size_t>(std::llround(tmpl.window_pre * tmpl.sampling_rate));
}

}  // namespace

RPeakList detect_r_peaks(const EcgRecord& record) {
    validate_record(record);
    const double fs = record.sampling_rate;
    const std::size_t n = record.samples.size();
    if (record.duration_s() < 2.0)
        throw Error(ErrorCode::RecordTooShort, "need at least 2 s to detect beats");

    const auto bp = qrs_bandpass(record.samples, fs);
    const auto mwi = moving_integration(bp, fs);

    auto sorted = mwi;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double med = sorted[sorted.size() / 2];
    const double mx = *std::max_element(mwi.begin(), mwi.end());
    // Atrial-only and flat records have no spikes standing above the running
    // background; bail out instead of thresholding noise.
    if (mx <= 0.0 || mx < 6.0 * med)
        throw Error(ErrorCode::NoBeatsFound, "no ventricular spikes above background");

    const std::size_t refractory = static_cast<std::size_t>(std::llround(k_refractory_s * fs));
    double spki = 0.5 * mx;
    double npki = med;
    double thr = npki + 0.25 * (spki - npki);

    std::vector<std::size_t> rough;  // integration-peak positions
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(mwi[i] > mwi[i - 1] && mwi[i] >= mwi[i + 1])) continue;
        if (mwi[i] >= thr) {
            if (!rough.empty() && i - rough.back() < refractory) {
                if (mwi[i] > mwi[rough.back()]) rough.back() = i;
            } else {
                rough.push_back(i);
                spki = 0.125 * mwi[i] + 0.875 * spki;
            }
        } else {
            npki = 0.125 * mwi[i] + 0.875 * npki;
        }
        thr = npki + 0.25 * (spki - npki);
    }

    // Refine each integration peak to the apex of the band-passed signal.
    const std::ptrdiff_t reach = std::llround(0.10 * fs);
    RPeakList peaks;
    for (std::size_t p : rough) {
        const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(p) - reach);
        const std::ptrdiff_t b =
            std::min<std::ptrdiff_t>(n, static_cast<std::ptrdiff_t>(p) + reach + 1);
        std::size_t best = static_cast<std::size_t>(a);
        for (std::ptrdiff_t i = a; i < b; ++i)
            if (bp[i] > bp[best]) best = static_cast<std::size_t>(i);
        if (!peaks.empty() && best - peaks.back() < refractory) {
            if (bp[best] > bp[peaks.back()]) peaks.back() = best;
        } else if (peaks.empty() || best > peaks.back()) {
            peaks.push_back(best);
        }
    }

    if (peaks.size() < 2)
        throw Error(ErrorCode::NoBeatsFound, "fewer than two beats detected");
    return peaks;
}

QrstTemplate build_qrst_template(const EcgRecord& record, const RPeakList& peaks) {
    const double fs = record.sampling_rate;
    const std::size_t n = record.samples.size();
    QrstTemplate tmpl;
    tmpl.window_pre = k_window_pre_s;
    tmpl.window_post = k_window_post_s;
    tmpl.sampling_rate = fs;
    const std::size_t pre = static_cast<std::size_t>(std::llround(k_window_pre_s * fs));
    const std::size_t len =
        static_cast<std::size_t>(std::llround((k_window_pre_s + k_window_post_s) * fs));

    std::vector<std::size_t> usable;
    for (std::size_t r : peaks)
        if (r >= pre && r - pre + len <= n) usable.push_back(r);
    if (usable.size() < 2)
        throw Error(ErrorCode::InsufficientBeats,
                    "need at least two beats with a full window for the template");

    Eigen::MatrixXd beats(static_cast<Eigen::Index>(len),
                          static_cast<Eigen::Index>(usable.size()));
    for (std::size_t c = 0; c < usable.size(); ++c) {
        const std::size_t start = usable[c] - pre;
        for (std::size_t i = 0; i < len; ++i)
            beats(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                record.samples[start + i];
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(beats, Eigen::ComputeThinU);
    Eigen::VectorXd shape = svd.matrixU().col(0);
    const Eigen::VectorXd mean_beat = beats.rowwise().mean();
    if (shape.dot(mean_beat) < 0.0) shape = -shape;
    const double mean_energy = beats.colwise().squaredNorm().mean();
    shape *= std::sqrt(mean_energy);

    tmpl.samples.assign(shape.data(), shape.data() + shape.size());
    return tmpl;
}

EcgRecord cancel_qrst(const EcgRecord& record, const RPeakList& peaks,
                      const QrstTemplate& tmpl, std::vector<std::size_t>* skipped) {
    EcgRecord out = record;
    out.stage = Stage::fwave;
    if (skipped) skipped->clear();
    if (peaks.empty()) return out;

    const double fs = record.sampling_rate;
    const std::size_t n = record.samples.size();
    const std::size_t want =
        static_cast<std::size_t>(std::llround((tmpl.window_pre + tmpl.window_post) * fs));
    if (tmpl.samples.size() != want || want == 0)
        throw Error(ErrorCode::DimensionMismatch, "template does not fit this sampling rate");
    for (std::size_t b = 1; b < peaks.size(); ++b)
        if (peaks[b] <= peaks[b - 1])
            throw Error(ErrorCode::BadParams, "peaks must be strictly increasing");

    const std::size_t pre = template_pre_samples(tmpl);
    const std::size_t len = tmpl.samples.size();
    for (std::size_t b = 0; b < peaks.size(); ++b) {
        const std::size_t r = peaks[b];
        if (r < pre) {
            if (skipped) skipped->push_back(r);
            continue;
        }
        const std::size_t start = r - pre;
        std::size_t stop = start + len;
        if (b + 1 < peaks.size()) {
            const std::size_t rr = peaks[b + 1] - r;
            stop = std::min(stop, r + static_cast<std::size_t>(std::llround(k_rr_cap * rr)));
            if (peaks[b + 1] >= pre) stop = std::min(stop, peaks[b + 1] - pre);
        }
        if (stop > n) {
            if (skipped) skipped->push_back(r);
            continue;
        }
        const std::size_t wlen = stop - start;
        if (wlen < 2) {
            if (skipped) skipped->push_back(r);
            continue;
        }

        double tt = 0.0, tx = 0.0;
        for (std::size_t i = 0; i < wlen; ++i) {
            tt += tmpl.samples[i] * tmpl.samples[i];
            tx += tmpl.samples[i] * out.samples[start + i];
        }
        const double a = tt > 0.0 ? tx / tt : 0.0;
        for (std::size_t i = 0; i < wlen; ++i) out.samples[start + i] -= a * tmpl.samples[i];

        // Linear ramp so the window endpoints meet the neighbouring samples.
        const double d0 = start > 0 ? out.samples[start] - out.samples[start - 1] : 0.0;
        const double d1 = stop < n ? out.samples[stop - 1] - out.samples[stop] : 0.0;
        for (std::size_t i = 0; i < wlen; ++i) {
            const double frac = static_cast<double>(i) / static_cast<double>(wlen - 1);
            out.samples[start + i] -= d0 + (d1 - d0) * frac;
        }
    }
    return out;
}

EcgRecord extract_fwaves(const EcgRecord& record) {
    RPeakList peaks;
    try {
        peaks = detect_r_peaks(record);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoBeatsFound) {
            EcgRecord out = record;
            out.stage = Stage::fwave;
            return out;
        }
        throw;
    }
    const auto tmpl = build_qrst_template(record, peaks);
    return cancel_qrst(record, peaks, tmpl);
}

}  // namespace fwave
