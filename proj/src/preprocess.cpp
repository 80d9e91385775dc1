#include "fwave/preprocess.hpp"

#include <string>

#include "fwave/iir.hpp"
#include "fwave/swt.hpp"

namespace fwave {

namespace {

void check_config(const PreprocessConfig& cfg, double fs) {
    if (!(cfg.baseline_cutoff > 0.0) || !(cfg.baseline_cutoff < cfg.mains_freq) ||
        !(cfg.mains_freq < fs / 2.0))
        throw Error(ErrorCode::BadParams,
                    "need 0 < baseline_cutoff < mains_freq < sampling_rate/2");
    if (!(cfg.lowpass_cutoff > 0.0) || !(cfg.lowpass_cutoff < fs / 2.0))
        throw Error(ErrorCode::BadParams, "lowpass_cutoff must lie in (0, sampling_rate/2)");
    if (cfg.notch_harmonics < 0)
        throw Error(ErrorCode::BadParams, "notch_harmonics must be >= 0");
}

}  // namespace

std::vector<double> mains_tones(const PreprocessConfig& cfg) {
    std::vector<double> tones;
    if (cfg.notch_harmonics > 0) {
        for (int k = 1; k <= cfg.notch_harmonics; ++k)
            tones.push_back(cfg.mains_freq * static_cast<double>(k));
    } else {
        for (double f = cfg.mains_freq; f < cfg.lowpass_cutoff; f += cfg.mains_freq)
            tones.push_back(f);
        if (tones.empty()) tones.push_back(cfg.mains_freq);
    }
    return tones;
}

EcgRecord remove_baseline(const EcgRecord& record, const PreprocessConfig& cfg) {
    check_config(cfg, record.sampling_rate);
    auto drift_filter = butterworth_lowpass(4, cfg.baseline_cutoff, record.sampling_rate);
    auto drift = filtfilt(drift_filter, record.samples);
    EcgRecord out = record;
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] -= drift[i];
    return out;
}

EcgRecord remove_powerline(const EcgRecord& record, const PreprocessConfig& cfg) {
    check_config(cfg, record.sampling_rate);
    EcgRecord out = record;
    auto tones = mains_tones(cfg);
    if (cfg.mains_removal == MainsRemoval::notch) {
        for (double f : tones) out.samples = filtfilt(notch(f, 1.0, record.sampling_rate), out.samples);
        return out;
    }
    int levels = band_level(record.sampling_rate, cfg.mains_freq);
    auto to_shrink = levels_containing(record.sampling_rate, levels, tones);
    out.samples = swt_denoise(out.samples, levels, to_shrink);
    return out;
}

EcgRecord lowpass_70(const EcgRecord& record, const PreprocessConfig& cfg) {
    check_config(cfg, record.sampling_rate);
    auto lp = butterworth_lowpass(10, cfg.lowpass_cutoff, record.sampling_rate);
    EcgRecord out = record;
    out.samples = filtfilt(lp, out.samples);
    return out;
}

EcgRecord preprocess(const EcgRecord& record, const PreprocessConfig& cfg) {
    auto validated = validate_record(record);
    EcgRecord out = remove_baseline(validated.record, cfg);
    out = remove_powerline(out, cfg);
    out = lowpass_70(out, cfg);
    out.stage = Stage::preprocessed;
    return out;
}

}  // namespace fwave
