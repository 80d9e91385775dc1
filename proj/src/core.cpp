#include "fwave/core.hpp"

#include <cmath>

namespace fwave {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteSample: return "NonFiniteSample";
        case ErrorCode::EmptyRecord: return "EmptyRecord";
        case ErrorCode::BadSamplingRate: return "BadSamplingRate";
        case ErrorCode::RecordTooShortForFilter: return "RecordTooShortForFilter";
        case ErrorCode::NoBeatsFound: return "NoBeatsFound";
        case ErrorCode::InsufficientBeats: return "InsufficientBeats";
        case ErrorCode::SegmentTooShort: return "SegmentTooShort";
        case ErrorCode::EmptyBand: return "EmptyBand";
        case ErrorCode::AllZeroBand: return "AllZeroBand";
        case ErrorCode::NonPositivePower: return "NonPositivePower";
        case ErrorCode::HarmonicOutOfRange: return "HarmonicOutOfRange";
        case ErrorCode::BadAlpha: return "BadAlpha";
        case ErrorCode::SampleTooSmall: return "SampleTooSmall";
        case ErrorCode::RecordTooShort: return "RecordTooShort";
        case ErrorCode::EmptyList: return "EmptyList";
        case ErrorCode::SingularCovariance: return "SingularCovariance";
        case ErrorCode::ClassMissing: return "ClassMissing";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::OneClassOnly: return "OneClassOnly";
        case ErrorCode::FoldWithoutBothClasses: return "FoldWithoutBothClasses";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::raw: return "raw";
        case Stage::preprocessed: return "preprocessed";
        case Stage::fwave: return "fwave";
    }
    return "raw";
}

Stage stage_from_name(const std::string& name) {
    if (name == "raw") return Stage::raw;
    if (name == "preprocessed") return Stage::preprocessed;
    if (name == "fwave") return Stage::fwave;
    throw Error(ErrorCode::ParseError, "unknown stage '" + name + "'");
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::sr: return "SR";
        case Outcome::af: return "AF";
        case Outcome::unknown: return "unknown";
    }
    return "unknown";
}

Outcome outcome_from_name(const std::string& name) {
    if (name == "SR") return Outcome::sr;
    if (name == "AF") return Outcome::af;
    if (name == "unknown") return Outcome::unknown;
    throw Error(ErrorCode::ParseError, "unknown outcome '" + name + "'");
}

const char* sex_name(Sex s) {
    switch (s) {
        case Sex::female: return "female";
        case Sex::male: return "male";
        case Sex::unknown: return "unknown";
    }
    return "unknown";
}

Sex sex_from_name(const std::string& name) {
    if (name == "female") return Sex::female;
    if (name == "male") return Sex::male;
    if (name.empty() || name == "unknown") return Sex::unknown;
    throw Error(ErrorCode::ParseError, "unknown sex '" + name + "'");
}

const char* af_duration_name(AfDurationClass c) {
    switch (c) {
        case AfDurationClass::under_1y: return "under_1y";
        case AfDurationClass::from_1_to_3y: return "1_to_3y";
        case AfDurationClass::over_3y: return "over_3y";
        case AfDurationClass::unknown: return "unknown";
    }
    return "unknown";
}

AfDurationClass af_duration_from_name(const std::string& name) {
    if (name == "under_1y") return AfDurationClass::under_1y;
    if (name == "1_to_3y") return AfDurationClass::from_1_to_3y;
    if (name == "over_3y") return AfDurationClass::over_3y;
    if (name.empty() || name == "unknown") return AfDurationClass::unknown;
    throw Error(ErrorCode::ParseError, "unknown AF duration class '" + name + "'");
}

const char* band_kind_name(BandKind k) {
    switch (k) {
        case BandKind::LF: return "LF";
        case BandKind::HF: return "HF";
        case BandKind::TF: return "TF";
    }
    return "TF";
}

std::size_t segment_length(double sampling_rate) {
    return static_cast<std::size_t>(std::llround(6.0 * sampling_rate));
}

std::size_t PowerSpectrum::index_of(double f) const {
    if (values.empty()) return 0;
    double k = (f - f_start) / f_step;
    long long i = std::llround(k);
    if (i < 0) i = 0;
    long long last = static_cast<long long>(values.size()) - 1;
    if (i > last) i = last;
    return static_cast<std::size_t>(i);
}

const std::array<const char*, SpectralFeatures::count>& SpectralFeatures::names() {
    static const std::array<const char*, count> k = {
        "f0",   "W_f0", "f1",   "W_f1", "gamma", "O",
        "F_LF", "S_LF", "R_LF", "C0_LF",
        "F_HF", "S_HF", "R_HF", "C0_HF",
        "F_TF", "S_TF", "R_TF", "C0_TF",
    };
    return k;
}

std::array<double, SpectralFeatures::count> SpectralFeatures::as_array() const {
    return {f0,   w_f0, f1,   w_f1, gamma, org_index,
            f_lf, s_lf, r_lf, c0_lf,
            f_hf, s_hf, r_hf, c0_hf,
            f_tf, s_tf, r_tf, c0_tf};
}

SpectralFeatures SpectralFeatures::from_array(const std::array<double, count>& a) {
    SpectralFeatures s;
    s.f0 = a[0];
    s.w_f0 = a[1];
    s.f1 = a[2];
    s.w_f1 = a[3];
    s.gamma = a[4];
    s.org_index = a[5];
    s.f_lf = a[6];
    s.s_lf = a[7];
    s.r_lf = a[8];
    s.c0_lf = a[9];
    s.f_hf = a[10];
    s.s_hf = a[11];
    s.r_hf = a[12];
    s.c0_hf = a[13];
    s.f_tf = a[14];
    s.s_tf = a[15];
    s.r_tf = a[16];
    s.c0_tf = a[17];
    return s;
}

ValidatedRecord validate_record(const EcgRecord& record) {
    if (record.samples.empty())
        throw Error(ErrorCode::EmptyRecord, "record '" + record.patient_id + "' has no samples");
    if (!(record.sampling_rate > 0.0) || !std::isfinite(record.sampling_rate))
        throw Error(ErrorCode::BadSamplingRate,
                    "sampling rate must be positive and finite, got " +
                        std::to_string(record.sampling_rate));
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        if (!std::isfinite(record.samples[i]))
            throw Error(ErrorCode::NonFiniteSample,
                        "sample " + std::to_string(i) + " of record '" + record.patient_id +
                            "' is not finite");
    }
    ValidatedRecord v;
    v.record = record;
    v.segmentable = record.samples.size() >= segment_length(record.sampling_rate);
    return v;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace fwave
