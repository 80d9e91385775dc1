#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwave {

// Error taxonomy shared by the whole library. Every throwing operation uses
// fwave::Error so callers can branch on code() instead of parsing messages.
enum class ErrorCode {
    NonFiniteSample,
    EmptyRecord,
    BadSamplingRate,
    RecordTooShortForFilter,
    NoBeatsFound,
    InsufficientBeats,
    SegmentTooShort,
    EmptyBand,
    AllZeroBand,
    NonPositivePower,
    HarmonicOutOfRange,
    BadAlpha,
    SampleTooSmall,
    RecordTooShort,
    EmptyList,
    SingularCovariance,
    ClassMissing,
    DimensionMismatch,
    OneClassOnly,
    FoldWithoutBothClasses,
    LengthMismatch,
    BadParams,
    ParseError,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class Stage { raw, preprocessed, fwave };
enum class Outcome { sr, af, unknown };

const char* stage_name(Stage s);
Stage stage_from_name(const std::string& name);
const char* outcome_name(Outcome o);
Outcome outcome_from_name(const std::string& name);

// Single-lead ECG. Amplitudes are millivolts end-to-end.
struct EcgRecord {
    std::string patient_id;
    std::string lead = "V1";
    double sampling_rate = 977.0;  // Hz
    Stage stage = Stage::raw;
    std::vector<double> samples;   // mV

    double duration_s() const {
        return sampling_rate > 0 ? static_cast<double>(samples.size()) / sampling_rate : 0.0;
    }
};

// Number of samples in a 6 s analysis segment at the given rate.
std::size_t segment_length(double sampling_rate);

// Ascending R-peak sample positions, at least 0.25 s apart.
using RPeakList = std::vector<std::size_t>;

// Ventricular-activity-free excerpt of fixed 6 s duration.
struct FWaveSegment {
    std::string patient_id;
    int segment_index = 0;
    double sampling_rate = 977.0;
    std::vector<double> samples;  // mV, exactly segment_length(sampling_rate) long
};

// PSD on a uniform frequency grid; index k maps to f_start + k * f_step.
struct PowerSpectrum {
    double f_start = 0.0;
    double f_step = 0.1;               // Hz
    std::vector<double> values;        // mV^2/Hz

    double frequency_of(std::size_t k) const { return f_start + static_cast<double>(k) * f_step; }
    std::size_t index_of(double f) const;  // nearest grid point, clamped to range
    double max_frequency() const {
        return values.empty() ? f_start : frequency_of(values.size() - 1);
    }
};

enum class BandKind { LF, HF, TF };

const char* band_kind_name(BandKind k);

// Half-open frequency interval [f_lower, f_upper); the total band [3, 25]
// additionally includes its upper edge (see band_bins in spectral).
struct Band {
    double f_lower = 0.0;  // Hz
    double f_upper = 0.0;  // Hz
    BandKind kind = BandKind::TF;
};

// The per-segment feature set: dominant-frequency quantities plus four
// spectral concentration/entropy measures over the LF, HF and TF bands.
struct SpectralFeatures {
    double f0 = 0.0;        // dominant frequency, Hz
    double w_f0 = 0.0;      // power at f0 (PSD bin * 0.1 Hz), mV^2
    double f1 = 0.0;        // first harmonic frequency, Hz
    double w_f1 = 0.0;      // power at f1, mV^2
    double gamma = 0.0;     // ln(w_f0 / w_f1)
    double org_index = 0.0; // fraction of [3, 25] Hz power near f0 and harmonics

    double f_lf = 0.0, s_lf = 0.0, r_lf = 0.0, c0_lf = 0.0;
    double f_hf = 0.0, s_hf = 0.0, r_hf = 0.0, c0_hf = 0.0;
    double f_tf = 0.0, s_tf = 0.0, r_tf = 0.0, c0_tf = 0.0;

    static constexpr std::size_t count = 18;
    static const std::array<const char*, count>& names();
    std::array<double, count> as_array() const;
    static SpectralFeatures from_array(const std::array<double, count>& a);
};

// Per-patient mean feature vector over up to five consecutive segments.
struct PatientFeatureVector {
    std::string patient_id;
    SpectralFeatures features;
    int n_segments = 0;
    Outcome outcome = Outcome::unknown;
};

enum class Sex { female, male, unknown };
enum class AfDurationClass { under_1y, from_1_to_3y, over_3y, unknown };

const char* sex_name(Sex s);
Sex sex_from_name(const std::string& name);
const char* af_duration_name(AfDurationClass c);
AfDurationClass af_duration_from_name(const std::string& name);

// Baseline clinical characteristics; optional fields may be absent.
struct ClinicalRecord {
    std::string patient_id;
    Sex sex = Sex::unknown;
    std::optional<double> age_years;
    AfDurationClass af_duration = AfDurationClass::unknown;
    std::optional<double> bmi;          // kg/m^2
    std::optional<double> la_diameter;  // mm
};

struct ValidatedRecord {
    EcgRecord record;
    // True when the record is at least 6 s long and can be segmented for
    // feature extraction; shorter records are still usable for preprocessing.
    bool segmentable = false;
};

// Checks the EcgRecord invariants: non-empty, positive sampling rate, all
// samples finite. Throws fwave::Error on violation.
ValidatedRecord validate_record(const EcgRecord& record);

// Mixes a base seed with a stream index (splitmix64 finalizer) so per-patient
// or per-repeat generators are decorrelated yet fully reproducible.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace fwave
