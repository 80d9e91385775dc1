#pragma once

#include <string>
#include <vector>

#include "fwave/core.hpp"

namespace fwave {

// Shortest decimal string that parses back to the identical IEEE-754 double
// (std::to_chars with no precision); non-finite values print as inf/-inf/nan.
std::string format_double(double v);

// Inverse of format_double; the whole string must be one number. Throws
// ParseError with `what` naming the offending value.
double parse_double(const std::string& text, const std::string& what);

// Path of the JSON companion of a CSV file: extension swapped to .json.
std::string sidecar_path(const std::string& csv_path);

// Signal files: CSV with header `sample_index,amplitude_mv` plus a JSON
// sidecar {patient_id, lead, sampling_rate_hz, stage} at sidecar_path().
// Loading reads both; errors carry path and 1-based line number.
void save_signal(const EcgRecord& record, const std::string& csv_path);
EcgRecord load_signal(const std::string& csv_path);

// One row of a per-patient feature table; failed marks a patient whose
// pipeline run did not produce features (cells written as nan).
struct FeatureRow {
    PatientFeatureVector patient;
    bool failed = false;
};

// Feature tables: CSV with columns patient_id, the eighteen feature names,
// n_segments, outcome, status (ok|failed), plus a JSON mirror at
// sidecar_path() using the same field names (null features on failed rows).
void save_feature_table(const std::vector<FeatureRow>& rows, const std::string& csv_path);
std::vector<FeatureRow> load_feature_table(const std::string& csv_path);

// Clinical tables: CSV with columns patient_id, sex, age_years, af_duration,
// bmi, la_diameter_mm; empty cells are absent optional values.
void save_clinical_table(const std::vector<ClinicalRecord>& rows, const std::string& csv_path);
std::vector<ClinicalRecord> load_clinical_table(const std::string& csv_path);

}  // namespace fwave
