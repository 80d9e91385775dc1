#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fwave/core.hpp"

namespace fwave {

struct CohortEntry {
    PatientFeatureVector features;
    std::optional<ClinicalRecord> clinical;
};

struct Cohort {
    std::vector<CohortEntry> patients;
};

enum class GroupTest { t, mann_whitney };
const char* group_test_name(GroupTest test);

// Per-feature group summary: mean +- SD per outcome and the p-value from the
// normality/homoscedasticity-gated test.
struct GroupComparison {
    std::string feature_name;
    double mean_sr = 0.0, sd_sr = 0.0;
    double mean_af = 0.0, sd_af = 0.0;
    GroupTest test_used = GroupTest::t;
    double p_value = 1.0;
};

// Consecutive non-overlapping 6 s segments from the start of the record,
// five at most; the trailing remainder is discarded.
std::vector<FWaveSegment> segment_signal(const EcgRecord& fwave);

// Per-field arithmetic mean across a patient's segment features.
PatientFeatureVector aggregate_patient(const std::vector<SpectralFeatures>& features,
                                       const std::string& patient_id, Outcome outcome);

// Throws unless patient ids are unique and every outcome is SR or AF.
void validate_cohort(const Cohort& cohort);

// The branch rule behind compare_groups, usable on any two samples: Student t
// when both pass the normality check and Levene accepts equal variances
// (alpha = 0.05 each), Mann-Whitney otherwise.
std::pair<GroupTest, double> gated_test(const std::vector<double>& a,
                                        const std::vector<double>& b);

// Student t when both groups pass the normality check and Levene accepts
// equal variances (alpha = 0.05 each); Mann-Whitney otherwise.
GroupComparison compare_groups(const Cohort& cohort, const std::string& feature_name);

// compare_groups over every feature; jobs as in parallel_for.
std::vector<GroupComparison> compare_all_features(const Cohort& cohort, int jobs = 1);

}  // namespace fwave
