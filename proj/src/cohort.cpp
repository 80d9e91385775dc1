#include "fwave/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_set>

#include "fwave/parallel.hpp"
#include "fwave/stats.hpp"

namespace fwave {

namespace {

constexpr double k_branch_alpha = 0.05;
constexpr std::size_t k_max_segments = 5;

std::size_t feature_index(const std::string& name) {
    const auto& names = SpectralFeatures::names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (name == names[i]) return i;
    throw Error(ErrorCode::BadParams, "unknown feature: " + name);
}

double mean_of(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

double sd_of(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

}  // namespace

const char* group_test_name(GroupTest test) {
    return test == GroupTest::t ? "t" : "mann_whitney";
}

std::vector<FWaveSegment> segment_signal(const EcgRecord& fwave) {
    const std::size_t seg = segment_length(fwave.sampling_rate);
    if (seg == 0) throw Error(ErrorCode::BadSamplingRate, "sampling rate must be positive");
    if (fwave.samples.size() < seg)
        throw Error(ErrorCode::RecordTooShort, "need at least 6 s to segment");

    const std::size_t count = std::min(k_max_segments, fwave.samples.size() / seg);
    std::vector<FWaveSegment> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        FWaveSegment piece;
        piece.patient_id = fwave.patient_id;
        piece.segment_index = static_cast<int>(s);
        piece.sampling_rate = fwave.sampling_rate;
        piece.samples.assign(fwave.samples.begin() + static_cast<std::ptrdiff_t>(s * seg),
                             fwave.samples.begin() + static_cast<std::ptrdiff_t>((s + 1) * seg));
        out.push_back(std::move(piece));
    }
    return out;
}

PatientFeatureVector aggregate_patient(const std::vector<SpectralFeatures>& features,
                                       const std::string& patient_id, Outcome outcome) {
    if (features.empty())
        throw Error(ErrorCode::EmptyList, "no segment features to aggregate");

    std::array<double, SpectralFeatures::count> acc{};
    for (const auto& f : features) {
        const auto row = f.as_array();
        for (std::size_t i = 0; i < row.size(); ++i) acc[i] += row[i];
    }
    for (double& v : acc) v /= static_cast<double>(features.size());

    PatientFeatureVector out;
    out.patient_id = patient_id;
    out.features = SpectralFeatures::from_array(acc);
    out.n_segments = static_cast<int>(features.size());
    out.outcome = outcome;
    return out;
}

void validate_cohort(const Cohort& cohort) {
    std::unordered_set<std::string> seen;
    for (const auto& entry : cohort.patients) {
        if (!seen.insert(entry.features.patient_id).second)
            throw Error(ErrorCode::BadParams,
                        "duplicate patient id: " + entry.features.patient_id);
        if (entry.features.outcome == Outcome::unknown)
            throw Error(ErrorCode::BadParams,
                        "outcome missing for patient " + entry.features.patient_id);
    }
}

GroupComparison compare_groups(const Cohort& cohort, const std::string& feature_name) {
    validate_cohort(cohort);
    const std::size_t idx = feature_index(feature_name);

    std::vector<double> sr, af;
    for (const auto& entry : cohort.patients) {
        const double v = entry.features.features.as_array()[idx];
        (entry.features.outcome == Outcome::sr ? sr : af).push_back(v);
    }
    if (sr.empty() || af.empty())
        throw Error(ErrorCode::ClassMissing, "both outcome groups must be present");

    GroupComparison cmp;
    cmp.feature_name = feature_name;
    cmp.mean_sr = mean_of(sr);
    cmp.sd_sr = sd_of(sr);
    cmp.mean_af = mean_of(af);
    cmp.sd_af = sd_of(af);

    std::tie(cmp.test_used, cmp.p_value) = gated_test(sr, af);
    return cmp;
}

std::pair<GroupTest, double> gated_test(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    const bool normal = lilliefors(a) >= k_branch_alpha && lilliefors(b) >= k_branch_alpha;
    const bool homoscedastic = levene({a, b}) >= k_branch_alpha;
    if (normal && homoscedastic) return {GroupTest::t, t_test(a, b)};
    return {GroupTest::mann_whitney, mann_whitney(a, b)};
}

std::vector<GroupComparison> compare_all_features(const Cohort& cohort, int jobs) {
    const auto& names = SpectralFeatures::names();
    std::vector<GroupComparison> out(names.size());
    parallel_for(names.size(), jobs,
                 [&](std::size_t i) { out[i] = compare_groups(cohort, names[i]); });
    return out;
}

}  // namespace fwave
