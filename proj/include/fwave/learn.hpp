#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fwave/cohort.hpp"
#include "fwave/core.hpp"

namespace fwave {

// Linear discriminant with AF recurrence as the positive class. weights
// solve pooled_covariance * w = mean_af - mean_sr, where pooled_covariance
// is stored with its stabilising ridge already added.
struct LdaModel {
    std::vector<std::string> feature_names;
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> mean_sr, mean_af;
    std::vector<std::vector<double>> pooled_covariance;
};

// x holds one row per patient. Bias places the boundary at the class-mean
// midpoint, shifted by the log ratio of training priors unless equal_priors.
LdaModel fit_lda(const std::vector<std::vector<double>>& x, const std::vector<Outcome>& y,
                 std::vector<std::string> feature_names = {}, bool equal_priors = false);

// Signed discriminant score; > 0 leans AF.
double score(const LdaModel& model, const std::vector<double>& x);

struct RocPoint {
    double threshold = 0.0;  // predict AF when score >= threshold
    double se = 0.0;
    double sp = 0.0;
};

// One point per distinct score, thresholds descending; auc by trapezoid over
// the staircase, which equals the rank-sum statistic / (n_af * n_sr).
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<Outcome>& labels);

// Threshold with the best Se/Sp balance: minimal |se - sp|, ties broken by
// larger se + sp, then by the lower threshold.
double select_threshold(const RocCurve& curve);

// Fold id per patient. Each class is shuffled and dealt round-robin, the next
// class continuing where the previous one stopped, so per-fold class counts
// and total fold sizes both stay within one of perfectly proportional.
std::vector<int> stratified_folds(const std::vector<Outcome>& y, int n_folds,
                                  std::uint64_t seed);

struct CvConfig {
    int n_folds = 10;
    int n_repeats = 100;
    bool stratified = true;
    bool equal_priors = false;
    std::uint64_t rng_seed = 1;
};

// Means over repeats plus the per-repeat values behind them. auc averages
// the per-test-fold rank statistic within each repeat (unbiased when the
// features carry no signal); the threshold, confusion metrics and
// oof_predictions come from the repeat's pooled out-of-fold scores.
// oof_predictions holds the pooled out-of-fold labels at each repeat's
// selected threshold, repeat-major in cohort order, so two runs with the
// same seed pair up for mcnemar; oof_scores are the scores behind them and
// oof_truth is the cohort-order outcome vector.
struct EvaluationReport {
    double se = 0.0, sp = 0.0, acc = 0.0, auc = 0.0, ppv = 0.0, npv = 0.0;
    std::vector<double> se_runs, sp_runs, acc_runs, auc_runs, ppv_runs, npv_runs;
    std::vector<double> thresholds;
    std::vector<Outcome> oof_truth;
    std::vector<Outcome> oof_predictions;
    std::vector<double> oof_scores;
};

// Repeated stratified k-fold: per repeat, reshuffle, fit on each train
// split, pool held-out scores, build the ROC and confusion at the balanced
// threshold. Repeats use seeds derived from rng_seed, so results are
// identical for any jobs value.
EvaluationReport repeated_cv(const Cohort& cohort, const std::vector<std::string>& features,
                             const CvConfig& cfg, int jobs = 1);

// How often each candidate was picked across all training partitions, and
// the modal selected set.
struct SelectionReport {
    std::vector<std::string> candidates;
    std::vector<double> frequency;
    std::vector<std::string> best_set;
};

// Greedy forward selection run inside every training partition (nested CV,
// misclassification-count criterion); a feature is added only while the
// count strictly drops.
SelectionReport sequential_forward_selection(const Cohort& cohort,
                                             const std::vector<std::string>& candidates,
                                             const CvConfig& cfg, int jobs = 1);

// Asymptotic McNemar test on paired predictions against the truth.
double mcnemar(const std::vector<Outcome>& pred_a, const std::vector<Outcome>& pred_b,
               const std::vector<Outcome>& truth);

}  // namespace fwave
