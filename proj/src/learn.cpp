#include "fwave/learn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "fwave/parallel.hpp"

namespace fwave {

namespace {

constexpr double k_ridge_scale = 1e-8;
constexpr double k_tie_tol = 1e-12;

std::size_t feature_column(const std::string& name) {
    const auto& names = SpectralFeatures::names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (name == names[i]) return i;
    throw Error(ErrorCode::BadParams, "unknown feature: " + name);
}

struct Design {
    Eigen::MatrixXd x;        // patients by features
    std::vector<char> is_af;
    std::vector<Outcome> y;
    std::vector<std::string> names;
};

Design build_design(const Cohort& cohort, const std::vector<std::string>& features) {
    validate_cohort(cohort);
    if (features.empty()) throw Error(ErrorCode::BadParams, "no features selected");
    std::vector<std::size_t> cols;
    cols.reserve(features.size());
    for (const auto& f : features) cols.push_back(feature_column(f));

    Design d;
    d.names = features;
    const auto n = cohort.patients.size();
    d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
    d.is_af.resize(n);
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = cohort.patients[i].features.features.as_array();
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (!std::isfinite(row[cols[j]]))
                throw Error(ErrorCode::NonFiniteSample,
                            "non-finite feature for patient " +
                                cohort.patients[i].features.patient_id);
            d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[cols[j]];
        }
        d.y[i] = cohort.patients[i].features.outcome;
        d.is_af[i] = cohort.patients[i].features.outcome == Outcome::af ? 1 : 0;
    }
    return d;
}

struct Fit {
    Eigen::VectorXd w;
    double bias = 0.0;
};

// LDA on the given rows and columns of the design matrix.
Fit fit_cols(const Eigen::MatrixXd& x, const std::vector<char>& is_af,
             const std::vector<int>& rows, const std::vector<int>& cols, bool equal_priors,
             Eigen::MatrixXd* cov_out = nullptr, Eigen::VectorXd* mean_sr_out = nullptr,
             Eigen::VectorXd* mean_af_out = nullptr) {
    const auto d = static_cast<Eigen::Index>(cols.size());
    Eigen::Index n_sr = 0, n_af = 0;
    Eigen::VectorXd mu_sr = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd mu_af = Eigen::VectorXd::Zero(d);
    for (int r : rows) {
        Eigen::VectorXd& mu = is_af[static_cast<std::size_t>(r)] ? mu_af : mu_sr;
        (is_af[static_cast<std::size_t>(r)] ? n_af : n_sr) += 1;
        for (Eigen::Index j = 0; j < d; ++j) mu[j] += x(r, cols[static_cast<std::size_t>(j)]);
    }
    if (n_sr < 2 || n_af < 2)
        throw Error(ErrorCode::ClassMissing, "need at least two patients per class");
    mu_sr /= static_cast<double>(n_sr);
    mu_af /= static_cast<double>(n_af);

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd v(d);
    for (int r : rows) {
        const Eigen::VectorXd& mu = is_af[static_cast<std::size_t>(r)] ? mu_af : mu_sr;
        for (Eigen::Index j = 0; j < d; ++j)
            v[j] = x(r, cols[static_cast<std::size_t>(j)]) - mu[j];
        s.selfadjointView<Eigen::Lower>().rankUpdate(v);
    }
    s = s.selfadjointView<Eigen::Lower>();
    s /= static_cast<double>(rows.size() - 2);
    s.diagonal().array() += k_ridge_scale * s.trace() / static_cast<double>(d);

    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularCovariance, "pooled covariance is not invertible");

    Fit fit;
    fit.w = llt.solve(mu_af - mu_sr);
    fit.bias = -0.5 * fit.w.dot(mu_sr + mu_af);
    if (!equal_priors)
        fit.bias += std::log(static_cast<double>(n_af) / static_cast<double>(n_sr));
    if (cov_out) *cov_out = s;
    if (mean_sr_out) *mean_sr_out = mu_sr;
    if (mean_af_out) *mean_af_out = mu_af;
    return fit;
}

std::vector<int> identity_cols(std::size_t d) {
    std::vector<int> cols(d);
    for (std::size_t j = 0; j < d; ++j) cols[j] = static_cast<int>(j);
    return cols;
}

double row_score(const Eigen::MatrixXd& x, int r, const std::vector<int>& cols, const Fit& fit) {
    double s = fit.bias;
    for (std::size_t j = 0; j < cols.size(); ++j)
        s += fit.w[static_cast<Eigen::Index>(j)] * x(r, cols[j]);
    return s;
}

std::vector<int> folds_for(const std::vector<char>& is_af, int n_folds, bool stratified,
                           std::uint64_t seed) {
    const std::size_t n = is_af.size();
    std::mt19937_64 rng(seed);
    std::vector<int> folds(n, 0);
    if (stratified) {
        int start = 0;
        for (int cls = 0; cls < 2; ++cls) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < n; ++i)
                if ((is_af[i] != 0) == (cls == 1)) idx.push_back(i);
            std::shuffle(idx.begin(), idx.end(), rng);
            for (std::size_t k = 0; k < idx.size(); ++k)
                folds[idx[k]] = (start + static_cast<int>(k)) % n_folds;
            start = (start + static_cast<int>(idx.size())) % n_folds;
        }
    } else {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t k = 0; k < n; ++k) folds[idx[k]] = static_cast<int>(k) % n_folds;
    }
    return folds;
}

void require_both_classes(const std::vector<int>& folds, const std::vector<char>& is_af,
                          int n_folds) {
    std::vector<int> sr(n_folds, 0), af(n_folds, 0);
    for (std::size_t i = 0; i < folds.size(); ++i)
        (is_af[i] ? af : sr)[static_cast<std::size_t>(folds[i])] += 1;
    for (int f = 0; f < n_folds; ++f)
        if (sr[static_cast<std::size_t>(f)] == 0 || af[static_cast<std::size_t>(f)] == 0)
            throw Error(ErrorCode::FoldWithoutBothClasses,
                        "fold " + std::to_string(f) + " lacks one outcome class");
}

// Misclassification count of an inner cross-validation over the given rows.
long long inner_cv_error(const Eigen::MatrixXd& x, const std::vector<char>& is_af,
                         const std::vector<int>& rows, const std::vector<int>& cols,
                         const std::vector<int>& inner_folds, int n_folds, bool equal_priors) {
    long long err = 0;
    std::vector<int> train;
    train.reserve(rows.size());
    for (int f = 0; f < n_folds; ++f) {
        train.clear();
        for (std::size_t k = 0; k < rows.size(); ++k)
            if (inner_folds[k] != f) train.push_back(rows[k]);
        const Fit fit = fit_cols(x, is_af, train, cols, equal_priors);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (inner_folds[k] != f) continue;
            const bool predicted_af = row_score(x, rows[k], cols, fit) >= 0.0;
            if (predicted_af != (is_af[static_cast<std::size_t>(rows[k])] != 0)) ++err;
        }
    }
    return err;
}

// Greedy forward pass over candidate columns on one training partition.
std::vector<int> greedy_select(const Eigen::MatrixXd& x, const std::vector<char>& is_af,
                               const std::vector<int>& rows, const CvConfig& cfg,
                               std::uint64_t seed) {
    std::vector<char> row_af(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        row_af[k] = is_af[static_cast<std::size_t>(rows[k])];
    const auto inner = folds_for(row_af, cfg.n_folds, true, seed);
    require_both_classes(inner, row_af, cfg.n_folds);

    const auto d = static_cast<std::size_t>(x.cols());
    std::vector<int> current;
    std::vector<char> used(d, 0);
    long long best = std::numeric_limits<long long>::max();
    while (current.size() < d) {
        int pick = -1;
        long long pick_err = std::numeric_limits<long long>::max();
        for (std::size_t c = 0; c < d; ++c) {
            if (used[c]) continue;
            auto trial = current;
            trial.push_back(static_cast<int>(c));
            std::sort(trial.begin(), trial.end());
            long long err;
            try {
                err = inner_cv_error(x, is_af, rows, trial, inner, cfg.n_folds,
                                     cfg.equal_priors);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularCovariance) throw;
                continue;  // degenerate candidate set, never preferable
            }
            if (err < pick_err) {
                pick = static_cast<int>(c);
                pick_err = err;
            }
        }
        if (pick < 0 || pick_err >= best) break;
        best = pick_err;
        used[static_cast<std::size_t>(pick)] = 1;
        current.push_back(pick);
        std::sort(current.begin(), current.end());
    }
    return current;
}

}  // namespace

LdaModel fit_lda(const std::vector<std::vector<double>>& x, const std::vector<Outcome>& y,
                 std::vector<std::string> feature_names, bool equal_priors) {
    if (x.empty()) throw Error(ErrorCode::EmptyList, "no training samples");
    if (x.size() != y.size())
        throw Error(ErrorCode::LengthMismatch, "sample and label counts differ");
    const std::size_t d = x[0].size();
    if (d == 0) throw Error(ErrorCode::BadParams, "samples have no features");
    if (!feature_names.empty() && feature_names.size() != d)
        throw Error(ErrorCode::DimensionMismatch, "feature name count does not match width");

    Eigen::MatrixXd m(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(d));
    std::vector<char> is_af(x.size());
    std::vector<int> rows(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != d)
            throw Error(ErrorCode::DimensionMismatch, "ragged feature matrix");
        for (std::size_t j = 0; j < d; ++j) {
            if (!std::isfinite(x[i][j]))
                throw Error(ErrorCode::NonFiniteSample, "non-finite feature value");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
        }
        if (y[i] == Outcome::unknown)
            throw Error(ErrorCode::BadParams, "labels must be SR or AF");
        is_af[i] = y[i] == Outcome::af ? 1 : 0;
        rows[i] = static_cast<int>(i);
    }

    Eigen::MatrixXd cov;
    Eigen::VectorXd mu_sr, mu_af;
    const Fit fit =
        fit_cols(m, is_af, rows, identity_cols(d), equal_priors, &cov, &mu_sr, &mu_af);

    LdaModel model;
    model.feature_names = std::move(feature_names);
    model.weights.assign(fit.w.data(), fit.w.data() + fit.w.size());
    model.bias = fit.bias;
    model.mean_sr.assign(mu_sr.data(), mu_sr.data() + mu_sr.size());
    model.mean_af.assign(mu_af.data(), mu_af.data() + mu_af.size());
    model.pooled_covariance.assign(d, std::vector<double>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            model.pooled_covariance[i][j] =
                cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return model;
}

double score(const LdaModel& model, const std::vector<double>& x) {
    if (x.size() != model.weights.size())
        throw Error(ErrorCode::DimensionMismatch, "feature vector does not match model");
    double s = model.bias;
    for (std::size_t j = 0; j < x.size(); ++j) s += model.weights[j] * x[j];
    return s;
}

std::vector<int> stratified_folds(const std::vector<Outcome>& y, int n_folds,
                                  std::uint64_t seed) {
    if (n_folds < 2) throw Error(ErrorCode::BadParams, "need n_folds >= 2");
    std::vector<char> is_af(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == Outcome::unknown)
            throw Error(ErrorCode::BadParams, "labels must be SR or AF");
        is_af[i] = y[i] == Outcome::af ? 1 : 0;
    }
    return folds_for(is_af, n_folds, true, seed);
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<Outcome>& labels) {
    if (scores.size() != labels.size())
        throw Error(ErrorCode::LengthMismatch, "score and label counts differ");
    std::size_t n_af = 0, n_sr = 0;
    for (Outcome o : labels) {
        if (o == Outcome::unknown) throw Error(ErrorCode::BadParams, "labels must be SR or AF");
        (o == Outcome::af ? n_af : n_sr) += 1;
    }
    if (n_af == 0 || n_sr == 0)
        throw Error(ErrorCode::OneClassOnly, "both outcome classes are needed for a ROC");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    std::size_t tp = 0, fp = 0, i = 0;
    double prev_fpr = 0.0, prev_se = 0.0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == Outcome::af ? tp : fp) += 1;
            ++j;
        }
        RocPoint p;
        p.threshold = scores[order[i]];
        p.se = static_cast<double>(tp) / static_cast<double>(n_af);
        p.sp = static_cast<double>(n_sr - fp) / static_cast<double>(n_sr);
        const double fpr = 1.0 - p.sp;
        curve.auc += (fpr - prev_fpr) * (p.se + prev_se) / 2.0;
        prev_fpr = fpr;
        prev_se = p.se;
        curve.points.push_back(p);
        i = j;
    }
    return curve;
}

double select_threshold(const RocCurve& curve) {
    if (curve.points.empty()) throw Error(ErrorCode::EmptyList, "empty ROC curve");
    RocPoint best = curve.points[0];
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const RocPoint& p = curve.points[i];
        const double db = std::fabs(best.se - best.sp);
        const double dp = std::fabs(p.se - p.sp);
        if (dp < db - k_tie_tol) {
            best = p;
        } else if (dp < db + k_tie_tol) {
            const double sum_b = best.se + best.sp;
            const double sum_p = p.se + p.sp;
            if (sum_p > sum_b + k_tie_tol ||
                (sum_p > sum_b - k_tie_tol && p.threshold < best.threshold))
                best = p;
        }
    }
    return best.threshold;
}

EvaluationReport repeated_cv(const Cohort& cohort, const std::vector<std::string>& features,
                             const CvConfig& cfg, int jobs) {
    if (cfg.n_folds < 2 || cfg.n_repeats < 1)
        throw Error(ErrorCode::BadParams, "need n_folds >= 2 and n_repeats >= 1");
    const Design design = build_design(cohort, features);
    const auto n = design.is_af.size();
    const auto cols = identity_cols(features.size());
    const auto repeats = static_cast<std::size_t>(cfg.n_repeats);

    EvaluationReport report;
    report.oof_truth = design.y;
    report.oof_predictions.assign(repeats * n, Outcome::unknown);
    report.oof_scores.assign(repeats * n, 0.0);
    report.se_runs.resize(repeats);
    report.sp_runs.resize(repeats);
    report.acc_runs.resize(repeats);
    report.auc_runs.resize(repeats);
    report.ppv_runs.resize(repeats);
    report.npv_runs.resize(repeats);
    report.thresholds.resize(repeats);

    parallel_for(repeats, jobs, [&](std::size_t r) {
        const auto folds = folds_for(design.is_af, cfg.n_folds, cfg.stratified,
                                     derive_seed(cfg.rng_seed, r));
        require_both_classes(folds, design.is_af, cfg.n_folds);

        std::vector<double> oof(n, 0.0);
        std::vector<int> train;
        train.reserve(n);
        double fold_auc = 0.0;
        std::vector<double> fold_scores;
        std::vector<Outcome> fold_labels;
        for (int f = 0; f < cfg.n_folds; ++f) {
            train.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (folds[i] != f) train.push_back(static_cast<int>(i));
            const Fit fit = fit_cols(design.x, design.is_af, train, cols, cfg.equal_priors);
            fold_scores.clear();
            fold_labels.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (folds[i] == f) {
                    oof[i] = row_score(design.x, static_cast<int>(i), cols, fit);
                    fold_scores.push_back(oof[i]);
                    fold_labels.push_back(design.y[i]);
                }
            // per-fold auc: each test fold is scored by a model that never saw
            // it, so the rank statistic is exactly unbiased; pooling the folds
            // into one curve first would push a no-signal auc below one half
            fold_auc += roc_curve(fold_scores, fold_labels).auc;
        }
        fold_auc /= static_cast<double>(cfg.n_folds);

        const RocCurve curve = roc_curve(oof, design.y);
        const double thr = select_threshold(curve);
        std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool predicted_af = oof[i] >= thr;
            report.oof_predictions[r * n + i] = predicted_af ? Outcome::af : Outcome::sr;
            report.oof_scores[r * n + i] = oof[i];
            if (design.is_af[i])
                (predicted_af ? tp : fn) += 1;
            else
                (predicted_af ? fp : tn) += 1;
        }
        report.se_runs[r] = static_cast<double>(tp) / static_cast<double>(tp + fn);
        report.sp_runs[r] = static_cast<double>(tn) / static_cast<double>(tn + fp);
        report.acc_runs[r] = static_cast<double>(tp + tn) / static_cast<double>(n);
        report.auc_runs[r] = fold_auc;
        report.ppv_runs[r] =
            tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
        report.npv_runs[r] =
            tn + fn > 0 ? static_cast<double>(tn) / static_cast<double>(tn + fn) : 1.0;
        report.thresholds[r] = thr;
    });

    auto mean_of = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc / static_cast<double>(v.size());
    };
    report.se = mean_of(report.se_runs);
    report.sp = mean_of(report.sp_runs);
    report.acc = mean_of(report.acc_runs);
    report.auc = mean_of(report.auc_runs);
    report.ppv = mean_of(report.ppv_runs);
    report.npv = mean_of(report.npv_runs);
    return report;
}

SelectionReport sequential_forward_selection(const Cohort& cohort,
                                             const std::vector<std::string>& candidates,
                                             const CvConfig& cfg, int jobs) {
    if (candidates.size() < 2)
        throw Error(ErrorCode::BadParams, "need at least two candidate features");
    if (cfg.n_folds < 2 || cfg.n_repeats < 1)
        throw Error(ErrorCode::BadParams, "need n_folds >= 2 and n_repeats >= 1");
    const Design design = build_design(cohort, candidates);
    const auto n = design.is_af.size();
    const auto repeats = static_cast<std::size_t>(cfg.n_repeats);
    const auto k = static_cast<std::size_t>(cfg.n_folds);

    std::vector<std::vector<int>> chosen(repeats * k);
    parallel_for(repeats, jobs, [&](std::size_t r) {
        const std::uint64_t seed_r = derive_seed(cfg.rng_seed, r);
        const auto folds = folds_for(design.is_af, cfg.n_folds, cfg.stratified, seed_r);
        require_both_classes(folds, design.is_af, cfg.n_folds);
        for (int f = 0; f < cfg.n_folds; ++f) {
            std::vector<int> train;
            train.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                if (folds[i] != f) train.push_back(static_cast<int>(i));
            chosen[r * k + static_cast<std::size_t>(f)] = greedy_select(
                design.x, design.is_af, train, cfg, derive_seed(seed_r, static_cast<std::uint64_t>(f) + 1));
        }
    });

    SelectionReport report;
    report.candidates = candidates;
    report.frequency.assign(candidates.size(), 0.0);
    std::map<std::vector<int>, int> set_counts;
    for (const auto& set : chosen) {
        for (int c : set) report.frequency[static_cast<std::size_t>(c)] += 1.0;
        set_counts[set] += 1;
    }
    for (double& fr : report.frequency) fr /= static_cast<double>(chosen.size());

    const std::vector<int>* modal = nullptr;
    int modal_count = -1;
    for (const auto& [set, count] : set_counts) {
        if (count > modal_count) {
            modal = &set;
            modal_count = count;
        }
    }
    if (modal)
        for (int c : *modal) report.best_set.push_back(candidates[static_cast<std::size_t>(c)]);
    return report;
}

double mcnemar(const std::vector<Outcome>& pred_a, const std::vector<Outcome>& pred_b,
               const std::vector<Outcome>& truth) {
    if (pred_a.size() != truth.size() || pred_b.size() != truth.size())
        throw Error(ErrorCode::LengthMismatch, "prediction vectors must match the truth");
    long long b = 0, c = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool right_a = pred_a[i] == truth[i];
        const bool right_b = pred_b[i] == truth[i];
        if (right_a && !right_b) ++b;
        if (!right_a && right_b) ++c;
    }
    if (b + c == 0) return 1.0;
    const double chi2 =
        static_cast<double>((b - c) * (b - c)) / static_cast<double>(b + c);
    return std::erfc(std::sqrt(chi2 / 2.0));
}

}  // namespace fwave
