#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fwave {

// Kolmogorov-Smirnov distance between the sample's empirical CDF and a
// normal fitted by sample mean and SD.
double lilliefors_statistic(const std::vector<double>& sample);

// Normality test p-value. The null distribution of the statistic is drawn
// once per sample size (20000 seeded Monte-Carlo draws, cached), so the
// p-value resolution is about 5e-5 and its Monte-Carlo standard error at
// p = 0.05 is about 0.0015. Needs n >= 4.
double lilliefors(const std::vector<double>& sample);

// Mean-centred Levene test for equal variances across groups (>= 2 values
// each); two-sided p from the F distribution.
double levene(const std::vector<std::vector<double>>& groups);

// Pooled-variance two-sample Student t-test, two-sided p.
double t_test(const std::vector<double>& a, const std::vector<double>& b);

// Two-sided Mann-Whitney U test. Exhaustive permutation enumeration when the
// combined size is <= 10 (exact even with ties); otherwise a tie-corrected
// normal approximation with continuity correction.
double mann_whitney(const std::vector<double>& a, const std::vector<double>& b);

// Two-sided Fisher exact test on a 2x2 contingency table, summing the
// probabilities of all same-margin tables no more likely than the observed.
double fisher_exact(const std::array<std::array<long long, 2>, 2>& table);

}  // namespace fwave
