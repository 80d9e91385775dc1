#include "fwave/stats.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "fwave/core.hpp"

namespace fwave {

namespace {

constexpr std::size_t k_null_draws = 20000;
constexpr std::uint64_t k_null_seed = 0x6e6f726d616cull;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double mean_of(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

double sd_of(const std::vector<double>& x, double mean) {
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

double d_statistic(std::vector<double> x) {
    const std::size_t n = x.size();
    const double m = mean_of(x);
    const double s = sd_of(x, m);
    if (s == 0.0) return 1.0;  // constant sample: as far from normal as it gets
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = normal_cdf((x[i] - m) / s);
        d = std::max(d, static_cast<double>(i + 1) / static_cast<double>(n) - z);
        d = std::max(d, z - static_cast<double>(i) / static_cast<double>(n));
    }
    return d;
}

// Sorted null distribution of the statistic for one sample size.
const std::vector<double>& null_table(std::size_t n) {
    static std::map<std::size_t, std::vector<double>> cache;
    static std::mutex guard;
    std::lock_guard<std::mutex> lock(guard);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::mt19937_64 rng(derive_seed(k_null_seed, n));
    std::normal_distribution<double> gauss;
    std::vector<double> table(k_null_draws);
    std::vector<double> draw(n);
    for (double& d : table) {
        for (double& v : draw) v = gauss(rng);
        d = d_statistic(draw);
    }
    std::sort(table.begin(), table.end());
    return cache.emplace(n, std::move(table)).first->second;
}

// U statistic for group a, counting tied cross-pairs as one half.
double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0.0;
    for (double x : a)
        for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    return u;
}

}  // namespace

double lilliefors_statistic(const std::vector<double>& sample) {
    if (sample.size() < 4)
        throw Error(ErrorCode::SampleTooSmall, "normality test needs at least 4 values");
    return d_statistic(sample);
}

double lilliefors(const std::vector<double>& sample) {
    const double d = lilliefors_statistic(sample);
    const auto& table = null_table(sample.size());
    const auto hit = std::lower_bound(table.begin(), table.end(), d);
    const auto above = static_cast<double>(table.end() - hit);
    return (above + 1.0) / (static_cast<double>(table.size()) + 1.0);
}

double levene(const std::vector<std::vector<double>>& groups) {
    const std::size_t k = groups.size();
    if (k < 2) throw Error(ErrorCode::SampleTooSmall, "need at least two groups");
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.size() < 2)
            throw Error(ErrorCode::SampleTooSmall, "each group needs at least 2 values");
        total += g.size();
    }

    std::vector<std::vector<double>> dev(k);
    std::vector<double> dev_mean(k);
    double grand = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double m = mean_of(groups[i]);
        dev[i].reserve(groups[i].size());
        for (double v : groups[i]) dev[i].push_back(std::fabs(v - m));
        dev_mean[i] = mean_of(dev[i]);
        grand += dev_mean[i] * static_cast<double>(groups[i].size());
    }
    grand /= static_cast<double>(total);

    double between = 0.0, within = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        between += static_cast<double>(groups[i].size()) * (dev_mean[i] - grand) * (dev_mean[i] - grand);
        for (double z : dev[i]) within += (z - dev_mean[i]) * (z - dev_mean[i]);
    }
    between /= static_cast<double>(k - 1);
    within /= static_cast<double>(total - k);
    if (within == 0.0) return between == 0.0 ? 1.0 : 0.0;

    const boost::math::fisher_f dist(static_cast<double>(k - 1), static_cast<double>(total - k));
    return boost::math::cdf(boost::math::complement(dist, between / within));
}

double t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw Error(ErrorCode::SampleTooSmall, "t-test needs at least 2 values per group");
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double m1 = mean_of(a), m2 = mean_of(b);
    const double s1 = sd_of(a, m1), s2 = sd_of(b, m2);
    const double df = n1 + n2 - 2.0;
    const double pooled = ((n1 - 1.0) * s1 * s1 + (n2 - 1.0) * s2 * s2) / df;
    const double se = std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    if (se == 0.0) return m1 == m2 ? 1.0 : 0.0;

    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(dist, -std::fabs((m1 - m2) / se));
}

double mann_whitney(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n1 = a.size(), n2 = b.size();
    if (n1 < 2 || n2 < 2)
        throw Error(ErrorCode::SampleTooSmall, "rank test needs at least 2 values per group");
    const std::size_t n = n1 + n2;
    const double mu = 0.5 * static_cast<double>(n1) * static_cast<double>(n2);
    const double u_obs = u_statistic(a, b);

    if (n <= 10) {
        std::vector<double> pool(a);
        pool.insert(pool.end(), b.begin(), b.end());
        std::vector<std::size_t> pick(n1);
        for (std::size_t i = 0; i < n1; ++i) pick[i] = i;
        std::size_t extreme = 0, total = 0;
        const double margin = std::fabs(u_obs - mu) - 1e-12;
        while (true) {
            std::vector<double> ga, gb;
            std::vector<char> used(n, 0);
            for (std::size_t i : pick) {
                ga.push_back(pool[i]);
                used[i] = 1;
            }
            for (std::size_t i = 0; i < n; ++i)
                if (!used[i]) gb.push_back(pool[i]);
            ++total;
            if (std::fabs(u_statistic(ga, gb) - mu) >= margin) ++extreme;

            // next combination of n1 indices out of n
            std::size_t j = n1;
            while (j > 0 && pick[j - 1] == n - n1 + j - 1) --j;
            if (j == 0) break;
            ++pick[j - 1];
            for (std::size_t i = j; i < n1; ++i) pick[i] = pick[i - 1] + 1;
        }
        return static_cast<double>(extreme) / static_cast<double>(total);
    }

    // tie-corrected normal approximation with continuity correction
    std::vector<double> pool(a);
    pool.insert(pool.end(), b.begin(), b.end());
    std::sort(pool.begin(), pool.end());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && pool[j] == pool[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double nn = static_cast<double>(n);
    const double var = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                       ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) return 1.0;
    const double z = std::max(0.0, std::fabs(u_obs - mu) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double fisher_exact(const std::array<std::array<long long, 2>, 2>& table) {
    const long long a = table[0][0], b = table[0][1];
    const long long c = table[1][0], d = table[1][1];
    if (a < 0 || b < 0 || c < 0 || d < 0)
        throw Error(ErrorCode::BadParams, "contingency counts must be non-negative");
    const long long r1 = a + b, r2 = c + d, c1 = a + c;
    const long long n = r1 + r2;
    if (n == 0) return 1.0;

    // hypergeometric log-pmf of the top-left cell given fixed margins
    auto log_pmf = [&](long long x) {
        auto lc = [](long long m, long long j) {
            return std::lgamma(static_cast<double>(m + 1)) -
                   std::lgamma(static_cast<double>(j + 1)) -
                   std::lgamma(static_cast<double>(m - j + 1));
        };
        return lc(r1, x) + lc(r2, c1 - x) - lc(n, c1);
    };

    const double obs = log_pmf(a);
    const long long lo = std::max<long long>(0, c1 - r2);
    const long long hi = std::min(r1, c1);
    double p = 0.0;
    for (long long x = lo; x <= hi; ++x) {
        const double lp = log_pmf(x);
        if (lp <= obs + std::log1p(1e-7)) p += std::exp(lp);
    }
    return std::min(1.0, p);
}

}  // namespace fwave
