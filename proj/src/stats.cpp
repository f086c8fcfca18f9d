#include "cpsmine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "cpsmine/error.hpp"

namespace cpsmine {

namespace {

constexpr int kExactLimit = 12;  // pooled size cutoff for the exact null

// midranks of the pooled sample, in the order a then b
std::vector<double> midranks(std::span<const double> a, std::span<const double> b) {
    const size_t n = a.size() + b.size();
    std::vector<std::pair<double, size_t>> pooled;
    pooled.reserve(n);
    for (size_t i = 0; i < a.size(); ++i) pooled.push_back({a[i], i});
    for (size_t i = 0; i < b.size(); ++i) pooled.push_back({b[i], a.size() + i});
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
        double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[pooled[k].second] = rank;
        i = j + 1;
    }
    return ranks;
}

// #(size-m subsets of ranks {1..n}) per rank-sum, via the classic recurrence
std::vector<std::vector<uint64_t>> rank_sum_counts(int n, int m) {
    const int max_sum = n * (n + 1) / 2;
    std::vector<std::vector<uint64_t>> ways(
        static_cast<size_t>(m) + 1, std::vector<uint64_t>(static_cast<size_t>(max_sum) + 1, 0));
    ways[0][0] = 1;
    for (int r = 1; r <= n; ++r)
        for (int j = std::min(m, r); j >= 1; --j)
            for (int s = max_sum; s >= r; --s)
                if (ways[static_cast<size_t>(j) - 1][static_cast<size_t>(s - r)])
                    ways[static_cast<size_t>(j)][static_cast<size_t>(s)] +=
                        ways[static_cast<size_t>(j) - 1][static_cast<size_t>(s - r)];
    return ways;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// CDF with an Edgeworth fourth-moment term; the U null is symmetric so the
// skewness term vanishes and only the kurtosis term remains.
double refined_cdf(double x, double mean, double sd, double excess_kurtosis) {
    double z = (x - mean) / sd;
    return normal_cdf(z) - normal_pdf(z) * (excess_kurtosis / 24.0) * (z * z * z - 3.0 * z);
}

}  // namespace

namespace {

TestResult mann_whitney_impl(std::span<const double> a, std::span<const double> b,
                             bool force_approx) {
    if (a.empty() || b.empty()) throw CpsError("EmptySample", "both samples must be non-empty");

    TestResult r;
    r.n_a = static_cast<int>(a.size());
    r.n_b = static_cast<int>(b.size());
    const int n = r.n_a + r.n_b;
    const double nanb = static_cast<double>(r.n_a) * static_cast<double>(r.n_b);

    auto ranks = midranks(a, b);
    double rank_sum_a = 0;
    for (size_t i = 0; i < a.size(); ++i) rank_sum_a += ranks[i];
    r.u_a = rank_sum_a - static_cast<double>(r.n_a) * (r.n_a + 1) / 2.0;
    r.u_b = nanb - r.u_a;
    r.u_min = std::min(r.u_a, r.u_b);
    r.rbc = rank_biserial(r.u_a, r.n_a, r.n_b);

    // tie group sizes over the pooled sample
    std::map<double, int> groups;
    for (size_t i = 0; i < a.size(); ++i) ++groups[a[i]];
    for (size_t i = 0; i < b.size(); ++i) ++groups[b[i]];
    bool has_ties = false;
    double tie_term = 0;  // sum of t^3 - t
    for (const auto& [v, t] : groups) {
        if (t > 1) has_ties = true;
        tie_term += static_cast<double>(t) * t * t - t;
    }

    if (!force_approx && n <= kExactLimit && !has_ties) {
        r.method = "exact";
        // tie-free: U is an integer; count rank subsets on either side
        const auto ways = rank_sum_counts(n, r.n_a);
        const int base = r.n_a * (r.n_a + 1) / 2;
        const int max_sum = n * (n + 1) / 2;
        const int64_t u_obs = static_cast<int64_t>(std::llround(r.u_a));
        uint64_t total = 0, at_most = 0, at_least = 0;
        for (int s = base; s <= max_sum; ++s) {
            uint64_t c = ways[static_cast<size_t>(r.n_a)][static_cast<size_t>(s)];
            if (c == 0) continue;
            total += c;
            int64_t u = s - base;
            if (u <= u_obs) at_most += c;
            if (u >= u_obs) at_least += c;
        }
        double one_sided = static_cast<double>(std::min(at_most, at_least)) /
                           static_cast<double>(total);
        r.p_value = std::min(1.0, 2.0 * one_sided);
        return r;
    }

    r.method = "normal-approximation";
    const double mean = nanb / 2.0;
    const double variance =
        nanb / 12.0 * (static_cast<double>(n) + 1.0 - tie_term / (static_cast<double>(n) * (n - 1)));
    if (variance <= 0) {  // fully tied pooled sample
        r.p_value = 1.0;
        return r;
    }
    const double sd = std::sqrt(variance);
    const double m = static_cast<double>(r.n_a), k = static_cast<double>(r.n_b);
    const double excess_kurtosis =
        -6.0 * (m * m + k * k + m * k + m + k) / (5.0 * m * k * (m + k + 1.0));
    // continuity-corrected tails; deep in the tails the kurtosis term can
    // overshoot below zero, where the plain normal tail takes over
    double p_low = refined_cdf(r.u_a + 0.5, mean, sd, excess_kurtosis);
    if (p_low <= 0.0) p_low = normal_cdf((r.u_a + 0.5 - mean) / sd);
    double p_high = 1.0 - refined_cdf(r.u_a - 0.5, mean, sd, excess_kurtosis);
    if (p_high <= 0.0) p_high = 1.0 - normal_cdf((r.u_a - 0.5 - mean) / sd);
    double one_sided =
        std::clamp(std::min(p_low, p_high), std::numeric_limits<double>::denorm_min(), 1.0);
    r.p_value = std::min(1.0, 2.0 * one_sided);
    return r;
}

}  // namespace

TestResult mann_whitney(std::span<const double> a, std::span<const double> b) {
    return mann_whitney_impl(a, b, false);
}

TestResult mann_whitney_approx(std::span<const double> a, std::span<const double> b) {
    return mann_whitney_impl(a, b, true);
}

double rank_biserial(double u_a, int n_a, int n_b) {
    const double nanb = static_cast<double>(n_a) * static_cast<double>(n_b);
    if (nanb <= 0 || u_a < 0 || u_a > nanb)
        throw CpsError("OutOfRangeU", "U must lie in [0, n_a*n_b]");
    return 1.0 - 2.0 * u_a / nanb;
}

double cohens_kappa(const std::vector<std::string>& coder1, const std::vector<std::string>& coder2) {
    if (coder1.size() != coder2.size() || coder1.empty())
        throw CpsError("LengthMismatch", "codings must have equal non-zero length");
    const double n = static_cast<double>(coder1.size());
    std::map<std::string, double> m1, m2;
    double agree = 0;
    for (size_t i = 0; i < coder1.size(); ++i) {
        m1[coder1[i]] += 1;
        m2[coder2[i]] += 1;
        if (coder1[i] == coder2[i]) agree += 1;
    }
    const double p_o = agree / n;
    double p_e = 0;
    for (const auto& [label, c1] : m1) {
        auto it = m2.find(label);
        if (it != m2.end()) p_e += (c1 / n) * (it->second / n);
    }
    if (p_e >= 1.0) return 1.0;  // both coders constant on one label
    return (p_o - p_e) / (1.0 - p_e);
}

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double p) {
    const size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double h = p * static_cast<double>(n - 1);
    size_t lo = static_cast<size_t>(std::floor(h));
    size_t hi = std::min(lo + 1, n - 1);
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

BoxplotSummary boxplot_summary(const std::vector<std::pair<std::string, double>>& values) {
    if (values.empty()) throw CpsError("EmptySample", "boxplot needs at least one value");
    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (const auto& [id, v] : values) sorted.push_back(v);
    std::sort(sorted.begin(), sorted.end());

    BoxplotSummary s;
    s.q1 = interpolated_quantile(sorted, 0.25);
    s.median = interpolated_quantile(sorted, 0.50);
    s.q3 = interpolated_quantile(sorted, 0.75);
    s.iqr = s.q3 - s.q1;
    s.lower_fence = s.q1 - 1.5 * s.iqr;
    s.upper_fence = s.q3 + 1.5 * s.iqr;
    for (const auto& [id, v] : values)
        if (v < s.lower_fence || v > s.upper_fence) s.outlier_ids.push_back(id);
    return s;
}

}  // namespace cpsmine
