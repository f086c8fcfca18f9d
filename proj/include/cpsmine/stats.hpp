#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cpsmine {

struct TestResult {
    double u_a = 0;       // U for sample A, midrank-based
    double u_b = 0;       // n_a * n_b - u_a
    double u_min = 0;
    double p_value = 1;   // two-sided
    std::string method;   // "exact" | "normal-approximation"
    double rbc = 0;       // 1 - 2 * u_a / (n_a * n_b)
    int n_a = 0;
    int n_b = 0;
};

// Two-sided Mann-Whitney U. Exact null distribution (rank-subset counting)
// when n_a + n_b <= 12 and the pooled sample is tie-free; otherwise a
// tie-corrected, continuity-corrected normal approximation with a
// fourth-moment (kurtosis) refinement that keeps it within 0.01 of the exact
// tail at desk-scale sizes. Throws CpsError("EmptySample").
TestResult mann_whitney(std::span<const double> a, std::span<const double> b);

// Forces the approximation regardless of sample size; used to audit it
// against the exact path.
TestResult mann_whitney_approx(std::span<const double> a, std::span<const double> b);

// 1 - 2*u_a/(n_a*n_b). Throws CpsError("OutOfRangeU") outside [0, n_a*n_b].
double rank_biserial(double u_a, int n_a, int n_b);

// kappa = (p_o - p_e) / (1 - p_e); equals 1 when both agree and p_e = 1.
// Throws CpsError("LengthMismatch").
double cohens_kappa(const std::vector<std::string>& coder1, const std::vector<std::string>& coder2);

struct BoxplotSummary {
    double q1 = 0;
    double median = 0;
    double q3 = 0;
    double iqr = 0;
    double lower_fence = 0;  // q1 - 1.5 * iqr
    double upper_fence = 0;  // q3 + 1.5 * iqr
    std::vector<std::string> outlier_ids;  // strictly outside the fences
};

// Quartiles by linear interpolation between closest ranks
// (h = (n-1)p, the same scheme as numpy's default percentile).
BoxplotSummary boxplot_summary(const std::vector<std::pair<std::string, double>>& values);

}  // namespace cpsmine
