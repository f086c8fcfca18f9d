#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpsmine/spm.hpp"

namespace cpsmine::oracle {

// Independent reference routes for the three algorithmic cores. These stay
// deliberately naive: subsequence enumeration instead of pattern growth,
// explicit rank-split enumeration instead of the counting recurrence, and a
// per-term closed-form binomial mass instead of the running recurrence.

// Every pattern with support >= threshold, found by enumerating all distinct
// subsequences of every sequence. Canonical (length, lexicographic) order.
std::vector<MinedPattern> spm_bruteforce(const std::vector<ItemSequence>& db, int threshold);

// Exact two-sided Mann-Whitney p for tie-free samples by enumerating all
// C(n_a + n_b, n_a) rank assignments. Requires n_a + n_b <= 20.
double mwu_enumeration_p(std::span<const double> a, std::span<const double> b);

// lgamma-based Binomial(n, p) mass and direct CDF summation.
double binomial_pmf_direct(int64_t n, double p, int64_t k);
int64_t binomial_quantile_direct(int64_t n, double p, double conf);
double binomial_sf_direct(int64_t n, double p, int64_t w);

struct SuiteResult {
    int trials = 0;
    int failures = 0;
    std::string first_counterexample;
    bool ok() const { return failures == 0; }
};

// Random databases (n_p <= 8, length <= 8, alphabet 5, min_support 0.25/0.5):
// prefix_span output must equal brute-force enumeration exactly.
SuiteResult run_spm_suite(int trials, uint64_t seed);

// Exhaustive tie-free fixtures with n_a + n_b <= 10: the exact path must
// equal enumeration; random n_a = n_b = 6 fixtures: the normal approximation
// must stay within 0.01 of exact.
SuiteResult run_mwu_suite(int trials, uint64_t seed);

// Random (W <= 10000, K <= 256) pairs: quantiles match direct summation and
// the upper tail is non-increasing in the edge weight.
SuiteResult run_binomial_suite(int trials, uint64_t seed);

}  // namespace cpsmine::oracle
