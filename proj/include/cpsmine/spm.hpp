#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpsmine/ingest.hpp"

namespace cpsmine {

// Mining runs on integer item ids; the report layer maps behaviour codes to
// ids and back so toy alphabets and the real vocabulary share one engine.
using ItemSequence = std::vector<int>;

struct MinedPattern {
    std::vector<int> items;
    int support = 0;  // number of sequences containing the pattern
};

// Collapses maximal runs of equal adjacent items. Idempotent.
ItemSequence merge_consecutive(const ItemSequence& seq);
std::vector<std::string> merge_consecutive(const std::vector<std::string>& seq);

// ceil(min_support * n) with a guard against float round-up of exact
// products; never below 1.
int support_threshold(double min_support, int n_sequences);

// Complete enumeration explodes combinatorially at low support on dense
// data; past this many patterns in one mining call the run is refused
// (CpsError "PatternLimitExceeded") instead of silently truncated.
inline constexpr size_t kMaxPatternsPerMine = 1000000;

// Pattern-growth mining over singleton items: returns every pattern (all
// lengths >= 1) whose support reaches support_threshold(min_support, |db|),
// ordered by (length, lexicographic items). Containment is order-preserving
// with gaps. Throws CpsError("EmptyDatabase").
std::vector<MinedPattern> prefix_span(const std::vector<ItemSequence>& db, double min_support);

// Keeps patterns with at least min_len items; relative order preserved.
std::vector<MinedPattern> filter_patterns(std::vector<MinedPattern> patterns, size_t min_len = 2);

// Scans the grid 0.95, 0.90, ..., 0.05 and returns the largest value whose
// mining yields a pattern of length >= 3. Throws
// CpsError("NoQualifyingSupport") when no grid value does.
double auto_tune_min_support(const std::vector<ItemSequence>& db);
double auto_tune_min_support(const SequenceDatabase& db);

// The documented fallback when tuning is disabled or fails.
inline constexpr double kDefaultMinSupport = 0.30;

// Disjoint occurrences by greedy leftmost matching, restarted on the suffix
// after each match.
int64_t count_occurrences(const ItemSequence& pattern, const ItemSequence& seq);

struct FrequentPattern {
    std::vector<std::string> items;   // length >= 2
    int support_count = 0;
    double support_fraction = 0;      // support_count / n_p
    int64_t occurrence_count = 0;     // disjoint occurrences over all sequences
    double student_pct = 0;           // 100 * support_fraction
    double occurrence_pct = 0;        // share of all occurrences in this report
};

struct PatternReport {
    Phase phase = Phase::A1;
    Condition condition = Condition::Minimal;
    int n_students = 0;
    std::optional<double> min_support;  // empty when the database was empty
    std::vector<FrequentPattern> patterns;
};

// merge -> mine -> filter (length >= 2) -> occurrence counts -> percentages.
PatternReport pattern_report(const SequenceDatabase& db, double min_support);

}  // namespace cpsmine
