#include <doctest.h>

#include <algorithm>
#include <random>

#include "cpsmine/error.hpp"
#include "cpsmine/oracle.hpp"
#include "cpsmine/spm.hpp"

using namespace cpsmine;

namespace {

// items a=0, b=1, c=2, ...
ItemSequence seq(std::initializer_list<int> items) { return ItemSequence(items); }

const MinedPattern* find_pattern(const std::vector<MinedPattern>& mined,
                                 const ItemSequence& items) {
    for (const auto& p : mined)
        if (p.items == items) return &p;
    return nullptr;
}

SequenceDatabase make_db(std::vector<std::vector<std::string>> sequences) {
    SequenceDatabase db;
    db.phase = Phase::A1;
    db.condition = Condition::Minimal;
    for (size_t i = 0; i < sequences.size(); ++i)
        db.sequences.push_back({"s" + std::to_string(i + 1), std::move(sequences[i])});
    return db;
}

}  // namespace

TEST_CASE("merge_consecutive collapses runs only") {
    CHECK(merge_consecutive(seq({0, 0, 1})) == seq({0, 1}));
    CHECK(merge_consecutive(seq({0})) == seq({0}));
    CHECK(merge_consecutive(seq({0, 1, 1, 1, 0})) == seq({0, 1, 0}));
    CHECK(merge_consecutive(seq({})) == seq({}));
    std::vector<std::string> codes{"PS04", "PS04", "S4"};
    CHECK(merge_consecutive(codes) == std::vector<std::string>{"PS04", "S4"});
}

TEST_CASE("merge_consecutive is idempotent and output has no equal neighbours") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
        ItemSequence s(rng() % 20);
        for (auto& v : s) v = static_cast<int>(rng() % 4);
        auto once = merge_consecutive(s);
        CHECK(merge_consecutive(once) == once);
        for (size_t i = 1; i < once.size(); ++i) CHECK(once[i] != once[i - 1]);
    }
}

TEST_CASE("support threshold: ceil semantics with exact-product guard") {
    CHECK(support_threshold(0.6, 3) == 2);    // ceil(1.8)
    CHECK(support_threshold(0.5, 4) == 2);    // exact product stays put
    CHECK(support_threshold(0.55, 4) == 3);   // ceil(2.2)
    CHECK(support_threshold(0.3, 10) == 3);   // float product 2.999... still 3
    CHECK(support_threshold(1.0, 7) == 7);
    CHECK(support_threshold(0.05, 1) == 1);   // floor of 1
}

TEST_CASE("prefix_span on the three-sequence fixture") {
    // {<a,b,c>, <a,c>, <b,c>} at min_support 0.6 -> threshold 2 of 3
    std::vector<ItemSequence> db{seq({0, 1, 2}), seq({0, 2}), seq({1, 2})};
    auto mined = prefix_span(db, 0.6);

    auto pairs = filter_patterns(mined);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].items == seq({0, 2}));  // <a,c>
    CHECK(pairs[0].support == 2);
    CHECK(pairs[1].items == seq({1, 2}));  // <b,c>
    CHECK(pairs[1].support == 2);
    CHECK(find_pattern(mined, seq({0, 1})) == nullptr);  // <a,b> support 1

    // singletons are present in the candidate output
    REQUIRE(find_pattern(mined, seq({2})) != nullptr);
    CHECK(find_pattern(mined, seq({2}))->support == 3);
}

TEST_CASE("prefix_span: empty database throws") {
    CHECK_THROWS_WITH_AS(prefix_span({}, 0.5), doctest::Contains("EmptyDatabase"), CpsError);
}

TEST_CASE("prefix_span: identical sequences at full support") {
    std::vector<ItemSequence> db{seq({0, 1}), seq({0, 1}), seq({0, 1})};
    auto mined = prefix_span(db, 1.0);
    REQUIRE(mined.size() == 3);
    CHECK(mined[0].items == seq({0}));
    CHECK(mined[0].support == 3);
    CHECK(mined[1].items == seq({1}));
    CHECK(mined[1].support == 3);
    CHECK(mined[2].items == seq({0, 1}));
    CHECK(mined[2].support == 3);
}

TEST_CASE("filter_patterns keeps length >= 2 in order") {
    std::vector<MinedPattern> ps{{seq({0}), 3}, {seq({0, 1}), 2}};
    auto out = filter_patterns(ps);
    REQUIRE(out.size() == 1);
    CHECK(out[0].items == seq({0, 1}));
    CHECK(filter_patterns({}).empty());
    std::vector<MinedPattern> triple{{seq({0, 1, 2}), 1}};
    CHECK(filter_patterns(triple).size() == 1);
}

TEST_CASE("auto tuning picks the largest workable support") {
    // every sequence contains <a,b,c>: qualifies at the top of the grid
    std::vector<ItemSequence> all3{seq({0, 1, 2}), seq({0, 1, 2, 0}), seq({3, 0, 1, 2})};
    CHECK(auto_tune_min_support(all3) == 0.95);

    // nothing of length 3 anywhere
    std::vector<ItemSequence> short_seqs{seq({0}), seq({1}), seq({0})};
    CHECK_THROWS_WITH_AS(auto_tune_min_support(short_seqs),
                         doctest::Contains("NoQualifyingSupport"), CpsError);

    // <a,b,c> supported by 2 of 4: 0.50 works (threshold 2), 0.55 needs 3
    std::vector<ItemSequence> half{seq({0, 1, 2}), seq({0, 1, 2}), seq({3, 4}), seq({3, 4})};
    CHECK(auto_tune_min_support(half) == 0.50);
}

TEST_CASE("occurrence counting is disjoint greedy-leftmost") {
    CHECK(count_occurrences(seq({0, 1}), seq({0, 1, 0, 1})) == 2);
    CHECK(count_occurrences(seq({0, 1}), seq({0, 0, 1})) == 1);
    CHECK(count_occurrences(seq({0, 1}), seq({1, 0})) == 0);
    CHECK(count_occurrences(seq({0}), seq({0, 0, 0})) == 3);
    CHECK(count_occurrences(seq({0, 1, 2}), seq({0, 5, 1, 5, 2, 0, 1, 2})) == 2);
    CHECK(count_occurrences(seq({0, 1}), seq({})) == 0);
}

TEST_CASE("occurrence count bounded by floor(len/pattern len) per supporter") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 200; ++t) {
        ItemSequence pattern(2 + rng() % 3), s(rng() % 16);
        for (auto& v : pattern) v = static_cast<int>(rng() % 3);
        for (auto& v : s) v = static_cast<int>(rng() % 3);
        auto c = count_occurrences(pattern, s);
        CHECK(c >= 0);
        CHECK(c <= static_cast<int64_t>(s.size() / pattern.size()));
    }
}

TEST_CASE("pattern_report: percentages and canonical order") {
    // 4 students; <PS04,S4> in two sequences
    auto db = make_db({{"PS04", "S4", "OT2"},
                       {"PS04", "S4"},
                       {"OT2", "OT2", "OT2"},
                       {"S4", "OT2"}});
    auto report = pattern_report(db, 0.5);
    CHECK(report.n_students == 4);
    REQUIRE(report.min_support.has_value());

    const FrequentPattern* ps04_s4 = nullptr;
    double pct_sum = 0;
    for (const auto& p : report.patterns) {
        CHECK(p.items.size() >= 2);
        CHECK(p.support_fraction >= 0.5);
        CHECK(p.occurrence_count >= p.support_count);
        pct_sum += p.occurrence_pct;
        if (p.items == std::vector<std::string>{"PS04", "S4"}) ps04_s4 = &p;
    }
    REQUIRE(ps04_s4 != nullptr);
    CHECK(ps04_s4->support_count == 2);
    CHECK(ps04_s4->student_pct == 50.0);
    CHECK(pct_sum == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("pattern_report applies run merging before mining") {
    // raw sequences contain runs; <OT2,OT2> must not appear as a pattern of
    // adjacent duplicates after merging, but non-adjacent repeats survive
    auto db = make_db({{"OT2", "OT2", "S4", "OT2"}, {"OT2", "S4", "OT2"}});
    auto report = pattern_report(db, 1.0);
    bool has_ot2_s4_ot2 = false;
    for (const auto& p : report.patterns)
        if (p.items == std::vector<std::string>{"OT2", "S4", "OT2"}) has_ot2_s4_ot2 = true;
    CHECK(has_ot2_s4_ot2);
    for (const auto& p : report.patterns) {
        // occurrence semantics: greedy disjoint, e.g. <OT2,S4,OT2> once per sequence
        if (p.items == std::vector<std::string>{"OT2", "S4", "OT2"}) {
            CHECK(p.support_count == 2);
            CHECK(p.occurrence_count == 2);
        }
    }
}

TEST_CASE("occurrence percentages split proportionally") {
    // two patterns with occurrence counts in ratio 1:3 -> 25% / 75%
    auto db = make_db({{"PS04", "S4", "OT1", "OT2", "OT1", "OT2", "OT1", "OT2"},
                       {"PS04", "S4", "OT1", "OT2", "OT1", "OT2", "OT1", "OT2"}});
    auto report = pattern_report(db, 1.0);
    const FrequentPattern *p_ab = nullptr, *p_cd = nullptr;
    for (const auto& p : report.patterns) {
        if (p.items == std::vector<std::string>{"PS04", "S4"}) p_ab = &p;
        if (p.items == std::vector<std::string>{"OT1", "OT2"}) p_cd = &p;
    }
    REQUIRE(p_ab != nullptr);
    REQUIRE(p_cd != nullptr);
    CHECK(p_ab->occurrence_count == 2);
    CHECK(p_cd->occurrence_count == 6);
    CHECK(p_cd->occurrence_pct == doctest::Approx(3.0 * p_ab->occurrence_pct).epsilon(1e-12));
}

TEST_CASE("support is invariant to sequence order") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 30; ++t) {
        std::vector<ItemSequence> db(2 + rng() % 6);
        for (auto& s : db) {
            s.resize(1 + rng() % 7);
            for (auto& v : s) v = static_cast<int>(rng() % 4);
        }
        auto mined = prefix_span(db, 0.5);
        std::shuffle(db.begin(), db.end(), rng);
        auto mined_shuffled = prefix_span(db, 0.5);
        REQUIRE(mined.size() == mined_shuffled.size());
        for (size_t i = 0; i < mined.size(); ++i) {
            CHECK(mined[i].items == mined_shuffled[i].items);
            CHECK(mined[i].support == mined_shuffled[i].support);
        }
    }
}

TEST_CASE("apriori monotonicity: sub-patterns are at least as frequent") {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 20; ++t) {
        std::vector<ItemSequence> db(3 + rng() % 5);
        for (auto& s : db) {
            s.resize(2 + rng() % 6);
            for (auto& v : s) v = static_cast<int>(rng() % 3);
        }
        auto mined = prefix_span(db, 0.25);
        for (const auto& p : mined) {
            if (p.items.size() < 2) continue;
            // drop one position at a time
            for (size_t skip = 0; skip < p.items.size(); ++skip) {
                ItemSequence sub;
                for (size_t i = 0; i < p.items.size(); ++i)
                    if (i != skip) sub.push_back(p.items[i]);
                const auto* found = find_pattern(mined, sub);
                REQUIRE(found != nullptr);
                CHECK(found->support >= p.support);
            }
        }
    }
}

TEST_CASE("runaway mining is refused, not truncated") {
    // two identical length-40 sequences over 6 symbols: the complete pattern
    // set is astronomically larger than the cap
    std::mt19937_64 rng(25);
    ItemSequence base(40);
    for (auto& v : base) v = static_cast<int>(rng() % 6);
    std::vector<ItemSequence> db(2, base);
    CHECK_THROWS_WITH_AS(prefix_span(db, 0.5), doctest::Contains("PatternLimitExceeded"),
                         CpsError);
}

TEST_CASE("prefix_span equals brute-force enumeration on random databases") {
    auto result = oracle::run_spm_suite(300, 99);
    CHECK(result.failures == 0);
    if (!result.ok()) MESSAGE(result.first_counterexample);
}
