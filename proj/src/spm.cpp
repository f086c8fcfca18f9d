#include "cpsmine/spm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cpsmine/error.hpp"
#include "cpsmine/hina.hpp"

namespace cpsmine {

namespace {

template <typename T>
std::vector<T> merge_runs(const std::vector<T>& seq) {
    std::vector<T> out;
    out.reserve(seq.size());
    for (const auto& item : seq)
        if (out.empty() || out.back() != item) out.push_back(item);
    return out;
}

// postfix of one database sequence: everything from `pos` on
struct Projection {
    int seq;
    int pos;
};

class Miner {
public:
    Miner(const std::vector<ItemSequence>& db, int threshold)
        : db_(db), threshold_(threshold) {}

    std::vector<MinedPattern> mine_all() {
        std::vector<Projection> root;
        root.reserve(db_.size());
        for (size_t i = 0; i < db_.size(); ++i)
            root.push_back({static_cast<int>(i), 0});
        std::vector<MinedPattern> out;
        grow(root, &out, nullptr);
        std::stable_sort(out.begin(), out.end(), [](const MinedPattern& a, const MinedPattern& b) {
            if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
            return a.items < b.items;
        });
        return out;
    }

    // early-exit existence probe used by support tuning
    bool has_pattern_of_length(size_t len) {
        std::vector<Projection> root;
        root.reserve(db_.size());
        for (size_t i = 0; i < db_.size(); ++i)
            root.push_back({static_cast<int>(i), 0});
        bool found = false;
        grow(root, nullptr, &found, len);
        return found;
    }

private:
    void grow(const std::vector<Projection>& proj, std::vector<MinedPattern>* out,
              bool* found, size_t target_len = 0) {
        if (found && *found) return;
        // support per item: one count per sequence whose postfix contains it
        std::map<int, int> item_support;
        std::set<int> in_seq;
        for (const auto& pr : proj) {
            const auto& s = db_[pr.seq];
            in_seq.clear();
            for (size_t i = pr.pos; i < s.size(); ++i) in_seq.insert(s[i]);
            for (int item : in_seq) ++item_support[item];
        }
        for (const auto& [item, support] : item_support) {
            if (support < threshold_) continue;
            prefix_.push_back(item);
            if (out) {
                if (out->size() >= kMaxPatternsPerMine)
                    throw CpsError("PatternLimitExceeded",
                                   "more than " + std::to_string(kMaxPatternsPerMine) +
                                       " frequent patterns; raise min_support");
                out->push_back(MinedPattern{prefix_, support});
            }
            if (found && prefix_.size() >= target_len) {
                *found = true;
                prefix_.pop_back();
                return;
            }
            std::vector<Projection> next;
            next.reserve(support);
            for (const auto& pr : proj) {
                const auto& s = db_[pr.seq];
                for (size_t i = pr.pos; i < s.size(); ++i) {
                    if (s[i] == item) {
                        next.push_back({pr.seq, static_cast<int>(i) + 1});
                        break;
                    }
                }
            }
            grow(next, out, found, target_len);
            prefix_.pop_back();
            if (found && *found) return;
        }
    }

    const std::vector<ItemSequence>& db_;
    int threshold_;
    std::vector<int> prefix_;
};

}  // namespace

ItemSequence merge_consecutive(const ItemSequence& seq) { return merge_runs(seq); }

std::vector<std::string> merge_consecutive(const std::vector<std::string>& seq) {
    return merge_runs(seq);
}

int support_threshold(double min_support, int n_sequences) {
    // the epsilon keeps exact products like 0.5 * 4 from ceiling up when the
    // float product lands a hair above the integer
    double t = std::ceil(min_support * static_cast<double>(n_sequences) - 1e-9);
    return std::max(1, static_cast<int>(t));
}

std::vector<MinedPattern> prefix_span(const std::vector<ItemSequence>& db, double min_support) {
    if (db.empty()) throw CpsError("EmptyDatabase", "no sequences to mine");
    Miner miner(db, support_threshold(min_support, static_cast<int>(db.size())));
    return miner.mine_all();
}

std::vector<MinedPattern> filter_patterns(std::vector<MinedPattern> patterns, size_t min_len) {
    std::erase_if(patterns, [min_len](const MinedPattern& p) { return p.items.size() < min_len; });
    return patterns;
}

double auto_tune_min_support(const std::vector<ItemSequence>& db) {
    if (db.empty()) throw CpsError("EmptyDatabase", "no sequences to mine");
    for (int percent = 95; percent >= 5; percent -= 5) {
        double ms = percent / 100.0;
        Miner miner(db, support_threshold(ms, static_cast<int>(db.size())));
        if (miner.has_pattern_of_length(3)) return ms;
    }
    throw CpsError("NoQualifyingSupport", "no grid value yields a pattern of length 3");
}

int64_t count_occurrences(const ItemSequence& pattern, const ItemSequence& seq) {
    if (pattern.empty()) return 0;
    int64_t count = 0;
    size_t i = 0;
    while (i < seq.size()) {
        size_t k = 0;
        for (; i < seq.size() && k < pattern.size(); ++i)
            if (seq[i] == pattern[k]) ++k;
        if (k == pattern.size()) ++count;
        else break;
    }
    return count;
}

namespace {

// behaviour codes -> dense item ids in canonical code order, sequences merged
std::pair<std::vector<ItemSequence>, std::vector<std::string>> to_merged_items(
    const SequenceDatabase& db) {
    std::vector<std::string> vocab;
    for (const auto& [student, seq] : db.sequences)
        for (const auto& code : seq) vocab.push_back(code);
    std::sort(vocab.begin(), vocab.end(), behaviour_less);
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    std::map<std::string, int> item_of;
    for (size_t i = 0; i < vocab.size(); ++i) item_of[vocab[i]] = static_cast<int>(i);

    std::vector<ItemSequence> merged;
    merged.reserve(db.sequences.size());
    for (const auto& [student, seq] : db.sequences) {
        ItemSequence s;
        s.reserve(seq.size());
        for (const auto& code : seq) s.push_back(item_of.at(code));
        merged.push_back(merge_consecutive(s));
    }
    return {std::move(merged), std::move(vocab)};
}

}  // namespace

double auto_tune_min_support(const SequenceDatabase& db) {
    if (db.sequences.empty()) throw CpsError("EmptyDatabase", "no sequences to mine");
    return auto_tune_min_support(to_merged_items(db).first);
}

PatternReport pattern_report(const SequenceDatabase& db, double min_support) {
    PatternReport report;
    report.phase = db.phase;
    report.condition = db.condition;
    report.n_students = db.n_students();
    report.min_support = min_support;
    if (db.sequences.empty()) throw CpsError("EmptyDatabase", "no sequences to mine");

    auto [merged, vocab] = to_merged_items(db);

    auto mined = filter_patterns(prefix_span(merged, min_support));

    int64_t total_occurrences = 0;
    std::vector<int64_t> occ(mined.size(), 0);
    for (size_t i = 0; i < mined.size(); ++i) {
        for (const auto& s : merged) occ[i] += count_occurrences(mined[i].items, s);
        total_occurrences += occ[i];
    }

    const double n = static_cast<double>(report.n_students);
    for (size_t i = 0; i < mined.size(); ++i) {
        FrequentPattern fp;
        fp.items.reserve(mined[i].items.size());
        for (int item : mined[i].items) fp.items.push_back(vocab[static_cast<size_t>(item)]);
        fp.support_count = mined[i].support;
        fp.support_fraction = mined[i].support / n;
        fp.occurrence_count = occ[i];
        fp.student_pct = 100.0 * fp.support_fraction;
        fp.occurrence_pct = total_occurrences == 0
                                ? 0.0
                                : 100.0 * static_cast<double>(occ[i]) /
                                      static_cast<double>(total_occurrences);
        report.patterns.push_back(std::move(fp));
    }
    return report;
}

}  // namespace cpsmine
