#include "cpsmine/ingest.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cpsmine/csv.hpp"
#include "cpsmine/error.hpp"
#include "cpsmine/timeutil.hpp"

namespace cpsmine {

namespace {

void require_header(const std::vector<CsvRow>& rows, const std::vector<std::string>& expected,
                    const char* file) {
    if (rows.empty() || rows.front().fields != expected) {
        std::string want;
        for (const auto& f : expected) want += (want.empty() ? "" : ",") + f;
        throw CpsError("MalformedRow", std::string(file) + ": expected header '" + want + "'");
    }
}

int64_t parse_ts(const std::string& raw, const char* file, int line) {
    auto ts = parse_iso8601_ms(raw);
    if (!ts)
        throw CpsError("MalformedRow", std::string(file) + " line " + std::to_string(line) +
                                           ": bad timestamp '" + raw + "'");
    return *ts;
}

}  // namespace

SessionDataset parse_event_log(std::istream& utterances_csv, std::istream& phase_log_csv,
                               std::istream& roster_csv) {
    SessionDataset d;

    auto roster_rows = read_csv(roster_csv);
    require_header(roster_rows, {"student_id", "triad_id", "condition"}, "roster.csv");
    for (size_t i = 1; i < roster_rows.size(); ++i) {
        const auto& r = roster_rows[i];
        if (r.fields.size() != 3)
            throw CpsError("MalformedRow", "roster.csv line " + std::to_string(r.line) + ": expected 3 columns, got " +
                                               std::to_string(r.fields.size()));
        auto cond = parse_condition(r.fields[2]);
        if (!cond)
            throw CpsError("MalformedRow", "roster.csv line " + std::to_string(r.line) +
                                               ": condition '" + r.fields[2] + "'");
        d.roster[r.fields[0]] = RosterEntry{r.fields[1], *cond};
    }

    auto phase_rows = read_csv(phase_log_csv);
    require_header(phase_rows, {"student_id", "phase", "entry_timestamp"}, "phase_log.csv");
    std::set<std::pair<std::string, Phase>> seen_entries;
    for (size_t i = 1; i < phase_rows.size(); ++i) {
        const auto& r = phase_rows[i];
        if (r.fields.size() != 3)
            throw CpsError("MalformedRow", "phase_log.csv line " + std::to_string(r.line) + ": expected 3 columns, got " +
                                               std::to_string(r.fields.size()));
        auto phase = parse_phase(r.fields[1]);
        if (!phase)
            throw CpsError("MalformedRow",
                           "phase_log.csv line " + std::to_string(r.line) + ": phase '" + r.fields[1] + "'");
        if (!seen_entries.insert({r.fields[0], *phase}).second)
            throw CpsError("DuplicatePhaseEntry", "phase_log.csv line " + std::to_string(r.line) +
                                                      ": student '" + r.fields[0] + "' enters " +
                                                      r.fields[1] + " twice");
        PhaseEntry e;
        e.student_id = r.fields[0];
        e.phase = *phase;
        e.entry_ms = parse_ts(r.fields[2], "phase_log.csv", r.line);
        e.source_line = r.line;
        d.phase_log.push_back(std::move(e));
    }

    auto utt_rows = read_csv(utterances_csv);
    require_header(utt_rows, {"student_id", "triad_id", "timestamp", "indicator", "text"},
                   "utterances.csv");
    for (size_t i = 1; i < utt_rows.size(); ++i) {
        const auto& r = utt_rows[i];
        if (r.fields.size() != 5)
            throw CpsError("MalformedRow", "utterances.csv line " + std::to_string(r.line) + ": expected 5 columns, got " +
                                               std::to_string(r.fields.size()));
        auto code = normalize_code(r.fields[3]);
        if (!code)
            throw CpsError("UnknownIndicator", "utterances.csv line " + std::to_string(r.line) +
                                                   ": code '" + r.fields[3] + "'");
        CodedUtterance u;
        u.student_id = r.fields[0];
        u.triad_id = r.fields[1];
        u.timestamp_ms = parse_ts(r.fields[2], "utterances.csv", r.line);
        u.indicator = *code;
        u.text = r.fields[4];
        u.source_line = r.line;
        auto it = d.roster.find(u.student_id);
        if (it != d.roster.end()) u.condition = it->second.condition;
        d.utterances.push_back(std::move(u));
    }

    // row order within files is irrelevant: canonical order is
    // (timestamp, file line)
    std::stable_sort(d.utterances.begin(), d.utterances.end(),
                     [](const CodedUtterance& a, const CodedUtterance& b) {
                         if (a.timestamp_ms != b.timestamp_ms) return a.timestamp_ms < b.timestamp_ms;
                         return a.source_line < b.source_line;
                     });
    std::stable_sort(d.phase_log.begin(), d.phase_log.end(),
                     [](const PhaseEntry& a, const PhaseEntry& b) {
                         if (a.student_id != b.student_id) return a.student_id < b.student_id;
                         if (a.entry_ms != b.entry_ms) return a.entry_ms < b.entry_ms;
                         return a.source_line < b.source_line;
                     });
    return d;
}

SessionDataset align_phases(SessionDataset d) {
    std::map<std::string, std::vector<const PhaseEntry*>> entries;
    for (const auto& e : d.phase_log) entries[e.student_id].push_back(&e);
    // phase_log is sorted by (student, entry_ms) already

    for (auto& u : d.utterances) {
        auto it = entries.find(u.student_id);
        if (it == entries.end() || it->second.empty())
            throw CpsError("UnalignedUtterance", "student '" + u.student_id +
                                                     "' has utterances but no phase log entries");
        const auto& es = it->second;
        const PhaseEntry* latest = nullptr;
        for (const auto* e : es) {
            if (e->entry_ms <= u.timestamp_ms) latest = e;
            else break;
        }
        if (!latest) {
            int64_t gap = es.front()->entry_ms - u.timestamp_ms;
            if (gap > kAlignSkewMs)
                throw CpsError("UnalignedUtterance",
                               "utterance line " + std::to_string(u.source_line) + " by '" +
                                   u.student_id + "' precedes first phase entry by " +
                                   std::to_string(gap) + " ms");
            latest = es.front();
        }
        u.phase = latest->phase;
    }
    return d;
}

SequenceDatabase build_sequences(const SessionDataset& d, Phase phase, Condition condition) {
    SequenceDatabase db;
    db.phase = phase;
    db.condition = condition;
    std::map<std::string, std::vector<std::string>> per_student;
    for (const auto& u : d.utterances) {
        if (u.phase != phase || u.condition != condition) continue;
        per_student[u.student_id].push_back(u.indicator);
    }
    db.sequences.assign(per_student.begin(), per_student.end());
    return db;
}

}  // namespace cpsmine
