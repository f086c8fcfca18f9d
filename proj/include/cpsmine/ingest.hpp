#pragma once

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "cpsmine/framework.hpp"

namespace cpsmine {

// Per-phase, per-condition collection of behaviour-code sequences, one per
// student who spoke in the phase, each in timestamp order.
struct SequenceDatabase {
    Phase phase = Phase::A1;
    Condition condition = Condition::Minimal;
    // sorted by student_id; sequences are non-empty
    std::vector<std::pair<std::string, std::vector<std::string>>> sequences;

    int n_students() const { return static_cast<int>(sequences.size()); }
};

// Parses the three CSV inputs into a dataset sorted by timestamp (ties keep
// file order). Throws CpsError: MalformedRow, UnknownIndicator,
// DuplicatePhaseEntry.
SessionDataset parse_event_log(std::istream& utterances_csv, std::istream& phase_log_csv,
                               std::istream& roster_csv);

// Clock skew tolerated before a student's first phase entry.
inline constexpr int64_t kAlignSkewMs = 2000;

// Assigns each utterance the phase of its student's latest entry at or before
// the utterance timestamp. Utterances up to kAlignSkewMs before the first
// entry get that first phase; anything earlier throws
// CpsError("UnalignedUtterance"). Idempotent.
SessionDataset align_phases(SessionDataset d);

SequenceDatabase build_sequences(const SessionDataset& d, Phase phase, Condition condition);

}  // namespace cpsmine
