#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cpsmine {

enum class Dimension { ProblemSolving, Scripting, Other };

// The four problem-solving phases, totally ordered A1 < A2 < A3 < A4.
enum class Phase : int { A1 = 0, A2 = 1, A3 = 2, A4 = 3 };

enum class Condition { Minimal, Maximal };

inline constexpr int kPhaseCount = 4;

const char* to_string(Phase p);
const char* to_string(Condition c);
const char* to_string(Dimension d);
const char* phase_label(Phase p);

std::optional<Phase> parse_phase(std::string_view s);
// Accepts "minimal"/"maximal" in any case.
std::optional<Condition> parse_condition(std::string_view s);

struct IndicatorCode {
    std::string code;         // canonical symbol, e.g. "PS01", "S4", "OT2"
    Dimension dimension;
    std::string subskill;     // SS1..SS10, SC11, SC12, or "Other"
    std::string subskill_label;
    std::string description;
};

// The 50 indicator codes in table order (42 PS + 5 S + 3 OT).
const std::vector<IndicatorCode>& framework_codes();

// nullptr when the symbol is not part of the vocabulary.
const IndicatorCode* find_code(std::string_view code);

// Position in the canonical table, or -1 for unknown codes.
int code_index(std::string_view code);

// Canonicalises unpadded spellings ("PS4" -> "PS04"); nullopt when the
// symbol is not in the vocabulary under either spelling.
std::optional<std::string> normalize_code(std::string_view raw);

// CSV export of the table: code,dimension,subskill,description.
void write_framework_csv(std::ostream& out);

struct CodedUtterance {
    std::string student_id;
    std::string triad_id;
    std::optional<Condition> condition;  // filled from the roster on ingest
    int64_t timestamp_ms = 0;            // UTC epoch milliseconds
    std::optional<Phase> phase;          // filled by align_phases
    std::string indicator;               // canonical code symbol
    std::string text;                    // carried through, never analysed
    int source_line = 0;                 // 1-based line in utterances.csv
};

struct PhaseEntry {
    std::string student_id;
    Phase phase = Phase::A1;
    int64_t entry_ms = 0;
    int source_line = 0;
};

struct RosterEntry {
    std::string triad_id;
    Condition condition = Condition::Minimal;
};

struct SessionDataset {
    std::vector<CodedUtterance> utterances;      // sorted by (timestamp, line)
    std::vector<PhaseEntry> phase_log;           // sorted by (student, time)
    std::map<std::string, RosterEntry> roster;   // student_id -> triad/condition
};

struct Violation {
    std::string kind;    // UnknownIndicator | NonMonotonePhase | OrphanStudent | MixedConditionTriad
    std::string detail;  // offending record, human readable
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_dataset(const SessionDataset& d);

}  // namespace cpsmine
