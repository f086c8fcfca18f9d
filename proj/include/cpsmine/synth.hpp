#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "cpsmine/framework.hpp"

namespace cpsmine {

// Per-condition generation profile. When total_utterances > 0 the condition
// emits exactly that many utterances (largest-remainder allocation over
// active student-phase cells); otherwise each active cell draws a count from
// rate_range.
struct ConditionProfile {
    std::array<std::map<std::string, double>, kPhaseCount> phase_code_weights;
    // chance a student is active in A1, then of staying active phase to phase
    std::array<double, kPhaseCount> participation{1.0, 1.0, 1.0, 1.0};
    int total_utterances = 0;
    std::pair<int, int> rate_range{15, 45};
};

struct SynthSpec {
    uint64_t seed = 42;
    int students_per_condition = 39;
    int triad_size = 3;
    // session clock starts here; phases get per-student random durations
    int64_t base_epoch_ms = 1741597200000;  // 2025-03-10T09:00:00Z
    std::array<std::pair<int64_t, int64_t>, kPhaseCount> phase_duration_range_ms{
        std::pair<int64_t, int64_t>{600000, 720000},
        {720000, 840000},
        {840000, 960000},
        {480000, 600000}};
    // per-student spread of code preferences (log-normal sigma)
    double heterogeneity = 0.8;
    std::map<Condition, ConditionProfile> profiles;
};

struct SynthFiles {
    std::string utterances_csv;
    std::string phase_log_csv;
    std::string roster_csv;
};

// Rate-driven generation with the standard weight tables.
SynthSpec default_synth_spec(uint64_t seed, int students_per_condition = 39);

// Same tables, but exact per-condition utterance totals (4821 maximal,
// 2433 minimal at 39 students each) and declining per-phase participation.
SynthSpec paper_shape_spec(uint64_t seed, int students_per_condition = 39);

// All randomness is drawn from one mt19937_64 seeded with spec.seed through
// documented integer/unit-interval mappings, so equal specs give
// byte-identical files. Throws CpsError("InvalidSpec").
SynthFiles generate_dataset(const SynthSpec& spec);

}  // namespace cpsmine
