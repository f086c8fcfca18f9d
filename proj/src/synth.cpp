#include "cpsmine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "cpsmine/csv.hpp"
#include "cpsmine/error.hpp"
#include "cpsmine/timeutil.hpp"

namespace cpsmine {

namespace {

// mt19937_64 with fixed mappings (modulo for bounded ints, 53-bit mantissa
// for the unit interval, Box-Muller for normals); no std::*_distribution so
// output does not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    double next_unit() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    int64_t uniform_int(int64_t lo, int64_t hi) {  // inclusive bounds
        return lo + static_cast<int64_t>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

    double normal() {
        double u1 = next_unit(), u2 = next_unit();
        if (u1 <= 0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    size_t pick_weighted(const std::vector<double>& cumulative) {
        double r = next_unit() * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        size_t idx = static_cast<size_t>(it - cumulative.begin());
        return std::min(idx, cumulative.size() - 1);
    }

private:
    std::mt19937_64 gen_;
};

struct StudentPlan {
    std::string id;
    std::string triad;
    Condition condition = Condition::Minimal;
    int last_phase = -1;  // highest phase index entered; -1 = silent observer
    std::array<int64_t, kPhaseCount> entry_ms{};
    std::array<int64_t, kPhaseCount> duration_ms{};
};

struct Cell {
    size_t student;
    int phase;
    double weight;
    int count = 0;
};

std::array<std::map<std::string, double>, kPhaseCount> maximal_tables() {
    return {{
        // A1: shared understanding plus heavy scripting uptake, socialising
        {{"OT2", 4.5}, {"PS04", 2.0}, {"PS05", 2.0}, {"PS06", 1.5}, {"PS15", 1.5},
         {"PS20", 2.0}, {"S1", 3.0}, {"S3", 3.0}, {"S4", 2.5}, {"OT1", 1.0},
         {"PS08", 0.8}, {"PS18", 0.4}, {"PS25", 0.3}},
        // A2: scripting dominates
        {{"S1", 3.5}, {"S3", 3.5}, {"S4", 3.0}, {"OT2", 1.2}, {"PS08", 0.5},
         {"OT1", 0.6}, {"PS25", 0.4}, {"PS23", 0.3}},
        // A3: scripting with drift to socialising
        {{"S1", 3.0}, {"S3", 3.5}, {"S4", 3.0}, {"OT2", 2.5}, {"OT1", 0.8},
         {"PS24", 0.4}, {"PS23", 0.3}},
        // A4: scripting fades, socialising peaks, some clarification
        {{"S1", 2.0}, {"S3", 2.5}, {"S4", 2.5}, {"OT2", 3.0}, {"PS05", 1.2},
         {"OT1", 0.8}, {"PS38", 0.3}},
    }};
}

std::array<std::map<std::string, double>, kPhaseCount> minimal_tables() {
    return {{
        // A1: socialising-heavy opening with sense-making present
        {{"OT2", 5.0}, {"PS01", 1.0}, {"PS04", 2.0}, {"PS05", 1.5}, {"PS20", 1.8},
         {"S1", 1.5}, {"S3", 1.5}, {"S4", 2.0}, {"OT1", 1.5}, {"PS02", 0.4},
         {"PS10", 0.3}},
        // A2: solution proposals keep recurring
        {{"PS20", 2.0}, {"S4", 2.0}, {"OT2", 2.5}, {"S1", 1.0}, {"S3", 1.0},
         {"OT1", 1.0}, {"PS07", 0.4}, {"PS16", 0.3}},
        // A3: proposals plus progress talk
        {{"PS20", 2.0}, {"PS26", 1.5}, {"PS04", 1.2}, {"PS03", 1.0}, {"S4", 2.0},
         {"OT2", 2.0}, {"OT1", 1.0}, {"PS17", 0.3}},
        // A4: thin participation drifting off task
        {{"S3", 1.5}, {"S4", 1.5}, {"OT2", 3.0}, {"OT1", 1.0}, {"PS19", 0.3}},
    }};
}

void validate_spec(const SynthSpec& spec) {
    if (spec.students_per_condition < 1 || spec.triad_size < 1)
        throw CpsError("InvalidSpec", "students_per_condition and triad_size must be positive");
    if (spec.profiles.size() != 2)
        throw CpsError("InvalidSpec", "both conditions need a profile");
    for (const auto& [cond, profile] : spec.profiles) {
        for (int ph = 0; ph < kPhaseCount; ++ph) {
            double positive = 0;
            for (const auto& [code, w] : profile.phase_code_weights[static_cast<size_t>(ph)]) {
                if (w < 0)
                    throw CpsError("InvalidSpec", std::string("negative weight for ") + code);
                if (!find_code(code))
                    throw CpsError("InvalidSpec", std::string("unknown code ") + code);
                positive += w;
            }
            if (positive <= 0)
                throw CpsError("InvalidSpec",
                               std::string(to_string(cond)) + " " +
                                   to_string(static_cast<Phase>(ph)) + ": no positive code weight");
        }
        for (double p : profile.participation)
            if (p < 0 || p > 1) throw CpsError("InvalidSpec", "participation must lie in [0,1]");
        if (profile.total_utterances == 0 &&
            (profile.rate_range.first < 1 || profile.rate_range.second < profile.rate_range.first))
            throw CpsError("InvalidSpec", "rate_range must satisfy 1 <= lo <= hi");
    }
    for (const auto& [lo, hi] : spec.phase_duration_range_ms)
        if (lo < 60000 || hi < lo) throw CpsError("InvalidSpec", "phase durations must be >= 60 s");
}

// exact-total allocation: floor shares, remainder by largest fraction, then
// every cell raised to >= 1 by stealing from the largest counts
void allocate_budget(std::vector<Cell>& cells, int budget) {
    if (cells.empty())
        throw CpsError("InvalidSpec", "utterance budget set but no student is active in any phase");
    if (budget < static_cast<int>(cells.size()))
        throw CpsError("InvalidSpec", "utterance budget smaller than active student-phase cells");
    double total_weight = 0;
    for (const auto& c : cells) total_weight += c.weight;
    std::vector<std::pair<double, size_t>> fractions;
    int assigned = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
        double share = static_cast<double>(budget) * cells[i].weight / total_weight;
        cells[i].count = static_cast<int>(std::floor(share));
        assigned += cells[i].count;
        fractions.push_back({share - std::floor(share), i});
    }
    std::sort(fractions.begin(), fractions.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int r = 0; r < budget - assigned; ++r)
        ++cells[fractions[static_cast<size_t>(r) % fractions.size()].second].count;
    // enforce the >=1 floor
    for (auto& c : cells) {
        if (c.count >= 1) continue;
        auto donor = std::max_element(cells.begin(), cells.end(),
                                      [](const Cell& a, const Cell& b) { return a.count < b.count; });
        --donor->count;
        c.count = 1;
    }
}

}  // namespace

SynthSpec default_synth_spec(uint64_t seed, int students_per_condition) {
    SynthSpec spec;
    spec.seed = seed;
    spec.students_per_condition = students_per_condition;
    ConditionProfile maximal;
    maximal.phase_code_weights = maximal_tables();
    maximal.participation = {0.95, 0.95, 0.92, 0.90};
    maximal.rate_range = {18, 42};
    ConditionProfile minimal;
    minimal.phase_code_weights = minimal_tables();
    minimal.participation = {0.95, 0.90, 0.85, 0.80};
    minimal.rate_range = {8, 28};
    spec.profiles[Condition::Maximal] = std::move(maximal);
    spec.profiles[Condition::Minimal] = std::move(minimal);
    return spec;
}

SynthSpec paper_shape_spec(uint64_t seed, int students_per_condition) {
    SynthSpec spec = default_synth_spec(seed, students_per_condition);
    auto& maximal = spec.profiles[Condition::Maximal];
    // participation decline gives per-phase active cohorts of roughly
    // 29/26/25/21 and 28/21/13/8 out of 39
    maximal.participation = {29.0 / 39.0, 26.0 / 29.0, 25.0 / 26.0, 21.0 / 25.0};
    maximal.total_utterances = 4821;
    auto& minimal = spec.profiles[Condition::Minimal];
    minimal.participation = {28.0 / 39.0, 21.0 / 28.0, 13.0 / 21.0, 8.0 / 13.0};
    minimal.total_utterances = 2433;
    if (students_per_condition != 39) {
        double scale = static_cast<double>(students_per_condition) / 39.0;
        maximal.total_utterances = std::max(1, static_cast<int>(4821 * scale));
        minimal.total_utterances = std::max(1, static_cast<int>(2433 * scale));
    }
    return spec;
}

SynthFiles generate_dataset(const SynthSpec& spec) {
    validate_spec(spec);
    Rng rng(spec.seed);

    const std::array<Condition, 2> conditions{Condition::Maximal, Condition::Minimal};
    std::vector<StudentPlan> students;

    for (Condition cond : conditions) {
        const auto& profile = spec.profiles.at(cond);
        const char* tag = cond == Condition::Maximal ? "max" : "min";
        for (int i = 0; i < spec.students_per_condition; ++i) {
            StudentPlan s;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%s%02d", tag, i + 1);
            s.id = buf;
            std::snprintf(buf, sizeof(buf), "t%s%02d", tag, i / spec.triad_size + 1);
            s.triad = buf;
            s.condition = cond;
            // survival through phases
            for (int ph = 0; ph < kPhaseCount; ++ph) {
                if (rng.next_unit() < profile.participation[static_cast<size_t>(ph)])
                    s.last_phase = ph;
                else
                    break;
            }
            // every student logs at least the first phase entry
            int logged_through = std::max(s.last_phase, 0);
            int64_t t = spec.base_epoch_ms + rng.uniform_int(0, 120000);
            for (int ph = 0; ph <= logged_through; ++ph) {
                const auto& [lo, hi] = spec.phase_duration_range_ms[static_cast<size_t>(ph)];
                s.entry_ms[static_cast<size_t>(ph)] = t;
                s.duration_ms[static_cast<size_t>(ph)] = rng.uniform_int(lo, hi);
                t += s.duration_ms[static_cast<size_t>(ph)];
            }
            students.push_back(std::move(s));
        }
    }

    // utterance counts per active (student, phase) cell
    struct Utterance {
        int64_t ts;
        size_t student;
        std::string code;
    };
    std::vector<Utterance> utterances;

    for (Condition cond : conditions) {
        const auto& profile = spec.profiles.at(cond);
        std::vector<Cell> cells;
        for (size_t si = 0; si < students.size(); ++si) {
            const auto& s = students[si];
            if (s.condition != cond) continue;
            for (int ph = 0; ph <= s.last_phase; ++ph)
                cells.push_back({si, ph, -std::log(1.0 - rng.next_unit()), 0});
        }
        if (profile.total_utterances > 0) {
            allocate_budget(cells, profile.total_utterances);
        } else {
            for (auto& c : cells)
                c.count = static_cast<int>(
                    rng.uniform_int(profile.rate_range.first, profile.rate_range.second));
        }

        for (auto& cell : cells) {
            const auto& s = students[cell.student];
            const auto& table = profile.phase_code_weights[static_cast<size_t>(cell.phase)];
            // per-student taste: log-normal multiplier per code
            std::vector<std::string> codes;
            std::vector<double> cumulative;
            double acc = 0;
            for (const auto& [code, w] : table) {
                if (w <= 0) continue;
                codes.push_back(code);
                acc += w * std::exp(spec.heterogeneity * rng.normal());
                cumulative.push_back(acc);
            }
            std::vector<int64_t> offsets;
            offsets.reserve(static_cast<size_t>(cell.count));
            for (int k = 0; k < cell.count; ++k)
                offsets.push_back(
                    rng.uniform_int(0, s.duration_ms[static_cast<size_t>(cell.phase)] - 1));
            std::sort(offsets.begin(), offsets.end());
            for (int k = 0; k < cell.count; ++k) {
                Utterance u;
                u.ts = s.entry_ms[static_cast<size_t>(cell.phase)] + offsets[static_cast<size_t>(k)];
                u.student = cell.student;
                u.code = codes[rng.pick_weighted(cumulative)];
                utterances.push_back(std::move(u));
            }
        }
    }

    std::stable_sort(utterances.begin(), utterances.end(), [&](const Utterance& a, const Utterance& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        return students[a.student].id < students[b.student].id;
    });

    SynthFiles files;
    {
        std::ostringstream out;
        out << "student_id,triad_id,condition\n";
        for (const auto& s : students)
            out << s.id << ',' << s.triad << ',' << to_string(s.condition) << '\n';
        files.roster_csv = out.str();
    }
    {
        std::ostringstream out;
        out << "student_id,phase,entry_timestamp\n";
        for (const auto& s : students) {
            int logged_through = std::max(s.last_phase, 0);
            for (int ph = 0; ph <= logged_through; ++ph)
                out << s.id << ',' << to_string(static_cast<Phase>(ph)) << ','
                    << format_iso8601_ms(s.entry_ms[static_cast<size_t>(ph)]) << '\n';
        }
        files.phase_log_csv = out.str();
    }
    {
        std::ostringstream out;
        out << "student_id,triad_id,timestamp,indicator,text\n";
        for (const auto& u : utterances)
            out << students[u.student].id << ',' << students[u.student].triad << ','
                << format_iso8601_ms(u.ts) << ',' << u.code << ",\n";
        files.utterances_csv = out.str();
    }
    return files;
}

}  // namespace cpsmine
