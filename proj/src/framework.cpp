#include "cpsmine/framework.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

namespace cpsmine {

const char* to_string(Phase p) {
    switch (p) {
        case Phase::A1: return "A1";
        case Phase::A2: return "A2";
        case Phase::A3: return "A3";
        case Phase::A4: return "A4";
    }
    return "?";
}

const char* phase_label(Phase p) {
    switch (p) {
        case Phase::A1: return "problem identification";
        case Phase::A2: return "ideation, planning and decision making";
        case Phase::A3: return "plan implementation and solution generation";
        case Phase::A4: return "solution checking, problem extension and reflection";
    }
    return "?";
}

const char* to_string(Condition c) {
    return c == Condition::Minimal ? "minimal" : "maximal";
}

const char* to_string(Dimension d) {
    switch (d) {
        case Dimension::ProblemSolving: return "ProblemSolving";
        case Dimension::Scripting: return "Scripting";
        case Dimension::Other: return "Other";
    }
    return "?";
}

std::optional<Phase> parse_phase(std::string_view s) {
    if (s == "A1") return Phase::A1;
    if (s == "A2") return Phase::A2;
    if (s == "A3") return Phase::A3;
    if (s == "A4") return Phase::A4;
    return std::nullopt;
}

std::optional<Condition> parse_condition(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "minimal") return Condition::Minimal;
    if (lower == "maximal") return Condition::Maximal;
    return std::nullopt;
}

namespace {

std::vector<IndicatorCode> build_table() {
    const Dimension PS = Dimension::ProblemSolving;
    const Dimension SC = Dimension::Scripting;
    const Dimension OT = Dimension::Other;
    std::vector<IndicatorCode> t;
    t.reserve(50);
    auto add = [&](const char* code, Dimension dim, const char* ss,
                   const char* ss_label, const char* desc) {
        t.push_back(IndicatorCode{code, dim, ss, ss_label, desc});
    };

    add("PS01", PS, "SS1", "Sense-making",
        "Talking about the task questions in general terms to understand about the problem-solving task");
    add("PS02", PS, "SS1", "Sense-making",
        "Explaining ideas or concepts in the problem-solving task with reference to prior knowledge or definitions from information sources");
    add("PS03", PS, "SS1", "Sense-making",
        "Addressing difficulties or limitations that obstruct problem solving");
    add("PS04", PS, "SS2", "Building shared understanding",
        "Asking questions to clarify understanding, ideas or contributions");
    add("PS05", PS, "SS2", "Building shared understanding",
        "Answering questions to clarify understanding, ideas or contributions");
    add("PS06", PS, "SS2", "Building shared understanding",
        "Reiterating or paraphrasing oneself or others' ideas or contributions");
    add("PS07", PS, "SS2", "Building shared understanding",
        "Adapting and building on the ideas or contributions of others");
    add("PS08", PS, "SS2", "Building shared understanding",
        "Stating agreement with others");
    add("PS09", PS, "SS2", "Building shared understanding",
        "Discovering perspectives and abilities of group members");
    add("PS10", PS, "SS2", "Building shared understanding",
        "Sharing information from sources which contribute to formulating the problem-solving task");
    add("PS11", PS, "SS2", "Building shared understanding",
        "Stating disagreement with others");
    add("PS12", PS, "SS2", "Building shared understanding",
        "Constructing arguments in favour of one's own ideas or contributions");
    add("PS13", PS, "SS2", "Building shared understanding",
        "Resolving differences");
    add("PS14", PS, "SS2", "Building shared understanding",
        "Reaching a compromise with others");
    add("PS15", PS, "SS2", "Building shared understanding",
        "Identifying and abstracting relevant information about the task context");
    add("PS16", PS, "SS2", "Building shared understanding",
        "Establishing connections and patterns between relevant information in the problem-solving task");
    add("PS17", PS, "SS2", "Building shared understanding",
        "Dissecting the problem into smaller tasks");
    add("PS18", PS, "SS3", "Formulating a solution",
        "Building a representation of the problem-solving task");
    add("PS19", PS, "SS3", "Formulating a solution",
        "Creating an ordered step-by-step plan");
    add("PS20", PS, "SS3", "Formulating a solution",
        "Proposing ideas or specific solution methods to solve the task questions");
    add("PS21", PS, "SS4", "Defining roles and responsibilities",
        "Discussing required roles and collaborative interaction to address the problem-solving task");
    add("PS22", PS, "SS4", "Defining roles and responsibilities",
        "Coordinating sub-tasks to be performed");
    add("PS23", PS, "SS5", "Reaching a solution",
        "Sharing contributions and findings of individual and group sub-tasks");
    add("PS24", PS, "SS5", "Reaching a solution",
        "Providing an answer to the task questions");
    add("PS25", PS, "SS5", "Reaching a solution",
        "Responding to or acknowledging the contributions of others");
    add("PS26", PS, "SS6", "Maintaining roles and responsibilities",
        "Discussing the progress and status of individual and group sub-tasks");
    add("PS27", PS, "SS6", "Maintaining roles and responsibilities",
        "Providing feedback on the progress and status of individual or group sub-tasks");
    add("PS28", PS, "SS6", "Maintaining roles and responsibilities",
        "Recognising strengths and weaknesses of self and others");
    add("PS29", PS, "SS6", "Maintaining roles and responsibilities",
        "Adapting group organisation to adjust individual and group sub-tasks");
    add("PS30", PS, "SS7", "Maintaining shared understanding",
        "Providing feedback or instructional support to others");
    add("PS31", PS, "SS7", "Maintaining shared understanding",
        "Using feedback provided to clarify or elaborate own ideas");
    add("PS32", PS, "SS7", "Maintaining shared understanding",
        "Making iterative adaptations to the plan based on outcomes, new information and new ideas");
    add("PS33", PS, "SS8", "Evaluating the solution",
        "Anticipating issues or errors");
    add("PS34", PS, "SS8", "Evaluating the solution",
        "Testing to detect working order");
    add("PS35", PS, "SS8", "Evaluating the solution",
        "Detecting and hypothesising issues or errors");
    add("PS36", PS, "SS8", "Evaluating the solution",
        "Identifying the need for additional information, resources or tasks to address issues or fix errors");
    add("PS37", PS, "SS8", "Evaluating the solution",
        "Addressing issues or fixing errors");
    add("PS38", PS, "SS8", "Evaluating the solution",
        "Agreeing the sub-goals or goal-state have been effectively solved to answer the problem");
    add("PS39", PS, "SS9", "Reflecting",
        "Reusing, remixing, and integrating ideas to develop alternative strategies for flawed solutions");
    add("PS40", PS, "SS9", "Reflecting",
        "Building on others' ideas to improve alternative strategies");
    add("PS41", PS, "SS9", "Reflecting",
        "Discussing the limitations of the current solution for future problem-solving tasks");
    add("PS42", PS, "SS10", "Evaluating on group work",
        "Discussing group dynamics, effort, strengths and weakness");

    add("S1", SC, "SC11", "Using scripting",
        "Discussing understanding of script components");
    add("S2", SC, "SC11", "Using scripting",
        "Prompting responses or actions from others to script components");
    add("S3", SC, "SC11", "Using scripting",
        "Responding to script components");
    add("S4", SC, "SC12", "Regulating scripting",
        "Discussing work status and progress on script components");
    add("S5", SC, "SC12", "Regulating scripting",
        "Disconnecting with group progress and usage of script components");

    add("OT1", OT, "Other", "Other engagements during task",
        "Technical issues or logistical tasks related to the learning environment");
    add("OT2", OT, "Other", "Other engagements during task",
        "Socialising");
    add("OT3", OT, "Other", "Other engagements during task",
        "Refocusing to disrupt engagement in technical issues, logistical tasks or socialising");

    return t;
}

const std::unordered_map<std::string, int>& code_lookup() {
    static const std::unordered_map<std::string, int> m = [] {
        std::unordered_map<std::string, int> r;
        const auto& codes = framework_codes();
        for (size_t i = 0; i < codes.size(); ++i) r.emplace(codes[i].code, static_cast<int>(i));
        return r;
    }();
    return m;
}

}  // namespace

const std::vector<IndicatorCode>& framework_codes() {
    static const std::vector<IndicatorCode> table = build_table();
    return table;
}

int code_index(std::string_view code) {
    auto it = code_lookup().find(std::string(code));
    return it == code_lookup().end() ? -1 : it->second;
}

const IndicatorCode* find_code(std::string_view code) {
    int idx = code_index(code);
    return idx < 0 ? nullptr : &framework_codes()[idx];
}

std::optional<std::string> normalize_code(std::string_view raw) {
    std::string s(raw);
    if (find_code(s)) return s;
    // unpadded alias: PS1..PS9 -> PS01..PS09
    if (s.size() == 3 && s[0] == 'P' && s[1] == 'S' && std::isdigit(static_cast<unsigned char>(s[2]))) {
        std::string padded = std::string("PS0") + s[2];
        if (find_code(padded)) return padded;
    }
    return std::nullopt;
}

void write_framework_csv(std::ostream& out) {
    out << "code,dimension,subskill,description\n";
    for (const auto& c : framework_codes()) {
        // descriptions contain no quotes/commas needing RFC-4180 escapes,
        // but quote anyway so downstream parsers stay honest
        out << c.code << ',' << to_string(c.dimension) << ',' << c.subskill << ",\""
            << c.description << "\"\n";
    }
}

ValidationReport validate_dataset(const SessionDataset& d) {
    ValidationReport report;
    auto flag = [&](const char* kind, std::string detail) {
        report.violations.push_back(Violation{kind, std::move(detail)});
    };

    for (const auto& u : d.utterances) {
        if (!find_code(u.indicator)) {
            flag("UnknownIndicator", "utterance line " + std::to_string(u.source_line) +
                                         " by " + u.student_id + ": code '" + u.indicator + "'");
        }
        if (!d.roster.count(u.student_id)) {
            flag("OrphanStudent", "utterance line " + std::to_string(u.source_line) +
                                      ": student '" + u.student_id + "' not in roster");
        }
    }

    // per-student phase log: strictly increasing timestamps, phases strictly
    // advancing (skips allowed, repeats and regressions not)
    std::map<std::string, std::vector<const PhaseEntry*>> by_student;
    for (const auto& e : d.phase_log) by_student[e.student_id].push_back(&e);
    for (auto& [student, entries] : by_student) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const PhaseEntry* a, const PhaseEntry* b) { return a->entry_ms < b->entry_ms; });
        for (size_t i = 1; i < entries.size(); ++i) {
            const auto& prev = *entries[i - 1];
            const auto& cur = *entries[i];
            if (cur.entry_ms <= prev.entry_ms || cur.phase <= prev.phase) {
                flag("NonMonotonePhase",
                     "student '" + student + "': " + to_string(prev.phase) + "@" +
                         std::to_string(prev.entry_ms) + "ms then " + to_string(cur.phase) + "@" +
                         std::to_string(cur.entry_ms) + "ms");
            }
        }
    }

    std::map<std::string, Condition> triad_condition;
    for (const auto& [student, entry] : d.roster) {
        auto [it, inserted] = triad_condition.emplace(entry.triad_id, entry.condition);
        if (!inserted && it->second != entry.condition) {
            flag("MixedConditionTriad", "triad '" + entry.triad_id + "' has both conditions (student '" +
                                            student + "' is " + to_string(entry.condition) + ")");
        }
    }

    return report;
}

}  // namespace cpsmine
