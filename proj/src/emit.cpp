#include "cpsmine/emit.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "cpsmine/csv.hpp"

namespace cpsmine {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", v);
    return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

std::string engagement_csv(
    const std::vector<std::pair<Condition, EngagementProfile>>& profiles) {
    std::ostringstream out;
    out << "student_id,condition,quantity,normalized_quantity,diversity\n";
    for (const auto& [cond, p] : profiles)
        out << csv_escape(p.student_id) << ',' << to_string(cond) << ',' << p.quantity << ','
            << format_double(p.normalized_quantity) << ',' << format_double(p.diversity) << '\n';
    return out.str();
}

nlohmann::json test_result_json(const std::string& metric, const TestResult& r) {
    return nlohmann::json{{"metric", metric}, {"u", r.u_a},   {"u_min", r.u_min},
                          {"p", r.p_value},   {"method", r.method}, {"rbc", r.rbc},
                          {"n_a", r.n_a},     {"n_b", r.n_b}};
}

std::string pruned_network_dot(const BipartiteNetwork& n, const std::vector<PrunedEdge>& edges,
                               int64_t significance_threshold, bool keep_all) {
    std::ostringstream out;
    out << "graph behaviour_phase_" << to_string(n.condition) << " {\n";
    out << "  rankdir=LR;\n";
    out << "  // total_weight=" << n.total_weight() << " threshold=" << significance_threshold
        << "\n";
    for (Phase p : n.right_nodes)
        out << "  \"" << to_string(p) << "\" [shape=ellipse, style=filled, fillcolor=\"#f2d7a7\"];\n";
    // only behaviours that survive (or all of them with keep_all)
    for (const auto& b : n.left_nodes) {
        bool shown = false;
        for (const auto& e : edges)
            if (e.behaviour == b && (e.significant || keep_all)) shown = true;
        if (shown)
            out << "  \"" << b << "\" [shape=box, style=filled, fillcolor=\"#cfe2f3\"];\n";
    }
    for (const auto& e : edges) {
        if (!e.significant && !keep_all) continue;
        out << "  \"" << e.behaviour << "\" -- \"" << to_string(e.phase) << "\" [label=\""
            << e.weight << "\"";
        if (!e.significant) out << ", style=dashed";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

nlohmann::json pruned_network_json(const BipartiteNetwork& n,
                                   const std::vector<PrunedEdge>& edges, double alpha,
                                   int64_t significance_threshold) {
    nlohmann::json j;
    j["condition"] = to_string(n.condition);
    j["alpha"] = alpha;
    j["total_weight"] = n.total_weight();
    j["significance_threshold"] = significance_threshold;
    j["behaviours"] = n.left_nodes;
    std::vector<std::string> phases;
    for (Phase p : n.right_nodes) phases.push_back(to_string(p));
    j["phases"] = phases;
    nlohmann::json edge_array = nlohmann::json::array();
    for (const auto& e : edges)
        edge_array.push_back(nlohmann::json{{"behaviour", e.behaviour},
                                            {"phase", to_string(e.phase)},
                                            {"weight", e.weight},
                                            {"p_value", e.p_value},
                                            {"significant", e.significant}});
    j["edges"] = std::move(edge_array);
    return j;
}

nlohmann::json pattern_report_json(const PatternReport& report) {
    nlohmann::json j;
    j["phase"] = to_string(report.phase);
    j["condition"] = to_string(report.condition);
    j["n_p"] = report.n_students;
    if (report.min_support) j["min_support"] = *report.min_support;
    else j["min_support"] = nullptr;
    nlohmann::json patterns = nlohmann::json::array();
    for (const auto& p : report.patterns)
        patterns.push_back(nlohmann::json{{"items", p.items},
                                          {"support_count", p.support_count},
                                          {"student_pct", p.student_pct},
                                          {"occurrence_count", p.occurrence_count},
                                          {"occurrence_pct", p.occurrence_pct}});
    j["patterns"] = std::move(patterns);
    return j;
}

std::string flow_dot(const PatternReport& report) {
    std::ostringstream out;
    out << "digraph flow_" << to_string(report.phase) << '_' << to_string(report.condition)
        << " {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n";

    // nodes keyed by (step, code), grouped into rank columns
    size_t max_len = 0;
    for (const auto& p : report.patterns) max_len = std::max(max_len, p.items.size());
    for (size_t step = 0; step < max_len; ++step) {
        std::vector<std::string> column;
        for (const auto& p : report.patterns) {
            if (step >= p.items.size()) continue;
            std::string id = "s" + std::to_string(step) + "_" + p.items[step];
            bool dup = false;
            for (const auto& c : column) dup = dup || c == id;
            if (!dup) column.push_back(id);
        }
        if (column.empty()) continue;
        out << "  { rank=same;";
        for (const auto& id : column) {
            auto code = id.substr(id.find('_') + 1);
            out << " \"" << id << "\" [label=\"" << code << "\"];";
        }
        out << " }\n";
    }
    for (const auto& p : report.patterns) {
        for (size_t step = 0; step + 1 < p.items.size(); ++step) {
            out << "  \"s" << step << '_' << p.items[step] << "\" -> \"s" << step + 1 << '_'
                << p.items[step + 1] << "\" [label=\"" << pct(p.student_pct) << "/"
                << pct(p.occurrence_pct) << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string boxplot_csv(const std::vector<BoxplotRow>& rows) {
    std::ostringstream out;
    out << "condition,metric,q1,median,q3,iqr,lower_fence,upper_fence,outliers\n";
    for (const auto& r : rows) {
        out << to_string(r.condition) << ',' << r.metric << ',' << format_double(r.summary.q1)
            << ',' << format_double(r.summary.median) << ',' << format_double(r.summary.q3) << ','
            << format_double(r.summary.iqr) << ',' << format_double(r.summary.lower_fence) << ','
            << format_double(r.summary.upper_fence) << ','
            << csv_escape(join(r.summary.outlier_ids, ";")) << '\n';
    }
    return out.str();
}

}  // namespace cpsmine
