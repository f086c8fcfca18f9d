#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cpsmine/hina.hpp"
#include "cpsmine/spm.hpp"
#include "cpsmine/stats.hpp"

namespace cpsmine {

// student_id,condition,quantity,normalized_quantity,diversity
std::string engagement_csv(
    const std::vector<std::pair<Condition, EngagementProfile>>& profiles);

nlohmann::json test_result_json(const std::string& metric, const TestResult& r);

// Undirected two-mode graph; by default only significant edges appear,
// keep_all adds the rest dashed.
std::string pruned_network_dot(const BipartiteNetwork& n, const std::vector<PrunedEdge>& edges,
                               int64_t significance_threshold, bool keep_all);

nlohmann::json pruned_network_json(const BipartiteNetwork& n,
                                   const std::vector<PrunedEdge>& edges, double alpha,
                                   int64_t significance_threshold);

nlohmann::json pattern_report_json(const PatternReport& report);

// One node per (step position, code); one labelled edge per adjacent pattern
// step, label = student_pct/occurrence_pct.
std::string flow_dot(const PatternReport& report);

struct BoxplotRow {
    Condition condition;
    std::string metric;
    BoxplotSummary summary;
};

std::string boxplot_csv(const std::vector<BoxplotRow>& rows);

// shortest round-trip decimal text for a double (locale independent)
std::string format_double(double v);

}  // namespace cpsmine
