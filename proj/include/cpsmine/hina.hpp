#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cpsmine/framework.hpp"

namespace cpsmine {

// Weighted two-mode graph: (students | behaviours) x phases. Right side is
// always the full phase set so the null model spans all four cells per left
// node even when late phases saw no activity.
struct BipartiteNetwork {
    enum class LeftKind { Student, Behaviour };

    LeftKind left_kind = LeftKind::Student;
    Condition condition = Condition::Minimal;
    std::vector<std::string> left_nodes;                    // sorted canonically
    std::vector<Phase> right_nodes;                         // A1..A4 from builders
    std::map<std::pair<std::string, int>, int64_t> edges;   // (left, phase idx) -> weight >= 1

    int64_t total_weight() const;
    int64_t weight(const std::string& left, Phase p) const;
};

struct EngagementProfile {
    std::string student_id;
    int64_t quantity = 0;             // Q_i: total edge weight across phases
    double normalized_quantity = 0;   // Q_i / max Q over both compared conditions
    double diversity = 0;             // normalized entropy of the phase distribution, in [0,1]
};

struct PrunedEdge {
    std::string behaviour;
    Phase phase = Phase::A1;
    int64_t weight = 0;
    double p_value = 1.0;   // P(X >= weight) under the binomial null
    bool significant = false;
};

// Edge weight w(s,p) = number of the student's utterances in phase p.
// Throws CpsError("EmptyCondition") when the condition has no utterances.
BipartiteNetwork build_student_phase_network(const SessionDataset& d, Condition c);

// Edge weight w(b,p) = number of condition-c utterances coded b in phase p.
BipartiteNetwork build_behaviour_phase_network(const SessionDataset& d, Condition c);

std::vector<EngagementProfile> engagement_profiles(const BipartiteNetwork& n,
                                                   int64_t global_max_quantity);

// Null model: all W events land uniformly over the K = |left| x |right| cells,
// so each observed weight is compared with X ~ Binomial(W, 1/K). An edge is
// significant when its weight strictly exceeds the null's 1-alpha quantile.
std::vector<PrunedEdge> prune_edges(const BipartiteNetwork& n, double alpha = 0.05);

// Smallest q with P(X <= q) >= conf for X ~ Binomial(n, p).
int64_t binomial_upper_quantile(int64_t n, double p, double conf);

// Upper tail P(X >= w), summed from a mass table so it is non-increasing in w.
double binomial_sf(int64_t n, double p, int64_t w);

// Sorts behaviours by framework table position, then unknown codes
// lexicographically after; used for canonical edge ordering.
bool behaviour_less(const std::string& a, const std::string& b);

}  // namespace cpsmine
