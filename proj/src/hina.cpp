#include "cpsmine/hina.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cpsmine/error.hpp"

namespace cpsmine {

int64_t BipartiteNetwork::total_weight() const {
    int64_t w = 0;
    for (const auto& [key, v] : edges) w += v;
    return w;
}

int64_t BipartiteNetwork::weight(const std::string& left, Phase p) const {
    auto it = edges.find({left, static_cast<int>(p)});
    return it == edges.end() ? 0 : it->second;
}

bool behaviour_less(const std::string& a, const std::string& b) {
    int ia = code_index(a), ib = code_index(b);
    if (ia >= 0 && ib >= 0) return ia < ib;
    if ((ia >= 0) != (ib >= 0)) return ia >= 0;
    return a < b;
}

namespace {

const std::vector<Phase> kAllPhases{Phase::A1, Phase::A2, Phase::A3, Phase::A4};

BipartiteNetwork build_network(const SessionDataset& d, Condition c,
                               BipartiteNetwork::LeftKind kind) {
    BipartiteNetwork n;
    n.left_kind = kind;
    n.condition = c;
    n.right_nodes = kAllPhases;

    for (const auto& u : d.utterances) {
        if (u.condition != c || !u.phase) continue;
        const std::string& left =
            kind == BipartiteNetwork::LeftKind::Student ? u.student_id : u.indicator;
        n.edges[{left, static_cast<int>(*u.phase)}] += 1;
    }
    if (n.edges.empty())
        throw CpsError("EmptyCondition",
                       std::string("no utterances for condition ") + to_string(c));

    std::set<std::string> lefts;
    for (const auto& [key, w] : n.edges) lefts.insert(key.first);
    n.left_nodes.assign(lefts.begin(), lefts.end());
    if (kind == BipartiteNetwork::LeftKind::Behaviour)
        std::sort(n.left_nodes.begin(), n.left_nodes.end(), behaviour_less);
    return n;
}

}  // namespace

BipartiteNetwork build_student_phase_network(const SessionDataset& d, Condition c) {
    return build_network(d, c, BipartiteNetwork::LeftKind::Student);
}

BipartiteNetwork build_behaviour_phase_network(const SessionDataset& d, Condition c) {
    return build_network(d, c, BipartiteNetwork::LeftKind::Behaviour);
}

std::vector<EngagementProfile> engagement_profiles(const BipartiteNetwork& n,
                                                   int64_t global_max_quantity) {
    if (n.left_kind != BipartiteNetwork::LeftKind::Student)
        throw std::logic_error("engagement_profiles needs a student-phase network");
    if (global_max_quantity <= 0) throw CpsError("ZeroGlobalMax", "global max quantity must be positive");

    std::vector<EngagementProfile> out;
    out.reserve(n.left_nodes.size());
    const double log_phases = std::log(static_cast<double>(kPhaseCount));
    for (const auto& s : n.left_nodes) {
        EngagementProfile p;
        p.student_id = s;
        for (Phase ph : n.right_nodes) p.quantity += n.weight(s, ph);
        p.normalized_quantity =
            static_cast<double>(p.quantity) / static_cast<double>(global_max_quantity);
        double entropy = 0;  // 0*log(0) := 0
        for (Phase ph : n.right_nodes) {
            int64_t w = n.weight(s, ph);
            if (w == 0) continue;
            double pi = static_cast<double>(w) / static_cast<double>(p.quantity);
            entropy -= pi * std::log(pi);
        }
        p.diversity = entropy / log_phases;
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

// Binomial(n, p) probability masses in one pass; the running recurrence in
// log space survives tails that underflow linear doubles.
std::vector<double> binomial_pmf_table(int64_t n, double p) {
    std::vector<double> pmf(static_cast<size_t>(n) + 1);
    if (p <= 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (p >= 1.0) {
        pmf[static_cast<size_t>(n)] = 1.0;
        return pmf;
    }
    const double log_odds = std::log(p) - std::log1p(-p);
    double log_mass = static_cast<double>(n) * std::log1p(-p);  // k = 0
    for (int64_t k = 0; k <= n; ++k) {
        pmf[static_cast<size_t>(k)] = std::exp(log_mass);
        if (k < n)
            log_mass += std::log(static_cast<double>(n - k)) -
                        std::log(static_cast<double>(k + 1)) + log_odds;
    }
    return pmf;
}

}  // namespace

int64_t binomial_upper_quantile(int64_t n, double p, double conf) {
    auto pmf = binomial_pmf_table(n, p);
    double cum = 0;
    for (int64_t q = 0; q <= n; ++q) {
        cum += pmf[static_cast<size_t>(q)];
        if (cum >= conf) return q;
    }
    return n;  // float round-off: the full sum is 1 up to epsilon
}

double binomial_sf(int64_t n, double p, int64_t w) {
    if (w <= 0) return 1.0;
    if (w > n) return 0.0;
    auto pmf = binomial_pmf_table(n, p);
    double tail = 0;
    for (int64_t k = n; k >= w; --k) tail += pmf[static_cast<size_t>(k)];
    return std::min(tail, 1.0);
}

std::vector<PrunedEdge> prune_edges(const BipartiteNetwork& n, double alpha) {
    if (n.left_kind != BipartiteNetwork::LeftKind::Behaviour)
        throw std::logic_error("prune_edges needs a behaviour-phase network");
    const int64_t cells = static_cast<int64_t>(n.left_nodes.size()) *
                          static_cast<int64_t>(n.right_nodes.size());
    if (cells == 0) throw CpsError("DegenerateNetwork", "network has no cells");

    const int64_t total = n.total_weight();
    const double cell_p = 1.0 / static_cast<double>(cells);
    const int64_t q = binomial_upper_quantile(total, cell_p, 1.0 - alpha);

    // tails[w] = P(X >= w), accumulated high-to-low so it is monotone
    // non-increasing by construction
    auto pmf = binomial_pmf_table(total, cell_p);
    std::vector<double> tails(static_cast<size_t>(total) + 2, 0.0);
    for (int64_t k = total; k >= 0; --k)
        tails[static_cast<size_t>(k)] =
            tails[static_cast<size_t>(k) + 1] + pmf[static_cast<size_t>(k)];

    std::vector<PrunedEdge> out;
    out.reserve(n.edges.size());
    for (const auto& [key, w] : n.edges) {
        PrunedEdge e;
        e.behaviour = key.first;
        e.phase = static_cast<Phase>(key.second);
        e.weight = w;
        e.p_value = std::min(tails[static_cast<size_t>(w)], 1.0);
        e.significant = w > q;
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const PrunedEdge& a, const PrunedEdge& b) {
        if (a.phase != b.phase) return a.phase < b.phase;
        return behaviour_less(a.behaviour, b.behaviour);
    });
    return out;
}

}  // namespace cpsmine
