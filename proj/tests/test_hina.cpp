#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cpsmine/error.hpp"
#include "cpsmine/hina.hpp"
#include "cpsmine/oracle.hpp"

using namespace cpsmine;

namespace {

SessionDataset tiny_dataset() {
    SessionDataset d;
    d.roster["s1"] = {"t1", Condition::Minimal};
    d.roster["s2"] = {"t1", Condition::Minimal};
    d.roster["s3"] = {"t2", Condition::Maximal};
    auto add = [&](const char* student, Condition cond, Phase phase, const char* code,
                   int64_t ts) {
        CodedUtterance u;
        u.student_id = student;
        u.triad_id = d.roster[student].triad_id;
        u.condition = cond;
        u.phase = phase;
        u.indicator = code;
        u.timestamp_ms = ts;
        d.utterances.push_back(u);
    };
    add("s1", Condition::Minimal, Phase::A1, "PS04", 1000);
    add("s1", Condition::Minimal, Phase::A1, "PS04", 2000);
    add("s1", Condition::Minimal, Phase::A2, "S1", 3000);
    add("s2", Condition::Minimal, Phase::A1, "OT2", 1500);
    add("s3", Condition::Maximal, Phase::A3, "S4", 9000);
    return d;
}

BipartiteNetwork behaviour_network(std::vector<std::tuple<std::string, Phase, int64_t>> edges) {
    BipartiteNetwork n;
    n.left_kind = BipartiteNetwork::LeftKind::Behaviour;
    n.condition = Condition::Minimal;
    std::vector<Phase> phases;
    for (auto& [b, p, w] : edges) {
        n.edges[{b, static_cast<int>(p)}] = w;
        if (std::find(n.left_nodes.begin(), n.left_nodes.end(), b) == n.left_nodes.end())
            n.left_nodes.push_back(b);
        if (std::find(phases.begin(), phases.end(), p) == phases.end()) phases.push_back(p);
    }
    std::sort(phases.begin(), phases.end());
    n.right_nodes = phases;
    return n;
}

}  // namespace

TEST_CASE("student-phase network counts per-phase utterances") {
    auto net = build_student_phase_network(tiny_dataset(), Condition::Minimal);
    CHECK(net.left_nodes == std::vector<std::string>{"s1", "s2"});
    CHECK(net.weight("s1", Phase::A1) == 2);
    CHECK(net.weight("s1", Phase::A2) == 1);
    CHECK(net.weight("s2", Phase::A1) == 1);
    CHECK(net.weight("s2", Phase::A2) == 0);
    CHECK(net.total_weight() == 4);
    CHECK(net.right_nodes.size() == 4);  // all phases kept for the null model
}

TEST_CASE("behaviour-phase network counts per-code co-occurrences") {
    auto net = build_behaviour_phase_network(tiny_dataset(), Condition::Minimal);
    CHECK(net.weight("PS04", Phase::A1) == 2);
    CHECK(net.weight("OT2", Phase::A1) == 1);
    CHECK(net.weight("S1", Phase::A2) == 1);
    CHECK(net.total_weight() == 4);
    // canonical behaviour order follows the framework table
    CHECK(net.left_nodes == std::vector<std::string>{"PS04", "S1", "OT2"});
}

TEST_CASE("empty condition is an error") {
    SessionDataset d = tiny_dataset();
    d.utterances.erase(std::remove_if(d.utterances.begin(), d.utterances.end(),
                                      [](const CodedUtterance& u) {
                                          return u.condition == Condition::Maximal;
                                      }),
                       d.utterances.end());
    CHECK_THROWS_WITH_AS(build_student_phase_network(d, Condition::Maximal),
                         doctest::Contains("EmptyCondition"), CpsError);
}

TEST_CASE("network construction is order independent") {
    auto d = tiny_dataset();
    auto before = build_behaviour_phase_network(d, Condition::Minimal);
    std::mt19937_64 rng(31);
    std::shuffle(d.utterances.begin(), d.utterances.end(), rng);
    auto after = build_behaviour_phase_network(d, Condition::Minimal);
    CHECK(before.edges == after.edges);
    CHECK(before.left_nodes == after.left_nodes);
}

TEST_CASE("engagement: quantity, normalisation and entropy closed forms") {
    BipartiteNetwork n;
    n.left_kind = BipartiteNetwork::LeftKind::Student;
    n.right_nodes = {Phase::A1, Phase::A2, Phase::A3, Phase::A4};
    n.left_nodes = {"even", "single", "skewed"};
    auto set_weights = [&](const std::string& s, std::array<int64_t, 4> w) {
        for (int p = 0; p < 4; ++p)
            if (w[static_cast<size_t>(p)] > 0) n.edges[{s, p}] = w[static_cast<size_t>(p)];
    };
    set_weights("even", {5, 5, 5, 5});
    set_weights("single", {7, 0, 0, 0});
    set_weights("skewed", {2, 1, 1, 0});

    auto profiles = engagement_profiles(n, 20);
    REQUIRE(profiles.size() == 3);
    const auto& even = profiles[0];
    const auto& single = profiles[1];
    const auto& skewed = profiles[2];

    CHECK(even.quantity == 20);
    CHECK(even.normalized_quantity == 1.0);
    CHECK(even.diversity == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(single.quantity == 7);
    CHECK(single.diversity == 0.0);

    CHECK(skewed.quantity == 4);
    // H = 1.5 ln 2, normaliser 2 ln 2
    CHECK(skewed.diversity == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("engagement: zero global max rejected") {
    BipartiteNetwork n;
    n.left_kind = BipartiteNetwork::LeftKind::Student;
    n.right_nodes = {Phase::A1, Phase::A2, Phase::A3, Phase::A4};
    CHECK_THROWS_WITH_AS(engagement_profiles(n, 0), doctest::Contains("ZeroGlobalMax"), CpsError);
}

TEST_CASE("diversity is permutation and scale invariant") {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 50; ++t) {
        std::array<int64_t, 4> w{};
        for (auto& v : w) v = static_cast<int64_t>(rng() % 9);
        if (w[0] + w[1] + w[2] + w[3] == 0) w[0] = 1;
        int64_t scale = 1 + static_cast<int64_t>(rng() % 7);

        auto profile_for = [&](std::array<int64_t, 4> weights) {
            BipartiteNetwork n;
            n.left_kind = BipartiteNetwork::LeftKind::Student;
            n.right_nodes = {Phase::A1, Phase::A2, Phase::A3, Phase::A4};
            n.left_nodes = {"s"};
            for (int p = 0; p < 4; ++p)
                if (weights[static_cast<size_t>(p)] > 0) n.edges[{"s", p}] = weights[static_cast<size_t>(p)];
            return engagement_profiles(n, 1000)[0];
        };

        auto base = profile_for(w);
        std::array<int64_t, 4> permuted = w;
        std::shuffle(permuted.begin(), permuted.end(), rng);
        CHECK(profile_for(permuted).diversity == doctest::Approx(base.diversity).epsilon(1e-12));
        std::array<int64_t, 4> scaled = w;
        for (auto& v : scaled) v *= scale;
        CHECK(profile_for(scaled).diversity == doctest::Approx(base.diversity).epsilon(1e-12));
    }
}

TEST_CASE("sum of quantities equals total weight") {
    auto net = build_student_phase_network(tiny_dataset(), Condition::Minimal);
    auto profiles = engagement_profiles(net, 100);
    int64_t sum = 0;
    for (const auto& p : profiles) sum += p.quantity;
    CHECK(sum == net.total_weight());
}

TEST_CASE("pruning threshold: W=20 cells=4 keeps weight 9, drops weight 8") {
    // Binomial(20, 1/4): 95th percentile is 8 (frozen from direct CDF
    // summation: P(X<=8) = 0.959, P(X<=7) = 0.898)
    CHECK(binomial_upper_quantile(20, 0.25, 0.95) == 8);
    CHECK(oracle::binomial_quantile_direct(20, 0.25, 0.95) == 8);

    auto n = behaviour_network({{"PS04", Phase::A1, 9}, {"S4", Phase::A1, 8},
                                {"PS04", Phase::A2, 2}, {"S4", Phase::A2, 1}});
    REQUIRE(n.total_weight() == 20);
    REQUIRE(n.left_nodes.size() * n.right_nodes.size() == 4);
    auto edges = prune_edges(n, 0.05);
    REQUIRE(edges.size() == 4);
    for (const auto& e : edges) {
        if (e.weight == 9) CHECK(e.significant);
        if (e.weight == 8) CHECK(!e.significant);
        CHECK(e.p_value == doctest::Approx(oracle::binomial_sf_direct(20, 0.25, e.weight))
                               .epsilon(1e-9));
    }
}

TEST_CASE("single-cell network: the only edge has p = 1 and never prunes in") {
    auto n = behaviour_network({{"OT2", Phase::A1, 17}});
    auto edges = prune_edges(n, 0.05);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].p_value == 1.0);
    CHECK(!edges[0].significant);
}

TEST_CASE("pruning output is canonically ordered by (phase, behaviour)") {
    auto n = behaviour_network({{"S4", Phase::A2, 3}, {"PS04", Phase::A2, 4},
                                {"OT2", Phase::A1, 5}, {"PS20", Phase::A1, 2}});
    auto edges = prune_edges(n, 0.05);
    REQUIRE(edges.size() == 4);
    CHECK(edges[0].behaviour == "PS20");  // A1 first, table order inside
    CHECK(edges[1].behaviour == "OT2");
    CHECK(edges[2].behaviour == "PS04");
    CHECK(edges[3].behaviour == "S4");
}

TEST_CASE("p-values shrink as weight grows; alpha nesting holds") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 25; ++t) {
        int64_t w_total = 50 + static_cast<int64_t>(rng() % 2000);
        int64_t cells = 2 + static_cast<int64_t>(rng() % 60);
        double p = 1.0 / static_cast<double>(cells);
        double prev = 2.0;
        for (int64_t w = 1; w <= std::min<int64_t>(w_total, 60); ++w) {
            double sf = binomial_sf(w_total, p, w);
            CHECK(sf <= prev);
            prev = sf;
        }
        int64_t q05 = binomial_upper_quantile(w_total, p, 0.95);
        int64_t q01 = binomial_upper_quantile(w_total, p, 0.99);
        CHECK(q01 >= q05);  // significant at 0.01 implies significant at 0.05
    }
}

TEST_CASE("degenerate network rejected") {
    BipartiteNetwork n;
    n.left_kind = BipartiteNetwork::LeftKind::Behaviour;
    CHECK_THROWS_WITH_AS(prune_edges(n, 0.05), doctest::Contains("DegenerateNetwork"), CpsError);
}
