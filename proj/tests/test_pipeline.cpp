#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "cpsmine/error.hpp"
#include "cpsmine/hina.hpp"
#include "cpsmine/ingest.hpp"
#include "cpsmine/oracle.hpp"
#include "cpsmine/pipeline.hpp"
#include "cpsmine/stats.hpp"
#include "cpsmine/synth.hpp"

using namespace cpsmine;
using nlohmann::json;

namespace {

SessionDataset fixture_dataset(uint64_t seed = 42, int students = 12) {
    auto files = generate_dataset(default_synth_spec(seed, students));
    std::istringstream u(files.utterances_csv), p(files.phase_log_csv), r(files.roster_csv);
    return align_phases(parse_event_log(u, p, r));
}

}  // namespace

TEST_CASE("analyze emits the full artifact inventory") {
    auto artifacts = run_analyze(fixture_dataset(), AnalyzeOptions{});
    // 2 network DOTs + JSONs, 8 pattern reports + 8 flow DOTs, stats JSON,
    // engagement CSV, boxplot CSV
    CHECK(artifacts.size() == 23);
    CHECK(artifacts.count("engagement.csv") == 1);
    CHECK(artifacts.count("boxplot.csv") == 1);
    CHECK(artifacts.count("mwu.json") == 1);
    for (const char* cond : {"maximal", "minimal"}) {
        CHECK(artifacts.count(std::string("network_") + cond + ".dot") == 1);
        CHECK(artifacts.count(std::string("network_") + cond + ".json") == 1);
        for (const char* phase : {"A1", "A2", "A3", "A4"}) {
            CHECK(artifacts.count(std::string("patterns_") + phase + "_" + cond + ".json") == 1);
            CHECK(artifacts.count(std::string("flow_") + phase + "_" + cond + ".dot") == 1);
        }
    }
}

TEST_CASE("emit filter prunes formats") {
    AnalyzeOptions options;
    options.emit = {"json"};
    auto artifacts = run_analyze(fixture_dataset(), options);
    for (const auto& [name, body] : artifacts) {
        CHECK(name.find(".csv") == std::string::npos);
        CHECK(name.find(".dot") == std::string::npos);
    }
    CHECK(artifacts.count("mwu.json") == 1);
}

TEST_CASE("analyze is deterministic and thread-count independent") {
    auto d = fixture_dataset(1234, 15);
    AnalyzeOptions one;
    one.threads = 1;
    AnalyzeOptions four;
    four.threads = 4;
    auto a = run_analyze(d, one);
    auto b = run_analyze(d, one);
    auto c = run_analyze(d, four);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("pattern reports respect min_support and percentages sum to 100") {
    auto artifacts = run_analyze(fixture_dataset(77, 18), AnalyzeOptions{});
    int non_empty = 0;
    for (const auto& [name, body] : artifacts) {
        if (name.rfind("patterns_", 0) != 0) continue;
        auto j = json::parse(body);
        if (j["patterns"].empty()) continue;
        ++non_empty;
        REQUIRE(!j["min_support"].is_null());
        double ms = j["min_support"].get<double>();
        double n_p = j["n_p"].get<double>();
        double pct_sum = 0;
        for (const auto& p : j["patterns"]) {
            double support_fraction = p["support_count"].get<double>() / n_p;
            CHECK(support_fraction >= ms - 1e-12);
            CHECK(p["occurrence_count"].get<int64_t>() >= p["support_count"].get<int64_t>());
            pct_sum += p["occurrence_pct"].get<double>();
        }
        CHECK(pct_sum == doctest::Approx(100.0).epsilon(1e-4));
    }
    CHECK(non_empty > 0);
}

TEST_CASE("pruned networks: retained edges strictly exceed the threshold") {
    auto artifacts = run_analyze(fixture_dataset(99, 21), AnalyzeOptions{});
    for (const char* cond : {"maximal", "minimal"}) {
        auto j = json::parse(artifacts.at(std::string("network_") + cond + ".json"));
        int64_t threshold = j["significance_threshold"].get<int64_t>();
        int64_t w_total = j["total_weight"].get<int64_t>();
        int64_t cells = j["behaviours"].size() * j["phases"].size();
        CHECK(threshold ==
              oracle::binomial_quantile_direct(w_total, 1.0 / static_cast<double>(cells), 0.95));
        for (const auto& e : j["edges"]) {
            CHECK(e["significant"].get<bool>() == (e["weight"].get<int64_t>() > threshold));
        }
    }
}

TEST_CASE("fixed min_support propagates to every report") {
    AnalyzeOptions options;
    options.min_support = 0.4;
    auto artifacts = run_analyze(fixture_dataset(7, 12), options);
    for (const auto& [name, body] : artifacts) {
        if (name.rfind("patterns_", 0) != 0) continue;
        auto j = json::parse(body);
        if (!j["min_support"].is_null()) CHECK(j["min_support"].get<double>() == 0.4);
    }
}

TEST_CASE("rank test on normalized quantities equals the raw-count test") {
    for (uint64_t seed : {3ull, 4ull, 5ull}) {
        auto d = fixture_dataset(seed, 12);
        std::map<Condition, std::vector<double>> raw, normalized;
        auto max_net = build_student_phase_network(d, Condition::Maximal);
        auto min_net = build_student_phase_network(d, Condition::Minimal);
        int64_t global_max = 0;
        for (const auto* net : {&max_net, &min_net})
            for (const auto& s : net->left_nodes) {
                int64_t q = 0;
                for (Phase p : net->right_nodes) q += net->weight(s, p);
                global_max = std::max(global_max, q);
            }
        for (const auto* net : {&max_net, &min_net}) {
            auto profiles = engagement_profiles(*net, global_max);
            for (const auto& p : profiles) {
                raw[net->condition].push_back(static_cast<double>(p.quantity));
                normalized[net->condition].push_back(p.normalized_quantity);
            }
        }
        auto on_raw = mann_whitney(raw[Condition::Maximal], raw[Condition::Minimal]);
        auto on_norm =
            mann_whitney(normalized[Condition::Maximal], normalized[Condition::Minimal]);
        CHECK(on_raw.u_a == on_norm.u_a);
        CHECK(on_raw.p_value == on_norm.p_value);
    }
}

TEST_CASE("normalized quantity lands in (0,1] and someone attains exactly 1") {
    for (uint64_t seed : {6ull, 60ull}) {
        auto artifacts = run_analyze(fixture_dataset(seed, 15), AnalyzeOptions{});
        std::istringstream in(artifacts.at("engagement.csv"));
        std::string line;
        std::getline(in, line);  // header
        bool saw_one = false;
        while (std::getline(in, line)) {
            size_t p1 = line.find(',', line.find(',', line.find(',') + 1) + 1);
            size_t p2 = line.find(',', p1 + 1);
            double normalized = std::stod(line.substr(p1 + 1, p2 - p1 - 1));
            CHECK(normalized > 0.0);
            CHECK(normalized <= 1.0);
            if (normalized == 1.0) saw_one = true;
        }
        CHECK(saw_one);
    }
}

TEST_CASE("input with only one condition fails with EmptyCondition") {
    SessionDataset d;
    d.roster["s1"] = {"t1", Condition::Minimal};
    d.phase_log.push_back({"s1", Phase::A1, 0, 1});
    CodedUtterance u;
    u.student_id = "s1";
    u.triad_id = "t1";
    u.condition = Condition::Minimal;
    u.phase = Phase::A1;
    u.indicator = "OT2";
    u.timestamp_ms = 100;
    d.utterances.push_back(u);
    CHECK_THROWS_WITH_AS(run_analyze(d, AnalyzeOptions{}), doctest::Contains("EmptyCondition"),
                         CpsError);
}

TEST_CASE("flow DOT carries one labelled edge per pattern step") {
    auto artifacts = run_analyze(fixture_dataset(55, 15), AnalyzeOptions{});
    for (const auto& [name, body] : artifacts) {
        if (name.rfind("flow_", 0) != 0) continue;
        std::string pattern_file = "patterns_" + name.substr(5, name.size() - 9) + ".json";
        auto j = json::parse(artifacts.at(pattern_file));
        size_t expected_edges = 0;
        for (const auto& p : j["patterns"]) expected_edges += p["items"].size() - 1;
        size_t arrows = 0;
        for (size_t pos = body.find("->"); pos != std::string::npos; pos = body.find("->", pos + 2))
            ++arrows;
        CHECK(arrows == expected_edges);
    }
}
