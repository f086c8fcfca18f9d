#include "cpsmine/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "cpsmine/emit.hpp"
#include "cpsmine/error.hpp"
#include "cpsmine/hina.hpp"
#include "cpsmine/ingest.hpp"
#include "cpsmine/spm.hpp"
#include "cpsmine/stats.hpp"

namespace cpsmine {

namespace {

void parallel_for(size_t count, int threads, const std::function<void(size_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        try {
            for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    size_t n_workers = std::min<size_t>(static_cast<size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

const std::array<Condition, 2> kConditions{Condition::Maximal, Condition::Minimal};

}  // namespace

ArtifactMap run_analyze(const SessionDataset& dataset, const AnalyzeOptions& options) {
    ArtifactMap files;
    const bool emit_json = options.emit.count("json") > 0;
    const bool emit_csv = options.emit.count("csv") > 0;
    const bool emit_dot = options.emit.count("dot") > 0;

    // engagement: one normalisation constant across both conditions keeps
    // cross-condition ranks equal to the raw counts
    std::map<Condition, BipartiteNetwork> student_networks;
    for (Condition c : kConditions) student_networks.emplace(c, build_student_phase_network(dataset, c));

    int64_t global_max = 0;
    for (const auto& [c, net] : student_networks)
        for (const auto& s : net.left_nodes) {
            int64_t q = 0;
            for (Phase p : net.right_nodes) q += net.weight(s, p);
            global_max = std::max(global_max, q);
        }

    std::map<Condition, std::vector<EngagementProfile>> profiles;
    for (const auto& [c, net] : student_networks)
        profiles[c] = engagement_profiles(net, global_max);

    {
        std::vector<std::pair<Condition, EngagementProfile>> rows;
        for (Condition c : kConditions)
            for (const auto& p : profiles[c]) rows.push_back({c, p});
        if (emit_csv) files["engagement.csv"] = engagement_csv(rows);
    }

    // rank tests and boxplot data, maximal condition as sample A
    {
        std::vector<double> quantity_a, quantity_b, diversity_a, diversity_b;
        for (const auto& p : profiles[Condition::Maximal]) {
            quantity_a.push_back(p.normalized_quantity);
            diversity_a.push_back(p.diversity);
        }
        for (const auto& p : profiles[Condition::Minimal]) {
            quantity_b.push_back(p.normalized_quantity);
            diversity_b.push_back(p.diversity);
        }
        auto quantity_test = mann_whitney(quantity_a, quantity_b);
        auto diversity_test = mann_whitney(diversity_a, diversity_b);
        if (emit_json) {
            nlohmann::json mwu = nlohmann::json::array();
            mwu.push_back(test_result_json("quantity", quantity_test));
            mwu.push_back(test_result_json("diversity", diversity_test));
            files["mwu.json"] = mwu.dump(2) + "\n";
        }

        if (emit_csv) {
            std::vector<BoxplotRow> rows;
            for (Condition c : kConditions) {
                std::vector<std::pair<std::string, double>> q_vals, d_vals;
                for (const auto& p : profiles[c]) {
                    q_vals.push_back({p.student_id, p.normalized_quantity});
                    d_vals.push_back({p.student_id, p.diversity});
                }
                rows.push_back({c, "normalized_quantity", boxplot_summary(q_vals)});
                rows.push_back({c, "diversity", boxplot_summary(d_vals)});
            }
            files["boxplot.csv"] = boxplot_csv(rows);
        }
    }

    // pruned behaviour-phase networks
    for (Condition c : kConditions) {
        auto network = build_behaviour_phase_network(dataset, c);
        auto edges = prune_edges(network, options.alpha);
        int64_t threshold =
            binomial_upper_quantile(network.total_weight(),
                                    1.0 / (static_cast<double>(network.left_nodes.size()) *
                                           static_cast<double>(network.right_nodes.size())),
                                    1.0 - options.alpha);
        std::string base = std::string("network_") + to_string(c);
        if (emit_dot)
            files[base + ".dot"] =
                pruned_network_dot(network, edges, threshold, options.keep_all_edges);
        if (emit_json)
            files[base + ".json"] =
                pruned_network_json(network, edges, options.alpha, threshold).dump(2) + "\n";
    }

    // pattern reports per (phase, condition); cells mine independently so
    // the loop can fan out over worker threads
    struct Cell {
        Phase phase;
        Condition condition;
        PatternReport report;
    };
    std::vector<Cell> cells;
    for (Condition c : kConditions)
        for (int ph = 0; ph < kPhaseCount; ++ph)
            cells.push_back({static_cast<Phase>(ph), c, {}});

    parallel_for(cells.size(), options.threads, [&](size_t i) {
        auto& cell = cells[i];
        auto db = build_sequences(dataset, cell.phase, cell.condition);
        if (db.sequences.empty()) {
            cell.report.phase = cell.phase;
            cell.report.condition = cell.condition;
            cell.report.n_students = 0;
            cell.report.min_support.reset();
            return;
        }
        double min_support;
        if (options.min_support) {
            min_support = *options.min_support;
        } else {
            try {
                min_support = auto_tune_min_support(db);
            } catch (const CpsError&) {
                min_support = kDefaultMinSupport;  // no length-3 pattern anywhere
            }
        }
        cell.report = pattern_report(db, min_support);
    });

    for (const auto& cell : cells) {
        std::string suffix = std::string(to_string(cell.phase)) + "_" + to_string(cell.condition);
        if (emit_json)
            files["patterns_" + suffix + ".json"] = pattern_report_json(cell.report).dump(2) + "\n";
        if (emit_dot) files["flow_" + suffix + ".dot"] = flow_dot(cell.report);
    }

    return files;
}

}  // namespace cpsmine
