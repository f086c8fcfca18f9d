#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "cpsmine/framework.hpp"

namespace cpsmine {

struct AnalyzeOptions {
    double alpha = 0.05;
    std::optional<double> min_support;  // empty = auto-tune per phase/condition
    int threads = 1;
    bool keep_all_edges = false;  // include insignificant edges (dashed) in DOT
    std::set<std::string> emit{"json", "csv", "dot"};
};

// filename -> file body; computed fully in memory so a failing run writes
// nothing to disk
using ArtifactMap = std::map<std::string, std::string>;

// Runs the full pipeline on an aligned, validated dataset: engagement
// profiles + rank tests, pruned behaviour-phase networks per condition, and
// per phase x condition pattern reports with flow diagrams. Deterministic
// for fixed input and options, independent of thread count.
ArtifactMap run_analyze(const SessionDataset& dataset, const AnalyzeOptions& options);

}  // namespace cpsmine
