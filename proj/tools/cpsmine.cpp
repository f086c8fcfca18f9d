// cpsmine: dialogue analytics for phase-structured collaborative problem
// solving sessions. Subcommands: analyze (full pipeline), synth (seeded
// dataset generator), oracle (reference-equivalence suites), framework
// (coding table export).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cpsmine/emit.hpp"
#include "cpsmine/error.hpp"
#include "cpsmine/framework.hpp"
#include "cpsmine/ingest.hpp"
#include "cpsmine/oracle.hpp"
#include "cpsmine/pipeline.hpp"
#include "cpsmine/synth.hpp"

namespace fs = std::filesystem;
using namespace cpsmine;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << body;
    if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

int run_analyze_cmd(const std::string& utterances, const std::string& phase_log,
                    const std::string& roster, const std::string& out_dir, double alpha,
                    const std::string& min_support, const std::string& emit, int threads,
                    bool keep_all) {
    AnalyzeOptions options;
    options.alpha = alpha;
    options.threads = threads;
    options.keep_all_edges = keep_all;
    if (min_support != "auto") {
        try {
            options.min_support = std::stod(min_support);
        } catch (const std::exception&) {
            std::cerr << "invalid --min-support '" << min_support << "'\n";
            return kExitValidation;
        }
        if (*options.min_support <= 0.0 || *options.min_support > 1.0) {
            std::cerr << "--min-support must lie in (0, 1] or be 'auto'\n";
            return kExitValidation;
        }
    }
    options.emit.clear();
    std::stringstream formats(emit);
    std::string fmt;
    while (std::getline(formats, fmt, ',')) {
        if (fmt != "json" && fmt != "csv" && fmt != "dot") {
            std::cerr << "unknown emit format '" << fmt << "'\n";
            return kExitValidation;
        }
        options.emit.insert(fmt);
    }

    ArtifactMap artifacts;
    try {
        std::string u_body = slurp(utterances);
        std::string p_body = slurp(phase_log);
        std::string r_body = slurp(roster);
        std::istringstream u_in(u_body), p_in(p_body), r_in(r_body);
        SessionDataset dataset = align_phases(parse_event_log(u_in, p_in, r_in));
        auto report = validate_dataset(dataset);
        if (!report.ok()) {
            for (const auto& v : report.violations)
                std::cerr << v.kind << ": " << v.detail << "\n";
            return kExitValidation;
        }
        artifacts = run_analyze(dataset, options);
    } catch (const std::ios_base::failure& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    } catch (const CpsError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }

    // all analysis succeeded; only now touch the output directory
    try {
        fs::create_directories(out_dir);
        for (const auto& [name, body] : artifacts) write_file(fs::path(out_dir) / name, body);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "wrote " << artifacts.size() << " files to " << out_dir << "\n";
    return kExitOk;
}

int run_synth_cmd(uint64_t seed, int students_per_condition, const std::string& out_dir,
                  const std::string& profile) {
    SynthSpec spec;
    try {
        if (profile == "paper-shape") spec = paper_shape_spec(seed, students_per_condition);
        else if (profile == "default") spec = default_synth_spec(seed, students_per_condition);
        else {
            std::cerr << "unknown profile '" << profile << "'\n";
            return kExitValidation;
        }
        auto files = generate_dataset(spec);
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "utterances.csv", files.utterances_csv);
        write_file(fs::path(out_dir) / "phase_log.csv", files.phase_log_csv);
        write_file(fs::path(out_dir) / "roster.csv", files.roster_csv);
    } catch (const std::ios_base::failure& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    } catch (const CpsError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
    std::cout << "wrote utterances.csv, phase_log.csv, roster.csv to " << out_dir << "\n";
    return kExitOk;
}

int run_oracle_cmd(const std::string& which, int trials, uint64_t seed) {
    oracle::SuiteResult result;
    if (which == "spm") result = oracle::run_spm_suite(trials, seed);
    else if (which == "mwu") result = oracle::run_mwu_suite(trials, seed);
    else if (which == "binomial") result = oracle::run_binomial_suite(trials, seed);
    else {
        std::cerr << "unknown oracle '" << which << "' (expected spm|mwu|binomial)\n";
        return kExitValidation;
    }
    std::cout << (result.trials - result.failures) << "/" << result.trials << " match\n";
    if (!result.ok()) {
        std::cerr << "counterexample: " << result.first_counterexample << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interaction-network and sequential-pattern analytics for "
                 "phase-coded collaborative problem solving dialogue"};
    app.require_subcommand(1);

    // analyze
    std::string utterances, phase_log, roster, out_dir;
    double alpha = 0.05;
    std::string min_support = "auto";
    std::string emit = "json,csv,dot";
    int threads = 1;
    bool keep_all = false;
    auto* analyze = app.add_subcommand("analyze", "Run the full analysis pipeline");
    analyze->add_option("--utterances", utterances, "utterances.csv")->required();
    analyze->add_option("--phase-log", phase_log, "phase_log.csv")->required();
    analyze->add_option("--roster", roster, "roster.csv")->required();
    analyze->add_option("--out", out_dir, "output directory")->required();
    analyze->add_option("--alpha", alpha, "edge pruning significance level")
        ->check(CLI::Range(1e-9, 0.999999));
    analyze->add_option("--min-support", min_support, "fraction in (0,1] or 'auto'");
    analyze->add_option("--emit", emit, "comma-separated subset of json,csv,dot");
    analyze->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    analyze->add_flag("--keep-all", keep_all, "emit insignificant edges dashed in DOT output");

    // synth
    uint64_t seed = 42;
    int students_per_condition = 39;
    std::string synth_out, profile = "default";
    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
    synth->add_option("--seed", seed, "PRNG seed (mt19937_64)");
    synth->add_option("--students-per-condition", students_per_condition)
        ->check(CLI::PositiveNumber);
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--profile", profile, "default | paper-shape");

    // oracle
    std::string oracle_name;
    int trials = 1000;
    uint64_t oracle_seed = 1;
    auto* oracle_cmd = app.add_subcommand("oracle", "Run reference-equivalence suites");
    oracle_cmd->add_option("suite", oracle_name, "spm | mwu | binomial")->required();
    oracle_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--seed", oracle_seed);

    // framework
    std::string framework_out;
    auto* framework = app.add_subcommand("framework", "Export the coding framework as CSV");
    framework->add_option("--out", framework_out, "output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (analyze->parsed())
        return run_analyze_cmd(utterances, phase_log, roster, out_dir, alpha, min_support, emit,
                               threads, keep_all);
    if (synth->parsed()) return run_synth_cmd(seed, students_per_condition, synth_out, profile);
    if (oracle_cmd->parsed()) return run_oracle_cmd(oracle_name, trials, oracle_seed);
    if (framework->parsed()) {
        if (framework_out.empty()) {
            write_framework_csv(std::cout);
        } else {
            std::ofstream out(framework_out, std::ios::binary);
            if (!out) {
                std::cerr << "cannot write " << framework_out << "\n";
                return kExitIo;
            }
            write_framework_csv(out);
        }
        return kExitOk;
    }
    return kExitValidation;
}
