#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hlsrepair/bitwidth.hpp"
#include "hlsrepair/config.hpp"
#include "hlsrepair/detect.hpp"
#include "hlsrepair/llm.hpp"
#include "hlsrepair/ppa.hpp"
#include "hlsrepair/rag.hpp"
#include "hlsrepair/script_repair.hpp"

namespace hlsrepair::pipeline {

using cfront::SourceUnit;

struct BenchmarkSpec {
    std::string id;
    std::string file;
    std::string entry;
    std::string dataset;  // optional path
    std::string golden;   // optional path, used by the oracle backend
    std::vector<std::string> expected_classes;  // "T1".."T8"
};

/// JSON list of {"id","file","entry","dataset","expected_classes",...};
/// relative paths resolve against the manifest's directory.
std::vector<BenchmarkSpec> load_manifest(const std::string& path);

struct StageEntry {
    std::string stage;  // PREPROCESS, SCRIPT_REPAIR, LLM_REPAIR, BITWIDTH, VERIFY, PPA
    int generation = 0;
    size_t error_count = 0;
    size_t advisory_count = 0;
    std::string detail;  // human-readable summary line
};

struct RepairSession {
    std::string benchmark_id;
    int instance_index = 0;
    unsigned seed = 0;
    std::vector<StageEntry> trace;
    bool compile_pass = false;
    bool sim_pass = false;
    int repair_queries = 0;             // REPAIR exchanges, budgeted
    int extra_detect_queries = 0;       // DETECT_EXTRA, not budgeted
    std::vector<long long> repair_program_tokens;  // program section per query
    long long input_tokens = 0;
    long long output_tokens = 0;
    llm::Money cost{0};
    std::vector<std::string> llm_advisories;  // DETECT_EXTRA findings
    std::string failure_reason;
    std::string final_source;
    double wall_ms = 0;

    std::string to_json(bool include_timing = true) const;
};

/// Runs the five-stage flow on one file: preprocess (check + optional
/// LLM detection), script pre-repair, the iterative LLM repair loop, bit
/// width optimization plus differential verification, and pragma
/// optimization for verified results.
RepairSession run_instance(const BenchmarkSpec& spec, const Config& config,
                           int instance_index, const rag::Retriever* retriever);

struct BenchmarkRates {
    std::string id;
    int instances = 0;
    int compile_passes = 0;
    int sim_passes = 0;
};

struct PassRateReport {
    std::vector<BenchmarkRates> benchmarks;

    /// 100*m/n rounded to two decimals, exact rational arithmetic.
    static std::string format_rate(long long m, long long n);

    std::string to_json() const;
    std::string to_table() const;  // Compi./Simu. columns per benchmark
};

PassRateReport run_corpus(const std::vector<BenchmarkSpec>& manifest,
                          const Config& config, int instances_per_benchmark,
                          std::vector<RepairSession>* sessions_out = nullptr);

struct CostComparison {
    struct Row {
        std::string error_class;
        llm::Money with_scripts{0};
        llm::Money without_scripts{0};
    };
    std::vector<Row> rows;
    llm::Money total_with{0};
    llm::Money total_without{0};

    std::string to_json() const;
};

/// Runs both arms (scripts on / scripts off) over the manifest and compares
/// total LLM cost per error class.
CostComparison compare_cost(const Config& scripts_on, const Config& scripts_off,
                            const std::vector<BenchmarkSpec>& manifest,
                            int instances_per_benchmark = 1);

}  // namespace hlsrepair::pipeline
