#pragma once

#include <set>
#include <string>

#include "hlsrepair/bitwidth.hpp"
#include "hlsrepair/llm.hpp"

namespace hlsrepair {

/// Run configuration shared by the pipeline and the CLI. Loaded from a flat
/// TOML-style key = value file; unknown keys are rejected.
struct Config {
    // Backend selection: live | record | replay | oracle.
    std::string mode = "oracle";
    llm::LiveConfig live;
    std::string cassette;

    bool rag = true;
    bool scripts = true;
    bool detect_extra = false;

    int query_budget = 5;           // LLM repair queries per instance
    size_t context_budget = 16000;  // prompt token budget
    llm::Pricing pricing;

    std::string library_dir;    // repair templates
    std::string strategy_dir;   // optimization strategies
    std::string dataset;        // default dataset path (manifest may override)
    std::string bottleneck_report;  // optional PPA stage input
    std::string compile_cmd;    // external checker; empty = built-in detectors

    std::set<std::string> skip_passes;
    bitwidth::HeadroomPolicy bitwidth_policy = bitwidth::HeadroomPolicy::None;

    unsigned seed_base = 1;
    int parallelism = 1;

    /// Parses `key = value` lines ('#' comments allowed). Throws
    /// std::runtime_error on unknown keys or malformed values.
    static Config load(const std::string& path);
    void apply_line(const std::string& key, const std::string& value);
    void validate() const;
};

}  // namespace hlsrepair
