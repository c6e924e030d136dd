// hlsrepair: source-to-source repair of regular C programs into HLS-C.
//
// Subcommands: check, repair, bitwidth, optimize, corpus. Exit codes:
// 0 success/PASS, 1 analysis FAIL, 2 usage or I/O error, 3 backend error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hlsrepair/config.hpp"
#include "hlsrepair/detect.hpp"
#include "hlsrepair/pipeline.hpp"
#include "hlsrepair/ppa.hpp"

namespace fs = std::filesystem;
using namespace hlsrepair;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;

struct CommonFlags {
    std::string config_path;
    std::string mode;
    bool no_rag = false;
    bool no_scripts = false;
    bool detect_extra = false;
    bool json_output = false;
    bool guard_bit = false;
    std::vector<std::string> skip_passes;
    std::string dataset;
    std::string library;
    std::string strategies;
    std::string cassette;
    std::string compile_cmd;
    std::string bottleneck_report;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "config file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--mode", flags.mode, "backend mode: live|record|replay|oracle");
    cmd->add_flag("--no-rag", flags.no_rag, "disable template retrieval");
    cmd->add_flag("--no-scripts", flags.no_scripts, "disable script pre-repair");
    cmd->add_flag("--detect-extra", flags.detect_extra,
                  "ask the model for additional findings during preprocessing");
    cmd->add_flag("--json", flags.json_output, "machine-readable stdout");
    cmd->add_flag("--guard-bit", flags.guard_bit, "add one headroom bit to planned widths");
    cmd->add_option("--skip-pass", flags.skip_passes, "script pass to skip (repeatable)");
    cmd->add_option("--dataset", flags.dataset, "JSONL dataset of execution environments");
    cmd->add_option("--library", flags.library, "repair template library directory");
    cmd->add_option("--strategies", flags.strategies, "optimization strategy directory");
    cmd->add_option("--cassette", flags.cassette, "record/replay cassette path");
    cmd->add_option("--compile-cmd", flags.compile_cmd,
                    "external compatibility checker command");
    cmd->add_option("--report", flags.bottleneck_report, "bottleneck report JSON");
}

Config build_config(const CommonFlags& flags) {
    Config cfg;
    if (!flags.config_path.empty()) cfg = Config::load(flags.config_path);
    if (!flags.mode.empty()) cfg.mode = flags.mode;
    if (flags.no_rag) cfg.rag = false;
    if (flags.no_scripts) cfg.scripts = false;
    if (flags.detect_extra) cfg.detect_extra = true;
    if (flags.guard_bit) cfg.bitwidth_policy = bitwidth::HeadroomPolicy::GuardBit;
    for (const auto& p : flags.skip_passes) cfg.skip_passes.insert(p);
    if (!flags.dataset.empty()) cfg.dataset = flags.dataset;
    if (!flags.library.empty()) cfg.library_dir = flags.library;
    if (!flags.strategies.empty()) cfg.strategy_dir = flags.strategies;
    if (!flags.cassette.empty()) cfg.cassette = flags.cassette;
    if (!flags.compile_cmd.empty()) cfg.compile_cmd = flags.compile_cmd;
    if (!flags.bottleneck_report.empty()) cfg.bottleneck_report = flags.bottleneck_report;
    cfg.validate();
    return cfg;
}

int cmd_check(const std::string& file, const CommonFlags& flags) {
    if (!fs::exists(file)) {
        std::cerr << "error: no such file: " << file << "\n";
        return kExitUsage;
    }
    cfront::SourceUnit unit = cfront::SourceUnit::from_file(file);
    detect::CompileReport report;
    if (!flags.compile_cmd.empty()) {
        report = detect::check_external(unit, flags.compile_cmd);
    } else if (!flags.dataset.empty()) {
        auto dataset = interp::load_dataset(flags.dataset);
        report = detect::check(unit, nullptr, &dataset, "main");
    } else {
        report = detect::check(unit);
    }
    std::cout << report.to_json() << "\n";
    return report.pass ? kExitPass : kExitFail;
}

int cmd_repair(const std::string& file, const std::string& entry,
               const std::string& golden, const CommonFlags& flags) {
    if (!fs::exists(file)) {
        std::cerr << "error: no such file: " << file << "\n";
        return kExitUsage;
    }
    Config cfg = build_config(flags);
    pipeline::BenchmarkSpec spec;
    spec.id = fs::path(file).stem().string();
    spec.file = file;
    spec.entry = entry;
    spec.dataset = cfg.dataset;
    spec.golden = golden;

    std::optional<rag::Retriever> retriever;
    if (cfg.rag && !cfg.library_dir.empty())
        retriever = rag::Retriever::load_library(cfg.library_dir);

    pipeline::RepairSession session =
        pipeline::run_instance(spec, cfg, 0, retriever ? &*retriever : nullptr);
    std::cout << session.to_json() << "\n";

    if (session.compile_pass) {
        fs::path out = fs::path(file);
        out.replace_extension(".hlsc.c");
        std::ofstream f(out, std::ios::binary);
        f << session.final_source;
        if (!flags.json_output) std::cerr << "wrote " << out.string() << "\n";
    }
    if (session.failure_reason.find("cassette") != std::string::npos ||
        session.failure_reason.find("UnrecordedPrompt") != std::string::npos ||
        session.failure_reason.find("no cassette entry") != std::string::npos)
        return kExitBackend;
    return session.compile_pass ? kExitPass : kExitFail;
}

int cmd_bitwidth(const std::string& file, const std::string& entry,
                 const std::string& policy, bool apply_flag, const std::string& out_path,
                 bool emit_program, const CommonFlags& flags) {
    if (!fs::exists(file) || flags.dataset.empty()) {
        std::cerr << "error: bitwidth requires an existing file and --dataset\n";
        return kExitUsage;
    }
    cfront::SourceUnit unit = cfront::SourceUnit::from_file(file);
    if (!unit.parsed_ok()) {
        std::cerr << "error: input does not parse\n";
        return kExitFail;
    }
    auto dataset = interp::load_dataset(flags.dataset);
    if (emit_program) {
        std::cout << bitwidth::emit_optimizer_program(unit, entry);
        return kExitPass;
    }
    interp::RangeProfile prof = interp::profile(unit, entry, dataset);
    auto pol = (policy == "guard" || flags.guard_bit) ? bitwidth::HeadroomPolicy::GuardBit
                                                      : bitwidth::HeadroomPolicy::None;
    bitwidth::BitWidthPlan plan = bitwidth::plan(prof, pol);
    std::cout << plan.to_json() << "\n";
    if (apply_flag) {
        bitwidth::ApplyOutcome outcome = bitwidth::apply(unit, plan);
        fs::path out = out_path.empty() ? fs::path(file).replace_extension(".bw.c")
                                        : fs::path(out_path);
        std::ofstream f(out, std::ios::binary);
        f << outcome.unit.bytes;
        std::cerr << "wrote " << out.string() << " (" << outcome.applied.size()
                  << " declarations narrowed, " << outcome.skipped.size()
                  << " skipped)\n";
    }
    return kExitPass;
}

int cmd_optimize(const std::string& file, const std::string& entry,
                 const std::string& out_path, const CommonFlags& flags) {
    if (!fs::exists(file) || flags.bottleneck_report.empty()) {
        std::cerr << "error: optimize requires an existing file and --report\n";
        return kExitUsage;
    }
    cfront::SourceUnit unit = cfront::SourceUnit::from_file(file);
    ppa::BottleneckReport report = ppa::BottleneckReport::load(flags.bottleneck_report);
    rag::Retriever strategies = rag::Retriever::from_templates({});
    if (!flags.strategies.empty()) strategies.load_strategies(flags.strategies);

    std::vector<interp::ExecEnv> dataset;
    ppa::OptimizeSettings settings;
    if (!flags.dataset.empty()) {
        dataset = interp::load_dataset(flags.dataset);
        settings.dataset = &dataset;
        settings.entry = entry;
    }
    ppa::OptimizeOutcome outcome = ppa::optimize(unit, report, strategies, settings);

    nlohmann::json j;
    j["edits"] = nlohmann::json::array();
    for (const auto& e : outcome.edits)
        j["edits"].push_back({{"strategy", e.strategy_id},
                              {"pragma", e.pragma_text},
                              {"parameter", e.parameter}});
    j["unoptimized"] = nlohmann::json::array();
    for (const auto& [entry_, reason] : outcome.unoptimized)
        j["unoptimized"].push_back(
            {{"target", entry_.target},
             {"metric", ppa::metric_name(entry_.metric)},
             {"reason", reason}});
    ppa::PpaProxy before = ppa::estimate(unit);
    ppa::PpaProxy after = ppa::estimate(outcome.unit);
    j["proxy"] = {{"label", "PROXY"},
                  {"latency_before", before.latency},
                  {"latency_after", after.latency},
                  {"area_before", before.area},
                  {"area_after", after.area}};
    std::cout << j.dump(2) << "\n";

    fs::path out = out_path.empty() ? fs::path(file).replace_extension(".opt.c")
                                    : fs::path(out_path);
    std::ofstream f(out, std::ios::binary);
    f << outcome.unit.bytes;
    std::cerr << "wrote " << out.string() << "\n";
    return kExitPass;
}

int cmd_corpus(const std::string& manifest_path, int instances, const CommonFlags& flags) {
    if (!fs::exists(manifest_path)) {
        std::cerr << "error: no such manifest: " << manifest_path << "\n";
        return kExitUsage;
    }
    Config cfg = build_config(flags);
    auto manifest = pipeline::load_manifest(manifest_path);
    pipeline::PassRateReport report = pipeline::run_corpus(manifest, cfg, instances);
    if (flags.json_output) {
        std::cout << report.to_json() << "\n";
    } else {
        std::cout << report.to_table();
    }
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hlsrepair: repair regular C programs into HLS-compatible C"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string file, entry = "main", golden, policy = "none", out_path, manifest;
    int instances = 15;
    bool apply_flag = false, emit_program = false;

    CLI::App* check = app.add_subcommand("check", "detect HLS incompatibilities");
    check->add_option("file", file)->required();
    add_common(check, flags);

    CLI::App* repair = app.add_subcommand("repair", "run the full repair pipeline");
    repair->add_option("file", file)->required();
    repair->add_option("--entry", entry, "entry function for execution (default: main)");
    repair->add_option("--golden", golden, "golden repaired source for oracle mode");
    add_common(repair, flags);

    CLI::App* bw = app.add_subcommand("bitwidth", "plan minimal bit widths from a dataset");
    bw->add_option("file", file)->required();
    bw->add_option("--entry", entry);
    bw->add_option("--policy", policy, "none | guard");
    bw->add_flag("--apply", apply_flag, "write the rewritten program");
    bw->add_flag("--emit-program", emit_program,
                 "print the generated range-measuring program instead");
    bw->add_option("--out", out_path);
    add_common(bw, flags);

    CLI::App* opt = app.add_subcommand("optimize", "insert pragmas for reported bottlenecks");
    opt->add_option("file", file)->required();
    opt->add_option("--entry", entry);
    opt->add_option("--out", out_path);
    add_common(opt, flags);

    CLI::App* corpus = app.add_subcommand("corpus", "run the benchmark corpus");
    corpus->add_option("manifest", manifest)->required();
    corpus->add_option("-n,--instances", instances, "instances per benchmark");
    add_common(corpus, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(file, flags);
        if (repair->parsed()) return cmd_repair(file, entry, golden, flags);
        if (bw->parsed())
            return cmd_bitwidth(file, entry, policy, apply_flag, out_path, emit_program,
                                flags);
        if (opt->parsed()) return cmd_optimize(file, entry, out_path, flags);
        if (corpus->parsed()) return cmd_corpus(manifest, instances, flags);
    } catch (const llm::BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
