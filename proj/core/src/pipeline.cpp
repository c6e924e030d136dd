#include "hlsrepair/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hlsrepair/tokenizer.hpp"

namespace hlsrepair::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<BenchmarkSpec> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str());
    fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) -> std::string {
        if (p.empty()) return p;
        fs::path fp(p);
        return fp.is_absolute() ? p : (base / fp).string();
    };
    std::vector<BenchmarkSpec> out;
    for (const auto& e : j) {
        BenchmarkSpec spec;
        spec.id = e.value("id", "");
        spec.file = resolve(e.value("file", ""));
        spec.entry = e.value("entry", "");
        spec.dataset = resolve(e.value("dataset", ""));
        spec.golden = resolve(e.value("golden", ""));
        for (const auto& c : e.value("expected_classes", json::array()))
            spec.expected_classes.push_back(c.get<std::string>());
        if (spec.id.empty() || spec.file.empty() || spec.entry.empty())
            throw std::runtime_error("manifest entry missing id/file/entry");
        out.push_back(std::move(spec));
    }
    return out;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::shared_ptr<llm::Backend> make_backend(const Config& config,
                                           const BenchmarkSpec& spec) {
    if (config.mode == "oracle") {
        std::optional<std::string> golden;
        if (!spec.golden.empty()) golden = read_file(spec.golden);
        return std::shared_ptr<llm::Backend>(llm::make_oracle_backend(std::move(golden)));
    }
    if (config.mode == "replay")
        return std::shared_ptr<llm::Backend>(llm::make_replay_backend(config.cassette));
    if (config.mode == "record") {
        std::unique_ptr<llm::Backend> inner;
        if (!config.live.host.empty()) {
            inner = llm::make_live_backend(config.live);
        } else {
            std::optional<std::string> golden;
            if (!spec.golden.empty()) golden = read_file(spec.golden);
            inner = llm::make_oracle_backend(std::move(golden));
        }
        return std::shared_ptr<llm::Backend>(
            llm::make_record_backend(std::move(inner), config.cassette));
    }
    return std::shared_ptr<llm::Backend>(llm::make_live_backend(config.live));
}

detect::CompileReport run_check(const cfront::SourceUnit& unit, const Config& config) {
    if (!config.compile_cmd.empty())
        return detect::check_external(unit, config.compile_cmd);
    return detect::check(unit);
}

void push_stage(RepairSession& session, const std::string& stage,
                const cfront::SourceUnit& unit, const detect::CompileReport& report,
                std::string detail) {
    StageEntry e;
    e.stage = stage;
    e.generation = unit.generation;
    e.error_count = report.error_count();
    e.advisory_count = report.diagnostics.size() - report.error_count();
    e.detail = std::move(detail);
    session.trace.push_back(std::move(e));
}

}  // namespace

RepairSession run_instance(const BenchmarkSpec& spec, const Config& config,
                           int instance_index, const rag::Retriever* retriever) {
    auto start = std::chrono::steady_clock::now();
    RepairSession session;
    session.benchmark_id = spec.id;
    session.instance_index = instance_index;
    session.seed = config.seed_base + static_cast<unsigned>(instance_index);

    cfront::SourceUnit original = cfront::SourceUnit::from_file(spec.file);
    std::vector<interp::ExecEnv> dataset;
    std::string dataset_path = !spec.dataset.empty() ? spec.dataset : config.dataset;
    if (!dataset_path.empty()) dataset = interp::load_dataset(dataset_path);

    llm::LlmClient client(make_backend(config, spec), config.pricing);

    auto finish = [&](cfront::SourceUnit final_unit) {
        session.final_source = final_unit.bytes;
        session.input_tokens = client.ledger().total_input_tokens();
        session.output_tokens = client.ledger().total_output_tokens();
        session.cost = client.ledger().cost();
        session.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        return session;
    };

    // ---- Stage 1: preprocessing -------------------------------------------
    detect::CompileReport report = run_check(original, config);
    push_stage(session, "PREPROCESS", original, report,
               "initial check: " + std::to_string(report.error_count()) + " errors");
    if (!original.parsed_ok()) {
        session.failure_reason = "input does not parse";
        return finish(original);
    }

    if (config.detect_extra) {
        try {
            llm::PromptBundle bundle =
                llm::build_prompt(llm::Stage::DetectExtra, original, report.log, {},
                                  config.context_budget);
            llm::LlmExchange ex = client.complete(bundle);
            ++session.extra_detect_queries;
            std::istringstream lines(ex.response);
            std::string line;
            while (std::getline(lines, line)) {
                if (!line.empty()) session.llm_advisories.push_back(line);
            }
        } catch (const std::exception& e) {
            session.llm_advisories.push_back(std::string("detect-extra failed: ") +
                                             e.what());
        }
    }

    // ---- Stage 2: script pre-repair ----------------------------------------
    cfront::SourceUnit current = original;
    if (config.scripts && report.error_count() > 0) {
        script::RepairContext ctx;
        ctx.skip_passes = config.skip_passes;
        ctx.dataset = dataset.empty() ? nullptr : &dataset;
        ctx.entry = spec.entry;
        script::RewriteOutcome rw = script::script_pass(current, report, ctx);
        current = rw.unit;
        report = run_check(current, config);
        push_stage(session, "SCRIPT_REPAIR", current, report,
                   std::to_string(rw.edits.size()) + " edits, " +
                       std::to_string(rw.skipped.size()) + " skipped");
    }

    // ---- Stage 3: iterative LLM repair -------------------------------------
    while (report.error_count() > 0 && session.repair_queries < config.query_budget) {
        std::vector<llm::PromptSection> sections;
        if (config.rag && retriever) {
            try {
                auto ranked = retriever->retrieve(report.log, 3);
                for (const auto& [tpl, score] : ranked)
                    sections.push_back(llm::section_from_template(*tpl, score));
            } catch (const rag::RetrievalError&) {
                // No usable templates; proceed bare (baseline arm behavior).
            }
        }
        llm::PromptBundle bundle;
        try {
            bundle = llm::build_prompt(llm::Stage::Repair, current, report.log,
                                       std::move(sections), config.context_budget);
        } catch (const llm::PromptTooLarge& e) {
            session.failure_reason = e.what();
            break;
        }
        session.repair_program_tokens.push_back(
            static_cast<long long>(llm::count_tokens(bundle.program)));
        ++session.repair_queries;
        try {
            llm::LlmExchange ex = client.complete(bundle);
            std::string program = llm::extract_program(ex.response);
            current = cfront::SourceUnit::from_bytes(
                current.filename, program, cfront::Stage::LlmRepaired,
                current.generation + 1);
        } catch (const llm::BackendError& e) {
            push_stage(session, "LLM_REPAIR", current, report,
                       std::string("backend error: ") + e.what());
            session.failure_reason = e.what();
            if (e.kind == llm::BackendError::Kind::UnrecordedPrompt) break;
            continue;
        } catch (const llm::ExtractError& e) {
            push_stage(session, "LLM_REPAIR", current, report,
                       std::string("extract error: ") + e.what());
            continue;
        }
        report = run_check(current, config);
        push_stage(session, "LLM_REPAIR", current, report,
                   "query " + std::to_string(session.repair_queries) + ": " +
                       std::to_string(report.error_count()) + " errors remain");
    }

    session.compile_pass = report.pass;
    if (!session.compile_pass) {
        if (session.failure_reason.empty())
            session.failure_reason = "errors remain after query budget";
        return finish(current);
    }
    current = current.with_stage(cfront::Stage::CompiledOk);

    // ---- Stage 4: bit width + equivalence verification ----------------------
    if (!dataset.empty()) {
        try {
            interp::RangeProfile prof = interp::profile(current, spec.entry, dataset);
            bitwidth::BitWidthPlan plan = bitwidth::plan(prof, config.bitwidth_policy);
            if (!plan.entries.empty()) {
                bitwidth::ApplyOutcome applied = bitwidth::apply(current, plan);
                current = applied.unit;
            }
            push_stage(session, "BITWIDTH", current, report,
                       std::to_string(plan.entries.size()) + " declarations narrowed");
        } catch (const interp::ProfileError& e) {
            push_stage(session, "BITWIDTH", current, report,
                       std::string("profile unavailable: ") + e.what());
        }
        interp::EquivalenceVerdict verdict =
            interp::equivalent(original, current, spec.entry, dataset);
        session.sim_pass = verdict.equivalent;
        push_stage(session, "VERIFY", current, report,
                   verdict.equivalent
                       ? "equivalent to the original over " +
                             std::to_string(dataset.size()) + " rows"
                       : "counterexample: " + verdict.counterexample->description);
        if (!verdict.equivalent) session.failure_reason = "differential test failed";
    } else {
        session.sim_pass = session.compile_pass;
        push_stage(session, "VERIFY", current, report, "no dataset; verdict by check only");
    }

    // ---- Stage 5: PPA optimization ------------------------------------------
    if (session.sim_pass && !config.bottleneck_report.empty() &&
        !config.strategy_dir.empty()) {
        try {
            ppa::BottleneckReport bn = ppa::BottleneckReport::load(config.bottleneck_report);
            rag::Retriever strategies = rag::Retriever::from_templates({});
            strategies.load_strategies(config.strategy_dir);
            ppa::OptimizeSettings settings;
            settings.dataset = dataset.empty() ? nullptr : &dataset;
            settings.entry = spec.entry;
            ppa::OptimizeOutcome opt = ppa::optimize(current, bn, strategies, settings);
            current = opt.unit;
            push_stage(session, "PPA", current, report,
                       std::to_string(opt.edits.size()) + " pragma edits");
        } catch (const std::exception& e) {
            push_stage(session, "PPA", current, report,
                       std::string("optimization skipped: ") + e.what());
        }
    }

    return finish(current);
}

// ---------------------------------------------------------------------------
// Corpus running and reporting
// ---------------------------------------------------------------------------

std::string PassRateReport::format_rate(long long m, long long n) {
    if (n == 0) return "0.00";
    // round(10000 * m / n) with half-up, rendered as d.dd
    long long scaled = (20000 * m + n) / (2 * n);
    std::string whole = std::to_string(scaled / 100);
    long long frac = scaled % 100;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02lld", frac);
    return whole + "." + buf;
}

std::string PassRateReport::to_json() const {
    json j;
    j["benchmarks"] = json::array();
    long long sum_c = 0, sum_s = 0, sum_n = 0;
    for (const auto& b : benchmarks) {
        j["benchmarks"].push_back({{"id", b.id},
                                   {"instances", b.instances},
                                   {"compile_passes", b.compile_passes},
                                   {"sim_passes", b.sim_passes},
                                   {"compile_rate", format_rate(b.compile_passes,
                                                                b.instances)},
                                   {"sim_rate", format_rate(b.sim_passes, b.instances)}});
        sum_c += b.compile_passes;
        sum_s += b.sim_passes;
        sum_n += b.instances;
    }
    j["aggregate"] = {{"instances", sum_n},
                      {"compile_rate", format_rate(sum_c, sum_n)},
                      {"sim_rate", format_rate(sum_s, sum_n)}};
    return j.dump(2);
}

std::string PassRateReport::to_table() const {
    std::ostringstream out;
    out << "Benchmark                        Compi.   Simu.\n";
    out << "-----------------------------------------------\n";
    long long sum_c = 0, sum_s = 0, sum_n = 0;
    for (const auto& b : benchmarks) {
        out << b.id;
        for (size_t i = b.id.size(); i < 33; ++i) out << ' ';
        std::string c = format_rate(b.compile_passes, b.instances);
        std::string s = format_rate(b.sim_passes, b.instances);
        out << c;
        for (size_t i = c.size(); i < 9; ++i) out << ' ';
        out << s << "\n";
        sum_c += b.compile_passes;
        sum_s += b.sim_passes;
        sum_n += b.instances;
    }
    out << "-----------------------------------------------\n";
    out << "mean                             " << format_rate(sum_c, sum_n) << "    "
        << format_rate(sum_s, sum_n) << "\n";
    return out.str();
}

PassRateReport run_corpus(const std::vector<BenchmarkSpec>& manifest,
                          const Config& config, int instances_per_benchmark,
                          std::vector<RepairSession>* sessions_out) {
    if (manifest.empty()) throw std::runtime_error("corpus manifest is empty");

    std::optional<rag::Retriever> retriever;
    if (config.rag && !config.library_dir.empty())
        retriever = rag::Retriever::load_library(config.library_dir);
    const rag::Retriever* rptr = retriever ? &*retriever : nullptr;

    struct Job {
        size_t bench;
        int instance;
    };
    std::vector<Job> jobs;
    for (size_t b = 0; b < manifest.size(); ++b)
        for (int i = 0; i < instances_per_benchmark; ++i) jobs.push_back({b, i});

    std::vector<RepairSession> sessions(jobs.size());
    if (config.parallelism <= 1) {
        for (size_t k = 0; k < jobs.size(); ++k)
            sessions[k] = run_instance(manifest[jobs[k].bench], config,
                                       jobs[k].instance, rptr);
    } else {
        std::vector<std::future<void>> futures;
        std::atomic<size_t> next{0};
        int workers = std::min<int>(config.parallelism, static_cast<int>(jobs.size()));
        for (int w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&] {
                for (size_t k = next.fetch_add(1); k < jobs.size();
                     k = next.fetch_add(1))
                    sessions[k] = run_instance(manifest[jobs[k].bench], config,
                                               jobs[k].instance, rptr);
            }));
        }
        for (auto& f : futures) f.get();
    }

    PassRateReport report;
    for (size_t b = 0; b < manifest.size(); ++b) {
        BenchmarkRates rates;
        rates.id = manifest[b].id;
        for (size_t k = 0; k < jobs.size(); ++k) {
            if (jobs[k].bench != b) continue;
            ++rates.instances;
            if (sessions[k].compile_pass) ++rates.compile_passes;
            if (sessions[k].sim_pass) ++rates.sim_passes;
        }
        report.benchmarks.push_back(std::move(rates));
    }
    if (sessions_out) *sessions_out = std::move(sessions);
    return report;
}

std::string CostComparison::to_json() const {
    json j;
    j["per_class"] = json::array();
    for (const auto& r : rows) {
        double ratio = r.without_scripts != llm::Money(0)
                           ? boost::rational_cast<double>(r.with_scripts) /
                                 boost::rational_cast<double>(r.without_scripts)
                           : (r.with_scripts == llm::Money(0) ? 1.0 : 0.0);
        j["per_class"].push_back({{"class", r.error_class},
                                  {"with_scripts", llm::money_to_string(r.with_scripts)},
                                  {"without_scripts",
                                   llm::money_to_string(r.without_scripts)},
                                  {"ratio", ratio}});
    }
    j["total_with_scripts"] = llm::money_to_string(total_with);
    j["total_without_scripts"] = llm::money_to_string(total_without);
    return j.dump(2);
}

CostComparison compare_cost(const Config& scripts_on, const Config& scripts_off,
                            const std::vector<BenchmarkSpec>& manifest,
                            int instances_per_benchmark) {
    std::vector<RepairSession> on_sessions, off_sessions;
    run_corpus(manifest, scripts_on, instances_per_benchmark, &on_sessions);
    run_corpus(manifest, scripts_off, instances_per_benchmark, &off_sessions);

    std::map<std::string, std::pair<llm::Money, llm::Money>> by_class;
    auto class_of = [&](const std::string& bench_id) -> std::string {
        for (const auto& spec : manifest)
            if (spec.id == bench_id)
                return spec.expected_classes.empty() ? "?" : spec.expected_classes[0];
        return "?";
    };
    CostComparison cmp;
    for (const auto& s : on_sessions) {
        by_class[class_of(s.benchmark_id)].first += s.cost;
        cmp.total_with += s.cost;
    }
    for (const auto& s : off_sessions) {
        by_class[class_of(s.benchmark_id)].second += s.cost;
        cmp.total_without += s.cost;
    }
    for (const auto& [cls, costs] : by_class)
        cmp.rows.push_back(CostComparison::Row{cls, costs.first, costs.second});
    return cmp;
}

// ---------------------------------------------------------------------------
// Session serialization
// ---------------------------------------------------------------------------

std::string RepairSession::to_json(bool include_timing) const {
    json j;
    j["benchmark"] = benchmark_id;
    j["instance"] = instance_index;
    j["seed"] = seed;
    j["compile_pass"] = compile_pass;
    j["sim_pass"] = sim_pass;
    j["repair_queries"] = repair_queries;
    j["extra_detect_queries"] = extra_detect_queries;
    j["repair_program_tokens"] = repair_program_tokens;
    j["input_tokens"] = input_tokens;
    j["output_tokens"] = output_tokens;
    j["cost"] = llm::money_to_string(cost);
    j["llm_advisories"] = llm_advisories;
    j["failure_reason"] = failure_reason;
    j["trace"] = json::array();
    for (const auto& t : trace)
        j["trace"].push_back({{"stage", t.stage},
                              {"generation", t.generation},
                              {"errors", t.error_count},
                              {"advisories", t.advisory_count},
                              {"detail", t.detail}});
    j["final_source"] = final_source;
    if (include_timing) j["wall_ms"] = wall_ms;
    return j.dump(2);
}

}  // namespace hlsrepair::pipeline
