#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hlsrepair/interp.hpp"
#include "hlsrepair/llm.hpp"
#include "hlsrepair/rag.hpp"
#include "hlsrepair/source_unit.hpp"

namespace hlsrepair::ppa {

using cfront::SourceUnit;
using cfront::Span;

enum class Metric { Area, Power, Latency, MemoryBandwidth };
const char* metric_name(Metric m);
std::optional<Metric> metric_from_string(const std::string& s);

struct BottleneckEntry {
    std::string target;   // function name, array name, or "line:<n>"
    Metric metric = Metric::Latency;
    double magnitude = 0;  // relative score in [0, 1]
    std::string note;
};

struct BottleneckReport {
    std::vector<BottleneckEntry> entries;

    /// {"entries":[{"target","metric","magnitude","note"}]}
    static BottleneckReport from_json(const std::string& text);
    static BottleneckReport load(const std::string& path);
    /// Adapter for a generic `name,metric,value` CSV export.
    static BottleneckReport from_csv(const std::string& text);
};

struct PragmaEdit {
    std::string strategy_id;
    Span insertion;       // where the pragma line went (in the input unit)
    std::string pragma_text;
    std::string parameter;  // e.g. the unroll factor
};

struct OptimizeOutcome {
    SourceUnit unit;
    std::vector<PragmaEdit> edits;
    std::vector<std::pair<BottleneckEntry, std::string>> unoptimized;  // entry, reason
};

enum class Mode { Deterministic, Llm };

struct OptimizeSettings {
    Mode mode = Mode::Deterministic;
    std::string pragma_dialect = "hls_unroll";  // unroll pragma keyword
    int max_unroll = 8;
    const std::vector<interp::ExecEnv>* dataset = nullptr;  // equivalence check
    std::string entry;
    llm::LlmClient* client = nullptr;  // required in Llm mode
};

/// Applies the top-retrieved strategy per bottleneck entry with rule-bound
/// parameters; every edit must keep detect::check PASS and, when a dataset
/// is given, interpreter equivalence. Failing edits are rolled back and
/// reported in `unoptimized`.
OptimizeOutcome optimize(const SourceUnit& unit, const BottleneckReport& report,
                         const rag::Retriever& strategies,
                         const OptimizeSettings& settings = {});

/// Analytic stand-in for synthesis numbers, labeled PROXY everywhere it is
/// shown: per-loop latency is ceil(trip/factor) * body_ops, area is
/// body_ops * factor; straight-line code contributes its op count to both.
struct PpaProxy {
    long long latency = 0;
    long long area = 0;
};
PpaProxy estimate(const SourceUnit& unit);

/// Static trip count for `for (i = C0; i < C1; i += C2)`-shaped loops.
std::optional<long long> loop_trip_count(const cfront::ForStmt& loop,
                                         const cfront::Ast& ast);

}  // namespace hlsrepair::ppa
