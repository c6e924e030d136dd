#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "hlsrepair/rag.hpp"
#include "hlsrepair/source_unit.hpp"

namespace hlsrepair::llm {

using Money = boost::rational<long long>;

enum class Stage { DetectExtra, Repair, BitwidthScript, PpaOpt };
const char* stage_name(Stage s);

struct PromptSection {
    std::string id;        // template/strategy id
    std::string guidance;  // guidance or concept text
    std::string violation;
    std::string repaired;
    double score = 0;
};

struct PromptBundle {
    Stage stage = Stage::Repair;
    std::string preamble;   // role + "one fenced code block" output contract
    std::string error_log;
    std::vector<PromptSection> sections;
    std::string program;    // exactly one program section when serialized
};

/// Deterministic serialization: preamble, guidance sections, error log,
/// program (a single fenced block), in that order.
std::string serialize(const PromptBundle& bundle);

struct PromptTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Assembles the prompt for a stage, dropping lowest-scored sections one at
/// a time if the serialized form exceeds `context_budget_tokens`; throws
/// PromptTooLarge when it cannot fit even with no sections.
PromptBundle build_prompt(Stage stage, const cfront::SourceUnit& unit,
                          const std::string& log,
                          std::vector<PromptSection> sections,
                          size_t context_budget_tokens = 16000);

PromptSection section_from_template(const rag::RepairTemplate& t, double score);
PromptSection section_from_strategy(const rag::StrategyEntry& s, double score);

struct BackendError : std::runtime_error {
    enum class Kind { Transport, MalformedResponse, UnrecordedPrompt };
    Kind kind;
    std::string prompt_hash;
    BackendError(Kind k, const std::string& msg, std::string hash = {})
        : std::runtime_error(msg), kind(k), prompt_hash(std::move(hash)) {}
};

struct LlmExchange {
    Stage stage = Stage::Repair;
    std::string prompt_hash;
    std::string response;
    long long input_tokens = 0;   // built-in tokenizer, both directions
    long long output_tokens = 0;
    std::optional<long long> provider_input_tokens;   // live backends only
    std::optional<long long> provider_output_tokens;
    std::string backend_id;
    double latency_ms = 0;
    int sequence = 0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual LlmExchange complete(const PromptBundle& bundle) = 0;
    virtual std::string id() const = 0;
};

struct LiveConfig {
    std::string host;          // e.g. https://api.example.com or 127.0.0.1
    int port = 443;
    std::string path = "/v1/chat/completions";
    std::string api_key;
    std::string model = "gpt-4-turbo";
    int max_retries = 3;
};

/// Chat-completion JSON POST ({"model","messages":[...]}) with up to
/// max_retries exponential-backoff attempts.
std::unique_ptr<Backend> make_live_backend(LiveConfig config);

/// Wraps another backend and appends every exchange to a JSONL cassette
/// keyed by SHA-256 of the serialized bundle.
std::unique_ptr<Backend> make_record_backend(std::unique_ptr<Backend> inner,
                                             const std::string& cassette_path);

/// Replays a cassette; a miss raises BackendError::UnrecordedPrompt carrying
/// the prompt hash.
std::unique_ptr<Backend> make_replay_backend(const std::string& cassette_path);

/// Scripted stand-in for a model. With golden source configured it answers
/// REPAIR prompts with that program; otherwise it answers with the result of
/// the deterministic script passes over the prompt's program section.
std::unique_ptr<Backend> make_oracle_backend(std::optional<std::string> golden_source);

/// Extracts the program from a model response: content of the single fenced
/// code block, or the longest fenced block that parses when there are
/// several. Throws ExtractError when no block parses.
struct ExtractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
std::string extract_program(const std::string& response);

// ---------------------------------------------------------------------------
// Cost accounting
// ---------------------------------------------------------------------------

struct Pricing {
    Money per_1k_input{1, 100};   // 0.01
    Money per_1k_output{3, 100};  // 0.03

    /// Parses a plain decimal ("0.01") into an exact rational.
    static Money parse_decimal(const std::string& text);
};

/// Renders an exact rational as decimal text with up to `max_places` digits
/// (trailing zeros trimmed, at least two places kept).
std::string money_to_string(const Money& m, int max_places = 6);

class CostLedger {
public:
    explicit CostLedger(Pricing pricing = {}) : pricing_(pricing) {}

    /// Appends with a process-wide ordering guarantee; safe concurrently.
    void append(LlmExchange exchange);

    Money cost() const;
    long long total_input_tokens() const;
    long long total_output_tokens() const;
    const std::vector<LlmExchange>& exchanges() const { return exchanges_; }
    const Pricing& pricing() const { return pricing_; }

private:
    Pricing pricing_;
    std::vector<LlmExchange> exchanges_;
    mutable std::mutex mu_;
};

/// Backend plus ledger: every completion is token-counted with the built-in
/// tokenizer and appended to the ledger with a sequence number.
class LlmClient {
public:
    LlmClient(std::shared_ptr<Backend> backend, Pricing pricing = {})
        : backend_(std::move(backend)), ledger_(pricing) {}

    LlmExchange complete(const PromptBundle& bundle);
    const CostLedger& ledger() const { return ledger_; }
    Backend& backend() { return *backend_; }

private:
    std::shared_ptr<Backend> backend_;
    CostLedger ledger_;
    int next_sequence_ = 0;
    std::mutex mu_;
};

}  // namespace hlsrepair::llm
