#include "hlsrepair/llm.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "hlsrepair/hash.hpp"
#include "hlsrepair/script_repair.hpp"
#include "hlsrepair/tokenizer.hpp"

namespace hlsrepair::llm {

using nlohmann::json;

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::DetectExtra: return "DETECT_EXTRA";
        case Stage::Repair: return "REPAIR";
        case Stage::BitwidthScript: return "BITWIDTH_SCRIPT";
        case Stage::PpaOpt: return "PPA_OPT";
    }
    return "?";
}

namespace {

std::string default_preamble(Stage stage) {
    switch (stage) {
        case Stage::DetectExtra:
            return "You review C programs for high-level synthesis compatibility. "
                   "List any further incompatibilities the compiler log missed, one "
                   "finding per line, in the form CLASS: explanation.";
        case Stage::Repair:
            return "You repair C programs so a high-level synthesis compiler accepts "
                   "them, preserving observable behavior. Return one complete C "
                   "program in a single fenced code block.";
        case Stage::BitwidthScript:
            return "You write a standalone C++ program that measures the minimum and "
                   "maximum value of every integer variable of the given program over "
                   "a dataset and prints one 'name min max' line per variable. Return "
                   "one complete C program in a single fenced code block.";
        case Stage::PpaOpt:
            return "You optimize HLS-C programs by inserting or tuning pragmas on the "
                   "reported critical code segments without changing behavior. Return "
                   "one complete C program in a single fenced code block.";
    }
    return {};
}

}  // namespace

std::string serialize(const PromptBundle& bundle) {
    std::ostringstream out;
    out << "[STAGE] " << stage_name(bundle.stage) << "\n";
    out << "[SYSTEM]\n" << bundle.preamble << "\n";
    for (const auto& sec : bundle.sections) {
        out << "\n[GUIDANCE " << sec.id << "]\n" << sec.guidance << "\n";
        if (!sec.violation.empty())
            out << "[VIOLATION EXAMPLE]\n" << sec.violation << "\n";
        if (!sec.repaired.empty())
            out << "[REPAIRED EXAMPLE]\n" << sec.repaired << "\n";
    }
    out << "\n[COMPILER LOG]\n" << bundle.error_log << "\n";
    out << "\n[PROGRAM]\n```c\n" << bundle.program << "\n```\n";
    return out.str();
}

PromptSection section_from_template(const rag::RepairTemplate& t, double score) {
    PromptSection s;
    s.id = t.id;
    s.guidance = t.guidance;
    s.violation = t.violation_example;
    s.repaired = t.repaired_example;
    s.score = score;
    return s;
}

PromptSection section_from_strategy(const rag::StrategyEntry& st, double score) {
    PromptSection s;
    s.id = st.id;
    s.guidance = st.name + ": " + st.concept_text + "\nParameters: " + st.parameters;
    s.repaired = st.example;
    s.score = score;
    return s;
}

PromptBundle build_prompt(Stage stage, const cfront::SourceUnit& unit,
                          const std::string& log, std::vector<PromptSection> sections,
                          size_t context_budget_tokens) {
    PromptBundle bundle;
    bundle.stage = stage;
    bundle.preamble = default_preamble(stage);
    bundle.error_log = log;
    bundle.sections = std::move(sections);
    bundle.program = unit.bytes;

    // Keep highest-scored sections; drop from the bottom until it fits.
    std::stable_sort(bundle.sections.begin(), bundle.sections.end(),
                     [](const PromptSection& a, const PromptSection& b) {
                         return a.score > b.score;
                     });
    while (count_tokens(serialize(bundle)) > context_budget_tokens) {
        if (bundle.sections.empty())
            throw PromptTooLarge("prompt exceeds context budget of " +
                                 std::to_string(context_budget_tokens) + " tokens");
        bundle.sections.pop_back();
    }
    return bundle;
}

std::string extract_program(const std::string& response) {
    // Collect every ``` fenced block (language tag optional).
    std::vector<std::string> blocks;
    size_t pos = 0;
    while (true) {
        size_t open = response.find("```", pos);
        if (open == std::string::npos) break;
        size_t body_start = response.find('\n', open);
        if (body_start == std::string::npos) break;
        ++body_start;
        size_t close = response.find("```", body_start);
        if (close == std::string::npos) break;
        std::string body = response.substr(body_start, close - body_start);
        while (!body.empty() && (body.back() == '\n' || body.back() == '\r'))
            body.pop_back();
        blocks.push_back(body);
        pos = close + 3;
    }
    const std::string* best = nullptr;
    for (const auto& b : blocks) {
        cfront::SourceUnit u = cfront::SourceUnit::from_bytes("candidate.c", b);
        if (!u.parsed_ok()) continue;
        if (!best || b.size() > best->size()) best = &b;
    }
    if (!best)
        throw ExtractError(blocks.empty() ? "response contains no fenced code block"
                                          : "no fenced code block parses");
    return *best;
}

// ---------------------------------------------------------------------------
// Pricing
// ---------------------------------------------------------------------------

Money Pricing::parse_decimal(const std::string& text) {
    std::string s = text;
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s = s.substr(1);
    }
    size_t dot = s.find('.');
    std::string whole = dot == std::string::npos ? s : s.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    long long num = std::stoll(whole);
    long long den = 1;
    for (char c : frac) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("bad decimal: " + text);
        num = num * 10 + (c - '0');
        den *= 10;
    }
    Money m(num, den);
    return neg ? -m : m;
}

std::string money_to_string(const Money& m, int max_places) {
    long long whole = m.numerator() / m.denominator();
    Money frac = m - Money(whole);
    if (frac < Money(0)) frac = -frac;
    std::string out = (m < Money(0) && whole == 0 ? "-" : "") + std::to_string(whole);
    out += '.';
    for (int i = 0; i < max_places; ++i) {
        frac *= 10;
        long long digit = frac.numerator() / frac.denominator();
        out += static_cast<char>('0' + digit);
        frac -= Money(digit);
    }
    // Trim to at least two decimal places.
    while (out.size() > 1 && out.back() == '0' &&
           out[out.size() - 2] != '.' && out.find('.') + 3 <= out.size() - 1)
        out.pop_back();
    return out;
}

void CostLedger::append(LlmExchange exchange) {
    std::lock_guard<std::mutex> lock(mu_);
    exchanges_.push_back(std::move(exchange));
}

Money CostLedger::cost() const {
    std::lock_guard<std::mutex> lock(mu_);
    Money total(0);
    for (const auto& e : exchanges_) {
        total += Money(e.input_tokens, 1000) * pricing_.per_1k_input;
        total += Money(e.output_tokens, 1000) * pricing_.per_1k_output;
    }
    return total;
}

long long CostLedger::total_input_tokens() const {
    std::lock_guard<std::mutex> lock(mu_);
    long long t = 0;
    for (const auto& e : exchanges_) t += e.input_tokens;
    return t;
}

long long CostLedger::total_output_tokens() const {
    std::lock_guard<std::mutex> lock(mu_);
    long long t = 0;
    for (const auto& e : exchanges_) t += e.output_tokens;
    return t;
}

LlmExchange LlmClient::complete(const PromptBundle& bundle) {
    LlmExchange ex = backend_->complete(bundle);
    {
        std::lock_guard<std::mutex> lock(mu_);
        ex.sequence = next_sequence_++;
    }
    ledger_.append(ex);
    return ex;
}

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

namespace {

LlmExchange make_exchange(const PromptBundle& bundle, const std::string& serialized,
                          std::string response, const std::string& backend_id) {
    LlmExchange ex;
    ex.stage = bundle.stage;
    ex.prompt_hash = hash::sha256_hex(serialized);
    ex.response = std::move(response);
    ex.input_tokens = static_cast<long long>(count_tokens(serialized));
    ex.output_tokens = static_cast<long long>(count_tokens(ex.response));
    ex.backend_id = backend_id;
    return ex;
}

class OracleBackend : public Backend {
public:
    explicit OracleBackend(std::optional<std::string> golden)
        : golden_(std::move(golden)) {}

    LlmExchange complete(const PromptBundle& bundle) override {
        std::string serialized = serialize(bundle);
        std::string response;
        switch (bundle.stage) {
            case Stage::DetectExtra:
                response = "No additional findings.";
                break;
            case Stage::Repair: {
                std::string program =
                    golden_ ? *golden_ : scripted_repair(bundle.program);
                response = "Repaired program:\n```c\n" + program + "\n```";
                break;
            }
            case Stage::BitwidthScript:
            case Stage::PpaOpt:
                response = "```c\n" + bundle.program + "\n```";
                break;
        }
        return make_exchange(bundle, serialized, std::move(response), id());
    }

    std::string id() const override { return "oracle"; }

private:
    static std::string scripted_repair(const std::string& program) {
        cfront::SourceUnit unit = cfront::SourceUnit::from_bytes("prompt.c", program);
        if (!unit.parsed_ok()) return program;
        detect::CompileReport report = detect::check(unit);
        script::RewriteOutcome out = script::script_pass(unit, report, {});
        return out.unit.bytes;
    }

    std::optional<std::string> golden_;
};

struct CassetteEntry {
    std::string response;
    long long input_tokens = 0;
    long long output_tokens = 0;
    std::string backend_id;
};

class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::string& path) : path_(path) {
        std::ifstream in(path);
        if (!in)
            throw BackendError(BackendError::Kind::Transport,
                               "cassette not found: " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            CassetteEntry e;
            e.response = j.value("response", "");
            e.input_tokens = j.value("input_tokens", 0ll);
            e.output_tokens = j.value("output_tokens", 0ll);
            e.backend_id = j.value("backend", "");
            entries_[j.value("key", "")] = std::move(e);
        }
    }

    LlmExchange complete(const PromptBundle& bundle) override {
        std::string serialized = serialize(bundle);
        std::string key = hash::sha256_hex(serialized);
        auto it = entries_.find(key);
        if (it == entries_.end())
            throw BackendError(BackendError::Kind::UnrecordedPrompt,
                               "no cassette entry for prompt " + key, key);
        LlmExchange ex;
        ex.stage = bundle.stage;
        ex.prompt_hash = key;
        ex.response = it->second.response;
        ex.input_tokens = it->second.input_tokens;
        ex.output_tokens = it->second.output_tokens;
        ex.backend_id = id();
        return ex;
    }

    std::string id() const override { return "replay:" + path_; }

private:
    std::string path_;
    std::map<std::string, CassetteEntry> entries_;
};

class RecordBackend : public Backend {
public:
    RecordBackend(std::unique_ptr<Backend> inner, const std::string& path)
        : inner_(std::move(inner)), path_(path) {}

    LlmExchange complete(const PromptBundle& bundle) override {
        LlmExchange ex = inner_->complete(bundle);
        json j;
        j["key"] = ex.prompt_hash;
        j["stage"] = stage_name(ex.stage);
        j["response"] = ex.response;
        j["input_tokens"] = ex.input_tokens;
        j["output_tokens"] = ex.output_tokens;
        j["backend"] = ex.backend_id;
        std::lock_guard<std::mutex> lock(mu_);
        std::ofstream out(path_, std::ios::app);
        out << j.dump() << "\n";
        return ex;
    }

    std::string id() const override { return "record(" + inner_->id() + ")"; }

private:
    std::unique_ptr<Backend> inner_;
    std::string path_;
    std::mutex mu_;
};

class LiveBackend : public Backend {
public:
    explicit LiveBackend(LiveConfig cfg) : cfg_(std::move(cfg)) {}

    LlmExchange complete(const PromptBundle& bundle) override {
        std::string serialized = serialize(bundle);
        json req;
        req["model"] = cfg_.model;
        req["messages"] = json::array();
        req["messages"].push_back({{"role", "system"}, {"content", bundle.preamble}});
        std::string user = serialized;
        req["messages"].push_back({{"role", "user"}, {"content", user}});

        httplib::Headers headers;
        if (!cfg_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + cfg_.api_key);

        std::string last_error;
        for (int attempt = 0; attempt < std::max(1, cfg_.max_retries); ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(200 * (1 << (attempt - 1))));
            auto start = std::chrono::steady_clock::now();
            httplib::Client client(cfg_.host, cfg_.port);
            client.set_read_timeout(120, 0);
            auto res = client.Post(cfg_.path.c_str(), headers, req.dump(),
                                   "application/json");
            if (!res) {
                last_error = "transport failure";
                continue;
            }
            if (res->status != 200) {
                last_error = "http status " + std::to_string(res->status);
                continue;
            }
            try {
                json body = json::parse(res->body);
                LlmExchange ex = make_exchange(
                    bundle, serialized,
                    body.at("choices").at(0).at("message").at("content")
                        .get<std::string>(),
                    id());
                if (body.contains("usage")) {
                    ex.provider_input_tokens =
                        body["usage"].value("prompt_tokens", 0ll);
                    ex.provider_output_tokens =
                        body["usage"].value("completion_tokens", 0ll);
                }
                ex.latency_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - start)
                                    .count();
                return ex;
            } catch (const json::exception& e) {
                throw BackendError(BackendError::Kind::MalformedResponse,
                                   std::string("malformed completion response: ") +
                                       e.what());
            }
        }
        throw BackendError(BackendError::Kind::Transport,
                           "completion failed after retries: " + last_error);
    }

    std::string id() const override { return "live:" + cfg_.model; }

private:
    LiveConfig cfg_;
};

}  // namespace

std::unique_ptr<Backend> make_live_backend(LiveConfig config) {
    return std::make_unique<LiveBackend>(std::move(config));
}

std::unique_ptr<Backend> make_record_backend(std::unique_ptr<Backend> inner,
                                             const std::string& cassette_path) {
    return std::make_unique<RecordBackend>(std::move(inner), cassette_path);
}

std::unique_ptr<Backend> make_replay_backend(const std::string& cassette_path) {
    return std::make_unique<ReplayBackend>(cassette_path);
}

std::unique_ptr<Backend> make_oracle_backend(std::optional<std::string> golden_source) {
    return std::make_unique<OracleBackend>(std::move(golden_source));
}

}  // namespace hlsrepair::llm
