#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsrepair/detect.hpp"

namespace hlsrepair::rag {

struct RepairTemplate {
    std::string id;
    detect::ErrorClass error_class{};
    std::string message_pattern;    // detector-log-shaped text
    std::string guidance;           // manual-style prose
    std::string violation_example;  // fails check() with error_class
    std::string repaired_example;   // clean of error_class
};

struct StrategyEntry {
    std::string id;
    std::string name;        // loop-unroll, memory-dual-port, ...
    std::string concept_text;  // brief concept description
    std::string parameters;  // parameter descriptions
    std::string example;     // optimization example code
};

struct LibraryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RetrievalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unit-norm (or zero) vector over the library's term vocabulary.
struct Embedding {
    std::vector<double> weights;

    double dot(const Embedding& other) const;
    double norm() const;
    bool is_zero() const;
};

/// Pluggable text-embedding backend. The default is corpus-local TF-IDF;
/// an HTTP backend with the same contract can be selected via config.
class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;
    virtual std::string id() const = 0;
};

/// POST {"texts": [...]} -> {"vectors": [[...]]} against a one-route
/// embedding service.
std::unique_ptr<EmbeddingBackend> make_http_embedding_backend(const std::string& host,
                                                              int port,
                                                              const std::string& route);

/// Query normalization used before embedding: lowercase, single-quoted
/// identifiers replaced by a placeholder token, numbers replaced by a
/// placeholder token.
std::string normalize_query(const std::string& text);

class Retriever {
public:
    /// Loads every *.json template under `dir` and lints it: the violation
    /// example must trip its own class, the repaired example must not.
    /// A manifest.json with content hashes, when present, is verified.
    static Retriever load_library(const std::string& dir);

    /// Builds from in-memory templates (testing convenience); runs the lint.
    static Retriever from_templates(std::vector<RepairTemplate> templates);

    void load_strategies(const std::string& dir);
    void add_strategy(StrategyEntry entry);

    /// Embeds text against the library vocabulary (TF-IDF by default).
    Embedding embed(const std::string& text) const;

    /// Top-k repair templates by cosine similarity, descending; ties break by
    /// template id. Throws RetrievalError on an empty library or a query
    /// that normalizes to nothing.
    std::vector<std::pair<const RepairTemplate*, double>> retrieve(
        const std::string& log, size_t k) const;

    std::vector<std::pair<const StrategyEntry*, double>> retrieve_strategy(
        const std::string& bottleneck_report, size_t k) const;

    const std::vector<RepairTemplate>& templates() const { return templates_; }
    const std::vector<StrategyEntry>& strategies() const { return strategies_; }

    void set_embedding_backend(std::unique_ptr<EmbeddingBackend> backend);

private:
    void build_vocabulary();
    Embedding embed_with_backend(const std::string& text) const;

    std::vector<RepairTemplate> templates_;
    std::vector<StrategyEntry> strategies_;
    std::map<std::string, size_t> vocab_;       // term -> index
    std::vector<double> idf_;
    std::vector<Embedding> template_vecs_;
    std::vector<Embedding> strategy_vecs_;
    std::unique_ptr<EmbeddingBackend> backend_;  // null = built-in TF-IDF
};

/// Lint helper shared by load and tests: returns an error message or empty.
std::string lint_template(const RepairTemplate& t);

}  // namespace hlsrepair::rag
