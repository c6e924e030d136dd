#include "hlsrepair/rag.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "hlsrepair/hash.hpp"
#include "hlsrepair/interp.hpp"

namespace hlsrepair::rag {

namespace fs = std::filesystem;
using nlohmann::json;

double Embedding::dot(const Embedding& other) const {
    double s = 0;
    size_t n = std::min(weights.size(), other.weights.size());
    for (size_t i = 0; i < n; ++i) s += weights[i] * other.weights[i];
    return s;
}

double Embedding::norm() const {
    double s = 0;
    for (double w : weights) s += w * w;
    return std::sqrt(s);
}

bool Embedding::is_zero() const {
    for (double w : weights)
        if (w != 0) return false;
    return true;
}

std::string normalize_query(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\'') {
            // 'identifier' -> placeholder
            size_t close = text.find('\'', i + 1);
            if (close != std::string::npos && close - i <= 80) {
                out += " idplaceholder ";
                i = close;
                continue;
            }
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i + 1 < text.size() &&
                   std::isdigit(static_cast<unsigned char>(text[i + 1])))
                ++i;
            out += " numplaceholder ";
            continue;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

namespace {

std::vector<std::string> terms_of(const std::string& normalized) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : normalized) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            cur += c;
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string template_doc(const RepairTemplate& t) {
    return normalize_query(t.message_pattern + " " + t.guidance);
}

std::string strategy_doc(const StrategyEntry& s) {
    return normalize_query(s.name + " " + s.concept_text + " " + s.parameters);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw LibraryError("cannot open " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::string lint_template(const RepairTemplate& t) {
    using cfront::SourceUnit;
    if (t.id.empty()) return "template id is empty";

    SourceUnit bad = SourceUnit::from_bytes(t.id + ".violation.c", t.violation_example);
    SourceUnit good = SourceUnit::from_bytes(t.id + ".repaired.c", t.repaired_example);
    if (!good.parsed_ok()) return "repaired_example does not parse";

    if (t.error_class == detect::ErrorClass::T4_BitWidth) {
        // Bit-width findings need a profile: run the first zero-parameter
        // function of each example over one empty environment.
        auto profile_of = [](const SourceUnit& u) -> std::optional<interp::RangeProfile> {
            for (const auto& d : u.ast->decls) {
                if (d->kind != cfront::DeclKind::Function) continue;
                const auto& fn = static_cast<const cfront::FunctionDecl&>(*d);
                if (!fn.body || !fn.params.empty()) continue;
                try {
                    return interp::profile(u, fn.name, {interp::ExecEnv{}});
                } catch (const interp::ProfileError&) {
                    return std::nullopt;
                }
            }
            return std::nullopt;
        };
        auto bad_prof = profile_of(bad);
        if (!bad_prof) return "violation_example has no runnable zero-argument entry";
        if (!detect::check(bad, &*bad_prof).has_class(t.error_class))
            return "violation_example does not produce a " +
                   std::string(detect::class_code(t.error_class)) + " finding";
        auto good_prof = profile_of(good);
        if (good_prof && detect::check(good, &*good_prof).has_class(t.error_class))
            return "repaired_example still produces a " +
                   std::string(detect::class_code(t.error_class)) + " finding";
        return {};
    }

    if (!detect::check(bad).has_class(t.error_class))
        return "violation_example does not produce a " +
               std::string(detect::class_code(t.error_class)) + " finding";
    if (detect::check(good).has_class(t.error_class))
        return "repaired_example still produces a " +
               std::string(detect::class_code(t.error_class)) + " finding";
    return {};
}

Retriever Retriever::from_templates(std::vector<RepairTemplate> templates) {
    Retriever r;
    for (const auto& t : templates) {
        std::string err = lint_template(t);
        if (!err.empty()) throw LibraryError("template '" + t.id + "': " + err);
    }
    r.templates_ = std::move(templates);
    std::sort(r.templates_.begin(), r.templates_.end(),
              [](const RepairTemplate& a, const RepairTemplate& b) { return a.id < b.id; });
    r.build_vocabulary();
    return r;
}

Retriever Retriever::load_library(const std::string& dir) {
    std::vector<RepairTemplate> templates;
    std::map<std::string, std::string> hashes;
    if (!fs::exists(dir)) throw LibraryError("library directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".json" &&
            entry.path().filename() != "manifest.json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        std::string bytes = read_file(p);
        json j;
        try {
            j = json::parse(bytes);
        } catch (const json::exception& e) {
            throw LibraryError(p.filename().string() + ": " + e.what());
        }
        RepairTemplate t;
        t.id = j.value("id", "");
        auto cls = detect::class_from_code(j.value("error_class", ""));
        if (!cls) throw LibraryError(p.filename().string() + ": unknown error_class");
        t.error_class = *cls;
        t.message_pattern = j.value("message_pattern", "");
        t.guidance = j.value("guidance", "");
        t.violation_example = j.value("violation_example", "");
        t.repaired_example = j.value("repaired_example", "");
        hashes[t.id] = hash::sha256_hex(bytes);
        templates.push_back(std::move(t));
    }
    // Verify the manifest when present.
    fs::path manifest = fs::path(dir) / "manifest.json";
    if (fs::exists(manifest)) {
        json m = json::parse(read_file(manifest));
        for (const auto& entry : m.value("templates", json::array())) {
            std::string id = entry.value("id", "");
            std::string expect = entry.value("sha256", "");
            auto it = hashes.find(id);
            if (it == hashes.end())
                throw LibraryError("manifest lists missing template '" + id + "'");
            if (!expect.empty() && it->second != expect)
                throw LibraryError("template '" + id + "' does not match manifest hash");
        }
    }
    return from_templates(std::move(templates));
}

void Retriever::add_strategy(StrategyEntry entry) {
    cfront::SourceUnit u = cfront::SourceUnit::from_bytes("strategy.c", entry.example);
    if (!u.parsed_ok())
        throw LibraryError("strategy '" + entry.id + "': example does not parse");
    strategies_.push_back(std::move(entry));
    std::sort(strategies_.begin(), strategies_.end(),
              [](const StrategyEntry& a, const StrategyEntry& b) { return a.id < b.id; });
    build_vocabulary();
}

void Retriever::load_strategies(const std::string& dir) {
    if (!fs::exists(dir)) throw LibraryError("strategy directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json" &&
            entry.path().filename() != "manifest.json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        json j = json::parse(read_file(p));
        StrategyEntry s;
        s.id = j.value("id", "");
        s.name = j.value("name", "");
        s.concept_text = j.value("concept", "");
        s.parameters = j.value("parameters", "");
        s.example = j.value("example", "");
        cfront::SourceUnit u = cfront::SourceUnit::from_bytes("strategy.c", s.example);
        if (!u.parsed_ok())
            throw LibraryError("strategy '" + s.id + "': example does not parse");
        strategies_.push_back(std::move(s));
    }
    std::sort(strategies_.begin(), strategies_.end(),
              [](const StrategyEntry& a, const StrategyEntry& b) { return a.id < b.id; });
    build_vocabulary();
}

void Retriever::set_embedding_backend(std::unique_ptr<EmbeddingBackend> backend) {
    backend_ = std::move(backend);
    build_vocabulary();
}

void Retriever::build_vocabulary() {
    vocab_.clear();
    idf_.clear();
    template_vecs_.clear();
    strategy_vecs_.clear();

    std::vector<std::string> docs;
    for (const auto& t : templates_) docs.push_back(template_doc(t));
    for (const auto& s : strategies_) docs.push_back(strategy_doc(s));

    if (backend_) {
        std::vector<Embedding> vecs = backend_->embed(docs);
        for (size_t i = 0; i < templates_.size(); ++i) template_vecs_.push_back(vecs[i]);
        for (size_t i = 0; i < strategies_.size(); ++i)
            strategy_vecs_.push_back(vecs[templates_.size() + i]);
        return;
    }

    // Corpus-local TF-IDF.
    std::vector<std::map<std::string, int>> tf(docs.size());
    std::map<std::string, int> df;
    for (size_t i = 0; i < docs.size(); ++i) {
        for (const auto& term : terms_of(docs[i])) ++tf[i][term];
        for (const auto& [term, n] : tf[i]) {
            (void)n;
            ++df[term];
        }
    }
    for (const auto& [term, n] : df) {
        (void)n;
        size_t idx = vocab_.size();
        vocab_[term] = idx;
    }
    idf_.assign(vocab_.size(), 0.0);
    double nd = static_cast<double>(docs.size());
    for (const auto& [term, n] : df)
        idf_[vocab_[term]] = std::log((1.0 + nd) / (1.0 + n)) + 1.0;

    auto vectorize = [&](const std::map<std::string, int>& counts) {
        Embedding e;
        e.weights.assign(vocab_.size(), 0.0);
        for (const auto& [term, n] : counts) {
            auto it = vocab_.find(term);
            if (it != vocab_.end()) e.weights[it->second] = n * idf_[it->second];
        }
        double nrm = e.norm();
        if (nrm > 0)
            for (double& w : e.weights) w /= nrm;
        return e;
    };
    for (size_t i = 0; i < templates_.size(); ++i) template_vecs_.push_back(vectorize(tf[i]));
    for (size_t i = 0; i < strategies_.size(); ++i)
        strategy_vecs_.push_back(vectorize(tf[templates_.size() + i]));
}

Embedding Retriever::embed_with_backend(const std::string& text) const {
    if (backend_) {
        auto vecs = backend_->embed({normalize_query(text)});
        Embedding e = vecs.empty() ? Embedding{} : vecs[0];
        double nrm = e.norm();
        if (nrm > 0)
            for (double& w : e.weights) w /= nrm;
        return e;
    }
    Embedding e;
    e.weights.assign(vocab_.size(), 0.0);
    std::map<std::string, int> counts;
    for (const auto& term : terms_of(normalize_query(text))) ++counts[term];
    for (const auto& [term, n] : counts) {
        auto it = vocab_.find(term);
        if (it != vocab_.end()) e.weights[it->second] = n * idf_[it->second];
    }
    double nrm = e.norm();
    if (nrm > 0)
        for (double& w : e.weights) w /= nrm;
    return e;
}

Embedding Retriever::embed(const std::string& text) const { return embed_with_backend(text); }

std::vector<std::pair<const RepairTemplate*, double>> Retriever::retrieve(
    const std::string& log, size_t k) const {
    if (templates_.empty()) throw RetrievalError("repair library is empty");
    if (k < 1) throw RetrievalError("retrieval requires k >= 1");
    Embedding q = embed(log);
    if (q.is_zero()) throw RetrievalError("query is empty after normalization");
    std::vector<std::pair<const RepairTemplate*, double>> scored;
    for (size_t i = 0; i < templates_.size(); ++i)
        scored.emplace_back(&templates_[i], q.dot(template_vecs_[i]));
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first->id < b.first->id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

std::vector<std::pair<const StrategyEntry*, double>> Retriever::retrieve_strategy(
    const std::string& bottleneck_report, size_t k) const {
    if (strategies_.empty()) throw RetrievalError("strategy library is empty");
    if (k < 1) throw RetrievalError("retrieval requires k >= 1");
    Embedding q = embed(bottleneck_report);
    if (q.is_zero()) throw RetrievalError("query is empty after normalization");
    std::vector<std::pair<const StrategyEntry*, double>> scored;
    for (size_t i = 0; i < strategies_.size(); ++i)
        scored.emplace_back(&strategies_[i], q.dot(strategy_vecs_[i]));
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first->id < b.first->id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

// ---------------------------------------------------------------------------
// HTTP embedding backend
// ---------------------------------------------------------------------------

namespace {

class HttpEmbeddingBackend : public EmbeddingBackend {
public:
    HttpEmbeddingBackend(std::string host, int port, std::string route)
        : host_(std::move(host)), port_(port), route_(std::move(route)) {}

    std::vector<Embedding> embed(const std::vector<std::string>& texts) override {
        httplib::Client client(host_, port_);
        json req;
        req["texts"] = texts;
        auto res = client.Post(route_.c_str(), req.dump(), "application/json");
        if (!res || res->status != 200)
            throw RetrievalError("embedding service unreachable or failed");
        json body = json::parse(res->body);
        std::vector<Embedding> out;
        for (const auto& vec : body.at("vectors")) {
            Embedding e;
            for (const auto& w : vec) e.weights.push_back(w.get<double>());
            out.push_back(std::move(e));
        }
        if (out.size() != texts.size())
            throw RetrievalError("embedding service returned wrong vector count");
        return out;
    }

    std::string id() const override {
        return "http:" + host_ + ":" + std::to_string(port_) + route_;
    }

private:
    std::string host_;
    int port_;
    std::string route_;
};

}  // namespace

std::unique_ptr<EmbeddingBackend> make_http_embedding_backend(const std::string& host,
                                                              int port,
                                                              const std::string& route) {
    return std::make_unique<HttpEmbeddingBackend>(host, port, route);
}

}  // namespace hlsrepair::rag
