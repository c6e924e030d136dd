#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "hlsrepair/rag.hpp"
#include "support.hpp"

using namespace hlsrepair;
using namespace hlsrepair::rag;
namespace fs = std::filesystem;

namespace {

const Retriever& bundled() {
    static Retriever r = [] {
        Retriever lib = Retriever::load_library(testsupport::template_dir());
        lib.load_strategies(testsupport::strategy_dir());
        return lib;
    }();
    return r;
}

const char* kCanonical[8] = {
    "ERROR [POINTER]: pointer 'cur' in function 'tree_insert' is not statically analyzable at line 39",
    "ERROR [DYNAMIC_ARRAY]: call to 'malloc' allocates dynamic memory at line 27",
    "ERROR [RECURSION]: function 'BFS' calls itself at line 12",
    "ADVISORY [BIT_WIDTH]: variable 'm' at file scope is declared 32 bits but needs only 9 bits at line 19",
    "ERROR [BOOLEAN_OP]: operator '++' applied to boolean 'updated' at line 22",
    "ERROR [INCOMPLETE_STATEMENT]: switch on 'mode' does not cover all values of its type and has no default at line 17",
    "ERROR [UNSUPPORTED_STRUCT]: 'virtual' is not synthesizable at line 11",
    "ERROR [EXCEPTION]: shift by 32 exceeds the 32-bit operand width at line 14",
};
const char* kClassOf[8] = {"T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8"};

}  // namespace

TEST_CASE("bundled library loads with at least two templates per class") {
    const auto& r = bundled();
    CHECK(r.templates().size() >= 16);
    std::map<detect::ErrorClass, int> per_class;
    for (const auto& t : r.templates()) ++per_class[t.error_class];
    CHECK(per_class.size() == 8);
    for (const auto& [cls, n] : per_class) CHECK(n >= 2);
}

TEST_CASE("library lint rejects a template whose repair still violates") {
    RepairTemplate bad;
    bad.id = "t3_broken";
    bad.error_class = detect::ErrorClass::T3_Recursion;
    bad.message_pattern = "ERROR [RECURSION]: function 'f' calls itself at line 1";
    bad.guidance = "convert recursion to iteration";
    bad.violation_example = "int f(int n){ return n <= 1 ? 1 : n * f(n - 1); }";
    bad.repaired_example = "int f(int n){ return n <= 1 ? 1 : n * f(n - 1); }";
    CHECK_THROWS_AS(Retriever::from_templates({bad}), LibraryError);
}

TEST_CASE("an empty directory yields an empty library; retrieval then errors") {
    fs::path dir = fs::temp_directory_path() / "hlsrepair_empty_lib";
    fs::create_directories(dir);
    Retriever r = Retriever::load_library(dir.string());
    CHECK(r.templates().empty());
    CHECK_THROWS_AS(r.retrieve("ERROR [RECURSION]: anything", 1), RetrievalError);
}

TEST_CASE("manifest hash mismatch is a library error") {
    fs::path dir = fs::temp_directory_path() / "hlsrepair_badhash_lib";
    fs::create_directories(dir);
    for (const auto& e : fs::directory_iterator(dir)) fs::remove(e.path());
    fs::copy_file(fs::path(testsupport::template_dir()) / "t5_bool_increment.json",
                  dir / "t5_bool_increment.json");
    std::ofstream(dir / "manifest.json")
        << R"({"templates":[{"id":"t5_bool_increment","sha256":"0000"}]})";
    CHECK_THROWS_AS(Retriever::load_library(dir.string()), LibraryError);
}

TEST_CASE("embeddings are unit norm; the empty text embeds to zero") {
    const auto& r = bundled();
    auto e = r.embed("recursion error in function BFS");
    CHECK(std::abs(e.dot(e) - 1.0) < 1e-9);
    auto z = r.embed("");
    CHECK(z.is_zero());
}

TEST_CASE("hand-computed tf-idf cosine agrees on a two-template library") {
    RepairTemplate a;
    a.id = "a_recursion";
    a.error_class = detect::ErrorClass::T3_Recursion;
    a.message_pattern = "recursion recursion loop";
    a.guidance = "";
    a.violation_example = "int f(int n){ return n <= 0 ? 0 : f(n - 1); }";
    a.repaired_example = "int f(int n){ while (n > 0) n = n - 1; return 0; }";
    RepairTemplate b = a;
    b.id = "b_pointer";
    b.error_class = detect::ErrorClass::T1_Pointer;
    b.message_pattern = "pointer pointer loop";
    b.violation_example = "int g(int a[]){ int *p = a; return *p; }";
    b.repaired_example = "int g(int a[]){ return a[0]; }";
    Retriever r = Retriever::from_templates({a, b});

    // Doc a tokens: {recursion x2, loop}; doc b: {pointer x2, loop}.
    // idf(recursion) = idf(pointer) = ln(3/2)+1, idf(loop) = ln(3/3)+1 = 1.
    double idf_r = std::log(3.0 / 2.0) + 1.0;
    double idf_l = 1.0;
    double na = std::sqrt(4 * idf_r * idf_r + idf_l * idf_l);
    // Query "recursion": cosine with a = (2*idf_r)/na, with b = 0.
    double expect = 2 * idf_r / na;
    auto ranked = r.retrieve("recursion", 2);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].first->id == "a_recursion");
    CHECK(std::abs(ranked[0].second - expect) < 1e-9);
    CHECK(ranked[1].second == doctest::Approx(0.0));
}

TEST_CASE("top-1 class matches for all eight canonical detector logs") {
    const auto& r = bundled();
    for (int i = 0; i < 8; ++i) {
        auto ranked = r.retrieve(kCanonical[i], 1);
        REQUIRE(ranked.size() == 1);
        CHECK_MESSAGE(std::string(detect::class_code(ranked[0].first->error_class)) ==
                          kClassOf[i],
                      kCanonical[i]);
    }
}

TEST_CASE("top-1 class is stable under identifier and line mutations") {
    const auto& r = bundled();
    std::mt19937 rng(2024);
    auto mutate = [&](std::string s) {
        // Replace quoted identifiers with random names and renumber lines.
        std::string out;
        bool in_quote = false;
        for (size_t i = 0; i < s.size(); ++i) {
            char c = s[i];
            if (c == '\'') {
                in_quote = !in_quote;
                out += c;
                if (in_quote) {
                    int len = 3 + static_cast<int>(rng() % 8);
                    for (int k = 0; k < len; ++k)
                        out += static_cast<char>('a' + rng() % 26);
                    while (i + 1 < s.size() && s[i + 1] != '\'') ++i;
                }
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                while (i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))
                    ++i;
                out += std::to_string(rng() % 10000);
                continue;
            }
            out += c;
        }
        return out;
    };
    int hits = 0;
    for (int i = 0; i < 8; ++i) {
        for (int trial = 0; trial < 20; ++trial) {
            auto ranked = r.retrieve(mutate(kCanonical[i]), 1);
            if (std::string(detect::class_code(ranked[0].first->error_class)) == kClassOf[i])
                ++hits;
        }
    }
    CHECK(hits == 160);
}

TEST_CASE("two-class log retrieves one template of each class in the top 2") {
    const auto& r = bundled();
    std::string log =
        "ERROR [POINTER]: pointer 'n' in function 'make_node' is not statically analyzable at line 27\n"
        "ERROR [DYNAMIC_ARRAY]: call to 'malloc' allocates dynamic memory at line 27\n";
    auto ranked = r.retrieve(log, 2);
    REQUIRE(ranked.size() == 2);
    std::set<detect::ErrorClass> classes;
    for (auto& [tpl, score] : ranked) classes.insert(tpl->error_class);
    CHECK(classes.count(detect::ErrorClass::T1_Pointer));
    CHECK(classes.count(detect::ErrorClass::T2_DynamicArray));
}

TEST_CASE("k larger than the library returns everything, sorted descending") {
    const auto& r = bundled();
    auto ranked = r.retrieve(kCanonical[2], 1000);
    CHECK(ranked.size() == r.templates().size());
    for (size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].second >= ranked[i].second);
    for (auto& [tpl, score] : ranked) {
        CHECK(score >= -1e-12);
        CHECK(score <= 1.0 + 1e-12);
    }
}

TEST_CASE("retrieval is deterministic across repeated calls") {
    const auto& r = bundled();
    auto a = r.retrieve(kCanonical[0], 5);
    auto b = r.retrieve(kCanonical[0], 5);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first->id == b[i].first->id);
        CHECK(a[i].second == b[i].second);
    }
}

TEST_CASE("strategy retrieval matches the paper's two scenarios") {
    const auto& r = bundled();
    auto s1 = r.retrieve_strategy("loop at line 12 dominates latency", 1);
    CHECK(s1[0].first->id == "loop_unroll");
    auto s2 = r.retrieve_strategy("memory interface is the limiting factor", 1);
    CHECK(s2[0].first->id == "memory_dual_port");
    CHECK_THROWS_AS(r.retrieve_strategy("", 1), RetrievalError);
    CHECK_THROWS_AS(r.retrieve_strategy("12 34 56", 1), RetrievalError);
}

TEST_CASE("http embedding backend speaks the one-route contract") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body);
        nlohmann::json out;
        out["vectors"] = nlohmann::json::array();
        for (const auto& text : body.at("texts")) {
            // A fake but deterministic embedding: [len, vowels, 1].
            std::string s = text.get<std::string>();
            double vowels = 0;
            for (char c : s)
                if (std::string("aeiou").find(c) != std::string::npos) ++vowels;
            out["vectors"].push_back({static_cast<double>(s.size()), vowels, 1.0});
        }
        ++calls;
        res.set_content(out.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    while (!server.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(5));

    auto backend = make_http_embedding_backend("127.0.0.1", port, "/embed");
    auto vecs = backend->embed({"alpha", "bb"});
    REQUIRE(vecs.size() == 2);
    CHECK(vecs[0].weights[0] == 5.0);
    CHECK(vecs[0].weights[1] == 2.0);
    CHECK(calls.load() == 1);

    // Plugged into a retriever, the same contract drives retrieval.
    RepairTemplate a;
    a.id = "t_rec";
    a.error_class = detect::ErrorClass::T3_Recursion;
    a.message_pattern = "recursion";
    a.guidance = "";
    a.violation_example = "int f(int n){ return n <= 0 ? 0 : f(n - 1); }";
    a.repaired_example = "int f(int n){ while (n > 0) n = n - 1; return 0; }";
    Retriever r = Retriever::from_templates({a});
    r.set_embedding_backend(make_http_embedding_backend("127.0.0.1", port, "/embed"));
    auto ranked = r.retrieve("recursion problem", 1);
    CHECK(ranked.size() == 1);

    server.stop();
    worker.join();
}
