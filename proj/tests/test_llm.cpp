#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hlsrepair/llm.hpp"
#include "hlsrepair/script_repair.hpp"
#include "hlsrepair/tokenizer.hpp"
#include "support.hpp"

using namespace hlsrepair;
using namespace hlsrepair::llm;
namespace fs = std::filesystem;
using testsupport::parse_ok;

namespace {

PromptSection mk_section(const std::string& id, const std::string& guidance, double score) {
    PromptSection s;
    s.id = id;
    s.guidance = guidance;
    s.score = score;
    return s;
}

}  // namespace

TEST_CASE("prompt carries template guidance verbatim, sections in spec order") {
    auto u = parse_ok("int f(){ return 1; }");
    std::string guidance = "Convert the recursion into an explicit stack.";
    auto bundle = build_prompt(Stage::Repair, u, "ERROR [RECURSION]: ...",
                               {mk_section("t3", guidance, 0.9)});
    std::string text = serialize(bundle);
    CHECK(text.find(guidance) != std::string::npos);
    size_t at_system = text.find("[SYSTEM]");
    size_t at_guidance = text.find("[GUIDANCE");
    size_t at_log = text.find("[COMPILER LOG]");
    size_t at_program = text.find("[PROGRAM]");
    CHECK(at_system < at_guidance);
    CHECK(at_guidance < at_log);
    CHECK(at_log < at_program);
    // Exactly one fenced program section.
    size_t first_fence = text.find("```c");
    CHECK(first_fence != std::string::npos);
    CHECK(text.find("```c", first_fence + 1) == std::string::npos);
}

TEST_CASE("no-template prompt keeps an empty section block (baseline arm)") {
    auto u = parse_ok("int f(){ return 1; }");
    auto bundle = build_prompt(Stage::Repair, u, "log", {});
    CHECK(bundle.sections.empty());
    CHECK(serialize(bundle).find("[GUIDANCE") == std::string::npos);
}

TEST_CASE("oversized programs raise PromptTooLarge after dropping all sections") {
    std::string big = "int f(){ int x = 0;";
    for (int i = 0; i < 3000; ++i) big += " x = x + " + std::to_string(i) + ";";
    big += " return x; }";
    auto u = parse_ok(big);
    CHECK_THROWS_AS(build_prompt(Stage::Repair, u, "log",
                                 {mk_section("a", "text", 1.0)}, 200),
                    PromptTooLarge);
    // With a generous budget the low-scored section is dropped first.
    auto small = parse_ok("int f(){ return 1; }");
    std::string long_guidance(2000, 'g');
    auto bundle = build_prompt(Stage::Repair, small, "log",
                               {mk_section("keep", "short", 0.9),
                                mk_section("drop", long_guidance, 0.1)},
                               300);
    REQUIRE(bundle.sections.size() == 1);
    CHECK(bundle.sections[0].id == "keep");
}

TEST_CASE("extract_program: single block, multiple blocks, prose") {
    CHECK(extract_program("Sure.\n```c\nint f(){ return 1; }\n```\nDone.") ==
          "int f(){ return 1; }");
    // Two blocks: the first does not parse, the second does.
    std::string two =
        "```\nint f(){ return\n```\nand now\n```c\nint g(){ return 2; }\n```";
    CHECK(extract_program(two) == "int g(){ return 2; }");
    CHECK_THROWS_AS(extract_program("no code here"), ExtractError);
    CHECK_THROWS_AS(extract_program("```\nint broken(){\n```"), ExtractError);
}

TEST_CASE("tokenizer: concatenation is subadditive within one boundary token") {
    std::mt19937 rng(55);
    auto random_text = [&](size_t len) {
        static const char* alphabet =
            "abcdefghijklmnop   {}();=+-*/<>!&|^~%#\n\t0123456789_";
        std::string s;
        for (size_t i = 0; i < len; ++i) s += alphabet[rng() % 52];
        return s;
    };
    for (int trial = 0; trial < 300; ++trial) {
        std::string a = random_text(rng() % 60);
        std::string b = random_text(rng() % 60);
        size_t whole = count_tokens(a + b);
        size_t parts = count_tokens(a) + count_tokens(b);
        CHECK(whole <= parts + 1);
    }
    CHECK(count_tokens("") == 0);
    CHECK(count_tokens("    \n\t") == 0);
    CHECK(count_tokens("ab") == 1);
    CHECK(count_tokens("abcdefgh") == 2);  // ceil(8/4)
    CHECK(count_tokens("a+b") == 3);
}

TEST_CASE("cost arithmetic is exact at the configured rates") {
    CostLedger ledger;  // defaults: 0.01 / 1K in, 0.03 / 1K out
    CHECK(ledger.cost() == Money(0));
    LlmExchange e1;
    e1.input_tokens = 1000;
    e1.output_tokens = 1000;
    ledger.append(e1);
    CHECK(ledger.cost() == Money(4, 100));
    CHECK(money_to_string(ledger.cost()) == "0.04");

    CostLedger big;
    LlmExchange e2;
    e2.input_tokens = 12000;
    e2.output_tokens = 3000;
    big.append(e2);
    CHECK(big.cost() == Money(21, 100));
    CHECK(money_to_string(big.cost()) == "0.21");
}

TEST_CASE("ledger cost is additive") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        LlmExchange a, b;
        a.input_tokens = rng() % 50000;
        a.output_tokens = rng() % 50000;
        b.input_tokens = rng() % 50000;
        b.output_tokens = rng() % 50000;
        CostLedger la, lb, lab;
        la.append(a);
        lb.append(b);
        lab.append(a);
        lab.append(b);
        CHECK(lab.cost() == la.cost() + lb.cost());
    }
}

TEST_CASE("decimal price strings parse exactly") {
    CHECK(Pricing::parse_decimal("0.01") == Money(1, 100));
    CHECK(Pricing::parse_decimal("0.03") == Money(3, 100));
    CHECK(Pricing::parse_decimal("2") == Money(2));
    CHECK(Pricing::parse_decimal("1.5") == Money(3, 2));
}

TEST_CASE("oracle backend answers a boolean-repair task with the scripted repair") {
    std::string program = "int f(int x){ bool b = false; b += x; return b ? 1 : 0; }";
    auto u = parse_ok(program);
    auto bundle = build_prompt(Stage::Repair, u, "ERROR [BOOLEAN_OP]: ...", {});
    auto backend = make_oracle_backend(std::nullopt);
    auto ex = backend->complete(bundle);
    std::string extracted = extract_program(ex.response);
    // Same text the script pass produces.
    auto scripted = script::script_pass(u, detect::check(u), {});
    CHECK(extracted == scripted.unit.bytes);
}

TEST_CASE("replay backend returns recorded responses and errors on misses") {
    fs::path cassette = fs::temp_directory_path() / "hlsrepair_test_cassette.jsonl";
    fs::remove(cassette);

    auto u = parse_ok("int f(){ return 3; }");
    auto bundle = build_prompt(Stage::Repair, u, "log", {});

    {
        auto recorder = make_record_backend(make_oracle_backend("int f(){ return 4; }"),
                                            cassette.string());
        auto ex = recorder->complete(bundle);
        CHECK(ex.response.find("int f(){ return 4; }") != std::string::npos);
    }
    auto replay = make_replay_backend(cassette.string());
    auto hit = replay->complete(bundle);
    CHECK(extract_program(hit.response) == "int f(){ return 4; }");
    CHECK(hit.input_tokens > 0);

    auto miss_bundle = build_prompt(Stage::Repair, u, "different log", {});
    try {
        replay->complete(miss_bundle);
        FAIL("expected UnrecordedPrompt");
    } catch (const BackendError& e) {
        CHECK(e.kind == BackendError::Kind::UnrecordedPrompt);
        CHECK(e.prompt_hash.size() == 64);
    }
}

TEST_CASE("record then replay reproduce identical exchanges") {
    fs::path cassette = fs::temp_directory_path() / "hlsrepair_fidelity_cassette.jsonl";
    fs::remove(cassette);
    auto u = parse_ok("int f(int n){ bool b = false; b += n; return b ? 1 : 0; }");
    auto bundle = build_prompt(Stage::Repair, u, "ERROR [BOOLEAN_OP]", {});

    LlmClient rec_client(std::shared_ptr<Backend>(
        make_record_backend(make_oracle_backend(std::nullopt), cassette.string())));
    auto first = rec_client.complete(bundle);

    LlmClient replay_client(std::shared_ptr<Backend>(make_replay_backend(cassette.string())));
    auto second = replay_client.complete(bundle);

    CHECK(first.response == second.response);
    CHECK(first.input_tokens == second.input_tokens);
    CHECK(first.output_tokens == second.output_tokens);
    CHECK(first.prompt_hash == second.prompt_hash);
    CHECK(rec_client.ledger().cost() == replay_client.ledger().cost());
}

TEST_CASE("client assigns sequence numbers and accumulates the ledger") {
    auto u = parse_ok("int f(){ return 1; }");
    LlmClient client(std::shared_ptr<Backend>(make_oracle_backend("int f(){ return 2; }")));
    auto a = client.complete(build_prompt(Stage::Repair, u, "one", {}));
    auto b = client.complete(build_prompt(Stage::Repair, u, "two", {}));
    CHECK(a.sequence == 0);
    CHECK(b.sequence == 1);
    CHECK(client.ledger().exchanges().size() == 2);
    CHECK(client.ledger().total_input_tokens() ==
          a.input_tokens + b.input_tokens);
}
