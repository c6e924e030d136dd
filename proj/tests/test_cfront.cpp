#include <doctest.h>

#include <filesystem>
#include <functional>

#include "hlsrepair/pipeline.hpp"
#include "hlsrepair/source_unit.hpp"
#include "support.hpp"

using namespace hlsrepair::cfront;
namespace fs = std::filesystem;

TEST_CASE("lex basic tokens") {
    auto res = lex("int x;");
    auto& ts = std::get<TokenStream>(res);
    REQUIRE(ts.tokens.size() == 4);  // int, x, ;, eof
    CHECK(ts.tokens[0].is_keyword("int"));
    CHECK(ts.tokens[1].kind == TokenKind::Identifier);
    CHECK(ts.tokens[1].text == "x");
    CHECK(ts.tokens[2].is_punct(";"));
}

TEST_CASE("lex empty input") {
    auto res = lex("");
    auto& ts = std::get<TokenStream>(res);
    REQUIRE(ts.tokens.size() == 1);
    CHECK(ts.tokens[0].kind == TokenKind::Eof);
}

TEST_CASE("lex unterminated comment carries the span") {
    auto res = lex("/* open");
    auto* err = std::get_if<LexError>(&res);
    REQUIRE(err);
    CHECK(err->span.begin == 0);
    CHECK(err->span.end == 7);
    CHECK(err->message == "unterminated block comment");
}

TEST_CASE("lex reconstruction is byte exact") {
    std::string src = "  int  a = 1;\t// trailing\n/* block */ int b;\n";
    auto& ts = std::get<TokenStream>(lex(src));
    CHECK(ts.reconstruct() == src);
}

TEST_CASE("token spans are monotone and non-overlapping") {
    std::string src = "int f(int n) { return n + 41; }";
    auto& ts = std::get<TokenStream>(lex(src));
    uint32_t prev_end = 0;
    for (const Token& t : ts.tokens) {
        if (t.kind == TokenKind::Eof) break;
        CHECK(t.span.begin >= prev_end);
        CHECK(t.span.end >= t.span.begin);
        prev_end = t.span.end;
    }
}

TEST_CASE("parse a one-function unit") {
    auto u = testsupport::parse_ok("int f(){return 0;}");
    REQUIRE(u.ast->decls.size() == 1);
    const auto* fn = u.ast->function("f");
    REQUIRE(fn);
    REQUIRE(fn->body);
    REQUIRE(fn->body->stmts.size() == 1);
    CHECK(fn->body->stmts[0]->kind == StmtKind::Return);
}

TEST_CASE("parse reports unclosed block") {
    auto u = SourceUnit::from_bytes("t.c", "int f(){");
    CHECK(!u.parsed_ok());
    CHECK(!u.parse_errors.empty());
}

TEST_CASE("parse recovers at statement boundaries") {
    auto u = SourceUnit::from_bytes("t.c", "int f(){ int x = ; x = 1; return x; }");
    CHECK(!u.parse_errors.empty());
    const auto* fn = u.ast->function("f");
    REQUIRE(fn);
    CHECK(fn->body->stmts.size() >= 2);
}

TEST_CASE("BFS fixture parses with 139 source lines preserved") {
    auto u = SourceUnit::from_file(testsupport::corpus_file("src/09_breadth_first_search.c"));
    REQUIRE(u.parsed_ok());
    size_t lines = 0;
    for (char c : u.bytes)
        if (c == '\n') ++lines;
    CHECK(lines == 139);
    CHECK(print(u) == u.bytes);
}

TEST_CASE("print is byte identical for untouched units") {
    auto u = testsupport::parse_ok("int x;");
    CHECK(print(u) == "int x;");
}

TEST_CASE("lossless and structural round trip over the whole corpus") {
    auto manifest = hlsrepair::pipeline::load_manifest(testsupport::corpus_manifest());
    REQUIRE(manifest.size() == 24);
    for (const auto& spec : manifest) {
        for (const std::string& path : {spec.file, spec.golden}) {
            auto u = SourceUnit::from_file(path);
            REQUIRE_MESSAGE(u.parsed_ok(), path);
            CHECK_MESSAGE(print(u) == u.bytes, path);
            auto again = SourceUnit::from_bytes(path, print(u));
            CHECK_MESSAGE(dump_structure(*again.ast) == dump_structure(*u.ast), path);
        }
    }
}

TEST_CASE("edits replace only the touched declaration") {
    std::string src = "int a = 1;\nint b = 2;\nint c = 3;\n";
    auto u = testsupport::parse_ok(src);
    const auto& decl = *u.ast->decls[1];
    auto res = apply_edits(u, {TextEdit{decl.span, "short b = 2;", "test"}});
    auto& patched = std::get<SourceUnit>(res);
    CHECK(patched.bytes == "int a = 1;\nshort b = 2;\nint c = 3;\n");
    CHECK(patched.generation == u.generation + 1);
    CHECK(patched.bytes.substr(0, decl.span.begin) == src.substr(0, decl.span.begin));
}

TEST_CASE("overlapping edits are rejected") {
    auto u = testsupport::parse_ok("int a = 1;");
    Span s1{0, 5, 1, 1};
    Span s2{3, 8, 1, 4};
    auto res = apply_edits(u, {TextEdit{s1, "x", "one"}, TextEdit{s2, "y", "two"}});
    CHECK(std::holds_alternative<RewriteConflict>(res));
}

TEST_CASE("every node span lies within its parent span") {
    auto u = testsupport::parse_ok(
        "int f(int n) {\n"
        "    int s = 0;\n"
        "    for (int i = 0; i < n; i++) { s = s + i; }\n"
        "    if (s > 10) { s = 10; } else s = s - 1;\n"
        "    while (s > 0) s--;\n"
        "    return s;\n"
        "}\n");
    const auto* fn = u.ast->function("f");
    walk_stmts(*fn->body, [&](const Stmt& s) {
        CHECK(fn->span.contains(s.span));
        walk_stmts(s, [&](const Stmt& child) {
            CHECK(s.span.begin <= child.span.begin);
            CHECK(child.span.end <= s.span.end);
        });
    });
    walk_stmt_exprs(*fn->body, [&](const Expr& e) { CHECK(fn->span.contains(e.span)); });
}

TEST_CASE("foreign constructs are preserved losslessly") {
    std::string src = "template <typename T> T id(T x);\nint f() { return 1; }\n";
    auto u = SourceUnit::from_bytes("t.c", src);
    CHECK(u.parsed_ok());  // a known-foreign construct is not a parse error
    CHECK(print(u) == src);
    bool saw_foreign = false;
    for (const auto& d : u.ast->decls)
        if (d->kind == DeclKind::Foreign) saw_foreign = true;
    CHECK(saw_foreign);
}

TEST_CASE("includes and defines are recorded verbatim") {
    std::string src = "#include <stdio.h>\n#define CAP 32\nint a[CAP];\n";
    auto u = testsupport::parse_ok(src);
    CHECK(u.ast->define_consts.at("CAP") == 32);
    CHECK(print(u) == src);
}

TEST_CASE("pragma lines survive as statements") {
    std::string src =
        "int f(int n) {\n#pragma hls_unroll 4\n    for (int i = 0; i < n; i++) n--;\n"
        "    return n;\n}\n";
    auto u = testsupport::parse_ok(src);
    const auto* fn = u.ast->function("f");
    CHECK(fn->body->stmts[0]->kind == StmtKind::Pragma);
    CHECK(print(u) == src);
}

TEST_CASE("non-utf8 bytes pass through as latin-1") {
    std::string src = "// na\xefve comment\nint x;\n";
    auto u = SourceUnit::from_bytes("t.c", src);
    CHECK(u.parsed_ok());
    CHECK(print(u) == src);
}

TEST_CASE("ac_int types parse as primitive specifiers") {
    auto u = testsupport::parse_ok("ac_int<9, false> m; ac_uint<4> k;");
    const auto& v0 = static_cast<const VarDecl&>(*u.ast->decls[0]);
    CHECK(v0.type.base == TypeSpec::Base::AcInt);
    CHECK(v0.type.ac_width == 9);
    CHECK_FALSE(v0.type.ac_is_signed);
    const auto& v1 = static_cast<const VarDecl&>(*u.ast->decls[1]);
    CHECK(v1.type.ac_width == 4);
    CHECK_FALSE(v1.type.ac_is_signed);
}

TEST_CASE("stage tags only advance") {
    auto u = testsupport::parse_ok("int x;");
    auto u2 = u.with_stage(Stage::ScriptRepaired);
    CHECK(u2.stage == Stage::ScriptRepaired);
    CHECK_THROWS_AS(u2.with_stage(Stage::Original), std::logic_error);
}

TEST_CASE("identifier uses resolve or are flagged unresolved") {
    auto u = testsupport::parse_ok("int g;\nint f(int a) { int b = a + g; return b + phantom; }\n");
    int resolved = 0, unresolved = 0;
    const auto* fn = u.ast->function("f");
    walk_stmt_exprs(*fn->body, [&](const Expr& e) {
        if (e.kind != ExprKind::Ident) return;
        const auto& id = static_cast<const IdentExpr&>(e);
        (id.ref ? resolved : unresolved)++;
    });
    CHECK(resolved == 4);   // a, g, b, b
    CHECK(unresolved == 1); // phantom
}
