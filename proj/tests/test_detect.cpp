#include <doctest.h>

#include "hlsrepair/detect.hpp"
#include "hlsrepair/pipeline.hpp"
#include "support.hpp"

using namespace hlsrepair;
using namespace hlsrepair::detect;
using testsupport::parse_ok;

namespace {

size_t count_class(const std::vector<Diagnostic>& diags, ErrorClass c) {
    size_t n = 0;
    for (const auto& d : diags)
        if (d.error_class == c) ++n;
    return n;
}

}  // namespace

TEST_CASE("T1: struct pointer fields and malloc-bound pointers are flagged") {
    auto u = parse_ok(
        "struct TreeNode { struct TreeNode *left; struct TreeNode *right; int v; };\n"
        "int use(struct TreeNode *n) { return n->v; }\n");
    auto diags = detect_pointer(u);
    CHECK(count_class(diags, ErrorClass::T1_Pointer) >= 3);  // left, right, param n
}

TEST_CASE("T1: array-bound single-binding pointer is statically analyzable") {
    auto u = parse_ok("int f(int i){ int a[8]; int *p = a; p[i] = 0; return p[0]; }");
    CHECK(detect_pointer(u).empty());
}

TEST_CASE("T1: double indirection is never analyzable") {
    auto u = parse_ok("int f(){ int a[4]; int *p = a; int **pp = &p; return (*pp)[0]; }");
    auto diags = detect_pointer(u);
    bool saw_double = false;
    for (const auto& d : diags)
        if (d.message.find("double pointer 'pp'") != std::string::npos) saw_double = true;
    CHECK(saw_double);
}

TEST_CASE("T1: pointer arithmetic after an array binding is flagged") {
    auto u = parse_ok("int f(int i){ int a[8]; int *p = a; p = p + 1; return p[i]; }");
    auto diags = detect_pointer(u);
    CHECK(count_class(diags, ErrorClass::T1_Pointer) >= 1);
}

TEST_CASE("T2: allocation calls and variable-length arrays") {
    auto u1 = parse_ok("void f(int *p){ free(p); }");
    CHECK(count_class(detect_dynamic(u1), ErrorClass::T2_DynamicArray) == 1);
    auto u2 = parse_ok("int f(int n){ int a[n]; return a[0]; }");
    CHECK(count_class(detect_dynamic(u2), ErrorClass::T2_DynamicArray) == 1);
    auto u3 = parse_ok("int f(){ int a[10]; return a[0]; }");
    CHECK(detect_dynamic(u3).empty());
}

TEST_CASE("T3: self recursion names the function and the call line") {
    auto u = parse_ok("int fib(int n){ if (n < 2) return n;\n    return fib(n-1) + fib(n-2); }");
    auto diags = detect_recursion(u);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message.find("function 'fib' calls itself") != std::string::npos);
    CHECK(diags[0].span.line == 2);
}

TEST_CASE("T3: mutual recursion is reported on every cycle member") {
    auto u = parse_ok(
        "int g(int n);\n"
        "int f(int n){ return n <= 0 ? 0 : g(n - 1); }\n"
        "int g(int n){ return n <= 0 ? 1 : f(n - 1); }\n");
    auto diags = detect_recursion(u);
    REQUIRE(diags.size() == 2);
    // Cycle naming agrees with an oracle enumeration of the 2-cycle.
    CHECK(diags[0].message.find("recursion cycle f -> g -> f") != std::string::npos);
    CHECK(diags[1].message.find("recursion cycle g -> f -> g") != std::string::npos);
}

TEST_CASE("T3: acyclic call chains are silent") {
    auto u = parse_ok(
        "int h(int n){ return n + 1; }\n"
        "int g(int n){ return h(n) * 2; }\n"
        "int f(int n){ return g(n) + h(n); }\n");
    CHECK(detect_recursion(u).empty());
}

TEST_CASE("T4: advisory on a 9-bit value in a 32-bit declaration") {
    auto u = parse_ok(
        "int f(){ unsigned int m = 0u; int i; for (i = 0; i < 482; i++) { m = i; } return (int)m; }");
    auto prof = interp::profile(u, "f", {interp::ExecEnv{}});
    auto diags = detect_bitwidth(u, prof);
    bool saw_m = false;
    for (const auto& d : diags) {
        CHECK(d.severity == Severity::Advisory);
        if (d.message.find("'m'") != std::string::npos &&
            d.message.find("needs only 9 bits") != std::string::npos)
            saw_m = true;
    }
    CHECK(saw_m);
}

TEST_CASE("T4: a range filling the declared width is silent; constants need one bit") {
    auto u = parse_ok(
        "int f(){ unsigned int w = 0u; w = w - 1u; int z = 0; return (int)w + z; }");
    auto prof = interp::profile(u, "f", {interp::ExecEnv{}});
    auto diags = detect_bitwidth(u, prof);
    for (const auto& d : diags) CHECK(d.message.find("'w'") == std::string::npos);
    bool saw_z = false;
    for (const auto& d : diags)
        if (d.message.find("'z'") != std::string::npos &&
            d.message.find("needs only 1 bits") != std::string::npos)
            saw_z = true;
    CHECK(saw_z);
}

TEST_CASE("T5: boolean increment and compound assignment") {
    auto u = parse_ok("int f(int x){ bool b = false; b += 1; b++; int c = 0; c++; return b ? c : x; }");
    auto diags = detect_boolean(u);
    REQUIRE(diags.size() == 2);
    CHECK(diags[0].message.find("'+='") != std::string::npos);
    CHECK(diags[1].message.find("'++'") != std::string::npos);
}

TEST_CASE("T6: switch coverage over small domains") {
    // ac_uint<2> fully covered: silent.
    auto full = parse_ok(
        "int f(int x){ ac_uint<2> m; m = x; switch (m) { case 0: return 1; case 1: return 2; "
        "case 2: return 3; case 3: return 4; } return 0; }");
    CHECK(detect_incomplete(full).empty());
    // Same selector, half covered, no default: flagged.
    auto part = parse_ok(
        "int f(int x){ ac_uint<2> m; m = x; switch (m) { case 0: return 1; case 1: return 2; } return 0; }");
    CHECK(count_class(detect_incomplete(part), ErrorClass::T6_IncompleteStatement) == 1);
    // Any switch with a default arm: silent.
    auto dflt = parse_ok(
        "int f(int x){ switch (x) { case 0: return 1; default: return 2; } }");
    CHECK(detect_incomplete(dflt).empty());
}

TEST_CASE("T6: enum coverage counts enumerators") {
    auto covered = parse_ok(
        "enum Dir { L, R };\n"
        "int f(int s){ enum Dir d = (enum Dir)s; switch (d) { case L: return 0; case R: return 1; } return 2; }");
    CHECK(detect_incomplete(covered).empty());
    auto missing = parse_ok(
        "enum Dir { L, R, N };\n"
        "int f(int s){ enum Dir d = (enum Dir)s; switch (d) { case L: return 0; case R: return 1; } return 2; }");
    CHECK(count_class(detect_incomplete(missing), ErrorClass::T6_IncompleteStatement) == 1);
}

TEST_CASE("T7: virtual members, function pointers, foreign constructs") {
    auto v = hlsrepair::cfront::SourceUnit::from_bytes(
        "t.c", "struct S { int a; virtual int get(); };\nint f(){ return 0; }\n");
    CHECK(count_class(detect_unsupported(v), ErrorClass::T7_UnsupportedStruct) >= 1);

    auto fp = parse_ok("int g(int x){ return x; }\nint f(){ int (*fp)(int) = g; return fp(1); }");
    auto diags = detect_unsupported(fp);
    bool named = false;
    for (const auto& d : diags)
        if (d.message.find("function pointer 'fp'") != std::string::npos) named = true;
    CHECK(named);

    auto plain = parse_ok("struct S { int a; int b; };\nint f(){ struct S s; s.a = 1; return s.a; }");
    CHECK(detect_unsupported(plain).empty());
}

TEST_CASE("T8: static out-of-bounds and illegal shifts") {
    auto oob = parse_ok("int f(){ int a[10]; a[0] = 1; return a[10]; }");
    auto d1 = detect_exception(oob, nullptr, "");
    REQUIRE(count_class(d1, ErrorClass::T8_Exception) == 1);
    CHECK(d1[0].message.find("index 10 is out of bounds for array 'a' of size 10") !=
          std::string::npos);

    auto shf = parse_ok("int f(int x){ return x << 32; }");
    auto d2 = detect_exception(shf, nullptr, "");
    REQUIRE(count_class(d2, ErrorClass::T8_Exception) == 1);
    CHECK(d2[0].message.find("shift by 32") != std::string::npos);

    auto ok = parse_ok("int f(int x){ int a[10]; a[9] = x; return a[9] << 31; }");
    CHECK(detect_exception(ok, nullptr, "").empty());
}

TEST_CASE("T8: dynamic detection reports dataset traps and stays silent in bounds") {
    auto u = parse_ok("int f(int n){ int a[8]; a[n] = 1; return a[n]; }");
    std::vector<interp::ExecEnv> good, mixed;
    for (int i = 0; i < 8; ++i) {
        interp::ExecEnv e;
        e.args["n"] = i;
        good.push_back(e);
        mixed.push_back(e);
    }
    interp::ExecEnv bad;
    bad.args["n"] = 12;
    mixed.push_back(bad);
    CHECK(detect_exception(u, &good, "f").empty());
    auto diags = detect_exception(u, &mixed, "f");
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message.find("runtime trap out-of-bounds") != std::string::npos);
}

TEST_CASE("check aggregates in source order with a deterministic log") {
    auto u = parse_ok(
        "int fib(int n){ if (n < 2) return n; return fib(n-1) + fib(n-2); }\n"
        "int f(){ bool b = false; b++; return b ? fib(5) : 0; }\n");
    auto r1 = check(u);
    auto r2 = check(u);
    CHECK(r1.log == r2.log);
    CHECK_FALSE(r1.pass);
    REQUIRE(r1.diagnostics.size() == 2);
    CHECK(r1.diagnostics[0].error_class == ErrorClass::T3_Recursion);
    CHECK(r1.diagnostics[1].error_class == ErrorClass::T5_BooleanOp);
    CHECK(r1.diagnostics[0].span.begin < r1.diagnostics[1].span.begin);
}

TEST_CASE("parse failures short-circuit to FAIL with a syntax diagnostic") {
    auto u = hlsrepair::cfront::SourceUnit::from_bytes("t.c", "int f() {");
    auto r = check(u);
    CHECK_FALSE(r.pass);
    CHECK(r.has_class(ErrorClass::Syntax));
}

TEST_CASE("detector independence: removing a construct removes exactly its diagnostics") {
    std::string with_bool =
        "int fib(int n){ if (n < 2) return n; return fib(n-1) + fib(n-2); }\n"
        "int f(){ bool b = false; b++; return b ? fib(5) : 0; }\n";
    std::string without_bool =
        "int fib(int n){ if (n < 2) return n; return fib(n-1) + fib(n-2); }\n"
        "int f(){ int b = 0; b++; return b ? fib(5) : 0; }\n";
    auto r1 = check(parse_ok(with_bool));
    auto r2 = check(parse_ok(without_bool));
    CHECK(count_class(r1.diagnostics, ErrorClass::T5_BooleanOp) == 1);
    CHECK(count_class(r2.diagnostics, ErrorClass::T5_BooleanOp) == 0);
    CHECK(count_class(r1.diagnostics, ErrorClass::T3_Recursion) ==
          count_class(r2.diagnostics, ErrorClass::T3_Recursion));
}

TEST_CASE("corpus soundness: every seeded class is detected; goldens are clean") {
    auto manifest = pipeline::load_manifest(testsupport::corpus_manifest());
    for (const auto& spec : manifest) {
        auto src = cfront::SourceUnit::from_file(spec.file);
        std::optional<interp::RangeProfile> prof;
        bool wants_t4 = false;
        for (const auto& c : spec.expected_classes)
            if (c == "T4") wants_t4 = true;
        if (wants_t4) {
            auto ds = interp::load_dataset(spec.dataset);
            prof = interp::profile(src, spec.entry, testsupport::head(ds, 50));
        }
        auto report = check(src, prof ? &*prof : nullptr);
        for (const auto& cls : spec.expected_classes) {
            auto c = class_from_code(cls);
            REQUIRE(c);
            CHECK_MESSAGE(report.has_class(*c), spec.id << " missing " << cls);
        }
        auto golden = cfront::SourceUnit::from_file(spec.golden);
        auto grep = check(golden);
        CHECK_MESSAGE(grep.error_count() == 0, spec.id << " golden: " << grep.log);
    }
}

TEST_CASE("compile report serializes to json") {
    auto u = parse_ok("int f(){ bool b = false; b++; return b ? 1 : 0; }");
    auto r = check(u);
    std::string j = r.to_json();
    CHECK(j.find("\"verdict\": \"FAIL\"") != std::string::npos);
    CHECK(j.find("T5") != std::string::npos);
}

TEST_CASE("external command hook substitutes the checker") {
    auto u = parse_ok("int f(){ return 0; }");
    auto pass = check_external(u, "sh -c 'echo all clear; exit 0' --");
    CHECK(pass.pass);
    CHECK(pass.log.find("all clear") != std::string::npos);
    auto fail = check_external(u, "sh -c 'echo ERROR somewhere; exit 1' --");
    CHECK_FALSE(fail.pass);
}
