#include <doctest.h>

#include <random>

#include "hlsrepair/interp.hpp"
#include "hlsrepair/pipeline.hpp"
#include "support.hpp"

using namespace hlsrepair;
using namespace hlsrepair::interp;
using testsupport::parse_ok;

TEST_CASE("run returns 42 for n+1") {
    auto u = parse_ok("int f(int n){return n+1;}");
    ExecEnv env;
    env.args["n"] = 41;
    auto r = run(u, "f", env);
    REQUIRE(r.ok());
    CHECK(r.obs.return_kind == ReturnKind::Int);
    CHECK(r.obs.return_value == 42);
}

TEST_CASE("out-of-bounds access traps") {
    auto u = parse_ok("int g(){int a[10]; return a[10];}");
    auto r = run(u, "g", {});
    REQUIRE_FALSE(r.ok());
    CHECK(r.trap->kind == TrapKind::OutOfBounds);
}

TEST_CASE("trap kinds cover the exception model") {
    struct Case {
        const char* src;
        TrapKind kind;
    };
    const Case cases[] = {
        {"int f(){int x = 1; return x << 40;}", TrapKind::IllegalShift},
        {"int f(){int x = 1; return x << -1;}", TrapKind::IllegalShift},
        {"int f(){return f();}", TrapKind::StackOverflow},
        {"int f(){int s = 0; while (1) { s = s + 1; } return s;}", TrapKind::StepExhausted},
        {"int f(){int a[4]; free(a); return 0;}", TrapKind::FreeInvalid},
        {"int f(){int z = 0; return 5 / z;}", TrapKind::DivideByZero},
    };
    for (const auto& c : cases) {
        auto u = parse_ok(c.src);
        ExecEnv env;
        env.step_budget = 100000;
        env.max_call_depth = 64;
        auto r = run(u, "f", env);
        REQUIRE_FALSE(r.ok());
        CHECK_MESSAGE(r.trap->kind == c.kind, c.src);
    }
}

TEST_CASE("determinism: equal envs produce identical results") {
    auto u = cfront::SourceUnit::from_file(
        testsupport::corpus_file("src/09_breadth_first_search.c"));
    ExecEnv env;
    env.args["n"] = 33;
    env.args["seed"] = 977;
    env.arrays["out"] = std::vector<long long>(481, 0);
    auto a = run(u, "run_case", env);
    auto b = run(u, "run_case", env);
    REQUIRE(a.ok());
    CHECK(a.obs == b.obs);
    CHECK(a.steps_used == b.steps_used);
}

TEST_CASE("BFS fixture visit order matches an independent oracle") {
    // Independent oracle: rebuild the same BST in the test and walk it
    // preorder without the interpreter.
    auto u = cfront::SourceUnit::from_file(
        testsupport::corpus_file("src/09_breadth_first_search.c"));
    const int n = 15;
    const unsigned seed = 1234;

    unsigned lcg = seed;
    auto next = [&]() {
        lcg = lcg * 1103515245u + 12345u;
        return (lcg >> 16) & 0x7fff;
    };
    std::vector<int> left, right, val;
    int root = -1;
    auto insert = [&](int v) {
        left.push_back(-1);
        right.push_back(-1);
        val.push_back(v);
        int idx = static_cast<int>(val.size()) - 1;
        if (root < 0) {
            root = idx;
            return;
        }
        int cur = root;
        while (true) {
            if (v < val[cur]) {
                if (left[cur] < 0) {
                    left[cur] = idx;
                    return;
                }
                cur = left[cur];
            } else {
                if (right[cur] < 0) {
                    right[cur] = idx;
                    return;
                }
                cur = right[cur];
            }
        }
    };
    for (int i = 0; i < n; ++i) insert(static_cast<int>(next() % 1000u));
    std::vector<long long> expected;
    std::function<void(int)> visit = [&](int node) {
        if (node < 0) return;
        expected.push_back(val[node]);
        visit(left[node]);
        visit(right[node]);
    };
    visit(root);

    ExecEnv env;
    env.args["n"] = n;
    env.args["seed"] = seed;
    env.arrays["out"] = std::vector<long long>(481, 0);
    auto r = run(u, "run_case", env);
    REQUIRE(r.ok());
    CHECK(r.obs.return_value == n);
    for (int i = 0; i < n; ++i) CHECK(r.obs.arrays["out"][i] == expected[i]);
}

TEST_CASE("profile: constant assignment") {
    auto u = parse_ok("int f(){ int k = 7; return k; }");
    auto prof = profile(u, "f", {ExecEnv{}});
    const auto* k = prof.find("f", "k");
    REQUIRE(k);
    CHECK(k->min == 7);
    CHECK(k->max == 7);
    CHECK(k->count == 1);
}

TEST_CASE("profile: loop counter includes the failing test value") {
    auto u = parse_ok("int f(){ int i; int s = 0; for(i=0;i<10;i++) { s = s + 1; } return s; }");
    auto prof = profile(u, "f", {ExecEnv{}});
    const auto* i = prof.find("f", "i");
    REQUIRE(i);
    CHECK(i->min == 0);
    CHECK(i->max == 10);  // 11 assignments: 0..10, the last one fails the test
    CHECK(i->count == 11);
}

TEST_CASE("profile matches a brute-force external assignment log") {
    auto u = cfront::SourceUnit::from_file(
        testsupport::corpus_file("src/12_bubble_sort.c"));
    auto dataset = testsupport::head(
        load_dataset(testsupport::corpus_file("datasets/12_bubble_sort.jsonl")), 40);

    // External log via the assignment observer, folded independently.
    std::map<cfront::VarId, std::pair<long long, long long>> external;
    std::map<cfront::VarId, long long> counts;
    for (auto env : dataset) {
        env.on_assign = [&](const cfront::VarId& id, long long v) {
            auto it = external.find(id);
            if (it == external.end()) {
                external[id] = {v, v};
            } else {
                it->second.first = std::min(it->second.first, v);
                it->second.second = std::max(it->second.second, v);
            }
            ++counts[id];
        };
        auto r = run(u, "bubble_sort", env);
        REQUIRE(r.ok());
    }
    auto prof = profile(u, "bubble_sort", dataset);
    REQUIRE(prof.vars.size() == external.size());
    for (const auto& [id, st] : prof.vars) {
        CHECK(st.min == external.at(id).first);
        CHECK(st.max == external.at(id).second);
        CHECK(st.count == counts.at(id));
        long long hist_sum = 0;
        for (long long h : st.histogram) hist_sum += h;
        CHECK(hist_sum == st.count);
    }
}

TEST_CASE("profile raises when every row traps") {
    auto u = parse_ok("int f(int n){ int a[2]; return a[n]; }");
    ExecEnv bad;
    bad.args["n"] = 9;
    CHECK_THROWS_AS(profile(u, "f", {bad}), ProfileError);
    auto prof_ok = profile(u, "f", {[] {
        ExecEnv e;
        e.args["n"] = 1;
        return e;
    }()});
    CHECK(prof_ok.rows_ok == 1);
}

TEST_CASE("profile merge is associative on min and max") {
    auto u = parse_ok("int f(int x){ int v = x; return v; }");
    auto mk = [&](long long x) {
        ExecEnv e;
        e.args["x"] = x;
        return e;
    };
    auto p1 = profile(u, "f", {mk(5), mk(-3)});
    auto p2 = profile(u, "f", {mk(100)});
    auto merged = merge_profiles(p1, p2);
    const auto* v = merged.find("f", "v");
    REQUIRE(v);
    CHECK(v->min == -3);
    CHECK(v->max == 100);
    CHECK(v->count == 3);
    long long sum = 0;
    for (long long h : v->histogram) sum += h;
    CHECK(sum == 3);
}

TEST_CASE("equivalence is reflexive") {
    auto u = parse_ok("int f(int n){ return n * 3 - 1; }");
    std::vector<ExecEnv> ds;
    for (int i = -5; i < 5; ++i) {
        ExecEnv e;
        e.args["n"] = i;
        ds.push_back(e);
    }
    auto v = equivalent(u, u, "f", ds);
    CHECK(v.equivalent);
}

TEST_CASE("equivalence catches a changed constant at the first row") {
    auto a = parse_ok("int f(int n){ return n + 1; }");
    auto b = parse_ok("int f(int n){ return n + 2; }");
    std::vector<ExecEnv> ds;
    for (int i = 0; i < 4; ++i) {
        ExecEnv e;
        e.args["n"] = i;
        ds.push_back(e);
    }
    auto v = equivalent(a, b, "f", ds);
    REQUIRE_FALSE(v.equivalent);
    CHECK(v.counterexample->row == 0);
}

TEST_CASE("equivalence is symmetric and transitive on the tested set") {
    auto a = parse_ok("int f(int n){ return (n + 1) * 2; }");
    auto b = parse_ok("int f(int n){ return 2 * n + 2; }");
    auto c = parse_ok("int f(int n){ int t = n + 1; return t + t; }");
    std::vector<ExecEnv> ds;
    std::mt19937 rng(7);
    for (int i = 0; i < 25; ++i) {
        ExecEnv e;
        e.args["n"] = static_cast<int>(rng() % 2000) - 1000;
        ds.push_back(e);
    }
    auto ab = equivalent(a, b, "f", ds);
    auto ba = equivalent(b, a, "f", ds);
    auto bc = equivalent(b, c, "f", ds);
    auto ac = equivalent(a, c, "f", ds);
    CHECK(ab.equivalent == ba.equivalent);
    CHECK(ab.equivalent);
    CHECK(bc.equivalent);
    CHECK(ac.equivalent);  // transitivity on the tested dataset
}

TEST_CASE("trap rows compare by kind") {
    auto a = parse_ok("int f(int n){ int x[2]; return x[n]; }");
    auto b = parse_ok("int f(int n){ int y[2]; int z = y[n]; return z; }");
    ExecEnv e;
    e.args["n"] = 7;
    auto v = equivalent(a, b, "f", {e});
    CHECK(v.equivalent);  // both trap out-of-bounds
}

TEST_CASE("ac_int arithmetic agrees with 64-bit arithmetic modulo 2^W") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        int w = 1 + static_cast<int>(rng() % 32);
        bool sgn = rng() & 1;
        long long a = static_cast<long long>(rng() % 100000) - 50000;
        long long b = static_cast<long long>(rng() % 100000) - 50000;
        const char* ops[] = {"+", "-", "*"};
        const char* op = ops[rng() % 3];
        std::string src = "int f(int a, int b){ ac_int<" + std::to_string(w) + ", " +
                          (sgn ? "true" : "false") + "> r; r = a " + op +
                          " b; return (int)r; }";
        auto u = parse_ok(src);
        ExecEnv env;
        env.args["a"] = a;
        env.args["b"] = b;
        auto r = run(u, "f", env);
        REQUIRE(r.ok());
        // 64-bit reference reduced modulo 2^W (sign adjusted).
        long long a32 = static_cast<int>(a), b32 = static_cast<int>(b);
        unsigned long long wide =
            op[0] == '+' ? static_cast<unsigned long long>(a32) + b32
            : op[0] == '-' ? static_cast<unsigned long long>(a32) - b32
                           : static_cast<unsigned long long>(a32) * b32;
        unsigned long long mask = w >= 64 ? ~0ull : (1ull << w) - 1;
        unsigned long long reduced = wide & mask;
        long long expect = static_cast<long long>(reduced);
        if (sgn && w < 64 && (reduced >> (w - 1)) & 1) expect = static_cast<long long>(reduced | ~mask);
        // the (int) cast at return wraps to 32 bits
        expect = static_cast<int>(expect);
        CHECK_MESSAGE(r.obs.return_value == expect,
                      src << " a=" << a << " b=" << b);
    }
}

TEST_CASE("dataset rows parse from json lines") {
    auto env = parse_env_json(
        R"({"args": {"n": 3}, "arrays": {"a": [1, 2, 3], "out": {"size": 4, "fill": -1}}})");
    CHECK(env.args.at("n") == 3);
    CHECK(env.arrays.at("a") == std::vector<long long>({1, 2, 3}));
    CHECK(env.arrays.at("out") == std::vector<long long>({-1, -1, -1, -1}));
}

TEST_CASE("missing entry argument is a precondition violation, not a trap") {
    auto u = parse_ok("int f(int n){ return n; }");
    CHECK_THROWS_AS(run(u, "f", ExecEnv{}), std::invalid_argument);
    CHECK_THROWS_AS(run(u, "missing", ExecEnv{}), std::invalid_argument);
}
