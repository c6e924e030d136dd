#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hlsrepair/interp.hpp"

namespace hlsrepair::interp {

using namespace cfront;
using nlohmann::json;

namespace {

// Syntactic scan: a variable "receives a subtraction" if it is ever the
// target of -=, --, or a plain assignment whose right-hand side is rooted in
// a binary minus. Used by the signedness policy in bit-width planning.
void scan_subtraction_stores(const Ast& ast, std::map<VarId, bool>& out) {
    auto root = [](const Expr* e) {
        while (e && e->kind == ExprKind::Paren)
            e = static_cast<const ParenExpr*>(e)->inner.get();
        return e;
    };
    auto mark_ident = [&](const Expr* target) {
        const Expr* t = target;
        while (t && t->kind == ExprKind::Paren)
            t = static_cast<const ParenExpr*>(t)->inner.get();
        if (t && t->kind == ExprKind::Ident) {
            const auto& id = static_cast<const IdentExpr&>(*t);
            if (id.ref) out[id.ref->id] = true;
        }
    };
    auto scan_expr = [&](const Expr& e) {
        if (e.kind == ExprKind::Assign) {
            const auto& a = static_cast<const AssignExpr&>(e);
            if (a.op == AssignOp::Sub) mark_ident(a.lhs.get());
            if (a.op == AssignOp::Set) {
                const Expr* r = root(a.rhs.get());
                if (r && r->kind == ExprKind::Binary &&
                    static_cast<const BinaryExpr*>(r)->op == BinOp::Sub)
                    mark_ident(a.lhs.get());
            }
        } else if (e.kind == ExprKind::Unary) {
            const auto& u = static_cast<const UnaryExpr&>(e);
            if (u.op == UnOp::PreDec || u.op == UnOp::PostDec) mark_ident(u.operand.get());
        }
    };
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmt_exprs(*fn.body, scan_expr);
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::DeclStmt) return;
            for (const auto& dtor : static_cast<const DeclStmt&>(s).declarators) {
                if (!dtor.init) continue;
                const Expr* r = root(dtor.init.get());
                if (r && r->kind == ExprKind::Binary &&
                    static_cast<const BinaryExpr*>(r)->op == BinOp::Sub)
                    out[VarId{fn.name, dtor.name_span.begin, dtor.name}] = true;
            }
        });
    }
}

// Declared types per VarId, for plan() to compare against.
void scan_declared_types(const Ast& ast, std::map<VarId, TypeSpec>& out) {
    for (const auto& d : ast.decls) {
        if (d->kind == DeclKind::Var) {
            const auto& vd = static_cast<const VarDecl&>(*d);
            for (const auto& dtor : vd.declarators)
                out[VarId{"", dtor.name_span.begin, dtor.name}] = vd.type;
        }
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        for (const auto& p : fn.params)
            out[VarId{fn.name, p.decl.name_span.begin, p.decl.name}] = p.type;
        if (!fn.body) continue;
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::DeclStmt) return;
            const auto& ds = static_cast<const DeclStmt&>(s);
            for (const auto& dtor : ds.declarators)
                out[VarId{fn.name, dtor.name_span.begin, dtor.name}] = ds.type;
        });
    }
}

void build_histogram(VarStats& st, const std::vector<long long>& samples) {
    st.histogram.fill(0);
    if (samples.empty()) return;
    long long range = st.max - st.min + 1;
    for (long long v : samples) {
        size_t bin;
        if (range <= 0) {
            bin = 0;  // range overflowed; degenerate
        } else {
            unsigned long long off = static_cast<unsigned long long>(v - st.min);
            bin = static_cast<size_t>(off * 64ull / static_cast<unsigned long long>(range));
        }
        if (bin > 63) bin = 63;
        ++st.histogram[bin];
    }
}

}  // namespace

const VarStats* RangeProfile::find(const std::string& func, const std::string& name) const {
    for (const auto& [id, st] : vars)
        if (id.func == func && id.name == name) return &st;
    return nullptr;
}

RangeProfile profile(const SourceUnit& unit, const std::string& entry,
                     const std::vector<ExecEnv>& dataset) {
    RangeProfile prof;
    std::map<VarId, std::vector<long long>> samples;

    for (const ExecEnv& row : dataset) {
        std::map<VarId, std::vector<long long>> row_samples;
        ExecEnv env = row;
        auto user_hook = row.on_assign;
        env.on_assign = [&](const VarId& id, long long v) {
            row_samples[id].push_back(v);
            if (user_hook) user_hook(id, v);
        };
        ExecResult r = run(unit, entry, env);
        if (!r.ok()) {
            ++prof.rows_trapped;
            continue;  // trapped rows contribute nothing
        }
        ++prof.rows_ok;
        for (auto& [id, vals] : row_samples) {
            auto& dst = samples[id];
            dst.insert(dst.end(), vals.begin(), vals.end());
        }
    }
    if (prof.rows_ok == 0)
        throw ProfileError("no dataset row completed without a trap over entry '" + entry +
                           "'");

    std::map<VarId, bool> sub_stores;
    std::map<VarId, TypeSpec> declared;
    scan_subtraction_stores(*unit.ast, sub_stores);
    scan_declared_types(*unit.ast, declared);

    for (auto& [id, vals] : samples) {
        VarStats st;
        st.min = vals.front();
        st.max = vals.front();
        for (long long v : vals) {
            st.min = std::min(st.min, v);
            st.max = std::max(st.max, v);
        }
        st.count = static_cast<long long>(vals.size());
        if (auto it = declared.find(id); it != declared.end()) st.declared = it->second;
        if (auto it = sub_stores.find(id); it != sub_stores.end())
            st.has_subtraction_store = it->second;
        build_histogram(st, vals);
        prof.vars.emplace(id, std::move(st));
    }
    return prof;
}

RangeProfile merge_profiles(const RangeProfile& a, const RangeProfile& b) {
    RangeProfile out = a;
    out.rows_ok += b.rows_ok;
    out.rows_trapped += b.rows_trapped;
    for (const auto& [id, st] : b.vars) {
        auto it = out.vars.find(id);
        if (it == out.vars.end()) {
            out.vars.emplace(id, st);
            continue;
        }
        VarStats& dst = it->second;
        dst.min = std::min(dst.min, st.min);
        dst.max = std::max(dst.max, st.max);
        dst.count += st.count;
        dst.has_subtraction_store |= st.has_subtraction_store;
        // Bounds changed: the merged histogram folds both sources by bin
        // midpoint, keeping the count-sum invariant.
        std::vector<long long> approx;
        auto unfold = [&](const VarStats& src) {
            long long range = src.max - src.min + 1;
            for (size_t bin = 0; bin < src.histogram.size(); ++bin) {
                long long mid =
                    src.min + static_cast<long long>((bin * range + range / 2) / 64);
                for (long long k = 0; k < src.histogram[bin]; ++k) approx.push_back(mid);
            }
        };
        unfold(it->second);
        VarStats tmp = st;
        unfold(tmp);
        build_histogram(dst, approx);
    }
    return out;
}

EquivalenceVerdict equivalent(const SourceUnit& a, const SourceUnit& b,
                              const std::string& entry,
                              const std::vector<ExecEnv>& dataset) {
    for (size_t i = 0; i < dataset.size(); ++i) {
        ExecResult ra = run(a, entry, dataset[i]);
        ExecResult rb = run(b, entry, dataset[i]);
        if (ra.ok() != rb.ok()) {
            return {false,
                    Counterexample{i, std::string("row ") + std::to_string(i) + ": " +
                                          (ra.ok() ? "OK" : trap_kind_name(ra.trap->kind)) +
                                          " vs " +
                                          (rb.ok() ? "OK" : trap_kind_name(rb.trap->kind))}};
        }
        if (!ra.ok()) {
            if (ra.trap->kind != rb.trap->kind)
                return {false, Counterexample{i, std::string("row ") + std::to_string(i) +
                                                     ": trap " +
                                                     trap_kind_name(ra.trap->kind) + " vs " +
                                                     trap_kind_name(rb.trap->kind)}};
            continue;
        }
        if (!(ra.obs == rb.obs)) {
            std::string why = "observables differ";
            if (ra.obs.return_kind != rb.obs.return_kind ||
                ra.obs.return_value != rb.obs.return_value)
                why = "return " + std::to_string(ra.obs.return_value) + " vs " +
                      std::to_string(rb.obs.return_value);
            else if (ra.obs.prints != rb.obs.prints)
                why = "print logs differ";
            else
                for (const auto& [name, vals] : ra.obs.arrays) {
                    auto it = rb.obs.arrays.find(name);
                    if (it == rb.obs.arrays.end() || it->second != vals) {
                        why = "array '" + name + "' differs";
                        break;
                    }
                }
            return {false, Counterexample{i, "row " + std::to_string(i) + ": " + why}};
        }
    }
    return {true, std::nullopt};
}

ExecEnv parse_env_json(const std::string& line) {
    ExecEnv env;
    json j = json::parse(line);
    if (j.contains("args"))
        for (auto& [k, v] : j["args"].items()) env.args[k] = v.get<long long>();
    if (j.contains("arrays")) {
        for (auto& [k, v] : j["arrays"].items()) {
            if (v.is_array()) {
                env.arrays[k] = v.get<std::vector<long long>>();
            } else if (v.is_object()) {
                size_t n = v.at("size").get<size_t>();
                long long fill = v.value("fill", 0ll);
                env.arrays[k] = std::vector<long long>(n, fill);
            }
        }
    }
    if (j.contains("step_budget")) env.step_budget = j["step_budget"].get<long long>();
    return env;
}

std::vector<ExecEnv> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    std::vector<ExecEnv> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(parse_env_json(line));
    }
    return rows;
}

}  // namespace hlsrepair::interp
