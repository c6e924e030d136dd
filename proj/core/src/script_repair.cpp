#include "hlsrepair/script_repair.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace hlsrepair::script {

using namespace cfront;
using detect::CompileReport;
using detect::Diagnostic;
using detect::ErrorClass;

namespace {

const Expr* strip_parens(const Expr* e) {
    while (e && e->kind == ExprKind::Paren)
        e = static_cast<const ParenExpr*>(e)->inner.get();
    return e;
}

const IdentExpr* as_ident(const Expr* e) {
    e = strip_parens(e);
    return e && e->kind == ExprKind::Ident ? static_cast<const IdentExpr*>(e) : nullptr;
}

std::string text_of(const SourceUnit& unit, const Span& s) {
    return std::string(span_text(unit, s));
}

const FunctionDecl* enclosing_function(const Ast& ast, const Span& span) {
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        if (d->span.begin <= span.begin && span.end <= d->span.end)
            return static_cast<const FunctionDecl*>(d.get());
    }
    return nullptr;
}

std::vector<Diagnostic> diags_of(const CompileReport& report, ErrorClass c) {
    std::vector<Diagnostic> out;
    for (const auto& d : report.diagnostics)
        if (d.error_class == c) out.push_back(d);
    return out;
}

void skip_all(PassResult& res, const std::vector<Diagnostic>& diags,
              const std::string& reason) {
    for (const auto& d : diags) res.skipped.push_back({d, reason});
}

// Upper-cased function name for emitted #define constants.
std::string macro_name(const std::string& fn, const char* suffix) {
    std::string out;
    for (char c : fn) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    out += suffix;
    return out;
}

}  // namespace

const std::vector<std::string>& pass_names() {
    static const std::vector<std::string> kNames = {
        "fix_boolean", "fix_dynamic",   "fix_pointer",
        "fix_incomplete", "fix_recursion", "fix_exception",
    };
    return kNames;
}

// ---------------------------------------------------------------------------
// fix_boolean (T5): retype bool flags to int and expand ++/--/+=/-= at
// statement level. Truthiness is preserved; rewritten flags may hold values
// other than 0/1.
// ---------------------------------------------------------------------------

PassResult fix_boolean(const SourceUnit& unit, const CompileReport& report) {
    PassResult res;
    const Ast& ast = *unit.ast;
    auto diags = diags_of(report, ErrorClass::T5_BooleanOp);
    if (diags.empty()) return res;

    // Variables that get compound/increment treatment.
    std::set<VarId> targets;
    auto note_target = [&](const Expr* e) {
        if (const IdentExpr* id = as_ident(e); id && id->ref &&
                                               id->ref->type.base == TypeSpec::Base::Bool &&
                                               id->ref->pointer_depth == 0)
            targets.insert(id->ref->id);
    };
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmt_exprs(*fn.body, [&](const Expr& e) {
            if (e.kind == ExprKind::Assign) {
                const auto& a = static_cast<const AssignExpr&>(e);
                if (a.op == AssignOp::Add || a.op == AssignOp::Sub) note_target(a.lhs.get());
            } else if (e.kind == ExprKind::Unary) {
                const auto& u = static_cast<const UnaryExpr&>(e);
                if (u.op == UnOp::PreInc || u.op == UnOp::PostInc || u.op == UnOp::PreDec ||
                    u.op == UnOp::PostDec)
                    note_target(u.operand.get());
            }
        });
    }
    if (targets.empty()) {
        skip_all(res, diags, "boolean operator target is not a plain variable");
        return res;
    }

    // Retype declarations. Statements mixing targeted and untargeted
    // declarators are split.
    auto retype = [&](const TypeSpec& type, const std::vector<Declarator>& decls,
                      const std::string& func, Span stmt_span) {
        if (type.base != TypeSpec::Base::Bool) return;
        size_t hits = 0;
        for (const auto& d : decls)
            if (targets.count(VarId{func, d.name_span.begin, d.name})) ++hits;
        if (hits == 0) return;
        std::string int_type;
        if (type.is_static) int_type += "static ";
        if (type.is_const) int_type += "const ";
        int_type += "int";
        if (hits == decls.size()) {
            res.edits.push_back(TextEdit{type.span, int_type, "fix_boolean"});
            return;
        }
        std::string repl;
        std::string orig_type = text_of(unit, type.span);
        for (size_t i = 0; i < decls.size(); ++i) {
            if (i) repl += " ";
            bool hit = targets.count(VarId{func, decls[i].name_span.begin, decls[i].name});
            repl += (hit ? int_type : orig_type) + " " + text_of(unit, decls[i].span) + ";";
        }
        res.edits.push_back(TextEdit{stmt_span, repl, "fix_boolean"});
    };
    for (const auto& d : ast.decls) {
        if (d->kind == DeclKind::Var) {
            const auto& vd = static_cast<const VarDecl&>(*d);
            retype(vd.type, vd.declarators, "", vd.span);
        }
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::DeclStmt) return;
            const auto& ds = static_cast<const DeclStmt&>(s);
            retype(ds.type, ds.declarators, fn.name, ds.span);
        });
    }

    // Expand the operators, statement-root only.
    std::set<uint32_t> expanded;  // diag spans resolved
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::ExprStmt) return;
            const auto& es = static_cast<const ExprStmt&>(s);
            if (!es.expr) return;
            const Expr* e = es.expr.get();
            std::string repl;
            const IdentExpr* id = nullptr;
            if (e->kind == ExprKind::Assign) {
                const auto& a = static_cast<const AssignExpr&>(*e);
                id = as_ident(a.lhs.get());
                if (!id || !id->ref || !targets.count(id->ref->id)) return;
                if (a.op == AssignOp::Add)
                    repl = id->name + " = " + id->name + " + (" +
                           text_of(unit, a.rhs->span) + " ? 1 : 0);";
                else if (a.op == AssignOp::Sub)
                    repl = id->name + " = " + id->name + " - (" +
                           text_of(unit, a.rhs->span) + " ? 1 : 0);";
                else
                    return;
            } else if (e->kind == ExprKind::Unary) {
                const auto& u = static_cast<const UnaryExpr&>(*e);
                id = as_ident(u.operand.get());
                if (!id || !id->ref || !targets.count(id->ref->id)) return;
                if (u.op == UnOp::PreInc || u.op == UnOp::PostInc)
                    repl = id->name + " = " + id->name + " + 1;";
                else if (u.op == UnOp::PreDec || u.op == UnOp::PostDec)
                    repl = id->name + " = " + id->name + " - 1;";
                else
                    return;
            } else {
                return;
            }
            res.edits.push_back(TextEdit{s.span, repl, "fix_boolean"});
            expanded.insert(e->span.begin);
        });
    }

    for (const auto& d : diags)
        if (!expanded.count(d.span.begin))
            res.skipped.push_back({d, "boolean operator in nested expression"});
    return res;
}

// ---------------------------------------------------------------------------
// fix_dynamic (T2): constant-sized, single-binding, non-escaping allocations
// become fixed arrays; their frees become empty statements.
// ---------------------------------------------------------------------------

namespace {

struct AllocSite {
    const CallExpr* call = nullptr;   // malloc/calloc
    const Declarator* decl = nullptr; // T *p = ...
    Span decl_stmt_span;
    TypeSpec elem_type;
    std::string func;
    VarId ptr_id;
    bool multi_declarator = false;
};

// Size expression forms understood statically: K*sizeof(T), sizeof(T)*K,
// sizeof(T), or a plain constant byte count.
std::optional<long long> element_count(const CallExpr& call, const TypeSpec& elem,
                                       const Ast& ast) {
    long long elem_bytes = elem.byte_size();
    if (elem_bytes < 0) elem_bytes = ast.struct_byte_size(elem.tag);
    if (elem_bytes <= 0) return std::nullopt;
    long long total = -1;
    if (call.callee_name() == "calloc" && call.args.size() == 2) {
        auto n = eval_const_expr(*call.args[0], ast);
        auto sz = eval_const_expr(*call.args[1], ast);
        if (!n || !sz) return std::nullopt;
        total = *n * *sz;
    } else if (call.args.size() == 1) {
        auto sz = eval_const_expr(*call.args[0], ast);
        if (!sz) return std::nullopt;
        total = *sz;
    } else {
        return std::nullopt;
    }
    if (total <= 0 || total % elem_bytes != 0) return std::nullopt;
    return total / elem_bytes;
}

}  // namespace

PassResult fix_dynamic(const SourceUnit& unit, const CompileReport& report,
                       const RepairContext& ctx) {
    PassResult res;
    const Ast& ast = *unit.ast;
    auto diags = diags_of(report, ErrorClass::T2_DynamicArray);
    if (diags.empty()) return res;

    // Allocation sites bound at a declaration.
    std::vector<AllocSite> sites;
    auto malloc_of_init = [&](const Expr* init) -> const CallExpr* {
        const Expr* e = strip_parens(init);
        if (e && e->kind == ExprKind::Cast) e = strip_parens(static_cast<const CastExpr*>(e)->operand.get());
        if (e && e->kind == ExprKind::Call) {
            const auto& call = static_cast<const CallExpr&>(*e);
            std::string n = call.callee_name();
            if (n == "malloc" || n == "calloc") return &call;
        }
        return nullptr;
    };
    auto consider = [&](const TypeSpec& type, const std::vector<Declarator>& decls,
                        const std::string& func, Span stmt_span) {
        for (const auto& d : decls) {
            if (d.pointer_depth != 1 || d.is_fn_ptr || !d.init) continue;
            const CallExpr* call = malloc_of_init(d.init.get());
            if (!call) continue;
            AllocSite site;
            site.call = call;
            site.decl = &d;
            site.decl_stmt_span = stmt_span;
            site.elem_type = type;
            site.func = func;
            site.ptr_id = VarId{func, d.name_span.begin, d.name};
            site.multi_declarator = decls.size() > 1;
            sites.push_back(site);
        }
    };
    for (const auto& d : ast.decls) {
        if (d->kind == DeclKind::Var) {
            const auto& vd = static_cast<const VarDecl&>(*d);
            consider(vd.type, vd.declarators, "", vd.span);
        }
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::DeclStmt) return;
            const auto& ds = static_cast<const DeclStmt&>(s);
            consider(ds.type, ds.declarators, fn.name, ds.span);
        });
    }

    // Use analysis per site: single binding, no escapes.
    std::set<uint32_t> fixed_spans;  // resolved diag span begins (malloc + free)
    for (const AllocSite& site : sites) {
        auto skip_site = [&](const std::string& reason) {
            for (const auto& d : diags)
                if (d.span.begin == site.call->span.begin)
                    res.skipped.push_back({d, reason});
        };
        if (site.multi_declarator) {
            skip_site("allocation in multi-declarator statement");
            continue;
        }
        auto count = element_count(*site.call, site.elem_type, ast);
        if (!count) {
            skip_site("allocation size is not statically known");
            continue;
        }
        // Scan uses of the pointer across its function (or all functions for
        // globals).
        bool reassigned = false, escapes = false;
        std::vector<const CallExpr*> frees;
        std::function<void(const Expr&)> scan = [&](const Expr& e) {
            if (e.kind == ExprKind::Assign) {
                const auto& a = static_cast<const AssignExpr&>(e);
                const IdentExpr* lhs = as_ident(a.lhs.get());
                if (lhs && lhs->ref && lhs->ref->id == site.ptr_id) reassigned = true;
                // p on the right-hand side of a store escapes.
                if (const IdentExpr* rhs = as_ident(a.rhs.get());
                    rhs && rhs->ref && rhs->ref->id == site.ptr_id)
                    escapes = true;
                return;
            }
            if (e.kind == ExprKind::Call) {
                const auto& call = static_cast<const CallExpr&>(e);
                for (const auto& arg : call.args) {
                    const IdentExpr* id = as_ident(arg.get());
                    if (id && id->ref && id->ref->id == site.ptr_id) {
                        if (call.callee_name() == "free" && call.args.size() == 1)
                            frees.push_back(&call);
                        else
                            escapes = true;
                    }
                }
            }
        };
        auto scan_return = [&](const Stmt& s) {
            if (s.kind != StmtKind::Return) return;
            const auto& r = static_cast<const ReturnStmt&>(s);
            if (const IdentExpr* id = as_ident(r.value.get());
                id && id->ref && id->ref->id == site.ptr_id)
                escapes = true;
        };
        for (const auto& d : ast.decls) {
            if (d->kind != DeclKind::Function) continue;
            const auto& fn = static_cast<const FunctionDecl&>(*d);
            if (!fn.body) continue;
            if (!site.func.empty() && fn.name != site.func) continue;
            walk_stmt_exprs(*fn.body, scan);
            walk_stmts(*fn.body, scan_return);
        }
        if (reassigned) {
            skip_site("pointer is rebound after the allocation");
            continue;
        }
        if (escapes) {
            skip_site("allocation escapes its binding: deferred to LLM");
            continue;
        }

        // Rewrite: `T *p = malloc(...)` -> `T p[N];` and `free(p);` -> `;`.
        std::string type_text;
        if (site.elem_type.is_static) type_text += "static ";
        if (site.elem_type.is_const) type_text += "const ";
        TypeSpec plain = site.elem_type;
        plain.is_static = plain.is_const = false;
        type_text += plain.to_string();
        res.edits.push_back(TextEdit{site.decl_stmt_span,
                                     type_text + " " + site.decl->name + "[" +
                                         std::to_string(*count) + "];",
                                     "fix_dynamic"});
        fixed_spans.insert(site.call->span.begin);

        // Remove statement-level frees of this pointer.
        for (const auto& d : ast.decls) {
            if (d->kind != DeclKind::Function) continue;
            const auto& fn = static_cast<const FunctionDecl&>(*d);
            if (!fn.body) continue;
            if (!site.func.empty() && fn.name != site.func) continue;
            walk_stmts(*fn.body, [&](const Stmt& s) {
                if (s.kind != StmtKind::ExprStmt) return;
                const auto& es = static_cast<const ExprStmt&>(s);
                const Expr* e = strip_parens(es.expr.get());
                if (!e || e->kind != ExprKind::Call) return;
                const auto& call = static_cast<const CallExpr&>(*e);
                if (call.callee_name() != "free" || call.args.size() != 1) return;
                const IdentExpr* id = as_ident(call.args[0].get());
                if (!id || !id->ref || !(id->ref->id == site.ptr_id)) return;
                res.edits.push_back(TextEdit{s.span, ";", "fix_dynamic"});
                fixed_spans.insert(call.span.begin);
            });
        }
    }

    for (const auto& d : diags) {
        if (fixed_spans.count(d.span.begin)) continue;
        bool already = false;
        for (const auto& sk : res.skipped)
            if (sk.diagnostic.span.begin == d.span.begin) already = true;
        if (!already)
            res.skipped.push_back(
                {d, d.message.find("variable-length") != std::string::npos
                        ? "variable-length array: deferred to LLM"
                        : "allocation is not bound at a declaration: deferred to LLM"});
    }
    return res;
}

// ---------------------------------------------------------------------------
// fix_pointer (T1): single-binding array-bound pointers with index/deref
// uses become direct array accesses.
// ---------------------------------------------------------------------------

PassResult fix_pointer(const SourceUnit& unit, const CompileReport& report) {
    PassResult res;
    const Ast& ast = *unit.ast;
    auto diags = diags_of(report, ErrorClass::T1_Pointer);
    if (diags.empty()) return res;

    struct PtrTarget {
        VarId id;
        std::string array_name;
        Span decl_stmt_span;
        bool sole_declarator = false;
        bool viable = true;
        std::string skip_reason;
        std::vector<std::pair<Span, std::string>> use_edits;  // span -> replacement
        Span diag_span;
    };
    std::map<VarId, PtrTarget> targets;

    // Candidate pointers: depth-1 declarations with an array-name initializer.
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::DeclStmt) return;
            const auto& ds = static_cast<const DeclStmt&>(s);
            for (const auto& dtor : ds.declarators) {
                if (dtor.pointer_depth != 1 || dtor.is_fn_ptr || !dtor.init) continue;
                const Expr* init = strip_parens(dtor.init.get());
                const IdentExpr* arr = as_ident(init);
                std::string array_name;
                if (arr && arr->ref && arr->ref->is_array) {
                    array_name = arr->name;
                } else if (init && init->kind == ExprKind::Unary) {
                    const auto& u = static_cast<const UnaryExpr&>(*init);
                    if (u.op == UnOp::AddrOf) {
                        const Expr* inner = strip_parens(u.operand.get());
                        if (inner && inner->kind == ExprKind::Index) {
                            const auto& ix = static_cast<const IndexExpr&>(*inner);
                            const IdentExpr* base = as_ident(ix.base.get());
                            auto zero = ix.index ? eval_const_expr(*ix.index, ast)
                                                 : std::nullopt;
                            if (base && base->ref && base->ref->is_array && zero &&
                                *zero == 0)
                                array_name = base->name;
                        }
                    }
                }
                if (array_name.empty()) continue;
                PtrTarget t;
                t.id = VarId{fn.name, dtor.name_span.begin, dtor.name};
                t.array_name = array_name;
                t.decl_stmt_span = ds.span;
                t.sole_declarator = ds.declarators.size() == 1;
                targets[t.id] = std::move(t);
            }
        });
    }

    // Only pointers that were actually diagnosed get rewritten.
    std::set<VarId> diagnosed;
    for (const auto& dg : diags) {
        for (auto& [id, t] : targets) {
            if (dg.span.begin == id.decl_begin) {
                diagnosed.insert(id);
                t.diag_span = dg.span;
            }
        }
    }

    // Classify uses.
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmt_exprs(*fn.body, [&](const Expr& e) {
            if (e.kind == ExprKind::Index) {
                const auto& ix = static_cast<const IndexExpr&>(e);
                const IdentExpr* base = as_ident(ix.base.get());
                if (base && base->ref && targets.count(base->ref->id)) {
                    PtrTarget& t = targets[base->ref->id];
                    t.use_edits.emplace_back(base->span, t.array_name);
                }
            } else if (e.kind == ExprKind::Unary) {
                const auto& u = static_cast<const UnaryExpr&>(e);
                if (u.op == UnOp::Deref) {
                    const IdentExpr* id = as_ident(u.operand.get());
                    if (id && id->ref && targets.count(id->ref->id)) {
                        PtrTarget& t = targets[id->ref->id];
                        t.use_edits.emplace_back(u.span, t.array_name + "[0]");
                    }
                } else if (u.op == UnOp::AddrOf || u.op == UnOp::PreInc ||
                           u.op == UnOp::PostInc || u.op == UnOp::PreDec ||
                           u.op == UnOp::PostDec) {
                    const IdentExpr* id = as_ident(u.operand.get());
                    if (id && id->ref && targets.count(id->ref->id)) {
                        targets[id->ref->id].viable = false;
                        targets[id->ref->id].skip_reason =
                            "pointer is modified or its address is taken";
                    }
                }
            } else if (e.kind == ExprKind::Assign) {
                const auto& a = static_cast<const AssignExpr&>(e);
                const IdentExpr* lhs = as_ident(a.lhs.get());
                if (lhs && lhs->ref && targets.count(lhs->ref->id)) {
                    targets[lhs->ref->id].viable = false;
                    targets[lhs->ref->id].skip_reason = "pointer is rebound after binding";
                }
                const IdentExpr* rhs = as_ident(a.rhs.get());
                if (rhs && rhs->ref && targets.count(rhs->ref->id)) {
                    targets[rhs->ref->id].viable = false;
                    targets[rhs->ref->id].skip_reason = "pointer value escapes";
                }
            } else if (e.kind == ExprKind::Call) {
                const auto& call = static_cast<const CallExpr&>(e);
                for (const auto& arg : call.args) {
                    const IdentExpr* id = as_ident(arg.get());
                    if (id && id->ref && targets.count(id->ref->id)) {
                        targets[id->ref->id].viable = false;
                        targets[id->ref->id].skip_reason = "pointer passed to a call";
                    }
                }
            } else if (e.kind == ExprKind::Member) {
                const auto& m = static_cast<const MemberExpr&>(e);
                if (m.is_arrow) {
                    const IdentExpr* id = as_ident(m.base.get());
                    if (id && id->ref && targets.count(id->ref->id)) {
                        targets[id->ref->id].viable = false;
                        targets[id->ref->id].skip_reason =
                            "struct pointer access: deferred to LLM";
                    }
                }
            }
        });
    }

    std::set<uint32_t> fixed;
    for (auto& [id, t] : targets) {
        if (!diagnosed.count(id)) continue;
        if (!t.viable || !t.sole_declarator) {
            for (const auto& dg : diags)
                if (dg.span.begin == id.decl_begin)
                    res.skipped.push_back({dg, t.viable
                                                   ? "pointer shares a declaration statement"
                                                   : t.skip_reason});
            continue;
        }
        res.edits.push_back(TextEdit{t.decl_stmt_span, "", "fix_pointer"});
        for (const auto& [span, repl] : t.use_edits)
            res.edits.push_back(TextEdit{span, repl, "fix_pointer"});
        fixed.insert(id.decl_begin);
    }

    for (const auto& dg : diags) {
        if (fixed.count(dg.span.begin)) continue;
        bool already = false;
        for (const auto& sk : res.skipped)
            if (sk.diagnostic.span.begin == dg.span.begin) already = true;
        if (!already) {
            std::string reason = "pointer pattern not convertible by scripts: deferred to LLM";
            if (dg.message.find("double pointer") != std::string::npos)
                reason = "double pointer: deferred to LLM";
            else if (dg.message.find("field") != std::string::npos)
                reason = "struct pointer field: deferred to LLM";
            res.skipped.push_back({dg, reason});
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// fix_incomplete (T6): append `default: break;` to non-covering switches.
// ---------------------------------------------------------------------------

PassResult fix_incomplete(const SourceUnit& unit, const CompileReport& report) {
    PassResult res;
    const Ast& ast = *unit.ast;
    auto diags = diags_of(report, ErrorClass::T6_IncompleteStatement);
    if (diags.empty()) return res;

    std::set<uint32_t> fixed;
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::Switch) return;
            bool flagged = false;
            for (const auto& dg : diags)
                if (dg.span.begin == s.span.begin) flagged = true;
            if (!flagged) return;
            const auto& sw = static_cast<const SwitchStmt&>(s);
            res.edits.push_back(TextEdit{Span{sw.rbrace.begin, sw.rbrace.begin},
                                         "default: break; ", "fix_incomplete"});
            fixed.insert(s.span.begin);
        });
    }
    for (const auto& dg : diags)
        if (!fixed.count(dg.span.begin))
            res.skipped.push_back({dg, "switch statement not found in tree"});
    return res;
}

// ---------------------------------------------------------------------------
// fix_recursion (T3): tail self-recursion becomes a loop; void functions
// whose self-calls form a trailing block of (optionally guarded) calls get an
// explicit bounded stack. Everything else is deferred.
// ---------------------------------------------------------------------------

namespace {

// Global variables written anywhere in `fn` or in functions it can reach.
std::set<std::string> written_globals(const Ast& ast, const std::string& root) {
    std::set<std::string> visited;
    std::set<std::string> written;
    std::vector<std::string> queue{root};
    while (!queue.empty()) {
        std::string cur = queue.back();
        queue.pop_back();
        if (!visited.insert(cur).second) continue;
        const FunctionDecl* fn = ast.function(cur);
        if (!fn || !fn->body) continue;
        walk_stmt_exprs(*fn->body, [&](const Expr& e) {
            auto mark = [&](const Expr* target) {
                const Expr* t = strip_parens(target);
                while (t) {
                    if (t->kind == ExprKind::Ident) {
                        const auto& id = static_cast<const IdentExpr&>(*t);
                        if (id.ref && id.ref->kind == VarRef::Kind::Global)
                            written.insert(id.name);
                        return;
                    }
                    if (t->kind == ExprKind::Index) {
                        t = strip_parens(static_cast<const IndexExpr*>(t)->base.get());
                        continue;
                    }
                    if (t->kind == ExprKind::Member) {
                        t = strip_parens(static_cast<const MemberExpr*>(t)->base.get());
                        continue;
                    }
                    if (t->kind == ExprKind::Unary &&
                        static_cast<const UnaryExpr*>(t)->op == UnOp::Deref) {
                        t = strip_parens(static_cast<const UnaryExpr*>(t)->operand.get());
                        continue;
                    }
                    return;
                }
            };
            if (e.kind == ExprKind::Assign)
                mark(static_cast<const AssignExpr&>(e).lhs.get());
            if (e.kind == ExprKind::Unary) {
                const auto& u = static_cast<const UnaryExpr&>(e);
                if (u.op == UnOp::PreInc || u.op == UnOp::PostInc || u.op == UnOp::PreDec ||
                    u.op == UnOp::PostDec)
                    mark(u.operand.get());
            }
            if (e.kind == ExprKind::Call) {
                std::string callee = static_cast<const CallExpr&>(e).callee_name();
                if (ast.functions.count(callee)) queue.push_back(callee);
            }
        });
    }
    return written;
}

// True when the expression reads only parameters/locals of `fn`, constants,
// and globals outside `forbidden`, with no calls and no side effects.
bool is_stable_expr(const Expr& e, const std::set<std::string>& forbidden) {
    bool ok = true;
    walk_exprs(e, [&](const Expr& sub) {
        if (sub.kind == ExprKind::Call || sub.kind == ExprKind::Assign) ok = false;
        if (sub.kind == ExprKind::Unary) {
            auto op = static_cast<const UnaryExpr&>(sub).op;
            if (op == UnOp::PreInc || op == UnOp::PostInc || op == UnOp::PreDec ||
                op == UnOp::PostDec || op == UnOp::AddrOf)
                ok = false;
        }
        if (sub.kind == ExprKind::Ident) {
            const auto& id = static_cast<const IdentExpr&>(sub);
            if (id.ref && id.ref->kind == VarRef::Kind::Global &&
                forbidden.count(id.name))
                ok = false;
        }
    });
    return ok;
}

const CallExpr* self_call_of_stmt(const Stmt& s, const std::string& fname) {
    if (s.kind != StmtKind::ExprStmt) return nullptr;
    const Expr* e = strip_parens(static_cast<const ExprStmt&>(s).expr.get());
    if (!e || e->kind != ExprKind::Call) return nullptr;
    const auto& call = static_cast<const CallExpr&>(*e);
    return call.callee_name() == fname ? &call : nullptr;
}

}  // namespace

PassResult fix_recursion(const SourceUnit& unit, const CompileReport& report,
                         const RepairContext& ctx) {
    PassResult res;
    const Ast& ast = *unit.ast;
    auto diags = diags_of(report, ErrorClass::T3_Recursion);
    if (diags.empty()) return res;

    for (const auto& dg : diags) {
        if (dg.message.find("calls itself") == std::string::npos) {
            res.skipped.push_back({dg, "non-self recursion: deferred to LLM"});
            continue;
        }
        // Extract the function name from the enclosing function of the span.
        const FunctionDecl* fn = enclosing_function(ast, dg.span);
        if (!fn || !fn->body) {
            res.skipped.push_back({dg, "recursive function body not found"});
            continue;
        }

        // Gather every self-call with its syntactic role.
        std::vector<const ReturnStmt*> tail_returns;
        int self_calls = 0;
        walk_stmt_exprs(*fn->body, [&](const Expr& e) {
            if (e.kind == ExprKind::Call &&
                static_cast<const CallExpr&>(e).callee_name() == fn->name)
                ++self_calls;
        });
        walk_stmts(*fn->body, [&](const Stmt& s) {
            if (s.kind != StmtKind::Return) return;
            const auto& r = static_cast<const ReturnStmt&>(s);
            const Expr* v = strip_parens(r.value.get());
            if (v && v->kind == ExprKind::Call &&
                static_cast<const CallExpr&>(*v).callee_name() == fn->name)
                tail_returns.push_back(&r);
        });

        bool is_void = fn->return_type.base == TypeSpec::Base::Void &&
                       fn->return_pointer_depth == 0;

        // ---- Tail form: every self-call is `return f(...)`. ----
        if (!is_void && static_cast<int>(tail_returns.size()) == self_calls &&
            self_calls > 0) {
            bool args_ok = true;
            for (const ReturnStmt* r : tail_returns) {
                const auto& call =
                    static_cast<const CallExpr&>(*strip_parens(r->value.get()));
                if (call.args.size() != fn->params.size()) args_ok = false;
            }
            if (!args_ok) {
                res.skipped.push_back({dg, "self-call arity mismatch"});
                continue;
            }
            // Wrap the body in while(1) and turn tail calls into rebinds.
            res.edits.push_back(TextEdit{Span{fn->body->lbrace.end, fn->body->lbrace.end},
                                         " while (1) {", "fix_recursion"});
            res.edits.push_back(TextEdit{Span{fn->body->rbrace.begin, fn->body->rbrace.begin},
                                         "} ", "fix_recursion"});
            for (const ReturnStmt* r : tail_returns) {
                const auto& call =
                    static_cast<const CallExpr&>(*strip_parens(r->value.get()));
                std::ostringstream repl;
                repl << "{ ";
                for (size_t i = 0; i < call.args.size(); ++i) {
                    std::string pt = fn->params[i].type.to_string();
                    repl << pt << " __next" << i << " = "
                         << text_of(unit, call.args[i]->span) << "; ";
                }
                for (size_t i = 0; i < call.args.size(); ++i)
                    repl << fn->params[i].decl.name << " = __next" << i << "; ";
                repl << "continue; }";
                res.edits.push_back(TextEdit{r->span, repl.str(), "fix_recursion"});
            }
            continue;
        }

        // ---- Void trailing-call form: explicit bounded stack. ----
        if (!is_void) {
            res.skipped.push_back(
                {dg, "non-tail value recursion: deferred to LLM"});
            continue;
        }
        bool params_scalar = true;
        for (const auto& p : fn->params)
            if (p.decl.is_array() || p.decl.pointer_depth > 0 || p.decl.is_fn_ptr ||
                !p.type.is_integer())
                params_scalar = false;
        if (!params_scalar || fn->params.empty()) {
            res.skipped.push_back({dg, "parameters not storable in a static stack"});
            continue;
        }

        // Trailing region: maximal suffix of top-level statements that are
        // self-calls or single-branch ifs around one.
        const auto& body_stmts = fn->body->stmts;
        size_t first_trailing = body_stmts.size();
        struct TrailingCall {
            const CallExpr* call;
            const Expr* cond;  // may be null
        };
        std::vector<TrailingCall> trailing;
        for (size_t i = body_stmts.size(); i-- > 0;) {
            const Stmt& s = *body_stmts[i];
            const CallExpr* call = self_call_of_stmt(s, fn->name);
            const Expr* cond = nullptr;
            if (!call && s.kind == StmtKind::If) {
                const auto& ifs = static_cast<const IfStmt&>(s);
                if (!ifs.else_stmt && ifs.then_stmt) {
                    const Stmt* inner = ifs.then_stmt.get();
                    if (inner->kind == StmtKind::Block) {
                        const auto& blk = static_cast<const BlockStmt&>(*inner);
                        if (blk.stmts.size() == 1) inner = blk.stmts[0].get();
                    }
                    if (inner) {
                        call = self_call_of_stmt(*inner, fn->name);
                        cond = ifs.cond.get();
                    }
                }
            }
            if (!call) break;
            trailing.push_back({call, cond});
            first_trailing = i;
        }
        std::reverse(trailing.begin(), trailing.end());

        int trailing_callsites = static_cast<int>(trailing.size());
        if (trailing_callsites == 0 || trailing_callsites != self_calls) {
            res.skipped.push_back(
                {dg, "self-calls are not a trailing call block: deferred to LLM"});
            continue;
        }

        std::set<std::string> forbidden = written_globals(ast, fn->name);
        bool stable = true;
        for (const auto& tc : trailing) {
            if (tc.cond && !is_stable_expr(*tc.cond, forbidden)) stable = false;
            for (const auto& arg : tc.call->args)
                if (!is_stable_expr(*arg, forbidden)) stable = false;
            if (tc.call->args.size() != fn->params.size()) stable = false;
        }
        if (!stable) {
            res.skipped.push_back(
                {dg, "trailing call arguments depend on state the loop would reorder"});
            continue;
        }

        // Prefix returns may not sit inside nested loops or switches, since
        // they become `continue` on the frame loop.
        bool returns_ok = true;
        std::function<void(const Stmt&, bool)> check_returns = [&](const Stmt& s,
                                                                   bool in_loop) {
            switch (s.kind) {
                case StmtKind::Return:
                    if (in_loop) returns_ok = false;
                    break;
                case StmtKind::Block:
                    for (const auto& st : static_cast<const BlockStmt&>(s).stmts)
                        check_returns(*st, in_loop);
                    break;
                case StmtKind::If: {
                    const auto& n = static_cast<const IfStmt&>(s);
                    if (n.then_stmt) check_returns(*n.then_stmt, in_loop);
                    if (n.else_stmt) check_returns(*n.else_stmt, in_loop);
                    break;
                }
                case StmtKind::While:
                case StmtKind::DoWhile:
                case StmtKind::For:
                case StmtKind::Switch:
                    walk_stmts(s, [&](const Stmt& inner) {
                        if (inner.kind == StmtKind::Return) returns_ok = false;
                    });
                    break;
                default:
                    break;
            }
        };
        std::vector<const ReturnStmt*> prefix_returns;
        for (size_t i = 0; i < first_trailing; ++i) {
            check_returns(*body_stmts[i], false);
            walk_stmts(*body_stmts[i], [&](const Stmt& s) {
                if (s.kind == StmtKind::Return)
                    prefix_returns.push_back(static_cast<const ReturnStmt*>(&s));
            });
        }
        if (!returns_ok) {
            res.skipped.push_back({dg, "return inside nested loop in recursive body"});
            continue;
        }

        // Emit the transformation.
        std::string depth_macro = macro_name(fn->name, "_MAX_DEPTH");
        res.edits.push_back(TextEdit{Span{fn->span.begin, fn->span.begin},
                                     "#define " + depth_macro + " " +
                                         std::to_string(ctx.max_recursion_depth) + "\n",
                                     "fix_recursion"});
        std::ostringstream prologue;
        prologue << "\n";
        for (const auto& p : fn->params)
            prologue << "    " << p.type.to_string() << " __stack_" << p.decl.name << "["
                     << depth_macro << "];\n";
        prologue << "    int __sp = 0;\n";
        for (const auto& p : fn->params)
            prologue << "    __stack_" << p.decl.name << "[__sp] = " << p.decl.name
                     << ";\n";
        prologue << "    __sp = __sp + 1;\n";
        prologue << "    while (__sp > 0) {\n";
        prologue << "    __sp = __sp - 1;\n";
        for (const auto& p : fn->params)
            prologue << "    " << p.decl.name << " = __stack_" << p.decl.name
                     << "[__sp];\n";
        res.edits.push_back(TextEdit{Span{fn->body->lbrace.end, fn->body->lbrace.end},
                                     prologue.str(), "fix_recursion"});

        // Prefix returns finish the current frame.
        for (const ReturnStmt* r : prefix_returns)
            res.edits.push_back(TextEdit{r->span, "continue;", "fix_recursion"});

        // Replace the whole trailing region with pushes in reverse order, so
        // the first call pops first.
        std::ostringstream pushes;
        for (size_t i = trailing.size(); i-- > 0;) {
            const TrailingCall& tc = trailing[i];
            pushes << "if (";
            if (tc.cond) pushes << "(" << text_of(unit, tc.cond->span) << ") && ";
            pushes << "__sp < " << depth_macro << ") { ";
            for (size_t a = 0; a < tc.call->args.size(); ++a)
                pushes << "__stack_" << fn->params[a].decl.name << "[__sp] = "
                       << text_of(unit, tc.call->args[a]->span) << "; ";
            pushes << "__sp = __sp + 1; } ";
        }
        Span region{body_stmts[first_trailing]->span.begin,
                    body_stmts.back()->span.end, 0, 0};
        res.edits.push_back(TextEdit{region, pushes.str(), "fix_recursion"});

        res.edits.push_back(TextEdit{Span{fn->body->rbrace.begin, fn->body->rbrace.begin},
                                     "}\n", "fix_recursion"});
    }
    return res;
}

// ---------------------------------------------------------------------------
// fix_exception (T8): bounds guards for trap-backed out-of-bounds stores,
// only when the guard provably keeps all originally-OK rows identical.
// ---------------------------------------------------------------------------

PassResult fix_exception(const SourceUnit& unit, const CompileReport& report,
                         const RepairContext& ctx) {
    PassResult res;
    const Ast& ast = *unit.ast;
    auto diags = diags_of(report, ErrorClass::T8_Exception);
    if (diags.empty()) return res;

    if (!ctx.dataset || ctx.entry.empty()) {
        skip_all(res, diags, "static exception repair would change semantics: deferred to LLM");
        return res;
    }

    // Dynamic out-of-bounds trap sites on the dataset.
    std::vector<Span> trap_spans;
    std::vector<size_t> ok_rows;
    for (size_t i = 0; i < ctx.dataset->size(); ++i) {
        interp::ExecResult r = interp::run(unit, ctx.entry, (*ctx.dataset)[i]);
        if (r.ok()) {
            ok_rows.push_back(i);
        } else if (r.trap && r.trap->kind == interp::TrapKind::OutOfBounds) {
            trap_spans.push_back(r.trap->span);
        }
    }

    std::set<uint32_t> guarded;
    std::vector<TextEdit> candidate_edits;
    for (const Span& trap : trap_spans) {
        const FunctionDecl* fn = enclosing_function(ast, trap);
        if (!fn || !fn->body) continue;
        walk_stmts(*fn->body, [&](const Stmt& s) {
            if (s.kind != StmtKind::ExprStmt) return;
            if (!(s.span.begin <= trap.begin && trap.end <= s.span.end)) return;
            if (guarded.count(s.span.begin)) return;
            const Expr* e = strip_parens(static_cast<const ExprStmt&>(s).expr.get());
            if (!e || e->kind != ExprKind::Assign) return;
            const Expr* lhs = strip_parens(static_cast<const AssignExpr*>(e)->lhs.get());
            if (!lhs || lhs->kind != ExprKind::Index) return;
            const auto& ix = static_cast<const IndexExpr&>(*lhs);
            const IdentExpr* base = as_ident(ix.base.get());
            if (!base || !base->ref || !base->ref->is_array ||
                base->ref->array_length < 0 || !ix.index)
                return;
            std::string guard = "if ((" + text_of(unit, ix.index->span) + ") < " +
                                std::to_string(base->ref->array_length) + ") { " +
                                text_of(unit, s.span) + " }";
            candidate_edits.push_back(TextEdit{s.span, guard, "fix_exception"});
            guarded.insert(s.span.begin);
        });
    }

    if (candidate_edits.empty()) {
        skip_all(res, diags, "no guardable trap-backed store on the dataset");
        return res;
    }

    // Accept only if originally-OK rows keep identical observables.
    auto applied = apply_edits(unit, candidate_edits);
    if (std::holds_alternative<RewriteConflict>(applied)) {
        skip_all(res, diags, "guard insertion conflict");
        return res;
    }
    const SourceUnit& patched = std::get<SourceUnit>(applied);
    if (!patched.parsed_ok()) {
        skip_all(res, diags, "guarded program does not reparse");
        return res;
    }
    std::vector<interp::ExecEnv> ok_envs;
    for (size_t i : ok_rows) ok_envs.push_back((*ctx.dataset)[i]);
    auto verdict = interp::equivalent(unit, patched, ctx.entry, ok_envs);
    if (!verdict.equivalent) {
        skip_all(res, diags, "bounds guard changes observables on passing rows");
        return res;
    }
    res.edits = std::move(candidate_edits);
    // Diagnostics at unguarded sites remain open.
    for (const auto& dg : diags)
        if (!guarded.count(dg.span.begin) &&
            dg.message.find("runtime trap") == std::string::npos)
            res.skipped.push_back({dg, "statically flagged site left for the LLM"});
    return res;
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

namespace {

// Diagnostic identity that survives line renumbering between passes.
std::string diag_key(const Diagnostic& d) {
    std::string msg = d.message;
    size_t at = msg.rfind(" at line ");
    if (at != std::string::npos) msg.resize(at);
    return std::string(detect::class_code(d.error_class)) + "|" + msg;
}

ErrorClass pass_class(const std::string& pass) {
    if (pass == "fix_boolean") return ErrorClass::T5_BooleanOp;
    if (pass == "fix_dynamic") return ErrorClass::T2_DynamicArray;
    if (pass == "fix_pointer") return ErrorClass::T1_Pointer;
    if (pass == "fix_incomplete") return ErrorClass::T6_IncompleteStatement;
    if (pass == "fix_recursion") return ErrorClass::T3_Recursion;
    return ErrorClass::T8_Exception;
}

}  // namespace

RewriteOutcome script_pass(const SourceUnit& unit, const CompileReport& report,
                           const RepairContext& ctx) {
    RewriteOutcome outcome{unit, {}, {}, false, {}};
    SourceUnit current = unit;
    std::vector<SkippedDiagnostic> pass_skips;

    for (const std::string& pass : pass_names()) {
        CompileReport fresh = detect::check(current);
        ErrorClass cls = pass_class(pass);
        if (ctx.skip_passes.count(pass)) {
            for (const auto& d : diags_of(fresh, cls))
                pass_skips.push_back({d, "pass disabled via --skip-pass"});
            continue;
        }
        PassResult pr;
        if (pass == "fix_boolean") pr = fix_boolean(current, fresh);
        else if (pass == "fix_dynamic") pr = fix_dynamic(current, fresh, ctx);
        else if (pass == "fix_pointer") pr = fix_pointer(current, fresh);
        else if (pass == "fix_incomplete") pr = fix_incomplete(current, fresh);
        else if (pass == "fix_recursion") pr = fix_recursion(current, fresh, ctx);
        else pr = fix_exception(current, fresh, ctx);

        for (auto& sk : pr.skipped) pass_skips.push_back(std::move(sk));
        if (pr.edits.empty()) continue;

        auto applied = apply_edits(current, pr.edits);
        if (auto* conflict = std::get_if<RewriteConflict>(&applied)) {
            outcome.conflict = true;
            outcome.conflict_message = pass + ": " + conflict->message;
            for (const auto& d : diags_of(fresh, cls))
                pass_skips.push_back({d, "edit conflict, pass aborted"});
            continue;  // keep `current` untouched
        }
        SourceUnit next = std::move(std::get<SourceUnit>(applied));
        if (!next.parsed_ok()) {
            for (const auto& d : diags_of(fresh, cls))
                pass_skips.push_back({d, "rewritten unit did not reparse, pass aborted"});
            continue;
        }
        CompileReport after = detect::check(next);
        if (after.error_count() > fresh.error_count()) {
            for (const auto& d : diags_of(fresh, cls))
                pass_skips.push_back({d, "pass increased the error count, reverted"});
            continue;
        }
        for (const auto& e : pr.edits)
            outcome.edits.push_back(AppliedEdit{pass, e.span, e.replacement});
        current = std::move(next);
    }

    // Partition the *input* report's ERROR diagnostics into applied/skipped.
    CompileReport final_report = detect::check(current);
    std::multiset<std::string> final_keys;
    for (const auto& d : final_report.diagnostics)
        if (d.severity == detect::Severity::Error) final_keys.insert(diag_key(d));

    for (const auto& d : report.diagnostics) {
        if (d.severity != detect::Severity::Error) continue;
        std::string key = diag_key(d);
        auto it = final_keys.find(key);
        if (it != final_keys.end()) {
            // Still present: find the recorded reason, if any.
            final_keys.erase(it);
            std::string reason = "not addressed by script passes";
            for (const auto& sk : pass_skips)
                if (diag_key(sk.diagnostic) == key) reason = sk.reason;
            outcome.skipped.push_back({d, reason});
        }
        // Otherwise the diagnostic vanished: counted as applied via edits.
    }

    if (!outcome.edits.empty() && !outcome.conflict)
        current = current.with_stage(cfront::Stage::ScriptRepaired);
    outcome.unit = std::move(current);
    return outcome;
}

}  // namespace hlsrepair::script
