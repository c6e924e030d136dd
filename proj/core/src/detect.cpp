#include "hlsrepair/detect.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

#include <json.hpp>

#include "hlsrepair/bitwidth.hpp"

namespace hlsrepair::detect {

using namespace cfront;

const char* class_code(ErrorClass c) {
    switch (c) {
        case ErrorClass::T1_Pointer: return "T1";
        case ErrorClass::T2_DynamicArray: return "T2";
        case ErrorClass::T3_Recursion: return "T3";
        case ErrorClass::T4_BitWidth: return "T4";
        case ErrorClass::T5_BooleanOp: return "T5";
        case ErrorClass::T6_IncompleteStatement: return "T6";
        case ErrorClass::T7_UnsupportedStruct: return "T7";
        case ErrorClass::T8_Exception: return "T8";
        case ErrorClass::Syntax: return "SYNTAX";
    }
    return "?";
}

const char* class_keyword(ErrorClass c) {
    switch (c) {
        case ErrorClass::T1_Pointer: return "POINTER";
        case ErrorClass::T2_DynamicArray: return "DYNAMIC_ARRAY";
        case ErrorClass::T3_Recursion: return "RECURSION";
        case ErrorClass::T4_BitWidth: return "BIT_WIDTH";
        case ErrorClass::T5_BooleanOp: return "BOOLEAN_OP";
        case ErrorClass::T6_IncompleteStatement: return "INCOMPLETE_STATEMENT";
        case ErrorClass::T7_UnsupportedStruct: return "UNSUPPORTED_STRUCT";
        case ErrorClass::T8_Exception: return "EXCEPTION";
        case ErrorClass::Syntax: return "SYNTAX";
    }
    return "?";
}

std::optional<ErrorClass> class_from_code(const std::string& code) {
    static const std::map<std::string, ErrorClass> kMap = {
        {"T1", ErrorClass::T1_Pointer},       {"T2", ErrorClass::T2_DynamicArray},
        {"T3", ErrorClass::T3_Recursion},     {"T4", ErrorClass::T4_BitWidth},
        {"T5", ErrorClass::T5_BooleanOp},     {"T6", ErrorClass::T6_IncompleteStatement},
        {"T7", ErrorClass::T7_UnsupportedStruct}, {"T8", ErrorClass::T8_Exception},
        {"SYNTAX", ErrorClass::Syntax},
    };
    auto it = kMap.find(code);
    if (it == kMap.end()) return std::nullopt;
    return it->second;
}

namespace {

Diagnostic make_diag(ErrorClass c, Severity sev, Span span, std::string detail) {
    Diagnostic d;
    d.error_class = c;
    d.severity = sev;
    d.span = span;
    d.message = std::string(sev == Severity::Error ? "ERROR" : "ADVISORY") + " [" +
                class_keyword(c) + "]: " + detail + " at line " + std::to_string(span.line);
    return d;
}

std::optional<TypeSpec> expr_type(const Expr& e, const Ast& ast) {
    switch (e.kind) {
        case ExprKind::Paren:
            return expr_type(*static_cast<const ParenExpr&>(e).inner, ast);
        case ExprKind::Ident: {
            const auto& id = static_cast<const IdentExpr&>(e);
            if (id.ref && id.ref->pointer_depth == 0 && !id.ref->is_array)
                return id.ref->type;
            return std::nullopt;
        }
        case ExprKind::Member: {
            const auto& m = static_cast<const MemberExpr&>(e);
            // Find the struct tag of the base, then the field type.
            std::optional<TypeSpec> base;
            if (m.is_arrow) {
                const Expr* b = m.base.get();
                while (b && b->kind == ExprKind::Paren)
                    b = static_cast<const ParenExpr*>(b)->inner.get();
                if (b && b->kind == ExprKind::Ident) {
                    const auto& id = static_cast<const IdentExpr&>(*b);
                    if (id.ref) base = id.ref->type;
                }
            } else {
                base = expr_type(*m.base, ast);
            }
            if (!base || base->base != TypeSpec::Base::Struct) return std::nullopt;
            auto it = ast.structs.find(base->tag);
            if (it == ast.structs.end()) return std::nullopt;
            for (const auto& f : it->second->fields)
                if (f.decl.name == m.member && f.decl.pointer_depth == 0 &&
                    !f.decl.is_array())
                    return f.type;
            return std::nullopt;
        }
        case ExprKind::Cast: {
            const auto& c = static_cast<const CastExpr&>(e);
            if (c.pointer_depth == 0) return c.type;
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

const Expr* strip_parens(const Expr* e) {
    while (e && e->kind == ExprKind::Paren)
        e = static_cast<const ParenExpr*>(e)->inner.get();
    return e;
}

// ---- T1 --------------------------------------------------------------------

struct PointerInfo {
    VarId id;
    std::string func;
    Span decl_span;
    int depth = 0;
    bool is_param = false;
    int bindings = 0;          // initializer + assignments to the pointer
    bool bound_to_array = false;
    int other_uses = 0;        // anything that is not plain indexing
    std::vector<Span> allowed_addrof;  // &a[0] binding expressions
};

bool is_array_name_expr(const Expr* e, std::vector<Span>* allowed_addrof) {
    e = strip_parens(e);
    if (!e) return false;
    if (e->kind == ExprKind::Ident) {
        const auto& id = static_cast<const IdentExpr&>(*e);
        return id.ref && id.ref->is_array;
    }
    if (e->kind == ExprKind::Unary) {
        const auto& u = static_cast<const UnaryExpr&>(*e);
        if (u.op != UnOp::AddrOf) return false;
        const Expr* inner = strip_parens(u.operand.get());
        if (inner && inner->kind == ExprKind::Index) {
            const auto& ix = static_cast<const IndexExpr&>(*inner);
            const Expr* base = strip_parens(ix.base.get());
            const Expr* idx = strip_parens(ix.index.get());
            if (base && base->kind == ExprKind::Ident && idx &&
                idx->kind == ExprKind::IntLit &&
                static_cast<const IntLit&>(*idx).value == 0) {
                const auto& id = static_cast<const IdentExpr&>(*base);
                if (id.ref && id.ref->is_array) {
                    if (allowed_addrof) allowed_addrof->push_back(u.span);
                    return true;
                }
            }
        }
    }
    return false;
}

class PointerScan {
public:
    PointerScan(const SourceUnit& unit) : unit_(unit), ast_(*unit.ast) {}

    std::vector<Diagnostic> run() {
        // Struct fields with pointer type are never synthesizable.
        for (const auto& d : ast_.decls) {
            if (d->kind != DeclKind::Struct) continue;
            const auto& sd = static_cast<const StructDecl&>(*d);
            for (const auto& f : sd.fields) {
                if (f.decl.pointer_depth > 0)
                    diags_.push_back(make_diag(
                        ErrorClass::T1_Pointer, Severity::Error, f.decl.name_span,
                        "pointer field '" + f.decl.name + "' in struct '" + sd.name +
                            "' is not synthesizable"));
            }
        }
        for (const auto& d : ast_.decls) {
            if (d->kind == DeclKind::Var) {
                const auto& vd = static_cast<const VarDecl&>(*d);
                for (const auto& dtor : vd.declarators)
                    note_decl("", dtor, /*param=*/false);
            }
            if (d->kind != DeclKind::Function) continue;
            const auto& fn = static_cast<const FunctionDecl&>(*d);
            for (const auto& p : fn.params) note_decl(fn.name, p.decl, /*param=*/true);
            if (!fn.body) continue;
            walk_stmts(*fn.body, [&](const Stmt& s) {
                if (s.kind != StmtKind::DeclStmt) return;
                for (const auto& dtor : static_cast<const DeclStmt&>(s).declarators)
                    note_decl(fn.name, dtor, /*param=*/false);
            });
        }
        // Classify all uses within each function body.
        for (const auto& d : ast_.decls) {
            if (d->kind != DeclKind::Function) continue;
            const auto& fn = static_cast<const FunctionDecl&>(*d);
            if (fn.body) scan_stmt(*fn.body, fn.name);
        }
        emit();
        return std::move(diags_);
    }

private:
    const SourceUnit& unit_;
    const Ast& ast_;
    std::map<VarId, PointerInfo> ptrs_;
    std::vector<Diagnostic> diags_;
    std::vector<Span> allowed_addrof_;
    std::vector<Span> binding_rhs_spans_;  // initializers/assignments binding a pointer
    std::vector<std::pair<Span, std::string>> stray_addrof_;  // span, function

    void note_decl(const std::string& func, const Declarator& d, bool param) {
        if (d.pointer_depth == 0 || d.is_fn_ptr) return;
        PointerInfo info;
        info.id = VarId{func, d.name_span.begin, d.name};
        info.func = func;
        info.decl_span = d.name_span;
        info.depth = d.pointer_depth;
        info.is_param = param;
        if (d.init) {
            ++info.bindings;
            info.bound_to_array = is_array_name_expr(d.init.get(), &allowed_addrof_);
            binding_rhs_spans_.push_back(d.init->span);
        }
        ptrs_[info.id] = std::move(info);
    }

    PointerInfo* lookup(const Expr* e) {
        e = strip_parens(e);
        if (!e || e->kind != ExprKind::Ident) return nullptr;
        const auto& id = static_cast<const IdentExpr&>(*e);
        if (!id.ref) return nullptr;
        auto it = ptrs_.find(id.ref->id);
        return it == ptrs_.end() ? nullptr : &it->second;
    }

    void scan_stmt(const Stmt& s, const std::string& func) {
        walk_stmt_exprs(s, [&](const Expr& e) { classify(e, func); });
    }

    // Called once per expression node (walk_stmt_exprs already recurses), so
    // each node only inspects its immediate children.
    void classify(const Expr& e, const std::string& func) {
        switch (e.kind) {
            case ExprKind::Index: {
                const auto& ix = static_cast<const IndexExpr&>(e);
                if (PointerInfo* p = lookup(ix.base.get())) p->other_uses -= 1;
                // The generic Ident rule below adds 1; indexing nets to 0.
                break;
            }
            case ExprKind::Assign: {
                const auto& a = static_cast<const AssignExpr&>(e);
                if (PointerInfo* p = lookup(a.lhs.get())) {
                    p->other_uses -= 1;  // target ident is a binding, not a use
                    if (a.op == AssignOp::Set) {
                        ++p->bindings;
                        if (p->bindings == 1)
                            p->bound_to_array =
                                is_array_name_expr(a.rhs.get(), &allowed_addrof_);
                        if (a.rhs) binding_rhs_spans_.push_back(a.rhs->span);
                    } else {
                        ++p->other_uses;  // pointer arithmetic via +=/-=
                    }
                }
                break;
            }
            case ExprKind::Unary: {
                const auto& u = static_cast<const UnaryExpr&>(e);
                if (u.op == UnOp::AddrOf) {
                    bool allowed = std::any_of(
                        allowed_addrof_.begin(), allowed_addrof_.end(),
                        [&](const Span& sp) { return sp.begin == u.span.begin; });
                    if (!allowed) stray_addrof_.emplace_back(u.span, func);
                }
                break;
            }
            case ExprKind::Ident: {
                const auto& id = static_cast<const IdentExpr&>(e);
                if (!id.ref) break;
                auto it = ptrs_.find(id.ref->id);
                if (it != ptrs_.end()) ++it->second.other_uses;
                break;
            }
            default:
                break;
        }
    }

    void emit() {
        for (auto& [id, p] : ptrs_) {
            std::string where =
                p.func.empty() ? "at file scope" : "in function '" + p.func + "'";
            if (p.depth >= 2) {
                diags_.push_back(make_diag(ErrorClass::T1_Pointer, Severity::Error,
                                           p.decl_span,
                                           "double pointer '" + id.name + "' " + where +
                                               " is not synthesizable"));
                continue;
            }
            bool analyzable = !p.is_param && p.bindings == 1 && p.bound_to_array &&
                              p.other_uses <= 0;
            if (!analyzable)
                diags_.push_back(make_diag(ErrorClass::T1_Pointer, Severity::Error,
                                           p.decl_span,
                                           "pointer '" + id.name + "' " + where +
                                               " is not statically analyzable"));
        }
        // Address-of expressions outside a pointer binding (those are already
        // diagnosed through the pointer itself).
        for (const auto& [span, func] : stray_addrof_) {
            bool covered = false;
            for (const Span& b : binding_rhs_spans_) {
                if (b.begin <= span.begin && span.end <= b.end) {
                    covered = true;
                    break;
                }
            }
            if (!covered)
                diags_.push_back(make_diag(
                    ErrorClass::T1_Pointer, Severity::Error, span,
                    "address-of expression in function '" + func +
                        "' is not statically analyzable"));
        }
    }
};

}  // namespace

std::vector<Diagnostic> detect_pointer(const SourceUnit& unit) {
    if (!unit.ast) return {};
    PointerScan scan(unit);
    return scan.run();
}

// ---- T2 --------------------------------------------------------------------

std::vector<Diagnostic> detect_dynamic(const SourceUnit& unit) {
    std::vector<Diagnostic> out;
    const Ast& ast = *unit.ast;
    auto scan_expr = [&](const Expr& e) {
        if (e.kind != ExprKind::Call) return;
        const auto& call = static_cast<const CallExpr&>(e);
        std::string name = call.callee_name();
        if (name == "malloc" || name == "calloc" || name == "realloc")
            out.push_back(make_diag(ErrorClass::T2_DynamicArray, Severity::Error, e.span,
                                    "call to '" + name + "' allocates dynamic memory"));
        else if (name == "free")
            out.push_back(make_diag(ErrorClass::T2_DynamicArray, Severity::Error, e.span,
                                    "call to 'free' releases dynamic memory"));
    };
    auto scan_declarator = [&](const std::string& fn, const Declarator& d) {
        for (const auto& dim : d.array_dims) {
            if (!dim) continue;
            if (!eval_const_expr(*dim, ast))
                out.push_back(make_diag(
                    ErrorClass::T2_DynamicArray, Severity::Error, d.name_span,
                    "variable-length array '" + d.name + "'" +
                        (fn.empty() ? std::string() : " in function '" + fn + "'") +
                        " has a non-constant size"));
        }
    };
    for (const auto& d : ast.decls) {
        if (d->kind == DeclKind::Var) {
            const auto& vd = static_cast<const VarDecl&>(*d);
            for (const auto& dtor : vd.declarators) {
                scan_declarator("", dtor);
                if (dtor.init) walk_exprs(*dtor.init, scan_expr);
            }
        }
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmt_exprs(*fn.body, scan_expr);
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::DeclStmt) return;
            for (const auto& dtor : static_cast<const DeclStmt&>(s).declarators)
                scan_declarator(fn.name, dtor);
        });
    }
    return out;
}

// ---- T3 --------------------------------------------------------------------

std::vector<Diagnostic> detect_recursion(const SourceUnit& unit) {
    std::vector<Diagnostic> out;
    const Ast& ast = *unit.ast;
    std::map<std::string, std::set<std::string>> edges;
    std::map<std::pair<std::string, std::string>, Span> first_call;

    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        edges[fn.name];  // ensure node exists
        walk_stmt_exprs(*fn.body, [&](const Expr& e) {
            if (e.kind != ExprKind::Call) return;
            std::string callee = static_cast<const CallExpr&>(e).callee_name();
            if (callee.empty() || !ast.functions.count(callee)) return;
            edges[fn.name].insert(callee);
            auto key = std::make_pair(fn.name, callee);
            if (!first_call.count(key)) first_call[key] = e.span;
        });
    }

    // Shortest cycle through each function (BFS; map iteration is sorted, so
    // the result is deterministic).
    for (const auto& [f, succs] : edges) {
        std::map<std::string, std::string> parent;
        std::vector<std::string> queue;
        for (const auto& s : succs) {
            if (!parent.count(s)) {
                parent[s] = f;
                queue.push_back(s);
            }
        }
        std::string found;
        for (size_t qi = 0; qi < queue.size() && found.empty(); ++qi) {
            const std::string cur = queue[qi];
            if (cur == f) {
                found = cur;
                break;
            }
            auto it = edges.find(cur);
            if (it == edges.end()) continue;
            for (const auto& nxt : it->second) {
                if (nxt == f) {
                    parent[f] = cur;
                    found = f;
                    break;
                }
                if (!parent.count(nxt)) {
                    parent[nxt] = cur;
                    queue.push_back(nxt);
                }
            }
        }
        if (found.empty()) continue;
        // Reconstruct f -> ... -> f.
        std::vector<std::string> path{f};
        std::string cur = f;
        while (true) {
            cur = parent[cur];
            path.push_back(cur);
            if (cur == f) break;
        }
        std::reverse(path.begin(), path.end());
        Span site = first_call.count({f, path[1]}) ? first_call[{f, path[1]}]
                                                   : ast.function(f)->name_span;
        if (path.size() == 2) {  // self recursion: f -> f
            out.push_back(make_diag(ErrorClass::T3_Recursion, Severity::Error, site,
                                    "function '" + f + "' calls itself"));
        } else {
            std::string cycle;
            for (size_t i = 0; i < path.size(); ++i) {
                if (i) cycle += " -> ";
                cycle += path[i];
            }
            out.push_back(make_diag(ErrorClass::T3_Recursion, Severity::Error, site,
                                    "function '" + f + "' participates in recursion cycle " +
                                        cycle));
        }
    }
    return out;
}

// ---- T4 --------------------------------------------------------------------

std::vector<Diagnostic> detect_bitwidth(const SourceUnit& unit,
                                        const interp::RangeProfile& profile) {
    std::vector<Diagnostic> out;
    for (const auto& [id, st] : profile.vars) {
        if (!st.declared.is_integer()) continue;
        int declared = st.declared.bit_width();
        if (declared <= 1) continue;
        int needed;
        try {
            needed = bitwidth::bits_required(st.min, st.max, st.min < 0);
        } catch (const bitwidth::DomainError&) {
            continue;
        }
        if (needed < declared) {
            Span sp;
            sp.begin = id.decl_begin;
            sp.end = id.decl_begin + static_cast<uint32_t>(id.name.size());
            sp.line = line_of_offset(unit, id.decl_begin);
            std::string where =
                id.func.empty() ? "at file scope" : "in function '" + id.func + "'";
            out.push_back(make_diag(ErrorClass::T4_BitWidth, Severity::Advisory, sp,
                                    "variable '" + id.name + "' " + where + " is declared " +
                                        std::to_string(declared) + " bits but needs only " +
                                        std::to_string(needed) + " bits"));
        }
    }
    return out;
}

// ---- T5 --------------------------------------------------------------------

std::vector<Diagnostic> detect_boolean(const SourceUnit& unit) {
    std::vector<Diagnostic> out;
    const Ast& ast = *unit.ast;
    auto is_bool = [&](const Expr* e) -> std::optional<std::string> {
        auto t = expr_type(*e, ast);
        if (!t || t->base != TypeSpec::Base::Bool) return std::nullopt;
        const Expr* s = strip_parens(e);
        if (s && s->kind == ExprKind::Ident)
            return static_cast<const IdentExpr*>(s)->name;
        if (s && s->kind == ExprKind::Member)
            return static_cast<const MemberExpr*>(s)->member;
        return std::string("<expr>");
    };
    auto scan = [&](const Expr& e) {
        if (e.kind == ExprKind::Unary) {
            const auto& u = static_cast<const UnaryExpr&>(e);
            bool incdec = u.op == UnOp::PreInc || u.op == UnOp::PostInc ||
                          u.op == UnOp::PreDec || u.op == UnOp::PostDec;
            if (!incdec || !u.operand) return;
            if (auto name = is_bool(u.operand.get())) {
                bool inc = u.op == UnOp::PreInc || u.op == UnOp::PostInc;
                out.push_back(make_diag(ErrorClass::T5_BooleanOp, Severity::Error, e.span,
                                        std::string("operator '") + (inc ? "++" : "--") +
                                            "' applied to boolean '" + *name + "'"));
            }
        } else if (e.kind == ExprKind::Assign) {
            const auto& a = static_cast<const AssignExpr&>(e);
            if (a.op == AssignOp::Set || !a.lhs) return;
            if (auto name = is_bool(a.lhs.get())) {
                const char* op = a.op == AssignOp::Add   ? "+="
                                 : a.op == AssignOp::Sub ? "-="
                                 : a.op == AssignOp::Mul ? "*="
                                                         : "op=";
                out.push_back(make_diag(ErrorClass::T5_BooleanOp, Severity::Error, e.span,
                                        std::string("operator '") + op +
                                            "' applied to boolean '" + *name + "'"));
            }
        }
    };
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (fn.body) walk_stmt_exprs(*fn.body, scan);
    }
    return out;
}

// ---- T6 --------------------------------------------------------------------

std::vector<Diagnostic> detect_incomplete(const SourceUnit& unit) {
    std::vector<Diagnostic> out;
    const Ast& ast = *unit.ast;
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::Switch) return;
            const auto& sw = static_cast<const SwitchStmt&>(s);
            if (sw.has_default()) return;

            std::set<long long> covered;
            for (const auto& sec : sw.sections)
                for (const auto& l : sec.labels)
                    if (!l.is_default && l.value)
                        if (auto v = eval_const_expr(*l.value, ast)) covered.insert(*v);

            std::string name = "<expression>";
            const Expr* scrut = strip_parens(sw.scrutinee.get());
            if (scrut && scrut->kind == ExprKind::Ident)
                name = static_cast<const IdentExpr*>(scrut)->name;

            auto t = sw.scrutinee ? expr_type(*sw.scrutinee, ast) : std::nullopt;
            bool complete = false;
            if (t) {
                if (t->base == TypeSpec::Base::Enum) {
                    auto it = ast.enums.find(t->tag);
                    if (it != ast.enums.end()) {
                        complete = true;
                        for (const auto& en : it->second->enumerators)
                            if (!covered.count(en.value)) complete = false;
                    }
                } else if (t->base == TypeSpec::Base::Bool) {
                    complete = covered.count(0) && covered.count(1);
                } else if (t->base == TypeSpec::Base::AcInt && t->ac_width <= 12) {
                    long long lo = t->ac_is_signed ? -(1ll << (t->ac_width - 1)) : 0;
                    long long hi = t->ac_is_signed ? (1ll << (t->ac_width - 1)) - 1
                                                   : (1ll << t->ac_width) - 1;
                    complete = true;
                    for (long long v = lo; v <= hi; ++v)
                        if (!covered.count(v)) {
                            complete = false;
                            break;
                        }
                }
            }
            if (!complete)
                out.push_back(make_diag(
                    ErrorClass::T6_IncompleteStatement, Severity::Error, sw.span,
                    "switch on '" + name +
                        "' does not cover all values of its type and has no default"));
        });
    }
    return out;
}

// ---- T7 --------------------------------------------------------------------

std::vector<Diagnostic> detect_unsupported(const SourceUnit& unit) {
    std::vector<Diagnostic> out;
    const Ast& ast = *unit.ast;
    static const std::set<std::string> kBadKeywords = {"virtual", "template", "class",
                                                       "new",     "delete",   "operator"};
    std::vector<Span> keyword_spans;
    for (const Token& t : unit.tokens.tokens) {
        if (t.kind == TokenKind::Keyword && kBadKeywords.count(t.text)) {
            keyword_spans.push_back(t.span);
            out.push_back(make_diag(ErrorClass::T7_UnsupportedStruct, Severity::Error,
                                    t.span,
                                    "'" + t.text + "' is not synthesizable"));
        }
    }
    auto covered_by_keyword = [&](Span sp) {
        for (const Span& k : keyword_spans)
            if (sp.begin <= k.begin && k.end <= sp.end) return true;
        return false;
    };
    auto flag_fn_ptr = [&](const Declarator& d, const std::string& where) {
        if (d.is_fn_ptr)
            out.push_back(make_diag(ErrorClass::T7_UnsupportedStruct, Severity::Error,
                                    d.name_span,
                                    "function pointer '" + d.name + "' " + where +
                                        " is not synthesizable"));
    };
    for (const auto& d : ast.decls) {
        if (d->kind == DeclKind::Var) {
            for (const auto& dtor : static_cast<const VarDecl&>(*d).declarators)
                flag_fn_ptr(dtor, "at file scope");
        } else if (d->kind == DeclKind::Struct) {
            const auto& sd = static_cast<const StructDecl&>(*d);
            for (const auto& f : sd.fields) flag_fn_ptr(f.decl, "in struct '" + sd.name + "'");
            for (size_t i = 0; i < sd.foreign_member_spans.size(); ++i) {
                if (!covered_by_keyword(sd.foreign_member_spans[i]))
                    out.push_back(make_diag(ErrorClass::T7_UnsupportedStruct,
                                            Severity::Error, sd.foreign_member_spans[i],
                                            "unsupported member in struct '" + sd.name +
                                                "'"));
            }
        } else if (d->kind == DeclKind::Foreign) {
            const auto& fd = static_cast<const ForeignDecl&>(*d);
            if (!fd.is_directive && !covered_by_keyword(fd.span))
                out.push_back(make_diag(ErrorClass::T7_UnsupportedStruct, Severity::Error,
                                        fd.span, "unsupported construct"));
        } else if (d->kind == DeclKind::Function) {
            const auto& fn = static_cast<const FunctionDecl&>(*d);
            for (const auto& p : fn.params)
                flag_fn_ptr(p.decl, "in function '" + fn.name + "'");
            if (!fn.body) continue;
            walk_stmts(*fn.body, [&](const Stmt& s) {
                if (s.kind == StmtKind::DeclStmt) {
                    for (const auto& dtor : static_cast<const DeclStmt&>(s).declarators)
                        flag_fn_ptr(dtor, "in function '" + fn.name + "'");
                } else if (s.kind == StmtKind::Foreign) {
                    const auto& fs = static_cast<const ForeignStmt&>(s);
                    if (!fs.is_directive && !covered_by_keyword(fs.span))
                        out.push_back(make_diag(ErrorClass::T7_UnsupportedStruct,
                                                Severity::Error, fs.span,
                                                "unsupported construct in function '" +
                                                    fn.name + "'"));
                }
            });
        }
    }
    return out;
}

// ---- T8 --------------------------------------------------------------------

std::vector<Diagnostic> detect_exception(const SourceUnit& unit,
                                         const std::vector<interp::ExecEnv>* dataset,
                                         const std::string& entry) {
    std::vector<Diagnostic> out;
    const Ast& ast = *unit.ast;

    auto scan = [&](const Expr& e) {
        if (e.kind == ExprKind::Index) {
            const auto& ix = static_cast<const IndexExpr&>(e);
            const Expr* base = strip_parens(ix.base.get());
            if (!base || base->kind != ExprKind::Ident || !ix.index) return;
            const auto& id = static_cast<const IdentExpr&>(*base);
            if (!id.ref || !id.ref->is_array || id.ref->array_length < 0) return;
            if (id.ref->kind == VarRef::Kind::Param) return;
            auto k = eval_const_expr(*ix.index, ast);
            if (!k) return;
            if (*k < 0 || *k >= id.ref->array_length)
                out.push_back(make_diag(ErrorClass::T8_Exception, Severity::Error, e.span,
                                        "index " + std::to_string(*k) +
                                            " is out of bounds for array '" + id.name +
                                            "' of size " +
                                            std::to_string(id.ref->array_length)));
        } else if (e.kind == ExprKind::Binary || e.kind == ExprKind::Assign) {
            const Expr* lhs = nullptr;
            const Expr* rhs = nullptr;
            bool is_shift = false;
            if (e.kind == ExprKind::Binary) {
                const auto& b = static_cast<const BinaryExpr&>(e);
                is_shift = b.op == cfront::BinOp::Shl || b.op == cfront::BinOp::Shr;
                lhs = b.lhs.get();
                rhs = b.rhs.get();
            } else {
                const auto& a = static_cast<const AssignExpr&>(e);
                is_shift = a.op == AssignOp::Shl || a.op == AssignOp::Shr;
                lhs = a.lhs.get();
                rhs = a.rhs.get();
            }
            if (!is_shift || !lhs || !rhs) return;
            auto k = eval_const_expr(*rhs, ast);
            if (!k) return;
            int width = 32;
            if (auto t = expr_type(*lhs, ast); t && t->is_integer())
                width = std::max(32, t->bit_width());
            if (*k < 0 || *k >= width)
                out.push_back(make_diag(ErrorClass::T8_Exception, Severity::Error, e.span,
                                        "shift by " + std::to_string(*k) + " exceeds the " +
                                            std::to_string(width) + "-bit operand width"));
        }
    };
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (fn.body) walk_stmt_exprs(*fn.body, scan);
    }

    if (dataset && !entry.empty()) {
        std::set<std::pair<int, uint32_t>> seen;
        for (const auto& env : *dataset) {
            interp::ExecResult r = interp::run(unit, entry, env);
            if (r.ok() || !r.trap) continue;
            auto key = std::make_pair(static_cast<int>(r.trap->kind), r.trap->span.begin);
            if (!seen.insert(key).second) continue;
            out.push_back(make_diag(ErrorClass::T8_Exception, Severity::Error, r.trap->span,
                                    std::string("runtime trap ") +
                                        interp::trap_kind_name(r.trap->kind) + " (" +
                                        r.trap->detail + ")"));
        }
    }
    return out;
}

// ---- aggregate --------------------------------------------------------------

size_t CompileReport::error_count() const {
    size_t n = 0;
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) ++n;
    return n;
}

bool CompileReport::has_class(ErrorClass c) const {
    for (const auto& d : diagnostics)
        if (d.error_class == c) return true;
    return false;
}

std::string CompileReport::to_json() const {
    nlohmann::json j;
    j["verdict"] = pass ? "PASS" : "FAIL";
    j["diagnostics"] = nlohmann::json::array();
    for (const auto& d : diagnostics) {
        j["diagnostics"].push_back({{"class", class_code(d.error_class)},
                                    {"severity", d.severity == Severity::Error
                                                     ? "ERROR"
                                                     : "ADVISORY"},
                                    {"line", d.span.line},
                                    {"message", d.message}});
    }
    j["log"] = log;
    return j.dump(2);
}

CompileReport check(const SourceUnit& unit, const interp::RangeProfile* profile,
                    const std::vector<interp::ExecEnv>* dataset,
                    const std::string& entry) {
    CompileReport report;
    for (const auto& le : unit.lex_errors)
        report.diagnostics.push_back(
            make_diag(ErrorClass::Syntax, Severity::Error, le.span, le.message));
    for (const auto& pe : unit.parse_errors)
        report.diagnostics.push_back(
            make_diag(ErrorClass::Syntax, Severity::Error, pe.span, pe.message));

    if (unit.ast) {
        auto add = [&](std::vector<Diagnostic> v) {
            for (auto& d : v) report.diagnostics.push_back(std::move(d));
        };
        add(detect_pointer(unit));
        add(detect_dynamic(unit));
        add(detect_recursion(unit));
        if (profile) add(detect_bitwidth(unit, *profile));
        add(detect_boolean(unit));
        add(detect_incomplete(unit));
        add(detect_unsupported(unit));
        add(detect_exception(unit, dataset, entry));
    }

    std::stable_sort(report.diagnostics.begin(), report.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
                         return static_cast<int>(a.error_class) <
                                static_cast<int>(b.error_class);
                     });
    report.pass = unit.parsed_ok() && report.error_count() == 0;
    for (const auto& d : report.diagnostics) {
        report.log += d.message;
        report.log += '\n';
    }
    return report;
}

CompileReport check_external(const SourceUnit& unit, const std::string& command) {
    CompileReport report;
    std::string tmp = "/tmp/hlsrepair_ext_XXXXXX";
    std::vector<char> path(tmp.begin(), tmp.end());
    path.push_back('\0');
    int fd = mkstemp(path.data());
    if (fd < 0) throw std::runtime_error("cannot create temp file for --compile-cmd");
    FILE* f = fdopen(fd, "wb");
    fwrite(unit.bytes.data(), 1, unit.bytes.size(), f);
    fclose(f);

    std::string cmd = command + " " + path.data() + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("cannot run --compile-cmd: " + command);
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof(buf), pipe)) report.log.append(buf, n);
    int status = pclose(pipe);
    std::remove(path.data());
    report.pass = status == 0;
    return report;
}

}  // namespace hlsrepair::detect
