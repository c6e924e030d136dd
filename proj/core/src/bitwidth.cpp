#include "hlsrepair/bitwidth.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hlsrepair::bitwidth {

using namespace cfront;

int bits_required(long long min, long long max, bool is_signed) {
    if (min > max) throw DomainError("bits_required: min > max");
    if (!is_signed && min < 0)
        throw DomainError("bits_required: unsigned range with negative minimum");
    for (int w = 1; w < 64; ++w) {
        if (is_signed) {
            long long lo = -(1ll << (w - 1));
            long long hi = (1ll << (w - 1)) - 1;
            if (min >= lo && max <= hi) return w;
        } else {
            unsigned long long hi = (1ull << w) - 1;
            if (static_cast<unsigned long long>(max) <= hi) return w;
        }
    }
    return 64;
}

const PlanEntry* BitWidthPlan::find(const std::string& func, const std::string& name) const {
    for (const auto& [id, e] : entries)
        if (id.func == func && id.name == name) return &e;
    return nullptr;
}

std::string BitWidthPlan::to_json() const {
    nlohmann::json j;
    j["entries"] = nlohmann::json::array();
    for (const auto& [id, e] : entries) {
        j["entries"].push_back({{"function", id.func},
                                {"name", id.name},
                                {"decl_offset", id.decl_begin},
                                {"width", e.width},
                                {"signed", e.is_signed},
                                {"min", e.observed_min},
                                {"max", e.observed_max},
                                {"declared_width", e.declared_width},
                                {"policy", e.policy == HeadroomPolicy::GuardBit
                                               ? "guard"
                                               : "none"}});
    }
    return j.dump(2);
}

BitWidthPlan plan(const RangeProfile& profile, HeadroomPolicy policy) {
    BitWidthPlan p;
    for (const auto& [id, st] : profile.vars) {
        if (!st.declared.is_integer()) continue;
        int declared = st.declared.bit_width();
        if (declared <= 1) continue;

        // Unsigned only when observed non-negative and either declared
        // unsigned or never fed by a subtraction; anything else keeps sign.
        bool make_unsigned =
            st.min >= 0 && (!st.declared.is_signed_type() || !st.has_subtraction_store);
        int w = bits_required(st.min, st.max, !make_unsigned);
        if (policy == HeadroomPolicy::GuardBit) w += 1;
        w = std::min(w, declared);
        if (w >= declared) continue;  // nothing to gain

        PlanEntry e;
        e.is_signed = !make_unsigned;
        e.width = w;
        e.observed_min = st.min;
        e.observed_max = st.max;
        e.declared_width = declared;
        e.policy = policy;
        p.entries.emplace(id, e);
    }
    return p;
}

namespace {

std::string ac_type_text(const TypeSpec& orig, const PlanEntry& e) {
    std::string out;
    if (orig.is_static) out += "static ";
    if (orig.is_const) out += "const ";
    out += "ac_int<" + std::to_string(e.width) + ", " +
           (e.is_signed ? "true" : "false") + ">";
    return out;
}

// Variables whose address is taken cannot be retyped without changing
// aliasing; collect them for the skip list.
std::set<VarId> address_taken_vars(const Ast& ast) {
    std::set<VarId> out;
    auto scan = [&](const Expr& e) {
        if (e.kind != ExprKind::Unary) return;
        const auto& u = static_cast<const UnaryExpr&>(e);
        if (u.op != UnOp::AddrOf || !u.operand) return;
        const Expr* t = u.operand.get();
        while (t && t->kind == ExprKind::Paren)
            t = static_cast<const ParenExpr*>(t)->inner.get();
        if (t && t->kind == ExprKind::Ident) {
            const auto& id = static_cast<const IdentExpr&>(*t);
            if (id.ref) out.insert(id.ref->id);
        }
    };
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (fn.body) walk_stmt_exprs(*fn.body, scan);
    }
    return out;
}

struct DeclSite {
    const TypeSpec* type;
    const std::vector<Declarator>* declarators;
    std::string func;
    Span stmt_span;
};

void collect_decl_sites(const Ast& ast, std::vector<DeclSite>& out) {
    for (const auto& d : ast.decls) {
        if (d->kind == DeclKind::Var) {
            const auto& vd = static_cast<const VarDecl&>(*d);
            out.push_back(DeclSite{&vd.type, &vd.declarators, "", vd.span});
        }
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::DeclStmt) return;
            const auto& ds = static_cast<const DeclStmt&>(s);
            out.push_back(DeclSite{&ds.type, &ds.declarators, fn.name, ds.span});
        });
    }
}

}  // namespace

ApplyOutcome apply(const SourceUnit& unit, const BitWidthPlan& plan) {
    std::set<VarId> addr_taken = address_taken_vars(*unit.ast);
    std::vector<TextEdit> edits;
    ApplyOutcome outcome{unit, {}, {}};

    auto plan_for = [&](const std::string& func,
                        const Declarator& d) -> const PlanEntry* {
        auto it = plan.entries.find(VarId{func, d.name_span.begin, d.name});
        return it == plan.entries.end() ? nullptr : &it->second;
    };
    auto try_apply_var = [&](const std::string& func, const Declarator& d,
                             const PlanEntry* e) -> bool {
        VarId id{func, d.name_span.begin, d.name};
        if (!e) return false;
        if (d.pointer_depth > 0 || d.is_fn_ptr || d.is_array()) {
            outcome.skipped.emplace_back(id, "not a scalar declaration");
            return false;
        }
        if (addr_taken.count(id)) {
            outcome.skipped.emplace_back(id, "address of variable is taken");
            return false;
        }
        outcome.applied.push_back(id);
        return true;
    };

    std::vector<DeclSite> sites;
    collect_decl_sites(*unit.ast, sites);
    for (const DeclSite& site : sites) {
        std::vector<const PlanEntry*> entry_per_decl(site.declarators->size(), nullptr);
        size_t applied_here = 0;
        for (size_t i = 0; i < site.declarators->size(); ++i) {
            const PlanEntry* e = plan_for(site.func, (*site.declarators)[i]);
            if (e && try_apply_var(site.func, (*site.declarators)[i], e)) {
                entry_per_decl[i] = e;
                ++applied_here;
            }
        }
        if (applied_here == 0) continue;

        bool uniform = applied_here == site.declarators->size();
        const PlanEntry* first = entry_per_decl[0];
        for (const PlanEntry* e : entry_per_decl)
            if (!e || !first || e->width != first->width || e->is_signed != first->is_signed)
                uniform = false;

        if (uniform) {
            edits.push_back(TextEdit{site.type->span, ac_type_text(*site.type, *first),
                                     "bitwidth-apply"});
        } else {
            // Mixed plan inside one statement: split it into one declaration
            // per declarator, preserving each declarator's source text.
            std::string repl;
            std::string orig_type(span_text(unit, site.type->span));
            for (size_t i = 0; i < site.declarators->size(); ++i) {
                const Declarator& d = (*site.declarators)[i];
                if (i) repl += " ";
                repl += entry_per_decl[i] ? ac_type_text(*site.type, *entry_per_decl[i])
                                          : orig_type;
                repl += " ";
                repl += std::string(span_text(unit, d.span));
                repl += ";";
            }
            edits.push_back(TextEdit{site.stmt_span, repl, "bitwidth-apply-split"});
        }
    }

    // Scalar parameters are by-value, so retyping them is safe as well.
    for (const auto& d : unit.ast->decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        for (const auto& p : fn.params) {
            const PlanEntry* e = plan_for(fn.name, p.decl);
            if (e && try_apply_var(fn.name, p.decl, e))
                edits.push_back(
                    TextEdit{p.type.span, ac_type_text(p.type, *e), "bitwidth-apply"});
        }
    }

    if (edits.empty()) return outcome;
    auto res = apply_edits(unit, std::move(edits));
    if (auto* conflict = std::get_if<RewriteConflict>(&res))
        throw std::runtime_error("bitwidth apply conflict: " + conflict->message);
    outcome.unit = std::move(std::get<SourceUnit>(res));
    return outcome;
}

// ---------------------------------------------------------------------------
// Deterministic optimizer-program generator
// ---------------------------------------------------------------------------

namespace {

struct Target {
    VarId id;
    std::string report_name;
    int index = 0;
};

// Integer scalar declarators across all functions plus file scope.
std::vector<Target> collect_targets(const Ast& ast) {
    std::vector<Target> out;
    std::map<std::string, int> name_count;
    auto add = [&](const std::string& func, const TypeSpec& t, const Declarator& d) {
        if (!t.is_integer() || d.pointer_depth > 0 || d.is_fn_ptr || d.is_array()) return;
        Target tg;
        tg.id = VarId{func, d.name_span.begin, d.name};
        out.push_back(tg);
        ++name_count[d.name];
    };
    for (const auto& d : ast.decls) {
        if (d->kind == DeclKind::Var) {
            const auto& vd = static_cast<const VarDecl&>(*d);
            for (const auto& dtor : vd.declarators) add("", vd.type, dtor);
        }
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        for (const auto& p : fn.params) add(fn.name, p.type, p.decl);
        if (!fn.body) continue;
        walk_stmts(*fn.body, [&](const Stmt& s) {
            if (s.kind != StmtKind::DeclStmt) return;
            const auto& ds = static_cast<const DeclStmt&>(s);
            for (const auto& dtor : ds.declarators) add(fn.name, ds.type, dtor);
        });
    }
    for (size_t i = 0; i < out.size(); ++i) {
        out[i].index = static_cast<int>(i);
        out[i].report_name = name_count[out[i].id.name] > 1 && !out[i].id.func.empty()
                                 ? out[i].id.func + "." + out[i].id.name
                                 : out[i].id.name;
    }
    return out;
}

const Target* target_for_expr(const Expr* e, const std::vector<Target>& targets) {
    while (e && e->kind == ExprKind::Paren)
        e = static_cast<const ParenExpr*>(e)->inner.get();
    if (!e || e->kind != ExprKind::Ident) return nullptr;
    const auto& id = static_cast<const IdentExpr&>(*e);
    if (!id.ref) return nullptr;
    for (const auto& t : targets)
        if (t.id == id.ref->id) return &t;
    return nullptr;
}

std::string note_call(const Target& t) {
    return " __bw_note(" + std::to_string(t.index) + ", " + t.id.name + ");";
}

}  // namespace

std::string emit_optimizer_program(const SourceUnit& unit, const std::string& entry) {
    const Ast& ast = *unit.ast;
    std::vector<Target> targets = collect_targets(ast);
    const FunctionDecl* entry_fn = ast.function(entry);
    if (!entry_fn || !entry_fn->body)
        throw std::invalid_argument("emit_optimizer_program: unknown entry " + entry);

    std::vector<TextEdit> edits;

    // All instrumentation is insertion-only and limited to statements that
    // are direct members of a block (or switch section), so edits never
    // overlap and never change branch structure. Assignments hidden in
    // sub-expressions or unbraced branch bodies are not observed; the
    // supported shapes cover plain statement-level stores and for-loops.
    auto insert_after = [&](uint32_t off, std::string text) {
        edits.push_back(TextEdit{Span{off, off}, std::move(text), "bw-instrument"});
    };

    std::function<void(const Stmt&, const std::string&)> visit;
    auto visit_members = [&](const std::vector<StmtPtr>& stmts, const std::string& fname) {
        for (const auto& sp : stmts) {
            const Stmt& s = *sp;
            if (s.kind == StmtKind::DeclStmt) {
                const auto& ds = static_cast<const DeclStmt&>(s);
                std::string notes;
                for (const auto& dtor : ds.declarators) {
                    if (!dtor.init) continue;
                    for (const auto& t : targets)
                        if (t.id == VarId{fname, dtor.name_span.begin, dtor.name})
                            notes += note_call(t);
                }
                if (!notes.empty()) insert_after(s.span.end, notes);
            } else if (s.kind == StmtKind::ExprStmt) {
                const auto& es = static_cast<const ExprStmt&>(s);
                if (!es.expr) continue;
                const Target* t = nullptr;
                if (es.expr->kind == ExprKind::Assign)
                    t = target_for_expr(static_cast<const AssignExpr&>(*es.expr).lhs.get(),
                                        targets);
                else if (es.expr->kind == ExprKind::Unary) {
                    const auto& u = static_cast<const UnaryExpr&>(*es.expr);
                    if (u.op == UnOp::PreInc || u.op == UnOp::PostInc ||
                        u.op == UnOp::PreDec || u.op == UnOp::PostDec)
                        t = target_for_expr(u.operand.get(), targets);
                }
                if (t) insert_after(s.span.end, note_call(*t));
            } else {
                visit(s, fname);
            }
        }
    };

    visit = [&](const Stmt& s, const std::string& fname) {
        switch (s.kind) {
            case StmtKind::Block:
                visit_members(static_cast<const BlockStmt&>(s).stmts, fname);
                break;
            case StmtKind::If: {
                const auto& n = static_cast<const IfStmt&>(s);
                if (n.then_stmt) visit(*n.then_stmt, fname);
                if (n.else_stmt) visit(*n.else_stmt, fname);
                break;
            }
            case StmtKind::While:
                if (static_cast<const WhileStmt&>(s).body)
                    visit(*static_cast<const WhileStmt&>(s).body, fname);
                break;
            case StmtKind::DoWhile:
                if (static_cast<const DoWhileStmt&>(s).body)
                    visit(*static_cast<const DoWhileStmt&>(s).body, fname);
                break;
            case StmtKind::Switch:
                for (const auto& sec : static_cast<const SwitchStmt&>(s).sections)
                    visit_members(sec.body, fname);
                break;
            case StmtKind::For: {
                const auto& fs = static_cast<const ForStmt&>(s);
                std::vector<const Target*> loop_targets;
                auto note_target = [&](const Expr* e) {
                    if (const Target* t = target_for_expr(e, targets)) {
                        if (std::find(loop_targets.begin(), loop_targets.end(), t) ==
                            loop_targets.end())
                            loop_targets.push_back(t);
                    }
                };
                bool decl_scoped = false;
                if (fs.init && fs.init->kind == StmtKind::ExprStmt) {
                    const auto& is = static_cast<const ExprStmt&>(*fs.init);
                    if (is.expr && is.expr->kind == ExprKind::Assign)
                        note_target(static_cast<const AssignExpr&>(*is.expr).lhs.get());
                }
                if (fs.init && fs.init->kind == StmtKind::DeclStmt) {
                    decl_scoped = true;
                    const auto& ds = static_cast<const DeclStmt&>(*fs.init);
                    for (const auto& dtor : ds.declarators)
                        for (const auto& t : targets)
                            if (t.id == VarId{fname, dtor.name_span.begin, dtor.name})
                                loop_targets.push_back(&t);
                }
                if (fs.step) {
                    const Expr* st = fs.step.get();
                    if (st->kind == ExprKind::Assign)
                        note_target(static_cast<const AssignExpr*>(st)->lhs.get());
                    if (st->kind == ExprKind::Unary)
                        note_target(static_cast<const UnaryExpr*>(st)->operand.get());
                }
                if (fs.body && fs.body->kind == StmtKind::Block) {
                    const auto& body = static_cast<const BlockStmt&>(*fs.body);
                    if (!loop_targets.empty()) {
                        std::string inner;
                        for (const Target* t : loop_targets) inner += note_call(*t);
                        insert_after(body.lbrace.end, inner);
                        if (!decl_scoped) {
                            std::string outer;
                            for (const Target* t : loop_targets) outer += note_call(*t);
                            insert_after(s.span.end, outer);
                        }
                    }
                    visit_members(body.stmts, fname);
                } else if (fs.body) {
                    visit(*fs.body, fname);
                }
                break;
            }
            default:
                break;
        }
    };

    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (!fn.body) continue;
        std::string param_notes;
        for (const auto& p : fn.params)
            for (const auto& t : targets)
                if (t.id == VarId{fn.name, p.decl.name_span.begin, p.decl.name})
                    param_notes += note_call(t);
        if (!param_notes.empty())
            edits.push_back(TextEdit{Span{fn.body->lbrace.end, fn.body->lbrace.end},
                                     param_notes, "bw-instrument"});
        visit_members(fn.body->stmts, fn.name);
    }

    // Rename the entry function; a wrapper with the original name reports
    // row-local ranges after the real body returns.
    edits.push_back(TextEdit{entry_fn->name_span, "__bw_inner_" + entry, "bw-wrapper"});

    size_t n = targets.size();
    std::ostringstream prologue;
    prologue << "long long __bw_min[" << std::max<size_t>(n, 1) << "];\n";
    prologue << "long long __bw_max[" << std::max<size_t>(n, 1) << "];\n";
    prologue << "int __bw_init[" << std::max<size_t>(n, 1) << "];\n";
    prologue << "void __bw_note(int i, long long v) {\n"
             << "    if (!__bw_init[i]) { __bw_init[i] = 1; __bw_min[i] = v; __bw_max[i] = v; }\n"
             << "    if (v < __bw_min[i]) __bw_min[i] = v;\n"
             << "    if (v > __bw_max[i]) __bw_max[i] = v;\n"
             << "}\n";
    edits.push_back(TextEdit{Span{0, 0, 1, 1}, prologue.str(), "bw-prologue"});

    std::ostringstream epilogue;
    epilogue << "\nvoid __bw_report() {\n";
    for (const Target& t : targets)
        epilogue << "    if (__bw_init[" << t.index << "]) printf(\"" << t.report_name
                 << " %lld %lld\\n\", __bw_min[" << t.index << "], __bw_max[" << t.index
                 << "]);\n";
    epilogue << "}\n";

    // Wrapper with the original entry signature.
    std::string ret_type = entry_fn->return_type.to_string();
    for (int i = 0; i < entry_fn->return_pointer_depth; ++i) ret_type += "*";
    epilogue << ret_type << " " << entry << "(";
    std::string fwd;
    for (size_t i = 0; i < entry_fn->params.size(); ++i) {
        const Param& p = entry_fn->params[i];
        if (i) {
            epilogue << ", ";
            fwd += ", ";
        }
        epilogue << std::string(span_text(
            unit, Span{p.type.span.begin, p.decl.span.end, 0, 0}));
        fwd += p.decl.name;
    }
    epilogue << ") {\n";
    bool is_void =
        entry_fn->return_type.base == TypeSpec::Base::Void && !entry_fn->return_pointer_depth;
    if (is_void) {
        epilogue << "    __bw_inner_" << entry << "(" << fwd << ");\n";
        epilogue << "    __bw_report();\n";
    } else {
        epilogue << "    " << ret_type << " __bw_result = __bw_inner_" << entry << "(" << fwd
                 << ");\n";
        epilogue << "    __bw_report();\n";
        epilogue << "    return __bw_result;\n";
    }
    epilogue << "}\n";
    uint32_t end = static_cast<uint32_t>(unit.bytes.size());
    edits.push_back(TextEdit{Span{end, end}, epilogue.str(), "bw-epilogue"});

    auto res = apply_edits(unit, std::move(edits));
    if (auto* conflict = std::get_if<RewriteConflict>(&res))
        throw std::runtime_error("optimizer-program instrumentation conflict: " +
                                 conflict->message);
    return std::get<SourceUnit>(res).bytes;
}

std::map<std::string, std::pair<long long, long long>> run_optimizer_program(
    const std::string& program_source, const std::string& entry,
    const std::vector<interp::ExecEnv>& dataset) {
    SourceUnit prog = SourceUnit::from_bytes("bw_optimizer.c", program_source);
    if (!prog.parsed_ok())
        throw std::runtime_error("optimizer program does not parse");
    std::map<std::string, std::pair<long long, long long>> folded;
    for (const auto& env : dataset) {
        interp::ExecResult r = interp::run(prog, entry, env);
        if (!r.ok()) continue;
        for (const std::string& line : r.obs.prints) {
            std::istringstream in(line);
            std::string name;
            long long lo, hi;
            if (!(in >> name >> lo >> hi)) continue;
            auto it = folded.find(name);
            if (it == folded.end()) {
                folded[name] = {lo, hi};
            } else {
                it->second.first = std::min(it->second.first, lo);
                it->second.second = std::max(it->second.second, hi);
            }
        }
    }
    return folded;
}

}  // namespace hlsrepair::bitwidth
