#include "hlsrepair/ppa.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "hlsrepair/detect.hpp"
#include "hlsrepair/llm.hpp"

namespace hlsrepair::ppa {

using namespace cfront;
using nlohmann::json;

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::Area: return "AREA";
        case Metric::Power: return "POWER";
        case Metric::Latency: return "LATENCY";
        case Metric::MemoryBandwidth: return "MEMORY_BANDWIDTH";
    }
    return "?";
}

std::optional<Metric> metric_from_string(const std::string& s) {
    std::string up;
    for (char c : s) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "AREA") return Metric::Area;
    if (up == "POWER") return Metric::Power;
    if (up == "LATENCY") return Metric::Latency;
    if (up == "MEMORY_BANDWIDTH" || up == "MEMORY" || up == "BANDWIDTH")
        return Metric::MemoryBandwidth;
    return std::nullopt;
}

BottleneckReport BottleneckReport::from_json(const std::string& text) {
    BottleneckReport r;
    json j = json::parse(text);
    for (const auto& e : j.value("entries", json::array())) {
        BottleneckEntry b;
        b.target = e.value("target", "");
        auto m = metric_from_string(e.value("metric", ""));
        if (!m) throw std::runtime_error("unknown metric in bottleneck report");
        b.metric = *m;
        b.magnitude = e.value("magnitude", 0.0);
        b.note = e.value("note", "");
        r.entries.push_back(std::move(b));
    }
    return r;
}

BottleneckReport BottleneckReport::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open bottleneck report: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

BottleneckReport BottleneckReport::from_csv(const std::string& text) {
    BottleneckReport r;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string name, metric, value;
        if (!std::getline(row, name, ',')) continue;
        if (!std::getline(row, metric, ',')) continue;
        std::getline(row, value, ',');
        auto m = metric_from_string(metric);
        if (!m) continue;  // header or junk row
        BottleneckEntry b;
        b.target = name;
        b.metric = *m;
        try {
            b.magnitude = value.empty() ? 0.0 : std::stod(value);
        } catch (...) {
            b.magnitude = 0.0;
        }
        b.note = metric + " bottleneck on " + name;
        r.entries.push_back(std::move(b));
    }
    return r;
}

std::optional<long long> loop_trip_count(const ForStmt& loop, const Ast& ast) {
    // init: `i = C0` or `T i = C0`
    std::optional<long long> start;
    const Expr* cond = loop.cond.get();
    if (loop.init && loop.init->kind == StmtKind::ExprStmt) {
        const auto& es = static_cast<const ExprStmt&>(*loop.init);
        if (es.expr && es.expr->kind == ExprKind::Assign) {
            const auto& a = static_cast<const AssignExpr&>(*es.expr);
            if (a.op == AssignOp::Set && a.rhs) start = eval_const_expr(*a.rhs, ast);
        }
    } else if (loop.init && loop.init->kind == StmtKind::DeclStmt) {
        const auto& ds = static_cast<const DeclStmt&>(*loop.init);
        if (ds.declarators.size() == 1 && ds.declarators[0].init)
            start = eval_const_expr(*ds.declarators[0].init, ast);
    }
    if (!start || !cond || cond->kind != ExprKind::Binary) return std::nullopt;
    const auto& c = static_cast<const BinaryExpr&>(*cond);
    if (c.op != BinOp::Lt && c.op != BinOp::Le) return std::nullopt;
    auto bound = c.rhs ? eval_const_expr(*c.rhs, ast) : std::nullopt;
    if (!bound) return std::nullopt;

    long long step = 0;
    const Expr* st = loop.step.get();
    if (!st) return std::nullopt;
    if (st->kind == ExprKind::Unary) {
        const auto& u = static_cast<const UnaryExpr&>(*st);
        if (u.op == UnOp::PreInc || u.op == UnOp::PostInc) step = 1;
    } else if (st->kind == ExprKind::Assign) {
        const auto& a = static_cast<const AssignExpr&>(*st);
        if (a.op == AssignOp::Add && a.rhs) {
            if (auto v = eval_const_expr(*a.rhs, ast)) step = *v;
        } else if (a.op == AssignOp::Set && a.rhs) {
            const Expr* r = a.rhs.get();
            while (r && r->kind == ExprKind::Paren)
                r = static_cast<const ParenExpr*>(r)->inner.get();
            if (r && r->kind == ExprKind::Binary) {
                const auto& b = static_cast<const BinaryExpr&>(*r);
                if (b.op == BinOp::Add && b.rhs)
                    if (auto v = eval_const_expr(*b.rhs, ast)) step = *v;
            }
        }
    }
    if (step <= 0) return std::nullopt;
    long long limit = *bound + (c.op == BinOp::Le ? 1 : 0);
    if (limit <= *start) return 0;
    return (limit - *start + step - 1) / step;
}

// ---------------------------------------------------------------------------
// Proxy estimator (PROXY: an op-count model, not synthesis results)
// ---------------------------------------------------------------------------

namespace {

long long expr_count(const Stmt& s) {
    long long n = 0;
    walk_stmt_exprs(s, [&](const Expr&) { ++n; });
    return n;
}

std::optional<int> unroll_factor_of(const std::string& pragma_text) {
    std::istringstream in(pragma_text);
    std::string hash, word;
    in >> hash >> word;
    if (hash != "#pragma" && hash.rfind("#pragma", 0) != 0) {
        if (hash != "#") return std::nullopt;
        in >> word;
    }
    if (word != "hls_unroll" && word != "unroll") return std::nullopt;
    std::string arg;
    in >> arg;
    if (arg.empty() || arg == "yes") return std::nullopt;  // full unroll marker
    try {
        return std::stoi(arg);
    } catch (...) {
        return std::nullopt;
    }
}

void estimate_list(const std::vector<StmtPtr>& stmts, const Ast& ast, PpaProxy& acc);

void estimate_stmt(const Stmt& s, const Ast& ast, PpaProxy& acc, int pending_unroll) {
    switch (s.kind) {
        case StmtKind::Block:
            estimate_list(static_cast<const BlockStmt&>(s).stmts, ast, acc);
            break;
        case StmtKind::For: {
            const auto& fs = static_cast<const ForStmt&>(s);
            long long body_ops = fs.body ? expr_count(*fs.body) : 0;
            auto trip = loop_trip_count(fs, ast);
            long long t = trip.value_or(16);  // coarse default for unknown trips
            long long f = std::max(1, pending_unroll);
            acc.latency += ((t + f - 1) / f) * std::max<long long>(body_ops, 1);
            acc.area += std::max<long long>(body_ops, 1) * f;
            break;
        }
        case StmtKind::While:
        case StmtKind::DoWhile: {
            long long body_ops = expr_count(s);
            acc.latency += body_ops * 16;  // unknown trip, coarse
            acc.area += body_ops;
            break;
        }
        case StmtKind::If: {
            const auto& n = static_cast<const IfStmt&>(s);
            long long cond_ops = 1;
            acc.latency += cond_ops;
            acc.area += cond_ops;
            if (n.then_stmt) estimate_stmt(*n.then_stmt, ast, acc, 0);
            if (n.else_stmt) estimate_stmt(*n.else_stmt, ast, acc, 0);
            break;
        }
        case StmtKind::Switch: {
            for (const auto& sec : static_cast<const SwitchStmt&>(s).sections)
                for (const auto& st : sec.body) estimate_stmt(*st, ast, acc, 0);
            break;
        }
        default: {
            long long ops = expr_count(s);
            acc.latency += ops;
            acc.area += ops;
            break;
        }
    }
}

void estimate_list(const std::vector<StmtPtr>& stmts, const Ast& ast, PpaProxy& acc) {
    int pending_unroll = 0;
    for (const auto& sp : stmts) {
        if (sp->kind == StmtKind::Pragma) {
            auto f = unroll_factor_of(static_cast<const PragmaStmt&>(*sp).text);
            pending_unroll = f.value_or(0);
            continue;
        }
        estimate_stmt(*sp, ast, acc, pending_unroll);
        pending_unroll = 0;
    }
}

}  // namespace

PpaProxy estimate(const SourceUnit& unit) {
    PpaProxy acc;
    for (const auto& d : unit.ast->decls) {
        if (d->kind != DeclKind::Function) continue;
        const auto& fn = static_cast<const FunctionDecl&>(*d);
        if (fn.body) estimate_list(fn.body->stmts, *unit.ast, acc);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

namespace {

uint32_t line_start_offset(const SourceUnit& unit, uint32_t offset) {
    uint32_t p = offset;
    while (p > 0 && unit.bytes[p - 1] != '\n') --p;
    return p;
}

std::string line_indent(const SourceUnit& unit, uint32_t line_start) {
    std::string indent;
    for (uint32_t p = line_start;
         p < unit.bytes.size() && (unit.bytes[p] == ' ' || unit.bytes[p] == '\t'); ++p)
        indent += unit.bytes[p];
    return indent;
}

bool pragma_already_above(const SourceUnit& unit, uint32_t line_start,
                          const std::string& pragma_text) {
    if (line_start == 0) return false;
    uint32_t prev_end = line_start - 1;  // the '\n'
    uint32_t prev_start = line_start_offset(unit, prev_end);
    std::string prev(unit.bytes.substr(prev_start, prev_end - prev_start));
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t\r");
        size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    return trim(prev) == trim(pragma_text);
}

struct ResolvedTarget {
    const FunctionDecl* function = nullptr;
    const ForStmt* loop = nullptr;
    Span decl_span{};       // array declaration (memory targets)
    bool is_array = false;
};

std::optional<ResolvedTarget> resolve_target(const SourceUnit& unit,
                                             const BottleneckEntry& entry) {
    const Ast& ast = *unit.ast;
    ResolvedTarget out;
    // line:<n> form: innermost loop covering that line, else the function.
    if (entry.target.rfind("line:", 0) == 0) {
        uint32_t line = static_cast<uint32_t>(std::stoul(entry.target.substr(5)));
        const ForStmt* found = nullptr;
        const FunctionDecl* ffn = nullptr;
        for (const auto& d : ast.decls) {
            if (d->kind != DeclKind::Function) continue;
            const auto& fn = static_cast<const FunctionDecl&>(*d);
            if (!fn.body) continue;
            walk_stmts(*fn.body, [&](const Stmt& s) {
                if (s.kind != StmtKind::For) return;
                uint32_t end_line = s.span.line + 0;
                (void)end_line;
                if (s.span.line <= line) {
                    const auto& fs = static_cast<const ForStmt&>(s);
                    if (!found || s.span.line >= found->span.line) {
                        // innermost = latest starting loop that still covers
                        if (!fs.body || fs.body->span.line >= line || s.span.line == line) {
                            found = &fs;
                            ffn = &fn;
                        }
                    }
                }
            });
        }
        if (found) {
            out.loop = found;
            out.function = ffn;
            return out;
        }
        return std::nullopt;
    }
    if (const FunctionDecl* fn = ast.function(entry.target); fn && fn->body) {
        out.function = fn;
        // Latency targets pick the first constant-trip loop in the function.
        walk_stmts(*fn->body, [&](const Stmt& s) {
            if (out.loop || s.kind != StmtKind::For) return;
            out.loop = static_cast<const ForStmt*>(&s);
        });
        return out;
    }
    // Global array?
    for (const auto& d : ast.decls) {
        if (d->kind != DeclKind::Var) continue;
        const auto& vd = static_cast<const VarDecl&>(*d);
        for (const auto& dtor : vd.declarators) {
            if (dtor.name == entry.target && dtor.is_array()) {
                out.is_array = true;
                out.decl_span = vd.span;
                return out;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

OptimizeOutcome optimize(const SourceUnit& unit, const BottleneckReport& report,
                         const rag::Retriever& strategies,
                         const OptimizeSettings& settings) {
    detect::CompileReport pre = detect::check(unit);
    if (!pre.pass)
        throw std::invalid_argument(
            "ppa::optimize requires a unit that passes the compatibility check");

    OptimizeOutcome outcome{unit, {}, {}};
    SourceUnit current = unit;

    for (const BottleneckEntry& entry : report.entries) {
        std::string query = entry.note.empty()
                                ? std::string(metric_name(entry.metric)) + " bottleneck"
                                : entry.note;
        const rag::StrategyEntry* strategy = nullptr;
        double score = 0;
        try {
            auto ranked = strategies.retrieve_strategy(query, 1);
            if (!ranked.empty()) {
                strategy = ranked[0].first;
                score = ranked[0].second;
            }
        } catch (const rag::RetrievalError& e) {
            outcome.unoptimized.emplace_back(entry, e.what());
            continue;
        }
        (void)score;

        auto target = resolve_target(current, entry);
        if (!target) {
            outcome.unoptimized.emplace_back(entry, "target not found in unit");
            continue;
        }

        std::string pragma_text;
        uint32_t anchor = 0;
        std::string parameter;
        switch (entry.metric) {
            case Metric::Latency: {
                if (!target->loop) {
                    outcome.unoptimized.emplace_back(entry, "no loop at target");
                    continue;
                }
                auto trip = loop_trip_count(*target->loop, *current.ast);
                if (!trip || *trip <= 0) {
                    outcome.unoptimized.emplace_back(entry,
                                                     "loop trip count not derivable");
                    continue;
                }
                long long factor = std::min<long long>(*trip, settings.max_unroll);
                parameter = std::to_string(factor);
                pragma_text = "#pragma " + settings.pragma_dialect + " " + parameter;
                anchor = target->loop->span.begin;
                break;
            }
            case Metric::Area:
            case Metric::Power: {
                if (!target->function) {
                    outcome.unoptimized.emplace_back(entry, "no function at target");
                    continue;
                }
                parameter = entry.metric == Metric::Area ? "area" : "power";
                pragma_text = "#pragma design_goal " + parameter;
                anchor = target->function->span.begin;
                break;
            }
            case Metric::MemoryBandwidth: {
                if (!target->is_array) {
                    outcome.unoptimized.emplace_back(entry, "no array at target");
                    continue;
                }
                parameter = "dual_port";
                pragma_text = "#pragma hls_memory dual_port " + entry.target;
                anchor = target->decl_span.begin;
                break;
            }
        }

        uint32_t line_start = line_start_offset(current, anchor);
        if (pragma_already_above(current, line_start, pragma_text)) {
            outcome.unoptimized.emplace_back(entry, "pragma already present");
            continue;
        }
        std::string indent = line_indent(current, line_start);
        TextEdit edit{Span{line_start, line_start}, indent + pragma_text + "\n",
                      "ppa-" + std::string(metric_name(entry.metric))};

        SourceUnit candidate = current;
        if (settings.mode == Mode::Deterministic) {
            auto applied = apply_edits(current, {edit});
            if (std::holds_alternative<RewriteConflict>(applied)) {
                outcome.unoptimized.emplace_back(entry, "edit conflict");
                continue;
            }
            candidate = std::move(std::get<SourceUnit>(applied));
        } else {
            if (!settings.client) {
                outcome.unoptimized.emplace_back(entry,
                                                 "llm mode requires a configured client");
                continue;
            }
            std::vector<llm::PromptSection> sections;
            if (strategy) sections.push_back(llm::section_from_strategy(*strategy, 1.0));
            try {
                llm::PromptBundle bundle = llm::build_prompt(
                    llm::Stage::PpaOpt, current,
                    query + " (suggested pragma: " + pragma_text + ")",
                    std::move(sections));
                llm::LlmExchange ex = settings.client->complete(bundle);
                std::string program = llm::extract_program(ex.response);
                candidate = SourceUnit::from_bytes(current.filename, program,
                                                   current.stage,
                                                   current.generation + 1);
            } catch (const std::exception& e) {
                outcome.unoptimized.emplace_back(entry, e.what());
                continue;
            }
        }

        if (!candidate.parsed_ok()) {
            outcome.unoptimized.emplace_back(entry, "edited program does not reparse");
            continue;
        }
        detect::CompileReport post = detect::check(candidate);
        if (!post.pass) {
            outcome.unoptimized.emplace_back(entry, "edited program fails the check");
            continue;
        }
        if (settings.dataset && !settings.entry.empty()) {
            auto verdict =
                interp::equivalent(current, candidate, settings.entry, *settings.dataset);
            if (!verdict.equivalent) {
                outcome.unoptimized.emplace_back(entry, "edit changes observables");
                continue;
            }
        }
        PragmaEdit pe;
        pe.strategy_id = strategy ? strategy->id : "";
        pe.insertion = edit.span;
        pe.pragma_text = pragma_text;
        pe.parameter = parameter;
        outcome.edits.push_back(std::move(pe));
        current = std::move(candidate);
    }
    outcome.unit = std::move(current);
    return outcome;
}

}  // namespace hlsrepair::ppa
