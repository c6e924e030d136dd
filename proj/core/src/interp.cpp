#include "hlsrepair/interp.hpp"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <memory>
#include <variant>

namespace hlsrepair::interp {

using namespace cfront;

const char* trap_kind_name(TrapKind k) {
    switch (k) {
        case TrapKind::OutOfBounds: return "out-of-bounds";
        case TrapKind::IllegalShift: return "illegal-shift";
        case TrapKind::StackOverflow: return "stack-overflow";
        case TrapKind::StepExhausted: return "step-exhausted";
        case TrapKind::FreeInvalid: return "free-of-invalid";
        case TrapKind::DivideByZero: return "divide-by-zero";
        case TrapKind::Unsupported: return "unsupported";
    }
    return "?";
}

namespace {

struct IntVal {
    long long v = 0;
    int width = 32;
    bool sgn = true;
};
struct FloatVal {
    double v = 0;
};
struct PtrVal {
    int alloc = -1;
    long long offset = 0;
    bool null() const { return alloc < 0; }
};
struct FnVal {
    std::string name;
};
struct StrVal {
    std::string s;
};
struct StructData;
using StructPtr = std::shared_ptr<StructData>;

using Value = std::variant<std::monostate, IntVal, FloatVal, PtrVal, FnVal, StructPtr, StrVal>;

struct StructData {
    std::string tag;
    std::vector<std::pair<std::string, Value>> fields;  // declaration order

    Value* find(const std::string& name) {
        for (auto& [n, v] : fields)
            if (n == name) return &v;
        return nullptr;
    }
};

struct Allocation {
    std::vector<Value> cells;
    TypeSpec elem_type;
    int elem_ptr_depth = 0;
    bool elem_is_fn_ptr = false;
    bool is_scalar_var = false;
    VarId var_id;
    bool from_malloc = false;
    bool freed = false;
    bool untyped = false;   // raw malloc block, element type not yet known
    long long byte_size = 0;
    std::string name;
};

struct TrapException {
    Trap trap;
};

struct Flow {
    enum Kind { Normal, Break, Continue, Return } kind = Normal;
    Value ret;
};

struct LValue {
    int alloc = -1;
    long long index = 0;
    std::vector<std::string> fields;  // nested member path (outermost first)
};

long long wrap_to(long long v, int width, bool sgn) {
    if (width >= 64) return v;
    if (width <= 0) return 0;
    unsigned long long mask = (1ull << width) - 1ull;
    unsigned long long u = static_cast<unsigned long long>(v) & mask;
    if (sgn && (u >> (width - 1)) & 1ull) u |= ~mask;
    return static_cast<long long>(u);
}

struct Promoted {
    int width;
    bool sgn;
};

Promoted promote(const IntVal& a) {
    if (a.width < 32) return {32, true};
    return {a.width, a.sgn};
}

Promoted common_type(const IntVal& a, const IntVal& b) {
    Promoted pa = promote(a), pb = promote(b);
    if (pa.width != pb.width) return pa.width > pb.width ? pa : pb;
    return {pa.width, pa.sgn && pb.sgn};
}

class Machine {
public:
    Machine(const SourceUnit& unit, const ExecEnv& env)
        : unit_(unit), ast_(*unit.ast), env_(env) {}

    ExecResult run(const std::string& entry) {
        ExecResult result;
        const FunctionDecl* fn = ast_.function(entry);
        if (!fn || !fn->body)
            throw std::invalid_argument("entry function not found: " + entry);
        try {
            init_globals();
            std::vector<Value> args = bind_entry_args(*fn);
            Value ret = call_function(*fn, std::move(args), fn->name_span);
            result.status = ExecResult::Status::Ok;
            fill_return(result.obs, ret, *fn);
            collect_arrays(result.obs);
            result.obs.prints = std::move(prints_);
        } catch (const TrapException& te) {
            result.status = ExecResult::Status::Trapped;
            result.trap = te.trap;
            collect_arrays(result.obs);
            result.obs.prints = std::move(prints_);
        }
        result.steps_used = steps_;
        return result;
    }

private:
    const SourceUnit& unit_;
    const Ast& ast_;
    const ExecEnv& env_;
    std::vector<Allocation> heap_;
    std::map<std::string, int> global_allocs_;           // name -> alloc
    std::map<uint32_t, int> global_by_decl_;             // decl begin -> alloc
    struct Frame {
        const FunctionDecl* fn = nullptr;
        std::map<uint32_t, int> locals;  // declarator name offset -> alloc
    };
    std::vector<Frame> frames_;
    std::vector<std::string> prints_;
    std::vector<std::pair<std::string, int>> observable_arrays_;  // name -> alloc
    long long steps_ = 0;

    [[noreturn]] void trap(TrapKind k, Span span, std::string detail = {}) {
        throw TrapException{Trap{k, span, std::move(detail)}};
    }

    void step(Span span) {
        if (++steps_ > env_.step_budget) trap(TrapKind::StepExhausted, span, "step budget exhausted");
    }

    // ---- memory ---------------------------------------------------------

    int new_alloc() {
        heap_.emplace_back();
        return static_cast<int>(heap_.size()) - 1;
    }

    Value zero_of(const TypeSpec& t, int ptr_depth, bool is_fn_ptr) {
        if (is_fn_ptr || ptr_depth > 0) return PtrVal{};
        if (t.is_float()) return FloatVal{0.0};
        if (t.base == TypeSpec::Base::Struct) return make_zero_struct(t.tag);
        return IntVal{0, t.bit_width() == 0 ? 32 : t.bit_width(), t.is_signed_type()};
    }

    // Structs are boxed, so every cell needs its own zero value; a fill with
    // one shared box would alias all elements. Built as a local vector since
    // zero_of can growth the heap and invalidate element references.
    std::vector<Value> make_zero_cells(long long n, const TypeSpec& t, int ptr_depth,
                                       bool is_fn_ptr) {
        std::vector<Value> cells;
        cells.reserve(static_cast<size_t>(std::max<long long>(n, 0)));
        for (long long i = 0; i < n; ++i) cells.push_back(zero_of(t, ptr_depth, is_fn_ptr));
        return cells;
    }

    Value make_zero_struct(const std::string& tag) {
        auto data = std::make_shared<StructData>();
        data->tag = tag;
        auto it = ast_.structs.find(tag);
        if (it != ast_.structs.end()) {
            for (const auto& f : it->second->fields) {
                if (f.decl.is_array()) {
                    long long n = array_length(f.decl);
                    std::vector<Value> cells =
                        make_zero_cells(n, f.type, f.decl.pointer_depth, false);
                    int a = new_alloc();
                    heap_[a].elem_type = f.type;
                    heap_[a].elem_ptr_depth = f.decl.pointer_depth;
                    heap_[a].name = tag + "." + f.decl.name;
                    heap_[a].cells = std::move(cells);
                    data->fields.emplace_back(f.decl.name, PtrVal{a, 0});
                } else {
                    data->fields.emplace_back(
                        f.decl.name, zero_of(f.type, f.decl.pointer_depth, f.decl.is_fn_ptr));
                }
            }
        }
        return data;
    }

    long long array_length(const Declarator& d) {
        long long n = 1;
        for (const auto& dim : d.array_dims) {
            if (!dim) return 0;
            auto v = eval_const_expr(*dim, ast_);
            if (!v || *v < 0) return 0;
            n *= *v;
        }
        return n;
    }

    Value clone_value(const Value& v) {
        if (const auto* sp = std::get_if<StructPtr>(&v)) {
            auto copy = std::make_shared<StructData>();
            copy->tag = (*sp)->tag;
            for (const auto& [name, fv] : (*sp)->fields) {
                if (const auto* pv = std::get_if<PtrVal>(&fv);
                    pv && !pv->null() && pv->offset == 0 &&
                    !heap_[pv->alloc].from_malloc && heap_[pv->alloc].name.find('.') !=
                        std::string::npos) {
                    // Embedded array field: copy contents, not the handle.
                    int src = pv->alloc;
                    int a = new_alloc();
                    heap_[a].elem_type = heap_[src].elem_type;
                    heap_[a].elem_ptr_depth = heap_[src].elem_ptr_depth;
                    heap_[a].name = heap_[src].name;
                    size_t n = heap_[src].cells.size();
                    for (size_t i = 0; i < n; ++i) {
                        Value cell = clone_value(heap_[src].cells[i]);
                        heap_[a].cells.push_back(std::move(cell));
                    }
                    copy->fields.emplace_back(name, PtrVal{a, 0});
                } else {
                    copy->fields.emplace_back(name, clone_value(fv));
                }
            }
            return copy;
        }
        return v;
    }

    // ---- globals and entry ------------------------------------------------

    void init_globals() {
        for (const auto& d : ast_.decls) {
            if (d->kind != DeclKind::Var) continue;
            const auto& vd = static_cast<const VarDecl&>(*d);
            for (const auto& dtor : vd.declarators) declare_var(vd.type, dtor, true);
        }
        // Env-provided arrays override globals and become observables.
        for (const auto& [name, values] : env_.arrays) {
            auto it = global_allocs_.find(name);
            if (it == global_allocs_.end()) continue;
            Allocation& al = heap_[it->second];
            for (size_t i = 0; i < values.size() && i < al.cells.size(); ++i)
                al.cells[i] = converted_int(values[i], al.elem_type);
            observable_arrays_.emplace_back(name, it->second);
        }
    }

    Value converted_int(long long raw, const TypeSpec& t) {
        if (t.is_float()) return FloatVal{static_cast<double>(raw)};
        int w = t.bit_width() == 0 ? 32 : t.bit_width();
        bool s = t.is_signed_type();
        if (t.base == TypeSpec::Base::Bool) return IntVal{raw != 0 ? 1 : 0, 1, false};
        return IntVal{wrap_to(raw, w, s), w, s};
    }

    std::vector<Value> bind_entry_args(const FunctionDecl& fn) {
        std::vector<Value> args;
        for (const auto& p : fn.params) {
            const std::string& name = p.decl.name;
            bool is_arrayish = p.decl.is_array() || p.decl.pointer_depth > 0;
            if (is_arrayish) {
                auto it = env_.arrays.find(name);
                if (it == env_.arrays.end())
                    throw std::invalid_argument("env missing array for parameter: " + name);
                int a = new_alloc();
                Allocation& al = heap_[a];
                al.elem_type = p.type;
                al.name = name;
                al.cells.reserve(it->second.size());
                for (long long raw : it->second) al.cells.push_back(converted_int(raw, p.type));
                observable_arrays_.emplace_back(name, a);
                args.push_back(PtrVal{a, 0});
            } else {
                auto it = env_.args.find(name);
                if (it == env_.args.end())
                    throw std::invalid_argument("env missing value for parameter: " + name);
                if (p.type.is_float())
                    args.push_back(FloatVal{static_cast<double>(it->second)});
                else
                    args.push_back(converted_int(it->second, p.type));
            }
        }
        return args;
    }

    void fill_return(Observables& obs, const Value& ret, const FunctionDecl& fn) {
        if (fn.return_type.base == TypeSpec::Base::Void && fn.return_pointer_depth == 0) {
            obs.return_kind = ReturnKind::None;
            return;
        }
        if (const auto* iv = std::get_if<IntVal>(&ret)) {
            obs.return_kind = ReturnKind::Int;
            obs.return_value = iv->v;
        } else if (const auto* fv = std::get_if<FloatVal>(&ret)) {
            obs.return_kind = ReturnKind::Float;
            obs.return_float = fv->v;
        } else if (const auto* pv = std::get_if<PtrVal>(&ret)) {
            obs.return_kind = ReturnKind::Ptr;
            obs.return_value = pv->null() ? 0 : 1;
        } else {
            obs.return_kind = ReturnKind::None;
        }
    }

    void collect_arrays(Observables& obs) {
        for (const auto& [name, alloc] : observable_arrays_) {
            std::vector<long long> out;
            out.reserve(heap_[alloc].cells.size());
            for (const Value& c : heap_[alloc].cells) out.push_back(cell_to_i64(c));
            obs.arrays[name] = std::move(out);
        }
    }

    static long long cell_to_i64(const Value& v) {
        if (const auto* iv = std::get_if<IntVal>(&v)) return iv->v;
        if (const auto* fv = std::get_if<FloatVal>(&v)) {
            long long bits;
            std::memcpy(&bits, &fv->v, sizeof(bits));
            return bits;
        }
        if (const auto* pv = std::get_if<PtrVal>(&v)) return pv->null() ? 0 : pv->offset + 1;
        return 0;
    }

    // ---- variables ---------------------------------------------------------

    void declare_var(const TypeSpec& type, const Declarator& d, bool global) {
        bool is_array = d.is_array();
        long long dim = is_array ? array_length(d) : 1;
        std::vector<Value> cells =
            make_zero_cells(dim, type, d.pointer_depth, !is_array && d.is_fn_ptr);
        int a = new_alloc();
        {
            Allocation& al = heap_[a];
            al.elem_type = type;
            al.elem_ptr_depth = d.pointer_depth;
            al.elem_is_fn_ptr = d.is_fn_ptr;
            al.name = d.name;
            al.var_id = VarId{global ? std::string() : frames_.back().fn->name,
                              d.name_span.begin, d.name};
            al.is_scalar_var = !is_array;
            al.cells = std::move(cells);
        }
        if (global) {
            global_allocs_[d.name] = a;
            global_by_decl_[d.name_span.begin] = a;
        } else {
            frames_.back().locals[d.name_span.begin] = a;
        }
        if (d.init) {
            if (d.init->kind == ExprKind::InitList && d.is_array()) {
                const auto& il = static_cast<const InitListExpr&>(*d.init);
                for (size_t i = 0; i < il.items.size(); ++i) {
                    if (!il.items[i]) continue;
                    Value v = eval(*il.items[i]);
                    store(LValue{a, static_cast<long long>(i), {}}, std::move(v),
                          il.items[i]->span);
                }
            } else {
                Value v = eval(*d.init);
                store(LValue{a, 0, {}}, std::move(v), d.init->span);
            }
        }
    }

    int lookup_alloc(const IdentExpr& id) {
        if (id.ref) {
            const VarRef& r = *id.ref;
            if (r.kind == VarRef::Kind::Local || r.kind == VarRef::Kind::Param) {
                if (!frames_.empty()) {
                    auto it = frames_.back().locals.find(r.id.decl_begin);
                    if (it != frames_.back().locals.end()) return it->second;
                }
            }
            if (r.kind == VarRef::Kind::Global) {
                auto it = global_by_decl_.find(r.id.decl_begin);
                if (it != global_by_decl_.end()) return it->second;
            }
        }
        // Fallback by name (covers synthesized or re-parsed code paths).
        if (!frames_.empty()) {
            for (auto& [k, a] : frames_.back().locals)
                if (heap_[a].name == id.name) return a;
        }
        if (auto it = global_allocs_.find(id.name); it != global_allocs_.end())
            return it->second;
        return -1;
    }

    // ---- function calls -----------------------------------------------------

    Value call_function(const FunctionDecl& fn, std::vector<Value> args, Span call_span) {
        if (static_cast<int>(frames_.size()) >= env_.max_call_depth)
            trap(TrapKind::StackOverflow, call_span, "call depth limit in '" + fn.name + "'");
        if (!fn.body) trap(TrapKind::Unsupported, call_span, "call to undefined function");
        frames_.push_back(Frame{&fn, {}});
        for (size_t i = 0; i < fn.params.size(); ++i) {
            const Param& p = fn.params[i];
            int ptr_depth = p.decl.pointer_depth + (p.decl.is_array() ? 1 : 0);
            std::vector<Value> cells = make_zero_cells(1, p.type, ptr_depth,
                                                       p.decl.is_fn_ptr);
            int a = new_alloc();
            {
                Allocation& al = heap_[a];
                al.elem_type = p.type;
                al.elem_ptr_depth = ptr_depth;
                al.elem_is_fn_ptr = p.decl.is_fn_ptr;
                al.is_scalar_var =
                    !p.decl.is_array() && p.decl.pointer_depth == 0 && !p.decl.is_fn_ptr;
                al.name = p.decl.name;
                al.var_id = VarId{fn.name, p.decl.name_span.begin, p.decl.name};
                al.cells = std::move(cells);
            }
            frames_.back().locals[p.decl.name_span.begin] = a;
            if (i < args.size())
                store(LValue{a, 0, {}}, std::move(args[i]), p.decl.name_span);
        }
        Flow flow = exec_block(*fn.body);
        frames_.pop_back();
        if (flow.kind == Flow::Return && !std::holds_alternative<std::monostate>(flow.ret)) {
            if (fn.return_pointer_depth == 0 && fn.return_type.is_integer())
                return convert_to_int(flow.ret, fn.return_type, fn.name_span);
            return flow.ret;
        }
        if (fn.return_pointer_depth == 0 && fn.return_type.base != TypeSpec::Base::Void)
            return zero_of(fn.return_type, 0, false);
        return std::monostate{};
    }

    // ---- statements ----------------------------------------------------------

    Flow exec_block(const BlockStmt& b) {
        for (const auto& s : b.stmts) {
            Flow f = exec_stmt(*s);
            if (f.kind != Flow::Normal) return f;
        }
        return {};
    }

    Flow exec_stmt(const Stmt& s) {
        step(s.span);
        switch (s.kind) {
            case StmtKind::Block: return exec_block(static_cast<const BlockStmt&>(s));
            case StmtKind::Empty: return {};
            case StmtKind::Pragma: return {};  // pragmas are semantically inert
            case StmtKind::Foreign: {
                const auto& f = static_cast<const ForeignStmt&>(s);
                if (f.is_directive) return {};
                trap(TrapKind::Unsupported, s.span, "foreign statement executed");
            }
            case StmtKind::DeclStmt: {
                const auto& d = static_cast<const DeclStmt&>(s);
                for (const auto& dtor : d.declarators) declare_var(d.type, dtor, false);
                return {};
            }
            case StmtKind::ExprStmt: {
                const auto& e = static_cast<const ExprStmt&>(s);
                if (e.expr) eval(*e.expr);
                return {};
            }
            case StmtKind::If: {
                const auto& n = static_cast<const IfStmt&>(s);
                if (truthy(eval(*n.cond), n.cond->span))
                    return n.then_stmt ? exec_stmt(*n.then_stmt) : Flow{};
                if (n.else_stmt) return exec_stmt(*n.else_stmt);
                return {};
            }
            case StmtKind::While: {
                const auto& n = static_cast<const WhileStmt&>(s);
                while (truthy(eval(*n.cond), n.cond->span)) {
                    step(s.span);
                    Flow f = n.body ? exec_stmt(*n.body) : Flow{};
                    if (f.kind == Flow::Return) return f;
                    if (f.kind == Flow::Break) break;
                }
                return {};
            }
            case StmtKind::DoWhile: {
                const auto& n = static_cast<const DoWhileStmt&>(s);
                do {
                    step(s.span);
                    Flow f = n.body ? exec_stmt(*n.body) : Flow{};
                    if (f.kind == Flow::Return) return f;
                    if (f.kind == Flow::Break) break;
                } while (truthy(eval(*n.cond), n.cond->span));
                return {};
            }
            case StmtKind::For: {
                const auto& n = static_cast<const ForStmt&>(s);
                if (n.init) exec_stmt(*n.init);
                while (!n.cond || truthy(eval(*n.cond), n.cond->span)) {
                    step(s.span);
                    Flow f = n.body ? exec_stmt(*n.body) : Flow{};
                    if (f.kind == Flow::Return) return f;
                    if (f.kind == Flow::Break) break;
                    if (n.step) eval(*n.step);
                }
                return {};
            }
            case StmtKind::Return: {
                const auto& n = static_cast<const ReturnStmt&>(s);
                Flow f;
                f.kind = Flow::Return;
                if (n.value) f.ret = eval(*n.value);
                return f;
            }
            case StmtKind::Break: return Flow{Flow::Break, {}};
            case StmtKind::Continue: return Flow{Flow::Continue, {}};
            case StmtKind::Switch: return exec_switch(static_cast<const SwitchStmt&>(s));
        }
        return {};
    }

    Flow exec_switch(const SwitchStmt& sw) {
        Value scrut = eval(*sw.scrutinee);
        const auto* iv = std::get_if<IntVal>(&scrut);
        if (!iv) trap(TrapKind::Unsupported, sw.scrutinee->span, "switch on non-integer");
        long long sv = iv->v;
        // Find matching section; fall through subsequent sections.
        size_t start = sw.sections.size();
        size_t default_at = sw.sections.size();
        for (size_t i = 0; i < sw.sections.size() && start == sw.sections.size(); ++i) {
            for (const auto& l : sw.sections[i].labels) {
                if (l.is_default) default_at = i;
                if (!l.is_default && l.value) {
                    auto cv = eval_const_expr(*l.value, ast_);
                    if (cv && *cv == sv) {
                        start = i;
                        break;
                    }
                }
            }
        }
        if (start == sw.sections.size()) start = default_at;
        for (size_t i = start; i < sw.sections.size(); ++i) {
            for (const auto& st : sw.sections[i].body) {
                Flow f = exec_stmt(*st);
                if (f.kind == Flow::Break) return {};
                if (f.kind != Flow::Normal) return f;
            }
        }
        return {};
    }

    // ---- expressions -----------------------------------------------------------

    bool truthy(const Value& v, Span span) {
        if (const auto* iv = std::get_if<IntVal>(&v)) return iv->v != 0;
        if (const auto* fv = std::get_if<FloatVal>(&v)) return fv->v != 0.0;
        if (const auto* pv = std::get_if<PtrVal>(&v)) return !pv->null();
        trap(TrapKind::Unsupported, span, "value not usable as a condition");
    }

    IntVal as_int(const Value& v, Span span) {
        if (const auto* iv = std::get_if<IntVal>(&v)) return *iv;
        if (const auto* fv = std::get_if<FloatVal>(&v))
            return IntVal{static_cast<long long>(fv->v), 64, true};
        trap(TrapKind::Unsupported, span, "integer value required");
    }

    Value convert_to_int(const Value& v, const TypeSpec& t, Span span) {
        int w = t.bit_width() == 0 ? 32 : t.bit_width();
        bool s = t.is_signed_type();
        if (t.base == TypeSpec::Base::Bool) {
            bool b = truthy(v, span);
            return IntVal{b ? 1 : 0, 1, false};
        }
        IntVal iv = as_int(v, span);
        return IntVal{wrap_to(iv.v, w, s), w, s};
    }

    const StructField* field_decl(const std::string& tag, const std::string& member) {
        auto it = ast_.structs.find(tag);
        if (it == ast_.structs.end()) return nullptr;
        for (const auto& f : it->second->fields)
            if (f.decl.name == member) return &f;
        return nullptr;
    }

    Allocation& checked_alloc(int a, Span span) {
        if (a < 0 || a >= static_cast<int>(heap_.size()))
            trap(TrapKind::OutOfBounds, span, "null or invalid pointer");
        if (heap_[a].freed) trap(TrapKind::OutOfBounds, span, "use after free");
        return heap_[a];
    }

    Value load(const LValue& lv, Span span) {
        return *navigate(lv, span, nullptr, nullptr, nullptr);
    }

    // Resolves the cell a store or load addresses. The returned pointer is
    // only valid until the next heap growth, so stores re-resolve after
    // value conversion.
    Value* navigate(const LValue& lv, Span span, const TypeSpec** dest_type,
                    int* dest_ptr_depth, bool* dest_fn_ptr) {
        Allocation& al = checked_alloc(lv.alloc, span);
        if (lv.index < 0 || lv.index >= static_cast<long long>(al.cells.size()))
            trap(TrapKind::OutOfBounds, span,
                 "index " + std::to_string(lv.index) + " out of range for '" + al.name +
                     "' of size " + std::to_string(al.cells.size()));
        Value* cell = &al.cells[static_cast<size_t>(lv.index)];
        if (dest_type) {
            *dest_type = &al.elem_type;
            *dest_ptr_depth = al.elem_ptr_depth;
            *dest_fn_ptr = al.elem_is_fn_ptr;
        }
        for (const auto& f : lv.fields) {
            auto* sp = std::get_if<StructPtr>(cell);
            if (!sp) trap(TrapKind::Unsupported, span, "member access on non-struct");
            const StructField* fd = field_decl((*sp)->tag, f);
            cell = (*sp)->find(f);
            if (!cell || !fd) trap(TrapKind::Unsupported, span, "unknown field '" + f + "'");
            if (dest_type) {
                *dest_type = &fd->type;
                *dest_ptr_depth = fd->decl.pointer_depth;
                *dest_fn_ptr = fd->decl.is_fn_ptr;
            }
        }
        return cell;
    }

    void store(const LValue& lv, Value v, Span span) {
        const TypeSpec* dest_type = nullptr;
        int dest_ptr_depth = 0;
        bool dest_fn_ptr = false;
        navigate(lv, span, &dest_type, &dest_ptr_depth, &dest_fn_ptr);
        TypeSpec dest_copy = *dest_type;  // stable across heap growth

        Value converted =
            convert_for_store(std::move(v), dest_copy, dest_ptr_depth, dest_fn_ptr, span);
        // Conversion may have grown the heap; resolve the cell again.
        Value* cell = navigate(lv, span, nullptr, nullptr, nullptr);
        *cell = std::move(converted);

        // Profiling hook: integer scalar variables only.
        Allocation& al = heap_[lv.alloc];
        if (env_.on_assign && lv.fields.empty() && al.is_scalar_var &&
            dest_ptr_depth == 0 && !dest_fn_ptr && dest_copy.is_integer()) {
            env_.on_assign(al.var_id, std::get<IntVal>(*cell).v);
        }
    }

    Value convert_for_store(Value v, const TypeSpec& t, int ptr_depth, bool fn_ptr,
                            Span span) {
        if (fn_ptr) {
            if (std::holds_alternative<FnVal>(v)) return v;
            if (const auto* iv = std::get_if<IntVal>(&v); iv && iv->v == 0) return PtrVal{};
            if (std::holds_alternative<PtrVal>(v)) return v;
            trap(TrapKind::Unsupported, span, "bad function pointer store");
        }
        if (ptr_depth > 0) {
            if (auto* pv = std::get_if<PtrVal>(&v)) {
                if (!pv->null()) retype_untyped(*pv, t, ptr_depth, span);
                return v;
            }
            if (const auto* iv = std::get_if<IntVal>(&v); iv && iv->v == 0) return PtrVal{};
            trap(TrapKind::Unsupported, span, "bad pointer store");
        }
        if (t.base == TypeSpec::Base::Struct) {
            if (std::holds_alternative<StructPtr>(v)) return clone_value(v);
            trap(TrapKind::Unsupported, span, "bad struct store");
        }
        if (t.is_float()) {
            if (const auto* fv = std::get_if<FloatVal>(&v)) return *fv;
            IntVal iv = as_int(v, span);
            return FloatVal{static_cast<double>(iv.v)};
        }
        return convert_to_int(v, t, span);
    }

    // Give a raw malloc block an element type the first time it is used as T*.
    void retype_untyped(const PtrVal& pv, const TypeSpec& t, int ptr_depth, Span span) {
        if (!heap_[pv.alloc].untyped) return;
        heap_[pv.alloc].untyped = false;
        heap_[pv.alloc].elem_type = t;
        heap_[pv.alloc].elem_ptr_depth = ptr_depth - 1;
        long long elem = 8;
        if (ptr_depth - 1 == 0) {
            elem = t.byte_size();
            if (elem < 0) elem = ast_.struct_byte_size(t.tag);
            if (elem <= 0) trap(TrapKind::Unsupported, span, "cannot size allocation");
        }
        long long count = elem > 0 ? heap_[pv.alloc].byte_size / elem : 0;
        std::vector<Value> cells = make_zero_cells(count, t, ptr_depth - 1, false);
        heap_[pv.alloc].cells = std::move(cells);
    }

    std::optional<LValue> try_lvalue(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Ident: {
                const auto& id = static_cast<const IdentExpr&>(e);
                int a = lookup_alloc(id);
                if (a < 0) return std::nullopt;
                return LValue{a, 0, {}};
            }
            case ExprKind::Paren:
                return try_lvalue(*static_cast<const ParenExpr&>(e).inner);
            case ExprKind::Index: {
                const auto& n = static_cast<const IndexExpr&>(e);
                Value base = eval(*n.base);
                auto* pv = std::get_if<PtrVal>(&base);
                if (!pv || pv->null())
                    trap(TrapKind::OutOfBounds, e.span, "indexing a null pointer");
                IntVal idx = as_int(eval(*n.index), n.index->span);
                return LValue{pv->alloc, pv->offset + idx.v, {}};
            }
            case ExprKind::Unary: {
                const auto& u = static_cast<const UnaryExpr&>(e);
                if (u.op != UnOp::Deref) return std::nullopt;
                Value base = eval(*u.operand);
                auto* pv = std::get_if<PtrVal>(&base);
                if (!pv || pv->null())
                    trap(TrapKind::OutOfBounds, e.span, "dereferencing a null pointer");
                return LValue{pv->alloc, pv->offset, {}};
            }
            case ExprKind::Member: {
                const auto& m = static_cast<const MemberExpr&>(e);
                if (m.is_arrow) {
                    Value base = eval(*m.base);
                    auto* pv = std::get_if<PtrVal>(&base);
                    if (!pv || pv->null())
                        trap(TrapKind::OutOfBounds, e.span, "-> on null pointer");
                    return LValue{pv->alloc, pv->offset, {m.member}};
                }
                auto lv = try_lvalue(*m.base);
                if (!lv) return std::nullopt;
                lv->fields.push_back(m.member);
                return lv;
            }
            default:
                return std::nullopt;
        }
    }

    LValue lvalue(const Expr& e) {
        auto lv = try_lvalue(e);
        if (!lv) trap(TrapKind::Unsupported, e.span, "expression is not assignable");
        return *lv;
    }

    Value eval(const Expr& e) {
        step(e.span);
        switch (e.kind) {
            case ExprKind::IntLit: {
                const auto& n = static_cast<const IntLit&>(e);
                int width = 32;
                bool sgn = !n.has_unsigned_suffix;
                if (n.is_long || n.value > 0xFFFFFFFFll ||
                    (sgn && n.value > 0x7FFFFFFFll) || n.value < -0x80000000ll)
                    width = 64;
                else if (!sgn)
                    width = 32;
                else if (n.value > 0x7FFFFFFFll)
                    width = 64;
                return IntVal{n.value, width, sgn};
            }
            case ExprKind::FloatLit:
                return FloatVal{static_cast<const FloatLit&>(e).value};
            case ExprKind::StringLit:
                return StrVal{static_cast<const StringLit&>(e).value};
            case ExprKind::CharLit:
                return IntVal{static_cast<const CharLit&>(e).value, 32, true};
            case ExprKind::BoolLit:
                return IntVal{static_cast<const BoolLit&>(e).value ? 1 : 0, 1, false};
            case ExprKind::Paren:
                return eval(*static_cast<const ParenExpr&>(e).inner);
            case ExprKind::Ident: return eval_ident(static_cast<const IdentExpr&>(e));
            case ExprKind::Index:
            case ExprKind::Member: {
                LValue lv = lvalue(e);
                return load(lv, e.span);
            }
            case ExprKind::Unary: return eval_unary(static_cast<const UnaryExpr&>(e));
            case ExprKind::Binary: return eval_binary(static_cast<const BinaryExpr&>(e));
            case ExprKind::Assign: return eval_assign(static_cast<const AssignExpr&>(e));
            case ExprKind::Ternary: {
                const auto& n = static_cast<const TernaryExpr&>(e);
                return truthy(eval(*n.cond), n.cond->span) ? eval(*n.then_expr)
                                                           : eval(*n.else_expr);
            }
            case ExprKind::Call: return eval_call(static_cast<const CallExpr&>(e));
            case ExprKind::Cast: return eval_cast(static_cast<const CastExpr&>(e));
            case ExprKind::Sizeof: {
                auto v = eval_const_expr(e, ast_);
                if (!v) trap(TrapKind::Unsupported, e.span, "sizeof not constant");
                return IntVal{*v, 64, false};
            }
            case ExprKind::InitList:
                trap(TrapKind::Unsupported, e.span, "initializer list in rvalue position");
        }
        trap(TrapKind::Unsupported, e.span, "unhandled expression");
    }

    Value eval_ident(const IdentExpr& id) {
        if (id.ref) {
            const VarRef& r = *id.ref;
            if (r.kind == VarRef::Kind::EnumConst || r.kind == VarRef::Kind::DefineConst)
                return IntVal{r.const_value, 32, true};
            if (r.kind == VarRef::Kind::Function) return FnVal{id.name};
            int a = lookup_alloc(id);
            if (a < 0)
                trap(TrapKind::Unsupported, id.span, "use of undeclared '" + id.name + "'");
            // Local/global arrays decay to a pointer to the storage itself;
            // array parameters are cells already holding the caller's pointer.
            if (r.is_array && r.kind != VarRef::Kind::Param) return PtrVal{a, 0};
            return load(LValue{a, 0, {}}, id.span);
        }
        if (ast_.functions.count(id.name)) return FnVal{id.name};
        int a = lookup_alloc(id);
        if (a >= 0) {
            if (!heap_[a].is_scalar_var) return PtrVal{a, 0};
            return load(LValue{a, 0, {}}, id.span);
        }
        trap(TrapKind::Unsupported, id.span, "unresolved identifier '" + id.name + "'");
    }

    Value eval_unary(const UnaryExpr& u) {
        switch (u.op) {
            case UnOp::PreInc:
            case UnOp::PreDec:
            case UnOp::PostInc:
            case UnOp::PostDec: {
                LValue lv = lvalue(*u.operand);
                Value old = load(lv, u.span);
                bool inc = u.op == UnOp::PreInc || u.op == UnOp::PostInc;
                if (auto* pv = std::get_if<PtrVal>(&old)) {
                    PtrVal np{pv->alloc, pv->offset + (inc ? 1 : -1)};
                    store(lv, np, u.span);
                    bool post = u.op == UnOp::PostInc || u.op == UnOp::PostDec;
                    return post ? *pv : np;
                }
                IntVal iv = as_int(old, u.span);
                Promoted p = promote(iv);
                long long nv = wrap_to(iv.v + (inc ? 1 : -1), p.width, p.sgn);
                store(lv, IntVal{nv, p.width, p.sgn}, u.span);
                Value stored = load(lv, u.span);
                bool post = u.op == UnOp::PostInc || u.op == UnOp::PostDec;
                return post ? old : stored;
            }
            case UnOp::AddrOf: {
                LValue lv = lvalue(*u.operand);
                if (!lv.fields.empty())
                    trap(TrapKind::Unsupported, u.span, "address of struct field");
                return PtrVal{lv.alloc, lv.index};
            }
            case UnOp::Deref: {
                LValue lv = lvalue(u);
                return load(lv, u.span);
            }
            case UnOp::Plus: return eval(*u.operand);
            case UnOp::Minus: {
                Value v = eval(*u.operand);
                if (const auto* fv = std::get_if<FloatVal>(&v)) return FloatVal{-fv->v};
                IntVal iv = as_int(v, u.span);
                Promoted p = promote(iv);
                return IntVal{wrap_to(-iv.v, p.width, p.sgn), p.width, p.sgn};
            }
            case UnOp::LogNot: {
                bool t = truthy(eval(*u.operand), u.operand->span);
                return IntVal{t ? 0 : 1, 32, true};
            }
            case UnOp::BitNot: {
                IntVal iv = as_int(eval(*u.operand), u.span);
                Promoted p = promote(iv);
                return IntVal{wrap_to(~iv.v, p.width, p.sgn), p.width, p.sgn};
            }
        }
        trap(TrapKind::Unsupported, u.span, "unhandled unary");
    }

    Value eval_binary(const BinaryExpr& b) {
        // Short-circuit forms first.
        if (b.op == BinOp::LogAnd) {
            if (!truthy(eval(*b.lhs), b.lhs->span)) return IntVal{0, 32, true};
            return IntVal{truthy(eval(*b.rhs), b.rhs->span) ? 1 : 0, 32, true};
        }
        if (b.op == BinOp::LogOr) {
            if (truthy(eval(*b.lhs), b.lhs->span)) return IntVal{1, 32, true};
            return IntVal{truthy(eval(*b.rhs), b.rhs->span) ? 1 : 0, 32, true};
        }
        Value lv = eval(*b.lhs);
        Value rv = eval(*b.rhs);
        return apply_binary(b.op, std::move(lv), std::move(rv), b.span,
                            b.lhs->span, b.rhs->span);
    }

    Value apply_binary(BinOp op, Value lv, Value rv, Span span, Span lspan, Span rspan) {
        // Pointer arithmetic and comparisons.
        auto* lp = std::get_if<PtrVal>(&lv);
        auto* rp = std::get_if<PtrVal>(&rv);
        if (lp || rp) return pointer_binary(op, lv, rv, span);

        if (std::holds_alternative<FloatVal>(lv) || std::holds_alternative<FloatVal>(rv)) {
            double l = std::holds_alternative<FloatVal>(lv) ? std::get<FloatVal>(lv).v
                                                            : as_int(lv, lspan).v;
            double r = std::holds_alternative<FloatVal>(rv) ? std::get<FloatVal>(rv).v
                                                            : as_int(rv, rspan).v;
            switch (op) {
                case BinOp::Add: return FloatVal{l + r};
                case BinOp::Sub: return FloatVal{l - r};
                case BinOp::Mul: return FloatVal{l * r};
                case BinOp::Div:
                    if (r == 0.0) trap(TrapKind::DivideByZero, span, "float division by zero");
                    return FloatVal{l / r};
                case BinOp::Lt: return IntVal{l < r ? 1 : 0, 32, true};
                case BinOp::Gt: return IntVal{l > r ? 1 : 0, 32, true};
                case BinOp::Le: return IntVal{l <= r ? 1 : 0, 32, true};
                case BinOp::Ge: return IntVal{l >= r ? 1 : 0, 32, true};
                case BinOp::Eq: return IntVal{l == r ? 1 : 0, 32, true};
                case BinOp::Ne: return IntVal{l != r ? 1 : 0, 32, true};
                default: trap(TrapKind::Unsupported, span, "float operator");
            }
        }

        IntVal l = as_int(lv, lspan);
        IntVal r = as_int(rv, rspan);

        if (op == BinOp::Shl || op == BinOp::Shr) {
            Promoted p = promote(l);
            if (r.v < 0 || r.v >= p.width)
                trap(TrapKind::IllegalShift, span,
                     "shift by " + std::to_string(r.v) + " on " + std::to_string(p.width) +
                         "-bit operand");
            unsigned long long lu = static_cast<unsigned long long>(wrap_to(l.v, p.width, false));
            long long res;
            if (op == BinOp::Shl) {
                res = static_cast<long long>(lu << r.v);
            } else if (p.sgn) {
                res = wrap_to(l.v, p.width, true) >> r.v;  // arithmetic
            } else {
                res = static_cast<long long>(lu >> r.v);
            }
            return IntVal{wrap_to(res, p.width, p.sgn), p.width, p.sgn};
        }

        Promoted c = common_type(l, r);
        unsigned long long ul = static_cast<unsigned long long>(wrap_to(l.v, c.width, c.sgn));
        unsigned long long ur = static_cast<unsigned long long>(wrap_to(r.v, c.width, c.sgn));
        long long sl = wrap_to(l.v, c.width, c.sgn);
        long long sr = wrap_to(r.v, c.width, c.sgn);
        auto wrapped = [&](unsigned long long u) {
            return IntVal{wrap_to(static_cast<long long>(u), c.width, c.sgn), c.width, c.sgn};
        };
        auto boolean = [&](bool t) { return IntVal{t ? 1 : 0, 32, true}; };
        switch (op) {
            case BinOp::Add: return wrapped(ul + ur);
            case BinOp::Sub: return wrapped(ul - ur);
            case BinOp::Mul: return wrapped(ul * ur);
            case BinOp::Div: {
                if (sr == 0) trap(TrapKind::DivideByZero, span, "integer division by zero");
                if (c.sgn) {
                    if (sr == -1) return wrapped(~ul + 1ull);  // -l, wrap-safe
                    return wrapped(static_cast<unsigned long long>(sl / sr));
                }
                return wrapped(ul / ur);
            }
            case BinOp::Rem: {
                if (sr == 0) trap(TrapKind::DivideByZero, span, "integer remainder by zero");
                if (c.sgn) {
                    if (sr == -1) return wrapped(0);
                    return wrapped(static_cast<unsigned long long>(sl % sr));
                }
                return wrapped(ul % ur);
            }
            case BinOp::BitAnd: return wrapped(ul & ur);
            case BinOp::BitXor: return wrapped(ul ^ ur);
            case BinOp::BitOr: return wrapped(ul | ur);
            case BinOp::Lt: return boolean(c.sgn ? sl < sr : ul < ur);
            case BinOp::Gt: return boolean(c.sgn ? sl > sr : ul > ur);
            case BinOp::Le: return boolean(c.sgn ? sl <= sr : ul <= ur);
            case BinOp::Ge: return boolean(c.sgn ? sl >= sr : ul >= ur);
            case BinOp::Eq: return boolean(sl == sr);
            case BinOp::Ne: return boolean(sl != sr);
            default: break;
        }
        trap(TrapKind::Unsupported, span, "unhandled binary operator");
    }

    Value pointer_binary(BinOp op, Value& lv, Value& rv, Span span) {
        auto* lp = std::get_if<PtrVal>(&lv);
        auto* rp = std::get_if<PtrVal>(&rv);
        auto as_null_ok = [&](Value& v) -> std::optional<PtrVal> {
            if (auto* p = std::get_if<PtrVal>(&v)) return *p;
            if (auto* i = std::get_if<IntVal>(&v); i && i->v == 0) return PtrVal{};
            return std::nullopt;
        };
        switch (op) {
            case BinOp::Add:
            case BinOp::Sub: {
                if (lp && rp && op == BinOp::Sub) {
                    if (lp->alloc != rp->alloc)
                        trap(TrapKind::Unsupported, span, "difference of unrelated pointers");
                    return IntVal{lp->offset - rp->offset, 64, true};
                }
                PtrVal base = lp ? *lp : *rp;
                Value& other = lp ? rv : lv;
                IntVal delta = as_int(other, span);
                long long d = op == BinOp::Add ? delta.v : -delta.v;
                return PtrVal{base.alloc, base.offset + d};
            }
            case BinOp::Eq:
            case BinOp::Ne: {
                auto a = as_null_ok(lv), b = as_null_ok(rv);
                if (!a || !b) trap(TrapKind::Unsupported, span, "pointer comparison");
                bool eq = (a->null() && b->null()) ||
                          (a->alloc == b->alloc && a->offset == b->offset);
                return IntVal{(op == BinOp::Eq) == eq ? 1 : 0, 32, true};
            }
            case BinOp::Lt:
            case BinOp::Gt:
            case BinOp::Le:
            case BinOp::Ge: {
                if (!lp || !rp || lp->alloc != rp->alloc)
                    trap(TrapKind::Unsupported, span, "ordering of unrelated pointers");
                long long a = lp->offset, b = rp->offset;
                bool t = op == BinOp::Lt   ? a < b
                         : op == BinOp::Gt ? a > b
                         : op == BinOp::Le ? a <= b
                                           : a >= b;
                return IntVal{t ? 1 : 0, 32, true};
            }
            default:
                trap(TrapKind::Unsupported, span, "pointer operator");
        }
    }

    Value eval_assign(const AssignExpr& a) {
        LValue lv = lvalue(*a.lhs);
        Value rhs;
        if (a.rhs->kind == ExprKind::InitList) {
            rhs = eval_init_list_for(lv, static_cast<const InitListExpr&>(*a.rhs), a.span);
        } else {
            rhs = eval(*a.rhs);
        }
        if (a.op != AssignOp::Set) {
            Value old = load(lv, a.span);
            BinOp op;
            switch (a.op) {
                case AssignOp::Add: op = BinOp::Add; break;
                case AssignOp::Sub: op = BinOp::Sub; break;
                case AssignOp::Mul: op = BinOp::Mul; break;
                case AssignOp::Div: op = BinOp::Div; break;
                case AssignOp::Rem: op = BinOp::Rem; break;
                case AssignOp::Shl: op = BinOp::Shl; break;
                case AssignOp::Shr: op = BinOp::Shr; break;
                case AssignOp::And: op = BinOp::BitAnd; break;
                case AssignOp::Or: op = BinOp::BitOr; break;
                case AssignOp::Xor: op = BinOp::BitXor; break;
                default: op = BinOp::Add; break;
            }
            rhs = apply_binary(op, std::move(old), std::move(rhs), a.span, a.lhs->span,
                               a.rhs->span);
        }
        store(lv, std::move(rhs), a.span);
        return load(lv, a.span);
    }

    // `lhs = {a, b, c}`: aggregate assignment to a struct cell.
    Value eval_init_list_for(const LValue& lv, const InitListExpr& il, Span span) {
        Value current = load(lv, span);
        auto* sp = std::get_if<StructPtr>(&current);
        if (!sp) trap(TrapKind::Unsupported, span, "initializer list needs a struct target");
        Value fresh = make_zero_struct((*sp)->tag);
        auto& data = std::get<StructPtr>(fresh);
        for (size_t i = 0; i < il.items.size() && i < data->fields.size(); ++i) {
            if (!il.items[i]) continue;
            Value item = eval(*il.items[i]);
            const StructField* fd = field_decl(data->tag, data->fields[i].first);
            if (fd && !fd->decl.is_array()) {
                data->fields[i].second =
                    convert_for_store(std::move(item), fd->type, fd->decl.pointer_depth,
                                      fd->decl.is_fn_ptr, span);
            }
        }
        return fresh;
    }

    Value eval_cast(const CastExpr& c) {
        Value v = eval(*c.operand);
        if (c.pointer_depth > 0) {
            if (auto* pv = std::get_if<PtrVal>(&v)) {
                if (!pv->null()) retype_untyped(*pv, c.type, c.pointer_depth, c.span);
                return v;
            }
            if (const auto* iv = std::get_if<IntVal>(&v); iv && iv->v == 0) return PtrVal{};
            trap(TrapKind::Unsupported, c.span, "bad pointer cast");
        }
        if (c.type.is_float()) {
            if (const auto* fv = std::get_if<FloatVal>(&v)) return *fv;
            return FloatVal{static_cast<double>(as_int(v, c.span).v)};
        }
        if (c.type.is_integer()) {
            if (const auto* fv = std::get_if<FloatVal>(&v))
                return convert_to_int(IntVal{static_cast<long long>(fv->v), 64, true}, c.type,
                                      c.span);
            return convert_to_int(v, c.type, c.span);
        }
        return v;
    }

    Value eval_call(const CallExpr& call) {
        std::string name = call.callee_name();

        // Calls through a function-pointer variable resolve to the stored name.
        if (!name.empty() && !ast_.functions.count(name) && !is_builtin(name)) {
            if (auto lv = try_lvalue(*call.callee)) {
                Value v = load(*lv, call.span);
                if (auto* fv = std::get_if<FnVal>(&v)) name = fv->name;
            }
        }
        if (const FunctionDecl* fn = ast_.function(name); fn && fn->body) {
            std::vector<Value> args;
            args.reserve(call.args.size());
            for (const auto& a : call.args) args.push_back(eval(*a));
            return call_function(*fn, std::move(args), call.span);
        }
        return eval_builtin(name, call);
    }

    static bool is_builtin(const std::string& name) {
        return name == "malloc" || name == "calloc" || name == "free" ||
               name == "realloc" || name == "printf" || name == "puts" ||
               name == "putchar";
    }

    Value eval_builtin(const std::string& name, const CallExpr& call) {
        if (name == "malloc" || name == "calloc") {
            long long bytes = 0;
            if (name == "malloc" && call.args.size() == 1) {
                bytes = as_int(eval(*call.args[0]), call.span).v;
            } else if (name == "calloc" && call.args.size() == 2) {
                bytes = as_int(eval(*call.args[0]), call.span).v *
                        as_int(eval(*call.args[1]), call.span).v;
            } else {
                trap(TrapKind::Unsupported, call.span, "bad allocation call");
            }
            if (bytes < 0) trap(TrapKind::Unsupported, call.span, "negative allocation");
            if (env_.on_alloc) env_.on_alloc(call.span);
            int a = new_alloc();
            Allocation& al = heap_[a];
            al.from_malloc = true;
            al.untyped = true;
            al.byte_size = bytes;
            al.name = "<malloc>";
            return PtrVal{a, 0};
        }
        if (name == "free") {
            if (call.args.size() != 1) trap(TrapKind::FreeInvalid, call.span, "bad free call");
            Value v = eval(*call.args[0]);
            auto* pv = std::get_if<PtrVal>(&v);
            if (!pv) {
                if (const auto* iv = std::get_if<IntVal>(&v); iv && iv->v == 0)
                    return std::monostate{};  // free(NULL) is a no-op
                trap(TrapKind::FreeInvalid, call.span, "free of non-pointer");
            }
            if (pv->null()) return std::monostate{};
            Allocation& al = heap_[pv->alloc];
            if (!al.from_malloc || al.freed || pv->offset != 0)
                trap(TrapKind::FreeInvalid, call.span,
                     al.freed ? "double free" : "free of non-allocation");
            al.freed = true;
            return std::monostate{};
        }
        if (name == "realloc")
            trap(TrapKind::Unsupported, call.span, "realloc is not modeled");
        if (name == "printf") return builtin_printf(call);
        if (name == "puts") {
            if (call.args.size() == 1) {
                Value v = eval(*call.args[0]);
                if (auto* sv = std::get_if<StrVal>(&v)) {
                    prints_.push_back(sv->s + "\n");
                    return IntVal{0, 32, true};
                }
            }
            trap(TrapKind::Unsupported, call.span, "bad puts call");
        }
        if (name == "putchar") {
            if (call.args.size() == 1) {
                IntVal c = as_int(eval(*call.args[0]), call.span);
                prints_.push_back(std::string(1, static_cast<char>(c.v)));
                return c;
            }
        }
        trap(TrapKind::Unsupported, call.span, "call to unknown function '" + name + "'");
    }

    Value builtin_printf(const CallExpr& call) {
        if (call.args.empty()) trap(TrapKind::Unsupported, call.span, "printf without format");
        Value fmt_v = eval(*call.args[0]);
        auto* fmt = std::get_if<StrVal>(&fmt_v);
        if (!fmt) trap(TrapKind::Unsupported, call.span, "printf needs a literal format");
        std::string out;
        size_t arg_i = 1;
        const std::string& f = fmt->s;
        for (size_t i = 0; i < f.size(); ++i) {
            if (f[i] != '%') {
                out += f[i];
                continue;
            }
            ++i;
            if (i >= f.size()) break;
            if (f[i] == '%') {
                out += '%';
                continue;
            }
            // Skip width/length modifiers.
            while (i < f.size() && (std::isdigit(static_cast<unsigned char>(f[i])) ||
                                    f[i] == 'l' || f[i] == 'h'))
                ++i;
            if (i >= f.size()) break;
            if (arg_i >= call.args.size())
                trap(TrapKind::Unsupported, call.span, "printf missing argument");
            Value av = eval(*call.args[arg_i++]);
            switch (f[i]) {
                case 'd':
                case 'i':
                case 'u':
                    out += std::to_string(as_int(av, call.span).v);
                    break;
                case 'x': {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%llx",
                                  static_cast<unsigned long long>(as_int(av, call.span).v));
                    out += buf;
                    break;
                }
                case 'c':
                    out += static_cast<char>(as_int(av, call.span).v);
                    break;
                case 'f': {
                    char buf[64];
                    double d = std::holds_alternative<FloatVal>(av)
                                   ? std::get<FloatVal>(av).v
                                   : static_cast<double>(as_int(av, call.span).v);
                    std::snprintf(buf, sizeof(buf), "%f", d);
                    out += buf;
                    break;
                }
                case 's': {
                    if (auto* sv = std::get_if<StrVal>(&av)) out += sv->s;
                    break;
                }
                default:
                    break;
            }
        }
        prints_.push_back(out);
        return IntVal{static_cast<long long>(out.size()), 32, true};
    }
};

}  // namespace

ExecResult run(const SourceUnit& unit, const std::string& entry, const ExecEnv& env) {
    Machine m(unit, env);
    return m.run(entry);
}

}  // namespace hlsrepair::interp
