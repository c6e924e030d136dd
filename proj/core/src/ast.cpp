#include "hlsrepair/ast.hpp"

#include <sstream>

namespace hlsrepair::cfront {

int TypeSpec::bit_width() const {
    switch (base) {
        case Base::Bool: return 1;
        case Base::Char: return 8;
        case Base::Short: return 16;
        case Base::Int: return 32;
        case Base::Long: return 64;
        case Base::LongLong: return 64;
        case Base::AcInt: return ac_width;
        case Base::Enum: return 32;
        default: return 0;
    }
}

bool TypeSpec::is_signed_type() const {
    if (base == Base::Bool) return false;
    if (base == Base::AcInt) return ac_is_signed;
    return !is_unsigned;
}

int TypeSpec::byte_size() const {
    switch (base) {
        case Base::Void: return 1;
        case Base::Bool: return 1;
        case Base::Char: return 1;
        case Base::Short: return 2;
        case Base::Int: return 4;
        case Base::Long: return 8;
        case Base::LongLong: return 8;
        case Base::Float: return 4;
        case Base::Double: return 8;
        case Base::AcInt: return (ac_width + 7) / 8;
        case Base::Enum: return 4;
        case Base::Struct: return -1;  // needs the Ast's field layout
    }
    return -1;
}

std::string TypeSpec::to_string() const {
    std::string out;
    if (is_static) out += "static ";
    if (is_const) out += "const ";
    switch (base) {
        case Base::Void: out += "void"; break;
        case Base::Bool: out += "bool"; break;
        case Base::Char: out += is_unsigned ? "unsigned char" : "char"; break;
        case Base::Short: out += is_unsigned ? "unsigned short" : "short"; break;
        case Base::Int: out += is_unsigned ? "unsigned int" : "int"; break;
        case Base::Long: out += is_unsigned ? "unsigned long" : "long"; break;
        case Base::LongLong: out += is_unsigned ? "unsigned long long" : "long long"; break;
        case Base::Float: out += "float"; break;
        case Base::Double: out += "double"; break;
        case Base::AcInt:
            out += "ac_int<" + std::to_string(ac_width) + ", " +
                   (ac_is_signed ? "true" : "false") + ">";
            break;
        case Base::Struct: out += tag; break;
        case Base::Enum: out += tag; break;
    }
    return out;
}

int Ast::struct_byte_size(const std::string& tag) const {
    auto it = structs.find(tag);
    if (it == structs.end()) return -1;
    int total = 0;
    for (const auto& f : it->second->fields) {
        int elem = f.decl.pointer_depth > 0 || f.decl.is_fn_ptr ? 8 : f.type.byte_size();
        if (elem < 0) elem = struct_byte_size(f.type.tag);
        if (elem < 0) return -1;
        long long count = 1;
        for (const auto& dim : f.decl.array_dims) {
            if (!dim) return -1;
            auto v = eval_const_expr(*dim, *this);
            if (!v) return -1;
            count *= *v;
        }
        total += static_cast<int>(elem * count);
    }
    return total;
}

std::string CallExpr::callee_name() const {
    const Expr* e = callee.get();
    while (e && e->kind == ExprKind::Paren)
        e = static_cast<const ParenExpr*>(e)->inner.get();
    if (e && e->kind == ExprKind::Ident) return static_cast<const IdentExpr*>(e)->name;
    return {};
}

bool SwitchStmt::has_default() const {
    for (const auto& sec : sections)
        for (const auto& l : sec.labels)
            if (l.is_default) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Constant expression evaluation
// ---------------------------------------------------------------------------

std::optional<long long> eval_const_expr(const Expr& e, const Ast& ast) {
    switch (e.kind) {
        case ExprKind::IntLit: return static_cast<const IntLit&>(e).value;
        case ExprKind::CharLit: return static_cast<const CharLit&>(e).value;
        case ExprKind::BoolLit: return static_cast<const BoolLit&>(e).value ? 1 : 0;
        case ExprKind::Paren:
            return eval_const_expr(*static_cast<const ParenExpr&>(e).inner, ast);
        case ExprKind::Ident: {
            const auto& id = static_cast<const IdentExpr&>(e);
            if (id.ref && (id.ref->kind == VarRef::Kind::EnumConst ||
                           id.ref->kind == VarRef::Kind::DefineConst))
                return id.ref->const_value;
            if (auto it = ast.enum_consts.find(id.name); it != ast.enum_consts.end())
                return it->second;
            if (auto it = ast.define_consts.find(id.name); it != ast.define_consts.end())
                return it->second;
            return std::nullopt;
        }
        case ExprKind::Unary: {
            const auto& u = static_cast<const UnaryExpr&>(e);
            if (!u.operand) return std::nullopt;
            auto v = eval_const_expr(*u.operand, ast);
            if (!v) return std::nullopt;
            switch (u.op) {
                case UnOp::Plus: return *v;
                case UnOp::Minus: return -*v;
                case UnOp::BitNot: return ~*v;
                case UnOp::LogNot: return *v == 0 ? 1 : 0;
                default: return std::nullopt;
            }
        }
        case ExprKind::Binary: {
            const auto& b = static_cast<const BinaryExpr&>(e);
            if (!b.lhs || !b.rhs) return std::nullopt;
            auto l = eval_const_expr(*b.lhs, ast);
            auto r = eval_const_expr(*b.rhs, ast);
            if (!l || !r) return std::nullopt;
            switch (b.op) {
                case BinOp::Add: return *l + *r;
                case BinOp::Sub: return *l - *r;
                case BinOp::Mul: return *l * *r;
                case BinOp::Div: return *r == 0 ? std::nullopt : std::optional(*l / *r);
                case BinOp::Rem: return *r == 0 ? std::nullopt : std::optional(*l % *r);
                case BinOp::Shl:
                    return (*r < 0 || *r >= 63) ? std::nullopt : std::optional(*l << *r);
                case BinOp::Shr:
                    return (*r < 0 || *r >= 63) ? std::nullopt : std::optional(*l >> *r);
                case BinOp::Lt: return *l < *r ? 1 : 0;
                case BinOp::Gt: return *l > *r ? 1 : 0;
                case BinOp::Le: return *l <= *r ? 1 : 0;
                case BinOp::Ge: return *l >= *r ? 1 : 0;
                case BinOp::Eq: return *l == *r ? 1 : 0;
                case BinOp::Ne: return *l != *r ? 1 : 0;
                case BinOp::BitAnd: return *l & *r;
                case BinOp::BitXor: return *l ^ *r;
                case BinOp::BitOr: return *l | *r;
                case BinOp::LogAnd: return (*l != 0 && *r != 0) ? 1 : 0;
                case BinOp::LogOr: return (*l != 0 || *r != 0) ? 1 : 0;
            }
            return std::nullopt;
        }
        case ExprKind::Ternary: {
            const auto& t = static_cast<const TernaryExpr&>(e);
            auto c = t.cond ? eval_const_expr(*t.cond, ast) : std::nullopt;
            if (!c) return std::nullopt;
            const Expr* pick = *c != 0 ? t.then_expr.get() : t.else_expr.get();
            return pick ? eval_const_expr(*pick, ast) : std::nullopt;
        }
        case ExprKind::Sizeof: {
            const auto& s = static_cast<const SizeofExpr&>(e);
            if (s.type) {
                if (s.pointer_depth > 0) return 8;
                int sz = s.type->byte_size();
                if (sz < 0 && s.type->base == TypeSpec::Base::Struct)
                    sz = ast.struct_byte_size(s.type->tag);
                return sz < 0 ? std::nullopt : std::optional<long long>(sz);
            }
            if (s.operand && s.operand->kind == ExprKind::Ident) {
                const auto& id = static_cast<const IdentExpr&>(*s.operand);
                if (id.ref && !id.ref->is_array && id.ref->pointer_depth == 0) {
                    int sz = id.ref->type.byte_size();
                    if (sz < 0 && id.ref->type.base == TypeSpec::Base::Struct)
                        sz = ast.struct_byte_size(id.ref->type.tag);
                    if (sz > 0) return sz;
                }
            }
            return std::nullopt;
        }
        case ExprKind::Cast: {
            const auto& c = static_cast<const CastExpr&>(e);
            return c.operand ? eval_const_expr(*c.operand, ast) : std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Traversal
// ---------------------------------------------------------------------------

void walk_exprs(const Expr& e, const std::function<void(const Expr&)>& fn) {
    fn(e);
    auto rec = [&](const ExprPtr& p) {
        if (p) walk_exprs(*p, fn);
    };
    switch (e.kind) {
        case ExprKind::Call: {
            const auto& n = static_cast<const CallExpr&>(e);
            rec(n.callee);
            for (const auto& a : n.args) rec(a);
            break;
        }
        case ExprKind::Unary: rec(static_cast<const UnaryExpr&>(e).operand); break;
        case ExprKind::Binary: {
            const auto& n = static_cast<const BinaryExpr&>(e);
            rec(n.lhs);
            rec(n.rhs);
            break;
        }
        case ExprKind::Assign: {
            const auto& n = static_cast<const AssignExpr&>(e);
            rec(n.lhs);
            rec(n.rhs);
            break;
        }
        case ExprKind::Ternary: {
            const auto& n = static_cast<const TernaryExpr&>(e);
            rec(n.cond);
            rec(n.then_expr);
            rec(n.else_expr);
            break;
        }
        case ExprKind::Index: {
            const auto& n = static_cast<const IndexExpr&>(e);
            rec(n.base);
            rec(n.index);
            break;
        }
        case ExprKind::Member: rec(static_cast<const MemberExpr&>(e).base); break;
        case ExprKind::Cast: rec(static_cast<const CastExpr&>(e).operand); break;
        case ExprKind::Sizeof: rec(static_cast<const SizeofExpr&>(e).operand); break;
        case ExprKind::Paren: rec(static_cast<const ParenExpr&>(e).inner); break;
        case ExprKind::InitList:
            for (const auto& i : static_cast<const InitListExpr&>(e).items) rec(i);
            break;
        default: break;
    }
}

void walk_stmts(const Stmt& s, const std::function<void(const Stmt&)>& fn) {
    fn(s);
    auto rec = [&](const StmtPtr& p) {
        if (p) walk_stmts(*p, fn);
    };
    switch (s.kind) {
        case StmtKind::Block:
            for (const auto& st : static_cast<const BlockStmt&>(s).stmts) rec(st);
            break;
        case StmtKind::If: {
            const auto& n = static_cast<const IfStmt&>(s);
            rec(n.then_stmt);
            rec(n.else_stmt);
            break;
        }
        case StmtKind::While: rec(static_cast<const WhileStmt&>(s).body); break;
        case StmtKind::DoWhile: rec(static_cast<const DoWhileStmt&>(s).body); break;
        case StmtKind::For: {
            const auto& n = static_cast<const ForStmt&>(s);
            rec(n.init);
            rec(n.body);
            break;
        }
        case StmtKind::Switch:
            for (const auto& sec : static_cast<const SwitchStmt&>(s).sections)
                for (const auto& st : sec.body) rec(st);
            break;
        default: break;
    }
}

void walk_stmt_exprs(const Stmt& s, const std::function<void(const Expr&)>& fn) {
    walk_stmts(s, [&](const Stmt& st) {
        auto on = [&](const ExprPtr& e) {
            if (e) walk_exprs(*e, fn);
        };
        switch (st.kind) {
            case StmtKind::If: on(static_cast<const IfStmt&>(st).cond); break;
            case StmtKind::While: on(static_cast<const WhileStmt&>(st).cond); break;
            case StmtKind::DoWhile: on(static_cast<const DoWhileStmt&>(st).cond); break;
            case StmtKind::For: {
                const auto& f = static_cast<const ForStmt&>(st);
                on(f.cond);
                on(f.step);
                break;
            }
            case StmtKind::Return: on(static_cast<const ReturnStmt&>(st).value); break;
            case StmtKind::Switch: {
                const auto& sw = static_cast<const SwitchStmt&>(st);
                on(sw.scrutinee);
                for (const auto& sec : sw.sections)
                    for (const auto& l : sec.labels) on(l.value);
                break;
            }
            case StmtKind::ExprStmt: on(static_cast<const ExprStmt&>(st).expr); break;
            case StmtKind::DeclStmt:
                for (const auto& d : static_cast<const DeclStmt&>(st).declarators) {
                    on(d.init);
                    for (const auto& dim : d.array_dims) on(dim);
                }
                break;
            default: break;
        }
    });
}

// ---------------------------------------------------------------------------
// Structural dump
// ---------------------------------------------------------------------------

namespace {

const char* bin_op_name(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Rem: return "%";
        case BinOp::Shl: return "<<";
        case BinOp::Shr: return ">>";
        case BinOp::Lt: return "<";
        case BinOp::Gt: return ">";
        case BinOp::Le: return "<=";
        case BinOp::Ge: return ">=";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::BitAnd: return "&";
        case BinOp::BitXor: return "^";
        case BinOp::BitOr: return "|";
        case BinOp::LogAnd: return "&&";
        case BinOp::LogOr: return "||";
    }
    return "?";
}

const char* un_op_name(UnOp op) {
    switch (op) {
        case UnOp::Plus: return "u+";
        case UnOp::Minus: return "u-";
        case UnOp::LogNot: return "!";
        case UnOp::BitNot: return "~";
        case UnOp::PreInc: return "pre++";
        case UnOp::PreDec: return "pre--";
        case UnOp::PostInc: return "post++";
        case UnOp::PostDec: return "post--";
        case UnOp::Deref: return "deref";
        case UnOp::AddrOf: return "addrof";
    }
    return "?";
}

const char* assign_op_name(AssignOp op) {
    switch (op) {
        case AssignOp::Set: return "=";
        case AssignOp::Add: return "+=";
        case AssignOp::Sub: return "-=";
        case AssignOp::Mul: return "*=";
        case AssignOp::Div: return "/=";
        case AssignOp::Rem: return "%=";
        case AssignOp::Shl: return "<<=";
        case AssignOp::Shr: return ">>=";
        case AssignOp::And: return "&=";
        case AssignOp::Or: return "|=";
        case AssignOp::Xor: return "^=";
    }
    return "?";
}

class Dumper {
public:
    std::string run(const Ast& ast) {
        out_ << "(unit";
        for (const auto& d : ast.decls) dump_decl(*d);
        out_ << ")";
        return out_.str();
    }

private:
    std::ostringstream out_;

    void dump_type(const TypeSpec& t) { out_ << ' ' << t.to_string(); }

    void dump_declarator(const Declarator& d) {
        out_ << " (dtor " << d.name;
        for (int i = 0; i < d.pointer_depth; ++i) out_ << '*';
        if (d.is_fn_ptr) out_ << " fnptr";
        for (const auto& dim : d.array_dims) {
            out_ << " [";
            if (dim) dump_expr(*dim);
            out_ << "]";
        }
        if (d.init) {
            out_ << " =";
            dump_expr(*d.init);
        }
        out_ << ")";
    }

    void dump_decl(const Decl& d) {
        switch (d.kind) {
            case DeclKind::Function: {
                const auto& f = static_cast<const FunctionDecl&>(d);
                out_ << " (fn " << f.name;
                dump_type(f.return_type);
                for (int i = 0; i < f.return_pointer_depth; ++i) out_ << '*';
                out_ << " (params";
                for (const auto& p : f.params) {
                    dump_type(p.type);
                    dump_declarator(p.decl);
                }
                out_ << ")";
                if (f.body) dump_stmt(*f.body);
                out_ << ")";
                break;
            }
            case DeclKind::Var: {
                const auto& v = static_cast<const VarDecl&>(d);
                out_ << " (var";
                dump_type(v.type);
                for (const auto& dtor : v.declarators) dump_declarator(dtor);
                out_ << ")";
                break;
            }
            case DeclKind::Struct: {
                const auto& s = static_cast<const StructDecl&>(d);
                out_ << " (struct " << s.name;
                for (const auto& f : s.fields) {
                    dump_type(f.type);
                    dump_declarator(f.decl);
                }
                for (const auto& m : s.foreign_members) out_ << " (foreign-member " << m << ")";
                out_ << ")";
                break;
            }
            case DeclKind::Enum: {
                const auto& e = static_cast<const EnumDecl&>(d);
                out_ << " (enum " << e.name;
                for (const auto& en : e.enumerators) out_ << ' ' << en.name << '=' << en.value;
                out_ << ")";
                break;
            }
            case DeclKind::Include:
                out_ << " (include " << static_cast<const IncludeDecl&>(d).text << ")";
                break;
            case DeclKind::Define:
                out_ << " (define " << static_cast<const DefineDecl&>(d).text << ")";
                break;
            case DeclKind::Pragma:
                out_ << " (pragma " << static_cast<const PragmaDecl&>(d).text << ")";
                break;
            case DeclKind::Foreign:
                out_ << " (foreign " << static_cast<const ForeignDecl&>(d).text << ")";
                break;
        }
    }

    void dump_stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Block: {
                out_ << " (block";
                for (const auto& st : static_cast<const BlockStmt&>(s).stmts) dump_stmt(*st);
                out_ << ")";
                break;
            }
            case StmtKind::If: {
                const auto& n = static_cast<const IfStmt&>(s);
                out_ << " (if";
                if (n.cond) dump_expr(*n.cond);
                if (n.then_stmt) dump_stmt(*n.then_stmt);
                if (n.else_stmt) {
                    out_ << " (else";
                    dump_stmt(*n.else_stmt);
                    out_ << ")";
                }
                out_ << ")";
                break;
            }
            case StmtKind::While: {
                const auto& n = static_cast<const WhileStmt&>(s);
                out_ << " (while";
                if (n.cond) dump_expr(*n.cond);
                if (n.body) dump_stmt(*n.body);
                out_ << ")";
                break;
            }
            case StmtKind::DoWhile: {
                const auto& n = static_cast<const DoWhileStmt&>(s);
                out_ << " (do";
                if (n.body) dump_stmt(*n.body);
                if (n.cond) dump_expr(*n.cond);
                out_ << ")";
                break;
            }
            case StmtKind::For: {
                const auto& n = static_cast<const ForStmt&>(s);
                out_ << " (for";
                if (n.init) dump_stmt(*n.init);
                out_ << " (cond";
                if (n.cond) dump_expr(*n.cond);
                out_ << ") (step";
                if (n.step) dump_expr(*n.step);
                out_ << ")";
                if (n.body) dump_stmt(*n.body);
                out_ << ")";
                break;
            }
            case StmtKind::Return: {
                const auto& n = static_cast<const ReturnStmt&>(s);
                out_ << " (return";
                if (n.value) dump_expr(*n.value);
                out_ << ")";
                break;
            }
            case StmtKind::Break: out_ << " (break)"; break;
            case StmtKind::Continue: out_ << " (continue)"; break;
            case StmtKind::Switch: {
                const auto& n = static_cast<const SwitchStmt&>(s);
                out_ << " (switch";
                if (n.scrutinee) dump_expr(*n.scrutinee);
                for (const auto& sec : n.sections) {
                    out_ << " (section (labels";
                    for (const auto& l : sec.labels) {
                        if (l.is_default) {
                            out_ << " default";
                        } else if (l.value) {
                            dump_expr(*l.value);
                        }
                    }
                    out_ << ")";
                    for (const auto& st : sec.body) dump_stmt(*st);
                    out_ << ")";
                }
                out_ << ")";
                break;
            }
            case StmtKind::ExprStmt: {
                out_ << " (expr";
                const auto& n = static_cast<const ExprStmt&>(s);
                if (n.expr) dump_expr(*n.expr);
                out_ << ")";
                break;
            }
            case StmtKind::DeclStmt: {
                const auto& n = static_cast<const DeclStmt&>(s);
                out_ << " (decl";
                dump_type(n.type);
                for (const auto& d : n.declarators) dump_declarator(d);
                out_ << ")";
                break;
            }
            case StmtKind::Pragma:
                out_ << " (pragma " << static_cast<const PragmaStmt&>(s).text << ")";
                break;
            case StmtKind::Foreign:
                out_ << " (foreign " << static_cast<const ForeignStmt&>(s).text << ")";
                break;
            case StmtKind::Empty: out_ << " (empty)"; break;
        }
    }

    void dump_expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit:
                out_ << " (int " << static_cast<const IntLit&>(e).value << ")";
                break;
            case ExprKind::FloatLit:
                out_ << " (float " << static_cast<const FloatLit&>(e).value << ")";
                break;
            case ExprKind::StringLit:
                out_ << " (str " << static_cast<const StringLit&>(e).text << ")";
                break;
            case ExprKind::CharLit:
                out_ << " (char " << static_cast<const CharLit&>(e).value << ")";
                break;
            case ExprKind::BoolLit:
                out_ << " (bool " << (static_cast<const BoolLit&>(e).value ? 1 : 0) << ")";
                break;
            case ExprKind::Ident:
                out_ << " (id " << static_cast<const IdentExpr&>(e).name << ")";
                break;
            case ExprKind::Call: {
                const auto& n = static_cast<const CallExpr&>(e);
                out_ << " (call";
                if (n.callee) dump_expr(*n.callee);
                for (const auto& a : n.args)
                    if (a) dump_expr(*a);
                out_ << ")";
                break;
            }
            case ExprKind::Unary: {
                const auto& n = static_cast<const UnaryExpr&>(e);
                out_ << " (" << un_op_name(n.op);
                if (n.operand) dump_expr(*n.operand);
                out_ << ")";
                break;
            }
            case ExprKind::Binary: {
                const auto& n = static_cast<const BinaryExpr&>(e);
                out_ << " (" << bin_op_name(n.op);
                if (n.lhs) dump_expr(*n.lhs);
                if (n.rhs) dump_expr(*n.rhs);
                out_ << ")";
                break;
            }
            case ExprKind::Assign: {
                const auto& n = static_cast<const AssignExpr&>(e);
                out_ << " (" << assign_op_name(n.op);
                if (n.lhs) dump_expr(*n.lhs);
                if (n.rhs) dump_expr(*n.rhs);
                out_ << ")";
                break;
            }
            case ExprKind::Ternary: {
                const auto& n = static_cast<const TernaryExpr&>(e);
                out_ << " (?:";
                if (n.cond) dump_expr(*n.cond);
                if (n.then_expr) dump_expr(*n.then_expr);
                if (n.else_expr) dump_expr(*n.else_expr);
                out_ << ")";
                break;
            }
            case ExprKind::Index: {
                const auto& n = static_cast<const IndexExpr&>(e);
                out_ << " (index";
                if (n.base) dump_expr(*n.base);
                if (n.index) dump_expr(*n.index);
                out_ << ")";
                break;
            }
            case ExprKind::Member: {
                const auto& n = static_cast<const MemberExpr&>(e);
                out_ << " (" << (n.is_arrow ? "->" : ".") << ' ' << n.member;
                if (n.base) dump_expr(*n.base);
                out_ << ")";
                break;
            }
            case ExprKind::Cast: {
                const auto& n = static_cast<const CastExpr&>(e);
                out_ << " (cast " << n.type.to_string();
                for (int i = 0; i < n.pointer_depth; ++i) out_ << '*';
                if (n.operand) dump_expr(*n.operand);
                out_ << ")";
                break;
            }
            case ExprKind::Sizeof: {
                const auto& n = static_cast<const SizeofExpr&>(e);
                out_ << " (sizeof";
                if (n.type) {
                    out_ << ' ' << n.type->to_string();
                    for (int i = 0; i < n.pointer_depth; ++i) out_ << '*';
                }
                if (n.operand) dump_expr(*n.operand);
                out_ << ")";
                break;
            }
            case ExprKind::Paren: {
                const auto& n = static_cast<const ParenExpr&>(e);
                if (n.inner) dump_expr(*n.inner);  // parens are not structure
                break;
            }
            case ExprKind::InitList: {
                out_ << " (initlist";
                for (const auto& i : static_cast<const InitListExpr&>(e).items)
                    if (i) dump_expr(*i);
                out_ << ")";
                break;
            }
        }
    }
};

}  // namespace

std::string dump_structure(const Ast& ast) {
    Dumper d;
    return d.run(ast);
}

}  // namespace hlsrepair::cfront
