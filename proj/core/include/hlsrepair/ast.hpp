#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hlsrepair/token.hpp"

namespace hlsrepair::cfront {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct TypeSpec {
    enum class Base {
        Void, Bool, Char, Short, Int, Long, LongLong, Float, Double,
        AcInt,    // ac_int<W,S> / ac_uint<W>
        Struct, Enum,
    };
    Base base = Base::Int;
    bool is_unsigned = false;
    bool explicit_signed = false;
    bool is_const = false;
    bool is_static = false;
    int ac_width = 0;        // AcInt only
    bool ac_is_signed = true;
    std::string tag;         // Struct/Enum tag name
    Span span;

    bool is_integer() const {
        switch (base) {
            case Base::Bool: case Base::Char: case Base::Short: case Base::Int:
            case Base::Long: case Base::LongLong: case Base::AcInt: case Base::Enum:
                return true;
            default:
                return false;
        }
    }
    bool is_float() const { return base == Base::Float || base == Base::Double; }

    /// Declared storage width in bits for integer bases (enum counts as int).
    int bit_width() const;
    /// Effective signedness of stored values.
    bool is_signed_type() const;
    /// Storage size in bytes as used by sizeof (no padding anywhere).
    int byte_size() const;

    std::string to_string() const;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;
struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Declarator {
    std::string name;
    int pointer_depth = 0;            // leading '*' count
    bool is_fn_ptr = false;           // (*name)(...)
    std::vector<ExprPtr> array_dims;  // one entry per [dim]; null expr for []
    ExprPtr init;
    Span span;       // whole declarator including initializer
    Span name_span;

    bool is_array() const { return !array_dims.empty(); }
    bool is_pointer() const { return pointer_depth > 0; }
};

/// Stable identity of a variable declaration: enclosing function (empty for
/// file scope) plus the byte offset where the declarator's name starts.
struct VarId {
    std::string func;
    uint32_t decl_begin = 0;
    std::string name;

    auto operator<=>(const VarId&) const = default;
};

/// Where an identifier resolved to. Carries a copy of the declared type so
/// consumers never hold pointers into the tree.
struct VarRef {
    VarId id;
    enum class Kind { Global, Local, Param, Function, EnumConst, DefineConst } kind =
        Kind::Global;
    TypeSpec type;
    int pointer_depth = 0;
    bool is_array = false;
    bool is_fn_ptr = false;
    long long array_length = -1;  // first dimension when constant, else -1
    long long const_value = 0;    // EnumConst / DefineConst
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind {
    IntLit, FloatLit, StringLit, CharLit, BoolLit,
    Ident, Call, Unary, Binary, Assign, Ternary,
    Index, Member, Cast, Sizeof, Paren, InitList,
};

enum class BinOp {
    Add, Sub, Mul, Div, Rem, Shl, Shr,
    Lt, Gt, Le, Ge, Eq, Ne,
    BitAnd, BitXor, BitOr, LogAnd, LogOr,
};

enum class UnOp { Plus, Minus, LogNot, BitNot, PreInc, PreDec, PostInc, PostDec, Deref, AddrOf };

enum class AssignOp { Set, Add, Sub, Mul, Div, Rem, Shl, Shr, And, Or, Xor };

struct Expr {
    ExprKind kind;
    Span span;
    explicit Expr(ExprKind k) : kind(k) {}
    virtual ~Expr() = default;
};

struct IntLit : Expr {
    IntLit() : Expr(ExprKind::IntLit) {}
    long long value = 0;
    bool has_unsigned_suffix = false;
    bool is_long = false;
    std::string text;
};
struct FloatLit : Expr {
    FloatLit() : Expr(ExprKind::FloatLit) {}
    double value = 0;
    std::string text;
};
struct StringLit : Expr {
    StringLit() : Expr(ExprKind::StringLit) {}
    std::string value;  // decoded
    std::string text;   // raw with quotes
};
struct CharLit : Expr {
    CharLit() : Expr(ExprKind::CharLit) {}
    long long value = 0;
    std::string text;
};
struct BoolLit : Expr {
    BoolLit() : Expr(ExprKind::BoolLit) {}
    bool value = false;
};
struct IdentExpr : Expr {
    IdentExpr() : Expr(ExprKind::Ident) {}
    std::string name;
    std::optional<VarRef> ref;  // empty = unresolved
};
struct CallExpr : Expr {
    CallExpr() : Expr(ExprKind::Call) {}
    ExprPtr callee;  // usually IdentExpr
    std::vector<ExprPtr> args;
    std::string callee_name() const;
};
struct UnaryExpr : Expr {
    UnaryExpr() : Expr(ExprKind::Unary) {}
    UnOp op{};
    ExprPtr operand;
};
struct BinaryExpr : Expr {
    BinaryExpr() : Expr(ExprKind::Binary) {}
    BinOp op{};
    ExprPtr lhs, rhs;
};
struct AssignExpr : Expr {
    AssignExpr() : Expr(ExprKind::Assign) {}
    AssignOp op{};
    ExprPtr lhs, rhs;
};
struct TernaryExpr : Expr {
    TernaryExpr() : Expr(ExprKind::Ternary) {}
    ExprPtr cond, then_expr, else_expr;
};
struct IndexExpr : Expr {
    IndexExpr() : Expr(ExprKind::Index) {}
    ExprPtr base, index;
};
struct MemberExpr : Expr {
    MemberExpr() : Expr(ExprKind::Member) {}
    ExprPtr base;
    std::string member;
    bool is_arrow = false;
};
struct CastExpr : Expr {
    CastExpr() : Expr(ExprKind::Cast) {}
    TypeSpec type;
    int pointer_depth = 0;
    ExprPtr operand;
};
struct SizeofExpr : Expr {
    SizeofExpr() : Expr(ExprKind::Sizeof) {}
    std::optional<TypeSpec> type;  // sizeof(type)
    int pointer_depth = 0;
    ExprPtr operand;               // sizeof expr
};
struct ParenExpr : Expr {
    ParenExpr() : Expr(ExprKind::Paren) {}
    ExprPtr inner;
};
struct InitListExpr : Expr {
    InitListExpr() : Expr(ExprKind::InitList) {}
    std::vector<ExprPtr> items;
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StmtKind {
    Block, If, While, DoWhile, For, Return, Break, Continue,
    Switch, ExprStmt, DeclStmt, Pragma, Foreign, Empty,
};

struct Stmt {
    StmtKind kind;
    Span span;
    explicit Stmt(StmtKind k) : kind(k) {}
    virtual ~Stmt() = default;
};

struct BlockStmt : Stmt {
    BlockStmt() : Stmt(StmtKind::Block) {}
    std::vector<StmtPtr> stmts;
    Span lbrace, rbrace;
};
struct IfStmt : Stmt {
    IfStmt() : Stmt(StmtKind::If) {}
    ExprPtr cond;
    StmtPtr then_stmt, else_stmt;
};
struct WhileStmt : Stmt {
    WhileStmt() : Stmt(StmtKind::While) {}
    ExprPtr cond;
    StmtPtr body;
};
struct DoWhileStmt : Stmt {
    DoWhileStmt() : Stmt(StmtKind::DoWhile) {}
    StmtPtr body;
    ExprPtr cond;
};
struct DeclStmt;
struct ForStmt : Stmt {
    ForStmt() : Stmt(StmtKind::For) {}
    StmtPtr init;  // DeclStmt, ExprStmt or Empty
    ExprPtr cond;  // may be null
    ExprPtr step;  // may be null
    StmtPtr body;
};
struct ReturnStmt : Stmt {
    ReturnStmt() : Stmt(StmtKind::Return) {}
    ExprPtr value;  // may be null
};
struct BreakStmt : Stmt {
    BreakStmt() : Stmt(StmtKind::Break) {}
};
struct ContinueStmt : Stmt {
    ContinueStmt() : Stmt(StmtKind::Continue) {}
};
struct CaseLabel {
    bool is_default = false;
    ExprPtr value;
    Span span;
};
struct SwitchSection {
    std::vector<CaseLabel> labels;
    std::vector<StmtPtr> body;
};
struct SwitchStmt : Stmt {
    SwitchStmt() : Stmt(StmtKind::Switch) {}
    ExprPtr scrutinee;
    std::vector<SwitchSection> sections;
    Span lbrace, rbrace;
    bool has_default() const;
};
struct ExprStmt : Stmt {
    ExprStmt() : Stmt(StmtKind::ExprStmt) {}
    ExprPtr expr;
};
struct DeclStmt : Stmt {
    DeclStmt() : Stmt(StmtKind::DeclStmt) {}
    TypeSpec type;
    std::vector<Declarator> declarators;
};
struct PragmaStmt : Stmt {
    PragmaStmt() : Stmt(StmtKind::Pragma) {}
    std::string text;  // full `#pragma ...` line
};
struct ForeignStmt : Stmt {
    ForeignStmt() : Stmt(StmtKind::Foreign) {}
    std::string text;  // raw bytes, preserved losslessly
    bool is_directive = false;
};
struct EmptyStmt : Stmt {
    EmptyStmt() : Stmt(StmtKind::Empty) {}
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

enum class DeclKind { Function, Var, Struct, Enum, Include, Define, Pragma, Foreign };

struct Decl {
    DeclKind kind;
    Span span;
    explicit Decl(DeclKind k) : kind(k) {}
    virtual ~Decl() = default;
};
using DeclPtr = std::unique_ptr<Decl>;

struct Param {
    TypeSpec type;
    Declarator decl;
};
struct FunctionDecl : Decl {
    FunctionDecl() : Decl(DeclKind::Function) {}
    TypeSpec return_type;
    int return_pointer_depth = 0;
    std::string name;
    Span name_span;
    std::vector<Param> params;
    std::unique_ptr<BlockStmt> body;  // null for a prototype
};
struct VarDecl : Decl {
    VarDecl() : Decl(DeclKind::Var) {}
    TypeSpec type;
    std::vector<Declarator> declarators;
};
struct StructField {
    TypeSpec type;
    Declarator decl;
};
struct StructDecl : Decl {
    StructDecl() : Decl(DeclKind::Struct) {}
    std::string name;
    Span name_span;
    std::vector<StructField> fields;
    std::vector<std::string> foreign_members;  // raw text of unparsed members
    std::vector<Span> foreign_member_spans;
};
struct Enumerator {
    std::string name;
    long long value = 0;
    Span span;
};
struct EnumDecl : Decl {
    EnumDecl() : Decl(DeclKind::Enum) {}
    std::string name;
    std::vector<Enumerator> enumerators;
};
struct IncludeDecl : Decl {
    IncludeDecl() : Decl(DeclKind::Include) {}
    std::string text;  // verbatim line
};
struct DefineDecl : Decl {
    DefineDecl() : Decl(DeclKind::Define) {}
    std::string text;  // verbatim line
    std::string name;
    std::optional<long long> value;  // object-like integer defines only
};
struct PragmaDecl : Decl {
    PragmaDecl() : Decl(DeclKind::Pragma) {}
    std::string text;
};
struct ForeignDecl : Decl {
    ForeignDecl() : Decl(DeclKind::Foreign) {}
    std::string text;
    bool is_directive = false;
};

struct ParseError {
    std::string message;
    Span span;
};

struct Ast {
    std::vector<DeclPtr> decls;

    // Symbol tables filled at parse time; pointers into `decls`.
    std::map<std::string, const FunctionDecl*> functions;
    std::map<std::string, const StructDecl*> structs;
    std::map<std::string, const EnumDecl*> enums;
    std::map<std::string, long long> enum_consts;
    std::map<std::string, long long> define_consts;

    const FunctionDecl* function(const std::string& name) const {
        auto it = functions.find(name);
        return it == functions.end() ? nullptr : it->second;
    }
    int struct_byte_size(const std::string& tag) const;
};

struct ParseResult {
    std::shared_ptr<Ast> ast;  // never null
    std::vector<ParseError> errors;
    bool ok() const { return errors.empty(); }
};

/// Recursive-descent parse over the lexed stream. Syntax errors are recorded
/// and recovery resumes at `;` / `}`; unparsed regions become foreign nodes
/// holding their raw bytes so printing stays lossless.
ParseResult parse(const TokenStream& tokens, std::string_view source_bytes);

/// Constant expression evaluation over literals, enum/define constants,
/// sizeof, and the usual integer operators. Empty when not constant.
std::optional<long long> eval_const_expr(const Expr& e, const Ast& ast);

/// Canonical structural fingerprint, independent of whitespace, comments and
/// spans. Two ASTs are considered structurally identical iff dumps match.
std::string dump_structure(const Ast& ast);

// Child traversal used by analysis passes. The callback receives every
// direct and transitive subexpression / substatement.
void walk_exprs(const Expr& e, const std::function<void(const Expr&)>& fn);
void walk_stmt_exprs(const Stmt& s, const std::function<void(const Expr&)>& fn);
void walk_stmts(const Stmt& s, const std::function<void(const Stmt&)>& fn);

}  // namespace hlsrepair::cfront
