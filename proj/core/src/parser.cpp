#include <cassert>
#include <cstdlib>

#include "hlsrepair/ast.hpp"

namespace hlsrepair::cfront {

namespace {

bool starts_type_keyword(const Token& t) {
    if (t.kind != TokenKind::Keyword) return false;
    return is_type_keyword(t.text) || t.text == "struct" || t.text == "enum";
}

class Parser {
public:
    Parser(const TokenStream& ts, std::string_view src) : toks_(ts.tokens), src_(src) {
        ast_ = std::make_shared<Ast>();
        // Convenience constant; <stdlib.h>-style headers are recorded, not
        // expanded, so NULL needs a home.
        ast_->define_consts["NULL"] = 0;
        scopes_.emplace_back();  // file scope
    }

    ParseResult run() {
        while (!at_eof()) {
            size_t before = pos_;
            parse_top_decl();
            if (pos_ == before) {
                // Defensive: never loop without progress.
                error("unexpected token '" + cur().text + "'", cur().span);
                foreign_decl_from(pos_, pos_ + 1, false);
                bump();
            }
        }
        ParseResult r;
        r.ast = ast_;
        r.errors = errors_;
        return r;
    }

private:
    const std::vector<Token>& toks_;
    std::string_view src_;
    size_t pos_ = 0;
    size_t last_consumed_ = 0;
    std::shared_ptr<Ast> ast_;
    std::vector<ParseError> errors_;
    std::string current_func_;
    std::vector<std::map<std::string, VarRef>> scopes_;

    // ---- token plumbing -------------------------------------------------

    void skip_comments() {
        while (pos_ < toks_.size() && toks_[pos_].kind == TokenKind::Comment) ++pos_;
    }
    const Token& cur() {
        skip_comments();
        return toks_[pos_];
    }
    const Token& ahead(size_t n) {
        size_t p = pos_;
        size_t seen = 0;
        while (p < toks_.size()) {
            if (toks_[p].kind != TokenKind::Comment) {
                if (seen == n) return toks_[p];
                ++seen;
            }
            ++p;
        }
        return toks_.back();
    }
    void bump() {
        skip_comments();
        if (pos_ < toks_.size() && toks_[pos_].kind != TokenKind::Eof) {
            last_consumed_ = pos_;
            ++pos_;
        }
    }
    bool at_eof() { return cur().kind == TokenKind::Eof; }
    bool at_punct(std::string_view p) { return cur().is_punct(p); }
    bool at_kw(std::string_view k) { return cur().is_keyword(k); }
    bool accept_punct(std::string_view p) {
        if (at_punct(p)) {
            bump();
            return true;
        }
        return false;
    }
    bool accept_kw(std::string_view k) {
        if (at_kw(k)) {
            bump();
            return true;
        }
        return false;
    }
    bool expect_punct(std::string_view p, const char* what) {
        if (accept_punct(p)) return true;
        error(std::string("expected '") + std::string(p) + "' " + what + ", found '" +
                  cur().text + "'",
              cur().span);
        return false;
    }

    void error(std::string msg, Span span) { errors_.push_back({std::move(msg), span}); }

    Span span_from(size_t start_tok) {
        Span s = toks_[start_tok].span;
        s.end = toks_[last_consumed_].span.end;
        return s;
    }
    std::string text_between(size_t start_tok, size_t end_tok_excl) {
        if (start_tok >= end_tok_excl) return {};
        uint32_t b = toks_[start_tok].span.begin;
        uint32_t e = toks_[end_tok_excl - 1].span.end;
        return std::string(src_.substr(b, e - b));
    }

    // ---- scopes ----------------------------------------------------------

    void push_scope() { scopes_.emplace_back(); }
    void pop_scope() { scopes_.pop_back(); }

    void register_var(const TypeSpec& t, const Declarator& d, VarRef::Kind kind) {
        if (d.name.empty()) return;
        VarRef ref;
        ref.id = VarId{current_func_, d.name_span.begin, d.name};
        ref.kind = kind;
        ref.type = t;
        ref.pointer_depth = d.pointer_depth;
        ref.is_array = d.is_array();
        ref.is_fn_ptr = d.is_fn_ptr;
        if (!d.array_dims.empty() && d.array_dims[0]) {
            if (auto n = eval_const_expr(*d.array_dims[0], *ast_)) ref.array_length = *n;
        }
        scopes_.back()[d.name] = std::move(ref);
    }

    std::optional<VarRef> resolve(const std::string& name) {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto hit = it->find(name);
            if (hit != it->end()) return hit->second;
        }
        if (auto* f = ast_->function(name)) {
            VarRef ref;
            ref.id = VarId{"", f->name_span.begin, name};
            ref.kind = VarRef::Kind::Function;
            ref.type = f->return_type;
            return ref;
        }
        if (auto it = ast_->enum_consts.find(name); it != ast_->enum_consts.end()) {
            VarRef ref;
            ref.id = VarId{"", 0, name};
            ref.kind = VarRef::Kind::EnumConst;
            ref.const_value = it->second;
            return ref;
        }
        if (auto it = ast_->define_consts.find(name); it != ast_->define_consts.end()) {
            VarRef ref;
            ref.id = VarId{"", 0, name};
            ref.kind = VarRef::Kind::DefineConst;
            ref.const_value = it->second;
            return ref;
        }
        return std::nullopt;
    }

    // ---- type specifiers -------------------------------------------------

    bool at_type_start() {
        const Token& t = cur();
        if (starts_type_keyword(t)) return true;
        if (t.kind == TokenKind::Identifier) {
            if ((t.text == "ac_int" || t.text == "ac_uint") && ahead(1).is_punct("<"))
                return true;
            if (ast_->structs.count(t.text) || ast_->enums.count(t.text)) return true;
        }
        return false;
    }

    std::optional<TypeSpec> parse_type_spec() {
        size_t start = pos_;
        TypeSpec ts;
        ts.span = cur().span;
        bool any = false;
        for (;;) {
            if (accept_kw("static")) {
                ts.is_static = true;
                continue;
            }
            if (accept_kw("const")) {
                ts.is_const = true;
                continue;
            }
            break;
        }
        if (accept_kw("unsigned")) {
            ts.is_unsigned = true;
            any = true;
        } else if (accept_kw("signed")) {
            ts.explicit_signed = true;
            any = true;
        }
        const Token& t = cur();
        if (t.kind == TokenKind::Keyword) {
            if (accept_kw("void")) ts.base = TypeSpec::Base::Void;
            else if (accept_kw("bool")) ts.base = TypeSpec::Base::Bool;
            else if (accept_kw("char")) ts.base = TypeSpec::Base::Char;
            else if (accept_kw("short")) { ts.base = TypeSpec::Base::Short; accept_kw("int"); }
            else if (accept_kw("int")) ts.base = TypeSpec::Base::Int;
            else if (accept_kw("long")) {
                ts.base = TypeSpec::Base::Long;
                if (accept_kw("long")) ts.base = TypeSpec::Base::LongLong;
                accept_kw("int");
            } else if (accept_kw("float")) ts.base = TypeSpec::Base::Float;
            else if (accept_kw("double")) ts.base = TypeSpec::Base::Double;
            else if (at_kw("struct") || at_kw("enum")) {
                bool is_enum = at_kw("enum");
                bump();
                if (cur().kind != TokenKind::Identifier) {
                    error("expected tag name", cur().span);
                    return std::nullopt;
                }
                ts.base = is_enum ? TypeSpec::Base::Enum : TypeSpec::Base::Struct;
                ts.tag = cur().text;
                bump();
            } else if (any) {
                ts.base = TypeSpec::Base::Int;  // bare `unsigned` / `signed`
            } else {
                return std::nullopt;
            }
        } else if (t.kind == TokenKind::Identifier) {
            if ((t.text == "ac_int" || t.text == "ac_uint") && ahead(1).is_punct("<")) {
                bool uint_form = t.text == "ac_uint";
                bump();
                bump();  // '<'
                ts.base = TypeSpec::Base::AcInt;
                // Width argument: additive precedence and tighter, so the
                // closing '>' is never taken as a comparison.
                ExprPtr w = parse_binary(9);
                auto wval = w ? eval_const_expr(*w, *ast_) : std::nullopt;
                ts.ac_width = wval ? static_cast<int>(*wval) : 32;
                if (!wval) error("ac_int width must be a constant", ts.span);
                if (uint_form) {
                    ts.ac_is_signed = false;
                } else {
                    expect_punct(",", "in ac_int type");
                    if (accept_kw("true")) ts.ac_is_signed = true;
                    else if (accept_kw("false")) ts.ac_is_signed = false;
                    else {
                        ExprPtr s = parse_binary(9);
                        auto sv = s ? eval_const_expr(*s, *ast_) : std::nullopt;
                        ts.ac_is_signed = sv.value_or(1) != 0;
                    }
                }
                expect_punct(">", "closing ac_int type");
                ts.is_unsigned = !ts.ac_is_signed;
            } else if (ast_->structs.count(t.text)) {
                ts.base = TypeSpec::Base::Struct;
                ts.tag = t.text;
                bump();
            } else if (ast_->enums.count(t.text)) {
                ts.base = TypeSpec::Base::Enum;
                ts.tag = t.text;
                bump();
            } else if (any) {
                ts.base = TypeSpec::Base::Int;
            } else {
                return std::nullopt;
            }
        } else if (any) {
            ts.base = TypeSpec::Base::Int;
        } else {
            return std::nullopt;
        }
        accept_kw("const");  // trailing const
        ts.span = span_from(start);
        (void)any;
        return ts;
    }

    // declarator := '*'* (IDENT | '(' '*' IDENT ')') ('[' const? ']')* ('(' fnptr-params ')')?
    std::optional<Declarator> parse_declarator(bool allow_init) {
        size_t start = pos_;
        Declarator d;
        while (accept_punct("*")) ++d.pointer_depth;
        if (at_punct("(") && ahead(1).is_punct("*")) {
            bump();  // (
            bump();  // *
            if (cur().kind != TokenKind::Identifier) {
                error("expected function pointer name", cur().span);
                return std::nullopt;
            }
            d.name = cur().text;
            d.name_span = cur().span;
            d.is_fn_ptr = true;
            bump();
            expect_punct(")", "after function pointer name");
            if (accept_punct("(")) {
                int depth = 1;
                while (!at_eof() && depth > 0) {
                    if (at_punct("(")) ++depth;
                    if (at_punct(")")) --depth;
                    bump();
                }
            }
        } else {
            if (cur().kind != TokenKind::Identifier) {
                error("expected declarator name, found '" + cur().text + "'", cur().span);
                return std::nullopt;
            }
            d.name = cur().text;
            d.name_span = cur().span;
            bump();
            while (accept_punct("[")) {
                if (at_punct("]")) {
                    d.array_dims.push_back(nullptr);
                } else {
                    d.array_dims.push_back(parse_assignment());
                }
                expect_punct("]", "closing array dimension");
            }
        }
        if (allow_init && accept_punct("=")) {
            d.init = parse_initializer();
        }
        d.span = span_from(start);
        return d;
    }

    ExprPtr parse_initializer() {
        if (at_punct("{")) return parse_init_list();
        return parse_assignment();
    }

    ExprPtr parse_init_list() {
        size_t start = pos_;
        expect_punct("{", "opening initializer list");
        auto node = std::make_unique<InitListExpr>();
        while (!at_eof() && !at_punct("}")) {
            node->items.push_back(parse_initializer());
            if (!accept_punct(",")) break;
        }
        expect_punct("}", "closing initializer list");
        node->span = span_from(start);
        return node;
    }

    // ---- declarations ----------------------------------------------------

    void parse_top_decl() {
        const Token& t = cur();
        if (t.kind == TokenKind::PragmaLine) {
            auto node = std::make_unique<PragmaDecl>();
            node->text = t.text;
            node->span = t.span;
            bump();
            ast_->decls.push_back(std::move(node));
            return;
        }
        if (t.kind == TokenKind::HashLine) {
            parse_hash_line();
            return;
        }
        if (at_kw("struct") && ahead(1).kind == TokenKind::Identifier &&
            ahead(2).is_punct("{")) {
            parse_struct_def();
            return;
        }
        if (at_kw("enum") && ahead(1).kind == TokenKind::Identifier &&
            ahead(2).is_punct("{")) {
            parse_enum_def();
            return;
        }
        if (at_kw("typedef") || at_kw("template") || at_kw("class") || at_kw("virtual") ||
            at_kw("public") || at_kw("private") || at_kw("operator")) {
            // Known constructs outside the subset: kept losslessly as foreign
            // declarations, reported by the compatibility checks, not here.
            size_t start = pos_;
            sync_balanced_to_semi();
            foreign_decl_from(start, pos_, false);
            return;
        }
        if (at_type_start()) {
            parse_var_or_function();
            return;
        }
        size_t start = pos_;
        error("expected declaration, found '" + t.text + "'", t.span);
        sync_balanced_to_semi();
        foreign_decl_from(start, pos_, false);
    }

    void parse_hash_line() {
        const Token& t = cur();
        std::string_view text = t.text;
        size_t word_at = text.find_first_not_of("# \t");
        std::string_view word =
            word_at == std::string_view::npos ? std::string_view{} : text.substr(word_at);
        if (word.rfind("include", 0) == 0) {
            auto node = std::make_unique<IncludeDecl>();
            node->text = t.text;
            node->span = t.span;
            bump();
            ast_->decls.push_back(std::move(node));
            return;
        }
        if (word.rfind("define", 0) == 0) {
            auto node = std::make_unique<DefineDecl>();
            node->text = t.text;
            node->span = t.span;
            parse_define_body(word.substr(6), *node);
            if (!node->name.empty() && node->value)
                ast_->define_consts[node->name] = *node->value;
            bump();
            ast_->decls.push_back(std::move(node));
            return;
        }
        auto node = std::make_unique<ForeignDecl>();
        node->text = t.text;
        node->span = t.span;
        node->is_directive = true;
        bump();
        ast_->decls.push_back(std::move(node));
    }

    // Object-like `#define NAME <integer>` becomes a named constant. Anything
    // fancier (function-like, non-integer) is kept verbatim with no value.
    void parse_define_body(std::string_view rest, DefineDecl& node) {
        size_t i = 0;
        while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t')) ++i;
        size_t name_start = i;
        while (i < rest.size() && (std::isalnum(static_cast<unsigned char>(rest[i])) ||
                                   rest[i] == '_'))
            ++i;
        if (i == name_start) return;
        node.name = std::string(rest.substr(name_start, i - name_start));
        if (i < rest.size() && rest[i] == '(') return;  // function-like
        std::string value_text(rest.substr(i));
        // Strip whitespace and at most one layer of parens.
        auto strip = [](std::string s) {
            size_t b = s.find_first_not_of(" \t");
            size_t e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        value_text = strip(value_text);
        if (value_text.size() >= 2 && value_text.front() == '(' && value_text.back() == ')')
            value_text = strip(value_text.substr(1, value_text.size() - 2));
        if (value_text.empty()) return;
        bool neg = false;
        size_t v = 0;
        if (value_text[v] == '-') {
            neg = true;
            ++v;
        }
        if (v >= value_text.size()) return;
        char* end = nullptr;
        long long val = std::strtoll(value_text.c_str() + v, &end, 0);
        if (end && *end == '\0') node.value = neg ? -val : val;
    }

    void parse_struct_def() {
        size_t start = pos_;
        bump();  // struct
        auto node = std::make_unique<StructDecl>();
        node->name = cur().text;
        node->name_span = cur().span;
        bump();
        StructDecl* raw = node.get();
        ast_->structs[node->name] = raw;  // visible to its own members
        expect_punct("{", "opening struct body");
        while (!at_eof() && !at_punct("}")) {
            size_t member_start = pos_;
            if (at_type_start()) {
                auto ts = parse_type_spec();
                if (ts) {
                    bool bad = false;
                    do {
                        auto d = parse_declarator(/*allow_init=*/false);
                        if (!d) {
                            bad = true;
                            break;
                        }
                        raw->fields.push_back(StructField{*ts, std::move(*d)});
                    } while (accept_punct(","));
                    if (!bad && expect_punct(";", "after struct field")) continue;
                }
            }
            // Unparsable member (virtual function, method, ...): keep raw.
            sync_balanced_to_semi();
            raw->foreign_members.push_back(text_between(member_start, pos_));
            raw->foreign_member_spans.push_back(span_from(member_start));
        }
        expect_punct("}", "closing struct body");
        accept_punct(";");
        node->span = span_from(start);
        ast_->decls.push_back(std::move(node));
    }

    void parse_enum_def() {
        size_t start = pos_;
        bump();  // enum
        auto node = std::make_unique<EnumDecl>();
        node->name = cur().text;
        bump();
        EnumDecl* raw = node.get();
        ast_->enums[node->name] = raw;
        expect_punct("{", "opening enum body");
        long long next = 0;
        while (!at_eof() && !at_punct("}")) {
            if (cur().kind != TokenKind::Identifier) {
                error("expected enumerator name", cur().span);
                break;
            }
            Enumerator e;
            e.name = cur().text;
            e.span = cur().span;
            bump();
            if (accept_punct("=")) {
                ExprPtr v = parse_assignment();
                auto val = v ? eval_const_expr(*v, *ast_) : std::nullopt;
                if (val) next = *val;
            }
            e.value = next++;
            ast_->enum_consts[e.name] = e.value;
            raw->enumerators.push_back(std::move(e));
            if (!accept_punct(",")) break;
        }
        expect_punct("}", "closing enum body");
        accept_punct(";");
        node->span = span_from(start);
        ast_->decls.push_back(std::move(node));
    }

    void parse_var_or_function() {
        size_t start = pos_;
        auto ts = parse_type_spec();
        if (!ts) {
            sync_balanced_to_semi();
            foreign_decl_from(start, pos_, false);
            return;
        }
        // Function: declarator name directly followed by '(' (and not (*fp)).
        int stars = 0;
        size_t p = 0;
        while (ahead(p).is_punct("*")) {
            ++stars;
            ++p;
        }
        if (ahead(p).kind == TokenKind::Identifier && ahead(p + 1).is_punct("(")) {
            parse_function(start, *ts, stars);
            return;
        }
        auto node = std::make_unique<VarDecl>();
        node->type = *ts;
        do {
            auto d = parse_declarator(/*allow_init=*/true);
            if (!d) {
                sync_balanced_to_semi();
                foreign_decl_from(start, pos_, false);
                return;
            }
            node->declarators.push_back(std::move(*d));
        } while (accept_punct(","));
        expect_punct(";", "after declaration");
        node->span = span_from(start);
        for (const auto& d : node->declarators)
            register_var(node->type, d, VarRef::Kind::Global);
        ast_->decls.push_back(std::move(node));
    }

    void parse_function(size_t start, TypeSpec ret, int ret_stars) {
        auto node = std::make_unique<FunctionDecl>();
        node->return_type = ret;
        node->return_pointer_depth = ret_stars;
        for (int i = 0; i < ret_stars; ++i) bump();  // '*'
        node->name = cur().text;
        node->name_span = cur().span;
        bump();
        expect_punct("(", "opening parameter list");
        if (!at_punct(")")) {
            if (at_kw("void") && ahead(1).is_punct(")")) {
                bump();
            } else {
                do {
                    auto pts = parse_type_spec();
                    if (!pts) {
                        error("expected parameter type", cur().span);
                        break;
                    }
                    auto pd = parse_declarator(/*allow_init=*/false);
                    if (!pd) break;
                    node->params.push_back(Param{*pts, std::move(*pd)});
                } while (accept_punct(","));
            }
        }
        expect_punct(")", "closing parameter list");

        FunctionDecl* raw = node.get();
        ast_->functions[node->name] = raw;  // recursion resolves to itself

        if (accept_punct(";")) {
            node->span = span_from(start);
            ast_->decls.push_back(std::move(node));
            return;
        }
        current_func_ = raw->name;
        push_scope();
        for (const auto& prm : raw->params) register_var(prm.type, prm.decl, VarRef::Kind::Param);
        auto body = parse_block();
        pop_scope();
        current_func_.clear();
        raw->body = std::move(body);
        node->span = span_from(start);
        ast_->decls.push_back(std::move(node));
    }

    void foreign_decl_from(size_t start_tok, size_t end_tok, bool directive) {
        if (start_tok >= end_tok) return;
        auto node = std::make_unique<ForeignDecl>();
        node->text = text_between(start_tok, end_tok);
        Span s = toks_[start_tok].span;
        s.end = toks_[end_tok - 1].span.end;
        node->span = s;
        node->is_directive = directive;
        ast_->decls.push_back(std::move(node));
    }

    // Consume tokens until a ';' at brace/paren depth 0 (consumed) or a '}'
    // closing an entered brace. Used for error recovery and foreign regions.
    void sync_balanced_to_semi() {
        int depth = 0;
        while (!at_eof()) {
            if (at_punct("{") || at_punct("(") || at_punct("[")) {
                ++depth;
                bump();
                continue;
            }
            if (at_punct("}") || at_punct(")") || at_punct("]")) {
                if (depth == 0 && at_punct("}")) return;  // let caller handle
                --depth;
                bump();
                if (depth <= 0 && toks_[last_consumed_].is_punct("}")) {
                    accept_punct(";");
                    return;
                }
                continue;
            }
            if (at_punct(";") && depth == 0) {
                bump();
                return;
            }
            bump();
        }
    }

    // ---- statements -------------------------------------------------------

    std::unique_ptr<BlockStmt> parse_block() {
        size_t start = pos_;
        auto node = std::make_unique<BlockStmt>();
        node->lbrace = cur().span;
        if (!expect_punct("{", "opening block")) {
            node->span = cur().span;
            return node;
        }
        push_scope();
        while (!at_eof() && !at_punct("}")) {
            size_t before = pos_;
            node->stmts.push_back(parse_stmt());
            if (pos_ == before) bump();
        }
        node->rbrace = cur().span;
        expect_punct("}", "closing block");
        pop_scope();
        node->span = span_from(start);
        return node;
    }

    StmtPtr parse_stmt() {
        const Token& t = cur();
        size_t start = pos_;
        if (t.kind == TokenKind::PragmaLine) {
            auto node = std::make_unique<PragmaStmt>();
            node->text = t.text;
            node->span = t.span;
            bump();
            return node;
        }
        if (t.kind == TokenKind::HashLine) {
            auto node = std::make_unique<ForeignStmt>();
            node->text = t.text;
            node->span = t.span;
            node->is_directive = true;
            bump();
            return node;
        }
        if (at_punct(";")) {
            auto node = std::make_unique<EmptyStmt>();
            node->span = t.span;
            bump();
            return node;
        }
        if (at_punct("{")) return parse_block();
        if (at_kw("if")) return parse_if();
        if (at_kw("while")) return parse_while();
        if (at_kw("do")) return parse_do_while();
        if (at_kw("for")) return parse_for();
        if (at_kw("switch")) return parse_switch();
        if (at_kw("return")) {
            bump();
            auto node = std::make_unique<ReturnStmt>();
            if (!at_punct(";")) node->value = parse_expr();
            expect_punct(";", "after return");
            node->span = span_from(start);
            return node;
        }
        if (at_kw("break")) {
            bump();
            expect_punct(";", "after break");
            auto node = std::make_unique<BreakStmt>();
            node->span = span_from(start);
            return node;
        }
        if (at_kw("continue")) {
            bump();
            expect_punct(";", "after continue");
            auto node = std::make_unique<ContinueStmt>();
            node->span = span_from(start);
            return node;
        }
        if (at_kw("goto") || at_kw("template") || at_kw("class") || at_kw("virtual") ||
            at_kw("new") || at_kw("delete") || at_kw("typedef")) {
            sync_balanced_to_semi();
            return make_foreign_stmt(start);
        }
        if (at_type_start()) return parse_decl_stmt();

        ExprPtr e = parse_expr();
        if (!e) {
            error("expected statement, found '" + t.text + "'", t.span);
            sync_balanced_to_semi();
            return make_foreign_stmt(start);
        }
        auto node = std::make_unique<ExprStmt>();
        node->expr = std::move(e);
        expect_punct(";", "after expression statement");
        node->span = span_from(start);
        return node;
    }

    StmtPtr make_foreign_stmt(size_t start_tok) {
        auto node = std::make_unique<ForeignStmt>();
        node->text = text_between(start_tok, pos_);
        node->span = span_from(start_tok);
        return node;
    }

    StmtPtr parse_decl_stmt() {
        size_t start = pos_;
        auto node = std::make_unique<DeclStmt>();
        auto ts = parse_type_spec();
        if (!ts) {
            sync_balanced_to_semi();
            return make_foreign_stmt(start);
        }
        node->type = *ts;
        do {
            auto d = parse_declarator(/*allow_init=*/true);
            if (!d) {
                sync_balanced_to_semi();
                return make_foreign_stmt(start);
            }
            // Visible to subsequent declarators in the same statement.
            register_var(node->type, *d, VarRef::Kind::Local);
            node->declarators.push_back(std::move(*d));
        } while (accept_punct(","));
        expect_punct(";", "after declaration");
        node->span = span_from(start);
        return node;
    }

    StmtPtr parse_if() {
        size_t start = pos_;
        bump();
        auto node = std::make_unique<IfStmt>();
        expect_punct("(", "after if");
        node->cond = parse_expr();
        expect_punct(")", "closing if condition");
        node->then_stmt = parse_stmt();
        if (accept_kw("else")) node->else_stmt = parse_stmt();
        node->span = span_from(start);
        return node;
    }

    StmtPtr parse_while() {
        size_t start = pos_;
        bump();
        auto node = std::make_unique<WhileStmt>();
        expect_punct("(", "after while");
        node->cond = parse_expr();
        expect_punct(")", "closing while condition");
        node->body = parse_stmt();
        node->span = span_from(start);
        return node;
    }

    StmtPtr parse_do_while() {
        size_t start = pos_;
        bump();
        auto node = std::make_unique<DoWhileStmt>();
        node->body = parse_stmt();
        if (!accept_kw("while")) error("expected 'while' after do body", cur().span);
        expect_punct("(", "after do-while");
        node->cond = parse_expr();
        expect_punct(")", "closing do-while condition");
        expect_punct(";", "after do-while");
        node->span = span_from(start);
        return node;
    }

    StmtPtr parse_for() {
        size_t start = pos_;
        bump();
        auto node = std::make_unique<ForStmt>();
        expect_punct("(", "after for");
        push_scope();
        if (at_punct(";")) {
            auto e = std::make_unique<EmptyStmt>();
            e->span = cur().span;
            node->init = std::move(e);
            bump();
        } else if (at_type_start()) {
            node->init = parse_decl_stmt();
        } else {
            auto es = std::make_unique<ExprStmt>();
            size_t es_start = pos_;
            es->expr = parse_expr();
            expect_punct(";", "after for initializer");
            es->span = span_from(es_start);
            node->init = std::move(es);
        }
        if (!at_punct(";")) node->cond = parse_expr();
        expect_punct(";", "after for condition");
        if (!at_punct(")")) node->step = parse_expr();
        expect_punct(")", "closing for header");
        node->body = parse_stmt();
        pop_scope();
        node->span = span_from(start);
        return node;
    }

    StmtPtr parse_switch() {
        size_t start = pos_;
        bump();
        auto node = std::make_unique<SwitchStmt>();
        expect_punct("(", "after switch");
        node->scrutinee = parse_expr();
        expect_punct(")", "closing switch scrutinee");
        node->lbrace = cur().span;
        expect_punct("{", "opening switch body");
        while (!at_eof() && !at_punct("}")) {
            if (!at_kw("case") && !at_kw("default")) {
                error("expected 'case' or 'default' in switch body", cur().span);
                sync_balanced_to_semi();
                continue;
            }
            SwitchSection section;
            while (at_kw("case") || at_kw("default")) {
                CaseLabel label;
                size_t lbl_start = pos_;
                if (accept_kw("default")) {
                    label.is_default = true;
                } else {
                    bump();  // case
                    label.value = parse_ternary();
                }
                expect_punct(":", "after case label");
                label.span = span_from(lbl_start);
                section.labels.push_back(std::move(label));
            }
            while (!at_eof() && !at_punct("}") && !at_kw("case") && !at_kw("default")) {
                size_t before = pos_;
                section.body.push_back(parse_stmt());
                if (pos_ == before) bump();
            }
            node->sections.push_back(std::move(section));
        }
        node->rbrace = cur().span;
        expect_punct("}", "closing switch body");
        node->span = span_from(start);
        return node;
    }

    // ---- expressions ------------------------------------------------------

    ExprPtr parse_expr() { return parse_assignment(); }

    ExprPtr parse_assignment() {
        ExprPtr lhs = parse_ternary();
        if (!lhs) return nullptr;
        static const std::pair<std::string_view, AssignOp> kAssignOps[] = {
            {"=", AssignOp::Set},  {"+=", AssignOp::Add}, {"-=", AssignOp::Sub},
            {"*=", AssignOp::Mul}, {"/=", AssignOp::Div}, {"%=", AssignOp::Rem},
            {"<<=", AssignOp::Shl}, {">>=", AssignOp::Shr}, {"&=", AssignOp::And},
            {"|=", AssignOp::Or},  {"^=", AssignOp::Xor},
        };
        for (auto [text, op] : kAssignOps) {
            if (at_punct(text)) {
                bump();
                auto node = std::make_unique<AssignExpr>();
                node->op = op;
                Span s = lhs->span;
                node->lhs = std::move(lhs);
                node->rhs = at_punct("{") ? parse_init_list() : parse_assignment();
                s.end = node->rhs ? node->rhs->span.end : s.end;
                node->span = s;
                return node;
            }
        }
        return lhs;
    }

    ExprPtr parse_ternary() {
        ExprPtr cond = parse_binary(0);
        if (!cond) return nullptr;
        if (at_punct("?")) {
            bump();
            auto node = std::make_unique<TernaryExpr>();
            Span s = cond->span;
            node->cond = std::move(cond);
            node->then_expr = parse_expr();
            expect_punct(":", "in conditional expression");
            node->else_expr = parse_assignment();
            s.end = node->else_expr ? node->else_expr->span.end : s.end;
            node->span = s;
            return node;
        }
        return cond;
    }

    struct BinLevel {
        std::string_view text;
        BinOp op;
        int prec;
    };
    static constexpr BinLevel kBinOps[] = {
        {"||", BinOp::LogOr, 1},  {"&&", BinOp::LogAnd, 2}, {"|", BinOp::BitOr, 3},
        {"^", BinOp::BitXor, 4},  {"&", BinOp::BitAnd, 5},  {"==", BinOp::Eq, 6},
        {"!=", BinOp::Ne, 6},     {"<", BinOp::Lt, 7},      {">", BinOp::Gt, 7},
        {"<=", BinOp::Le, 7},     {">=", BinOp::Ge, 7},     {"<<", BinOp::Shl, 8},
        {">>", BinOp::Shr, 8},    {"+", BinOp::Add, 9},     {"-", BinOp::Sub, 9},
        {"*", BinOp::Mul, 10},    {"/", BinOp::Div, 10},    {"%", BinOp::Rem, 10},
    };

    ExprPtr parse_binary(int min_prec) {
        ExprPtr lhs = parse_unary();
        if (!lhs) return nullptr;
        for (;;) {
            const BinLevel* found = nullptr;
            for (const auto& lvl : kBinOps) {
                if (lvl.prec >= min_prec && at_punct(lvl.text)) {
                    found = &lvl;
                    break;
                }
            }
            if (!found) return lhs;
            bump();
            ExprPtr rhs = parse_binary(found->prec + 1);
            auto node = std::make_unique<BinaryExpr>();
            node->op = found->op;
            Span s = lhs->span;
            s.end = rhs ? rhs->span.end : s.end;
            node->lhs = std::move(lhs);
            node->rhs = std::move(rhs);
            node->span = s;
            lhs = std::move(node);
        }
    }

    ExprPtr parse_unary() {
        size_t start = pos_;
        static const std::pair<std::string_view, UnOp> kPrefix[] = {
            {"++", UnOp::PreInc}, {"--", UnOp::PreDec}, {"+", UnOp::Plus},
            {"-", UnOp::Minus},   {"!", UnOp::LogNot},  {"~", UnOp::BitNot},
            {"*", UnOp::Deref},   {"&", UnOp::AddrOf},
        };
        for (auto [text, op] : kPrefix) {
            if (at_punct(text)) {
                bump();
                auto node = std::make_unique<UnaryExpr>();
                node->op = op;
                node->operand = parse_unary();
                node->span = span_from(start);
                return node;
            }
        }
        if (at_kw("sizeof")) {
            bump();
            auto node = std::make_unique<SizeofExpr>();
            if (accept_punct("(")) {
                if (at_type_start()) {
                    auto ts = parse_type_spec();
                    if (ts) node->type = *ts;
                    while (accept_punct("*")) ++node->pointer_depth;
                } else {
                    node->operand = parse_expr();
                }
                expect_punct(")", "closing sizeof");
            } else {
                node->operand = parse_unary();
            }
            node->span = span_from(start);
            return node;
        }
        // Cast: '(' type-spec '*'* ')' unary
        if (at_punct("(")) {
            size_t save = pos_;
            size_t save_last = last_consumed_;
            size_t save_errors = errors_.size();
            bump();
            if (at_type_start()) {
                auto ts = parse_type_spec();
                int stars = 0;
                while (accept_punct("*")) ++stars;
                if (ts && at_punct(")")) {
                    bump();
                    auto node = std::make_unique<CastExpr>();
                    node->type = *ts;
                    node->pointer_depth = stars;
                    node->operand = parse_unary();
                    node->span = span_from(start);
                    return node;
                }
            }
            pos_ = save;
            last_consumed_ = save_last;
            errors_.resize(save_errors);
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        size_t start = pos_;
        ExprPtr e = parse_primary();
        if (!e) return nullptr;
        for (;;) {
            if (at_punct("[")) {
                bump();
                auto node = std::make_unique<IndexExpr>();
                node->base = std::move(e);
                node->index = parse_expr();
                expect_punct("]", "closing index");
                node->span = span_from(start);
                e = std::move(node);
                continue;
            }
            if (at_punct("(")) {
                bump();
                auto node = std::make_unique<CallExpr>();
                node->callee = std::move(e);
                if (!at_punct(")")) {
                    do {
                        node->args.push_back(parse_assignment());
                    } while (accept_punct(","));
                }
                expect_punct(")", "closing call");
                node->span = span_from(start);
                e = std::move(node);
                continue;
            }
            if (at_punct(".") || at_punct("->")) {
                bool arrow = at_punct("->");
                bump();
                auto node = std::make_unique<MemberExpr>();
                node->base = std::move(e);
                node->is_arrow = arrow;
                node->member = cur().text;
                if (cur().kind != TokenKind::Identifier)
                    error("expected member name", cur().span);
                bump();
                node->span = span_from(start);
                e = std::move(node);
                continue;
            }
            if (at_punct("++") || at_punct("--")) {
                bool inc = at_punct("++");
                bump();
                auto node = std::make_unique<UnaryExpr>();
                node->op = inc ? UnOp::PostInc : UnOp::PostDec;
                node->operand = std::move(e);
                node->span = span_from(start);
                e = std::move(node);
                continue;
            }
            return e;
        }
    }

    ExprPtr parse_primary() {
        const Token& t = cur();
        size_t start = pos_;
        switch (t.kind) {
            case TokenKind::IntLiteral: {
                auto node = std::make_unique<IntLit>();
                node->text = t.text;
                std::string digits = t.text;
                while (!digits.empty() &&
                       (digits.back() == 'u' || digits.back() == 'U' ||
                        digits.back() == 'l' || digits.back() == 'L')) {
                    char c = digits.back();
                    if (c == 'u' || c == 'U') node->has_unsigned_suffix = true;
                    if (c == 'l' || c == 'L') node->is_long = true;
                    digits.pop_back();
                }
                node->value = std::strtoll(digits.c_str(), nullptr, 0);
                node->span = t.span;
                bump();
                return node;
            }
            case TokenKind::FloatLiteral: {
                auto node = std::make_unique<FloatLit>();
                node->text = t.text;
                node->value = std::strtod(t.text.c_str(), nullptr);
                node->span = t.span;
                bump();
                return node;
            }
            case TokenKind::StringLiteral: {
                auto node = std::make_unique<StringLit>();
                node->text = t.text;
                node->value = decode_string(t.text);
                node->span = t.span;
                bump();
                return node;
            }
            case TokenKind::CharLiteral: {
                auto node = std::make_unique<CharLit>();
                node->text = t.text;
                std::string body = decode_string(t.text);
                node->value = body.empty() ? 0 : static_cast<unsigned char>(body[0]);
                node->span = t.span;
                bump();
                return node;
            }
            case TokenKind::Keyword: {
                if (t.text == "true" || t.text == "false") {
                    auto node = std::make_unique<BoolLit>();
                    node->value = t.text == "true";
                    node->span = t.span;
                    bump();
                    return node;
                }
                return nullptr;
            }
            case TokenKind::Identifier: {
                auto node = std::make_unique<IdentExpr>();
                node->name = t.text;
                node->ref = resolve(t.text);
                node->span = t.span;
                bump();
                return node;
            }
            case TokenKind::Punct: {
                if (t.text == "(") {
                    bump();
                    auto node = std::make_unique<ParenExpr>();
                    node->inner = parse_expr();
                    expect_punct(")", "closing parenthesis");
                    node->span = span_from(start);
                    return node;
                }
                return nullptr;
            }
            default:
                return nullptr;
        }
    }

    static std::string decode_string(const std::string& raw) {
        std::string out;
        if (raw.size() < 2) return out;
        for (size_t i = 1; i + 1 < raw.size(); ++i) {
            char c = raw[i];
            if (c == '\\' && i + 2 < raw.size() + 1) {
                ++i;
                switch (raw[i]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '0': out += '\0'; break;
                    case '\\': out += '\\'; break;
                    case '\'': out += '\''; break;
                    case '"': out += '"'; break;
                    default: out += raw[i]; break;
                }
            } else {
                out += c;
            }
        }
        return out;
    }
};

}  // namespace

ParseResult parse(const TokenStream& tokens, std::string_view source_bytes) {
    Parser p(tokens, source_bytes);
    return p.run();
}

}  // namespace hlsrepair::cfront
