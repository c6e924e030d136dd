#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hlsrepair/ast.hpp"
#include "hlsrepair/token.hpp"

namespace hlsrepair::cfront {

/// Pipeline position of a program snapshot. Tags only advance.
enum class Stage { Original, ScriptRepaired, LlmRepaired, CompiledOk };

const char* stage_name(Stage s);

/// A parsed program snapshot: raw bytes, token stream, AST, stage tag.
/// Immutable after construction; rewrites produce a new unit.
struct SourceUnit {
    std::string filename;
    std::string bytes;
    TokenStream tokens;
    std::shared_ptr<const Ast> ast;
    std::vector<ParseError> parse_errors;
    std::vector<LexError> lex_errors;
    Stage stage = Stage::Original;
    int generation = 0;

    bool parsed_ok() const { return lex_errors.empty() && parse_errors.empty(); }

    /// Lex + parse `bytes`. Lex/parse failures are recorded on the unit, not
    /// thrown; callers inspect parsed_ok().
    static SourceUnit from_bytes(std::string filename, std::string bytes,
                                 Stage stage = Stage::Original, int generation = 0);
    static SourceUnit from_file(const std::string& path);

    /// Returns a copy with the stage advanced. Throws std::logic_error on a
    /// backwards transition.
    SourceUnit with_stage(Stage next) const;
};

/// Byte-exact print of the unit (token texts plus recorded whitespace).
std::string print(const SourceUnit& unit);

/// One replacement of a byte range. An empty span (begin == end) is a pure
/// insertion at that offset.
struct TextEdit {
    Span span;
    std::string replacement;
    std::string note;  // pass or tool that produced the edit
};

struct RewriteConflict {
    std::string message;
    Span a, b;
};

/// Applies non-overlapping edits to the unit's bytes and reparses. The result
/// carries generation + 1. Overlapping edits yield RewriteConflict and the
/// unit is left untouched.
std::variant<SourceUnit, RewriteConflict> apply_edits(const SourceUnit& unit,
                                                      std::vector<TextEdit> edits);

/// Extracts the source bytes of a span.
std::string_view span_text(const SourceUnit& unit, const Span& span);

/// 1-based line number of a byte offset.
uint32_t line_of_offset(const SourceUnit& unit, uint32_t offset);

}  // namespace hlsrepair::cfront
