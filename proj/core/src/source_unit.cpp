#include "hlsrepair/source_unit.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hlsrepair::cfront {

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::Original: return "ORIGINAL";
        case Stage::ScriptRepaired: return "SCRIPT_REPAIRED";
        case Stage::LlmRepaired: return "LLM_REPAIRED";
        case Stage::CompiledOk: return "COMPILED_OK";
    }
    return "?";
}

SourceUnit SourceUnit::from_bytes(std::string filename, std::string bytes, Stage stage,
                                  int generation) {
    SourceUnit u;
    u.filename = std::move(filename);
    u.bytes = std::move(bytes);
    u.stage = stage;
    u.generation = generation;
    LexResult lr = lex(u.bytes);
    if (auto* err = std::get_if<LexError>(&lr)) {
        u.lex_errors.push_back(*err);
        u.ast = std::make_shared<Ast>();
        return u;
    }
    u.tokens = std::move(std::get<TokenStream>(lr));
    ParseResult pr = parse(u.tokens, u.bytes);
    u.ast = pr.ast;
    u.parse_errors = std::move(pr.errors);
    return u;
}

SourceUnit SourceUnit::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_bytes(path, buf.str());
}

SourceUnit SourceUnit::with_stage(Stage next) const {
    if (static_cast<int>(next) < static_cast<int>(stage))
        throw std::logic_error(std::string("stage tag may not go back from ") +
                               stage_name(stage) + " to " + stage_name(next));
    SourceUnit u = from_bytes(filename, bytes, next, generation);
    return u;
}

std::string print(const SourceUnit& unit) { return unit.tokens.reconstruct(); }

std::variant<SourceUnit, RewriteConflict> apply_edits(const SourceUnit& unit,
                                                      std::vector<TextEdit> edits) {
    std::stable_sort(edits.begin(), edits.end(), [](const TextEdit& a, const TextEdit& b) {
        return a.span.begin < b.span.begin;
    });
    for (size_t i = 1; i < edits.size(); ++i) {
        const Span& prev = edits[i - 1].span;
        const Span& cur = edits[i].span;
        if (cur.begin < prev.end)
            return RewriteConflict{"overlapping edits ('" + edits[i - 1].note + "' and '" +
                                       edits[i].note + "')",
                                   prev, cur};
    }
    std::string out;
    out.reserve(unit.bytes.size() + 256);
    uint32_t cursor = 0;
    for (const auto& e : edits) {
        if (e.span.begin > unit.bytes.size() || e.span.end > unit.bytes.size())
            return RewriteConflict{"edit span outside file ('" + e.note + "')", e.span,
                                   e.span};
        out.append(unit.bytes, cursor, e.span.begin - cursor);
        out.append(e.replacement);
        cursor = e.span.end;
    }
    out.append(unit.bytes, cursor, unit.bytes.size() - cursor);
    return SourceUnit::from_bytes(unit.filename, std::move(out), unit.stage,
                                  unit.generation + 1);
}

std::string_view span_text(const SourceUnit& unit, const Span& span) {
    return std::string_view(unit.bytes).substr(span.begin, span.end - span.begin);
}

uint32_t line_of_offset(const SourceUnit& unit, uint32_t offset) {
    uint32_t line = 1;
    for (uint32_t i = 0; i < offset && i < unit.bytes.size(); ++i)
        if (unit.bytes[i] == '\n') ++line;
    return line;
}

}  // namespace hlsrepair::cfront
