#pragma once

#include <cstddef>
#include <string_view>

namespace hlsrepair::llm {

/// Deterministic token-count approximation used for prompt budgeting and the
/// cost ledger. Rules: a maximal run of [A-Za-z0-9_] counts ceil(len / 4)
/// tokens, every other non-whitespace character counts 1, whitespace counts
/// 0. Subadditive: count(a + b) <= count(a) + count(b) + 1.
size_t count_tokens(std::string_view text);

}  // namespace hlsrepair::llm
