#include "hlsrepair/tokenizer.hpp"

#include <cctype>

namespace hlsrepair::llm {

size_t count_tokens(std::string_view text) {
    size_t tokens = 0;
    size_t run = 0;
    auto flush = [&] {
        tokens += (run + 3) / 4;
        run = 0;
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            ++run;
            continue;
        }
        flush();
        if (!std::isspace(static_cast<unsigned char>(c))) ++tokens;
    }
    flush();
    return tokens;
}

}  // namespace hlsrepair::llm
