#pragma once

#include <string>
#include <string_view>

namespace hlsrepair::hash {

/// Lowercase hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace hlsrepair::hash
