#pragma once

#include <string>
#include <vector>

#include "hlsrepair/interp.hpp"
#include "hlsrepair/source_unit.hpp"

namespace testsupport {

inline std::string asset_dir() { return HLSREPAIR_ASSET_DIR; }
inline std::string corpus_manifest() { return asset_dir() + "/corpus/manifest.json"; }
inline std::string corpus_file(const std::string& rel) {
    return asset_dir() + "/corpus/" + rel;
}
inline std::string template_dir() { return asset_dir() + "/templates"; }
inline std::string strategy_dir() { return asset_dir() + "/strategies"; }

inline hlsrepair::cfront::SourceUnit parse_ok(const std::string& src) {
    auto u = hlsrepair::cfront::SourceUnit::from_bytes("test.c", src);
    REQUIRE(u.parsed_ok());
    return u;
}

inline std::vector<hlsrepair::interp::ExecEnv> head(
    std::vector<hlsrepair::interp::ExecEnv> rows, size_t n) {
    if (rows.size() > n) rows.resize(n);
    return rows;
}

}  // namespace testsupport
