#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsrepair/interp.hpp"
#include "hlsrepair/source_unit.hpp"

namespace hlsrepair::bitwidth {

using cfront::SourceUnit;
using cfront::VarId;
using interp::RangeProfile;

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Smallest W (>= 1) such that [min, max] fits the W-bit representable range:
/// unsigned [0, 2^W - 1], signed two's-complement [-2^(W-1), 2^(W-1) - 1].
/// Throws DomainError on min > max or unsigned with negative min.
int bits_required(long long min, long long max, bool is_signed);

enum class HeadroomPolicy { None, GuardBit };

struct PlanEntry {
    bool is_signed = false;
    int width = 0;
    long long observed_min = 0;
    long long observed_max = 0;
    int declared_width = 0;
    HeadroomPolicy policy = HeadroomPolicy::None;
};

struct BitWidthPlan {
    std::map<VarId, PlanEntry> entries;

    const PlanEntry* find(const std::string& func, const std::string& name) const;
    std::string to_json() const;
};

/// Chooses minimal widths from the profile. A variable goes unsigned iff its
/// observed minimum is >= 0 and either its declaration is unsigned or it
/// never receives a subtraction (see VarStats::has_subtraction_store);
/// otherwise it stays signed. GuardBit adds one bit, capped at the declared
/// width. Only integer variables narrower than their declaration make the
/// plan.
BitWidthPlan plan(const RangeProfile& profile, HeadroomPolicy policy);

struct ApplyOutcome {
    SourceUnit unit;
    std::vector<VarId> applied;
    std::vector<std::pair<VarId, std::string>> skipped;  // id, reason
};

/// Rewrites each planned declaration's type specifier to ac_int<W, signed>.
/// Variables whose address is taken are skipped and reported. All other
/// bytes are unchanged; the result reparses.
ApplyOutcome apply(const SourceUnit& unit, const BitWidthPlan& plan);

/// Deterministic generator for the standalone range-measuring program: the
/// original source instrumented with per-variable min/max recording shims
/// and a reporting epilogue that prints one `<name> <min> <max>` line per
/// variable when the entry function returns.
std::string emit_optimizer_program(const SourceUnit& unit, const std::string& entry);

/// Runs the emitted optimizer program over a dataset and folds the per-row
/// report lines into final `name -> (min, max)` figures.
std::map<std::string, std::pair<long long, long long>> run_optimizer_program(
    const std::string& program_source, const std::string& entry,
    const std::vector<interp::ExecEnv>& dataset);

}  // namespace hlsrepair::bitwidth
