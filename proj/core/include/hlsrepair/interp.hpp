#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsrepair/source_unit.hpp"

namespace hlsrepair::interp {

using cfront::SourceUnit;
using cfront::Span;
using cfront::VarId;

/// One execution's inputs plus resource limits. Scalar arguments bind to
/// entry parameters by name; arrays bind to array/pointer parameters or to
/// global arrays by name. Every array named here is treated as an observable
/// output (its final contents are part of the result).
struct ExecEnv {
    std::map<std::string, long long> args;
    std::map<std::string, std::vector<long long>> arrays;
    long long step_budget = 10'000'000;
    int max_call_depth = 10'000;

    /// Optional hook fired on every store to an integer scalar variable
    /// (declaration init, assignment, compound assignment, ++/--, parameter
    /// binding). Used by profiling and by test-side oracles.
    std::function<void(const VarId&, long long)> on_assign;

    /// Optional hook fired on every malloc/calloc with the call site span.
    /// Used to size static pools from observed allocation counts.
    std::function<void(const Span&)> on_alloc;
};

enum class TrapKind {
    OutOfBounds,
    IllegalShift,
    StackOverflow,
    StepExhausted,
    FreeInvalid,
    DivideByZero,
    Unsupported,
};

const char* trap_kind_name(TrapKind k);

struct Trap {
    TrapKind kind{};
    Span span{};
    std::string detail;
};

enum class ReturnKind { None, Int, Float, Ptr };

struct Observables {
    ReturnKind return_kind = ReturnKind::None;
    long long return_value = 0;   // Int: numeric value; Ptr: 0 for null, 1 otherwise
    double return_float = 0.0;
    std::map<std::string, std::vector<long long>> arrays;  // env-bound arrays, final state
    std::vector<std::string> prints;

    bool operator==(const Observables&) const = default;
};

struct ExecResult {
    enum class Status { Ok, Trapped } status = Status::Ok;
    std::optional<Trap> trap;
    Observables obs;
    long long steps_used = 0;

    bool ok() const { return status == Status::Ok; }
};

/// Deterministic tree-walking execution of `entry`. Trap conditions come
/// back as a Trapped result, never as exceptions; only precondition
/// violations (unknown entry, missing scalar argument) throw.
ExecResult run(const SourceUnit& unit, const std::string& entry, const ExecEnv& env);

// ---------------------------------------------------------------------------
// Range profiling
// ---------------------------------------------------------------------------

struct VarStats {
    long long min = 0;
    long long max = 0;
    long long count = 0;
    std::array<long long, 64> histogram{};  // equal-width bins over [min,max]
    cfront::TypeSpec declared;
    bool has_subtraction_store = false;  // syntactic: -=, --, or `= a - b`
};

struct RangeProfile {
    std::map<VarId, VarStats> vars;
    long long rows_ok = 0;
    long long rows_trapped = 0;

    const VarStats* find(const std::string& func, const std::string& name) const;
};

struct ProfileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runs every dataset row and folds min/max/count plus a 64-bin histogram
/// per integer scalar variable. Trapped rows contribute nothing and are
/// counted in rows_trapped. Throws ProfileError when no row completes.
RangeProfile profile(const SourceUnit& unit, const std::string& entry,
                     const std::vector<ExecEnv>& dataset);

/// Associative merge: min of mins, max of maxes, summed counts. Histograms
/// are re-derived from the merged bounds.
RangeProfile merge_profiles(const RangeProfile& a, const RangeProfile& b);

// ---------------------------------------------------------------------------
// Differential equivalence
// ---------------------------------------------------------------------------

struct Counterexample {
    size_t row = 0;
    std::string description;
};

struct EquivalenceVerdict {
    bool equivalent = false;
    std::optional<Counterexample> counterexample;
};

/// Runs both units on every row; EQUIVALENT iff observables match row-wise
/// (a trap matches a trap of the same kind). Returns the first mismatch.
EquivalenceVerdict equivalent(const SourceUnit& a, const SourceUnit& b,
                              const std::string& entry,
                              const std::vector<ExecEnv>& dataset);

// ---------------------------------------------------------------------------
// Dataset files
// ---------------------------------------------------------------------------

/// JSON Lines, one env per line: {"args": {...}, "arrays": {...}}. An array
/// value is either an explicit list or the shorthand {"size": N, "fill": V}.
std::vector<ExecEnv> load_dataset(const std::string& path);
ExecEnv parse_env_json(const std::string& line);

}  // namespace hlsrepair::interp
