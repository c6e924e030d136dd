#pragma once

#include <set>
#include <string>
#include <vector>

#include "hlsrepair/detect.hpp"
#include "hlsrepair/interp.hpp"
#include "hlsrepair/source_unit.hpp"

namespace hlsrepair::script {

using cfront::SourceUnit;
using cfront::Span;

struct AppliedEdit {
    std::string pass;
    Span before;        // span in the unit the pass ran on
    std::string after;  // replacement text
};

struct SkippedDiagnostic {
    detect::Diagnostic diagnostic;
    std::string reason;
};

struct RewriteOutcome {
    SourceUnit unit;  // SCRIPT_REPAIRED when anything applied
    std::vector<AppliedEdit> edits;
    std::vector<SkippedDiagnostic> skipped;
    bool conflict = false;
    std::string conflict_message;
};

struct RepairContext {
    const std::vector<interp::ExecEnv>* dataset = nullptr;  // pool sizing, T8 guards
    std::string entry;
    std::set<std::string> skip_passes;  // by pass name (--skip-pass)
    int max_recursion_depth = 64;       // emitted as #define <FN>_MAX_DEPTH
};

/// All pass names in execution order: fix_boolean, fix_dynamic, fix_pointer,
/// fix_incomplete, fix_recursion, fix_exception.
const std::vector<std::string>& pass_names();

/// Runs the deterministic repair passes over the unit. Every ERROR
/// diagnostic of the input report ends up either fixed by some pass or in
/// the skipped list with a reason. A pass whose edits overlap aborts (the
/// pass, not the whole run) and leaves its diagnostics skipped.
RewriteOutcome script_pass(const SourceUnit& unit, const detect::CompileReport& report,
                           const RepairContext& ctx = {});

// Individual sub-passes, each over a freshly checked unit. Exposed for
// direct testing; script_pass chains them in order.
struct PassResult {
    std::vector<cfront::TextEdit> edits;
    std::vector<SkippedDiagnostic> skipped;
};

PassResult fix_boolean(const SourceUnit& unit, const detect::CompileReport& report);
PassResult fix_dynamic(const SourceUnit& unit, const detect::CompileReport& report,
                       const RepairContext& ctx);
PassResult fix_pointer(const SourceUnit& unit, const detect::CompileReport& report);
PassResult fix_incomplete(const SourceUnit& unit, const detect::CompileReport& report);
PassResult fix_recursion(const SourceUnit& unit, const detect::CompileReport& report,
                         const RepairContext& ctx);
PassResult fix_exception(const SourceUnit& unit, const detect::CompileReport& report,
                         const RepairContext& ctx);

}  // namespace hlsrepair::script
