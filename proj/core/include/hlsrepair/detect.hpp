#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hlsrepair/interp.hpp"
#include "hlsrepair/source_unit.hpp"

namespace hlsrepair::detect {

using cfront::SourceUnit;
using cfront::Span;

enum class ErrorClass {
    T1_Pointer,
    T2_DynamicArray,
    T3_Recursion,
    T4_BitWidth,
    T5_BooleanOp,
    T6_IncompleteStatement,
    T7_UnsupportedStruct,
    T8_Exception,
    Syntax,
};

enum class Severity { Error, Advisory };

const char* class_code(ErrorClass c);     // "T1" .. "T8", "SYNTAX"
const char* class_keyword(ErrorClass c);  // "POINTER", "RECURSION", ...
std::optional<ErrorClass> class_from_code(const std::string& code);

struct Diagnostic {
    ErrorClass error_class{};
    Severity severity = Severity::Error;
    Span span{};
    std::string message;  // one line, deterministic per (class, names, line)
};

struct CompileReport {
    std::vector<Diagnostic> diagnostics;  // source order
    bool pass = false;                    // no ERROR-severity diagnostics, parse ok
    std::string log;                      // concatenated messages, retrieval query source

    size_t error_count() const;
    bool has_class(ErrorClass c) const;
    std::string to_json() const;
};

/// Runs all eight detectors. T4 needs a profile and T8's dynamic half needs a
/// dataset + entry; both are skipped when absent.
CompileReport check(const SourceUnit& unit,
                    const interp::RangeProfile* profile = nullptr,
                    const std::vector<interp::ExecEnv>* dataset = nullptr,
                    const std::string& entry = {});

std::vector<Diagnostic> detect_pointer(const SourceUnit& unit);      // T1
std::vector<Diagnostic> detect_dynamic(const SourceUnit& unit);      // T2
std::vector<Diagnostic> detect_recursion(const SourceUnit& unit);    // T3
std::vector<Diagnostic> detect_bitwidth(const SourceUnit& unit,     // T4 (advisory)
                                        const interp::RangeProfile& profile);
std::vector<Diagnostic> detect_boolean(const SourceUnit& unit);      // T5
std::vector<Diagnostic> detect_incomplete(const SourceUnit& unit);   // T6
std::vector<Diagnostic> detect_unsupported(const SourceUnit& unit);  // T7
std::vector<Diagnostic> detect_exception(const SourceUnit& unit,     // T8
                                         const std::vector<interp::ExecEnv>* dataset,
                                         const std::string& entry);

/// Substitutes an external compiler for the built-in detectors: runs
/// `command <file>` on the unit's bytes, captures combined output as the raw
/// log, PASS iff exit status 0.
CompileReport check_external(const SourceUnit& unit, const std::string& command);

}  // namespace hlsrepair::detect
