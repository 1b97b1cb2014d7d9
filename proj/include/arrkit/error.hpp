#pragma once

#include <stdexcept>
#include <string>

namespace arrkit {

// Errors carry the CLI exit code: 2 schema, 3 invariant, 4 not-geometric,
// 5 not-gradable.
struct Error : std::runtime_error {
    int exit_code;
    std::string kind;
    Error(std::string k, const std::string& msg, int code)
        : std::runtime_error(msg), exit_code(code), kind(std::move(k)) {}
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& m) : Error("SchemaError", m, 2) {}
};
struct InvariantViolation : Error {
    explicit InvariantViolation(const std::string& m) : Error("InvariantViolation", m, 3) {}
    InvariantViolation(std::string k, const std::string& m) : Error(std::move(k), m, 3) {}
};
struct NotLocallyGeometric : Error {
    explicit NotLocallyGeometric(const std::string& m) : Error("NotLocallyGeometric", m, 4) {}
};
struct NotAtomic : Error {
    explicit NotAtomic(const std::string& m) : Error("NotAtomic", m, 4) {}
};
struct NotGradable : Error {
    explicit NotGradable(const std::string& m) : Error("NotGradable", m, 5) {}
};

// Frequent invariant-class errors, each with its own kind tag.
struct UnknownElement : InvariantViolation {
    explicit UnknownElement(const std::string& m) : InvariantViolation("UnknownElement", m) {}
};
struct ContainmentViolation : InvariantViolation {
    explicit ContainmentViolation(const std::string& m) : InvariantViolation("ContainmentViolation", m) {}
};
struct SingularPairing : InvariantViolation {
    explicit SingularPairing(const std::string& m) : InvariantViolation("SingularPairing", m) {}
};
struct LabelMismatch : InvariantViolation {
    explicit LabelMismatch(const std::string& m) : InvariantViolation("LabelMismatch", m) {}
};
struct AcyclicityFailure : InvariantViolation {
    explicit AcyclicityFailure(const std::string& m) : InvariantViolation("AcyclicityFailure", m) {}
};
struct PosetMismatch : InvariantViolation {
    explicit PosetMismatch(const std::string& m) : InvariantViolation("PosetMismatch", m) {}
};
struct NotAutomorphism : InvariantViolation {
    explicit NotAutomorphism(const std::string& m) : InvariantViolation("NotAutomorphism", m) {}
};
struct CodimMonotonicityViolation : InvariantViolation {
    explicit CodimMonotonicityViolation(const std::string& m)
        : InvariantViolation("CodimMonotonicityViolation", m) {}
};
struct NoPairing : InvariantViolation {
    explicit NoPairing(const std::string& m) : InvariantViolation("NoPairing", m) {}
};
struct OddTopDegree : InvariantViolation {
    explicit OddTopDegree(const std::string& m) : InvariantViolation("OddTopDegree", m) {}
};
struct AtomCodimViolation : InvariantViolation {
    explicit AtomCodimViolation(const std::string& m) : InvariantViolation("AtomCodimViolation", m) {}
};

} // namespace arrkit
