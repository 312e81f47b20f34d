#pragma once

#include "pest/ast.hpp"
#include "pest/interp.hpp"
#include "pest/types.hpp"

#include <optional>
#include <string>
#include <thread>

namespace pest {

// One verification condition: hypothesis ⊢ goal.
struct VC {
    std::string id;         // stable: procedure + ordinal + rule
    std::string procedure;
    std::string rule;       // originating rule, e.g. "S-WHILE/inv-preserved"
    Predicate hypothesis;
    Predicate goal;
    Span span;              // inside the construct that generated it
    TypeEnv env;            // types of every free variable of hypothesis/goal
    bool cbc = false;       // invariant obligation of a correct-by-construction loop
};

struct Verdict {
    enum class Kind { Valid, BoundedValid, Invalid, Unknown, SkippedCbc };

    Kind kind = Kind::Unknown;
    std::optional<State> counterexample;  // for Invalid (may be absent for SMT models
                                          // that could not be parsed back)
    std::string reason;                   // for Unknown
    int int_bound = 0;                    // bounds used, for BoundedValid
    int array_len_bound = 0;

    bool passed() const {
        return kind == Kind::Valid || kind == Kind::BoundedValid || kind == Kind::SkippedCbc;
    }

    static Verdict valid() { return {Kind::Valid, std::nullopt, "", 0, 0}; }
    static Verdict bounded_valid(int b, int l) { return {Kind::BoundedValid, std::nullopt, "", b, l}; }
    static Verdict invalid(State cex) { return {Kind::Invalid, std::move(cex), "", 0, 0}; }
    static Verdict invalid_no_model() { return {Kind::Invalid, std::nullopt, "", 0, 0}; }
    static Verdict unknown(std::string why) { return {Kind::Unknown, std::nullopt, std::move(why), 0, 0}; }
    static Verdict skipped_cbc() { return {Kind::SkippedCbc, std::nullopt, "", 0, 0}; }
};

inline const char* verdict_name(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::Valid: return "valid";
        case Verdict::Kind::BoundedValid: return "bounded_valid";
        case Verdict::Kind::Invalid: return "invalid";
        case Verdict::Kind::Unknown: return "unknown";
        case Verdict::Kind::SkippedCbc: return "skipped_cbc";
    }
    return "?";
}

struct SolverConfig {
    enum class Backend { Oracle, Smt, Both };

    Backend backend = Backend::Oracle;
    int int_bound = 3;        // B: oracle enumerates ints in [-B, B]
    int array_len_bound = 3;  // L: oracle enumerates array lengths 0..L
    std::string smt_command = "z3 -in";
    int timeout_ms = 10'000;
    int parallel_workers = static_cast<int>(std::thread::hardware_concurrency());
    bool fail_fast = false;
};

// Raised when an external solver process cannot be started at all.
class SolverUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pest
