#pragma once

#include "pest/oracle.hpp"
#include "pest/smt.hpp"
#include "pest/vc.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace pest {

// Raised when the two backends disagree in the Valid-vs-Invalid direction;
// one of them is wrong, which is a bug, not a verification result.
class BackendDisagreement : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Decide hypothesis ⊢ goal with the configured backend(s). With `Both`, a
// definitive Invalid from either side wins (the oracle's counterexample is
// preferred, it is always replayable); SMT Valid beats BoundedValid.
inline Verdict check_entailment(const VC& vc, const SolverConfig& cfg) {
    switch (cfg.backend) {
        case SolverConfig::Backend::Oracle:
            return oracle_check(vc.hypothesis, vc.goal, vc.env, cfg);
        case SolverConfig::Backend::Smt:
            return smt_check(vc, cfg);
        case SolverConfig::Backend::Both: {
            Verdict o = oracle_check(vc.hypothesis, vc.goal, vc.env, cfg);
            Verdict s = smt_check(vc, cfg);
            bool o_invalid = o.kind == Verdict::Kind::Invalid;
            bool s_invalid = s.kind == Verdict::Kind::Invalid;
            bool o_valid = o.kind == Verdict::Kind::Valid || o.kind == Verdict::Kind::BoundedValid;
            if ((o_invalid && s.kind == Verdict::Kind::Valid) ||
                (s_invalid && o.kind == Verdict::Kind::Valid))
                throw BackendDisagreement("backends disagree on " + vc.id);
            if (o_invalid) return o;
            if (s_invalid) return s;
            if (s.kind == Verdict::Kind::Valid) return s;
            if (o_valid) return o;
            return s;
        }
    }
    return Verdict::unknown("no backend");
}

inline Verdict check_entailment(const Predicate& h, const Predicate& g, const TypeEnv& env,
                                const SolverConfig& cfg, const std::string& id = "ad-hoc") {
    VC vc{id, "", "", h, g, h ? h->span : Span{}, env};
    return check_entailment(vc, cfg);
}

// Evaluate the VCs with up to parallel_workers in flight, keyed by id. With
// fail_fast, each procedure's VCs run in order and stop at the first
// Invalid; remaining ones are reported Unknown("skipped"). Without it every
// VC is checked, so the result map is deterministic either way.
inline std::map<std::string, Verdict> dispatch(const std::vector<VC>& vcs,
                                               const SolverConfig& cfg) {
    std::map<std::string, Verdict> results;
    std::mutex mu;
    std::exception_ptr fatal;

    // Work units: one VC without fail_fast, one procedure's chain with it.
    std::vector<std::vector<const VC*>> units;
    if (cfg.fail_fast) {
        std::map<std::string, size_t> unit_of;
        for (const auto& vc : vcs) {
            auto it = unit_of.find(vc.procedure);
            if (it == unit_of.end()) {
                unit_of.emplace(vc.procedure, units.size());
                units.push_back({&vc});
            } else {
                units[it->second].push_back(&vc);
            }
        }
    } else {
        for (const auto& vc : vcs) units.push_back({&vc});
    }

    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= units.size()) return;
            bool failed = false;
            for (const VC* vc : units[i]) {
                Verdict v;
                if (failed) {
                    v = Verdict::unknown("skipped: earlier failure in procedure");
                } else {
                    try {
                        v = check_entailment(*vc, cfg);
                    } catch (const SolverUnavailable&) {
                        std::lock_guard<std::mutex> lock(mu);
                        if (!fatal) fatal = std::current_exception();
                        return;
                    } catch (const BackendDisagreement&) {
                        std::lock_guard<std::mutex> lock(mu);
                        if (!fatal) fatal = std::current_exception();
                        return;
                    } catch (const std::exception& e) {
                        v = Verdict::unknown(e.what());
                    }
                    if (v.kind == Verdict::Kind::Invalid) failed = true;
                }
                std::lock_guard<std::mutex> lock(mu);
                results.emplace(vc->id, std::move(v));
            }
        }
    };

    int n = std::max(1, cfg.parallel_workers);
    if (n == 1 || units.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (fatal) std::rethrow_exception(fatal);
    return results;
}

}  // namespace pest
