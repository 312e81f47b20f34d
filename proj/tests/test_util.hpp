#pragma once

#include "pest/pest.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace pest_test {

inline std::string read_corpus(const std::string& name) {
    std::string path = std::string(PEST_CORPUS_DIR) + "/" + name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing corpus file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline pest::Program parse_corpus(const std::string& name) {
    return pest::parse_program(read_corpus(name));
}

inline pest::SolverConfig oracle_cfg(int b = 3, int l = 3) {
    pest::SolverConfig cfg;
    cfg.backend = pest::SolverConfig::Backend::Oracle;
    cfg.int_bound = b;
    cfg.array_len_bound = l;
    return cfg;
}

// Mutual entailment at oracle bounds. Both directions must come back
// (bounded-)valid.
inline bool oracle_equivalent(const pest::Predicate& a, const pest::Predicate& b,
                              const pest::TypeEnv& env, const pest::SolverConfig& cfg) {
    return pest::oracle_check(a, b, env, cfg).passed() &&
           pest::oracle_check(b, a, env, cfg).passed();
}

// Deterministic random values within the oracle's bounded domain.
class StateGen {
public:
    StateGen(unsigned seed, int int_bound = 3, int len_bound = 3)
        : rng_(seed), int_dist_(-int_bound, int_bound), len_dist_(0, len_bound) {}

    pest::Value value(pest::Ty ty) {
        switch (ty) {
            case pest::Ty::Int: return pest::Value{pest::Int(int_dist_(rng_))};
            case pest::Ty::Bool: return pest::Value{int_dist_(rng_) % 2 == 0};
            case pest::Ty::ArrInt: {
                pest::Arr arr(static_cast<size_t>(len_dist_(rng_)));
                for (auto& e : arr) e = int_dist_(rng_);
                return pest::Value{std::move(arr)};
            }
        }
        return pest::Value{pest::Int(0)};
    }

    // Positional arguments for `proc` whose precondition evaluates to true
    // (params and their @pre copies agree at entry).
    std::vector<pest::Value> args_satisfying_pre(const pest::Procedure& proc,
                                                 const pest::TypeEnv& env, int max_tries = 10'000) {
        for (int t = 0; t < max_tries; ++t) {
            std::vector<pest::Value> args;
            pest::State sigma;
            for (const auto& p : proc.params) {
                pest::Value v = value(env.vars.at(p));
                sigma[p] = v;
                sigma[pest::at_pre_key(p)] = v;
                args.push_back(std::move(v));
            }
            bool ok = true;
            for (const auto& c : proc.pre) {
                if (pest::contains_unbounded_exists(*c.pred)) continue;
                auto r = pest::eval_expr(sigma, *c.pred);
                if (!r || !std::get<bool>(*r)) {
                    ok = false;
                    break;
                }
            }
            if (ok) return args;
        }
        throw std::runtime_error("could not sample a pre-satisfying state for " + proc.name);
    }

private:
    std::mt19937 rng_;
    std::uniform_int_distribution<int> int_dist_;
    std::uniform_int_distribution<int> len_dist_;
};

}  // namespace pest_test
