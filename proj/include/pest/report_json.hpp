#pragma once

#include "pest/verify.hpp"

#include "json.hpp"

#include <climits>
#include <string>

namespace pest {

using json = nlohmann::json;

inline json value_to_json(const Value& v) {
    if (const auto* i = std::get_if<Int>(&v)) {
        if (*i >= std::numeric_limits<long long>::min() &&
            *i <= std::numeric_limits<long long>::max())
            return json(static_cast<long long>(*i));
        return json(i->str());
    }
    if (const auto* b = std::get_if<bool>(&v)) return json(*b);
    json arr = json::array();
    for (const auto& e : std::get<Arr>(v)) {
        if (e >= std::numeric_limits<long long>::min() &&
            e <= std::numeric_limits<long long>::max())
            arr.push_back(static_cast<long long>(e));
        else
            arr.push_back(e.str());
    }
    return arr;
}

inline json span_to_json(const Span& sp) {
    return json{{"line", sp.line}, {"col", sp.col}, {"end_line", sp.end_line},
                {"end_col", sp.end_col}};
}

inline json state_to_json(const State& st) {
    json out = json::object();
    for (const auto& [k, v] : st) out[k] = value_to_json(v);
    return out;
}

inline json report_to_json(const VerifyReport& report, const std::string& file) {
    json procs = json::array();
    for (const auto& pr : report.procedures) {
        json vcs = json::array();
        for (const auto& out : pr.vcs) {
            json v{{"id", out.vc.id},
                   {"rule", out.vc.rule},
                   {"span", span_to_json(out.vc.span)},
                   {"verdict", verdict_name(out.verdict.kind)}};
            if (out.verdict.kind == Verdict::Kind::BoundedValid) {
                v["int_bound"] = out.verdict.int_bound;
                v["array_len_bound"] = out.verdict.array_len_bound;
            }
            if (out.verdict.kind == Verdict::Kind::Invalid && out.verdict.counterexample)
                v["counterexample"] = state_to_json(*out.verdict.counterexample);
            if (out.verdict.kind == Verdict::Kind::Unknown) v["reason"] = out.verdict.reason;
            vcs.push_back(std::move(v));
        }
        procs.push_back(json{{"procedure", pr.procedure},
                             {"status", pr.pass ? "pass" : "fail"},
                             {"erasable", pr.erasable},
                             {"vcs", std::move(vcs)}});
    }
    return json{{"version", 1}, {"file", file}, {"procedures", std::move(procs)}};
}

}  // namespace pest
