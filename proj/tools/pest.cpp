// Command-line driver for the Pest toolchain: parse, type, expand,
// strengthen, infer, verify, run.

#include "pest/pest.hpp"
#include "pest/report_json.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolverUnavailable = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string file;
    bool internal = false;

    pest::Program parse() const {
        return pest::parse_program(read_file(file), {internal});
    }
};

struct SolverArgs {
    std::string backend = "oracle";
    int bound = 3;
    int len = 3;
    int workers = 0;
    int timeout_ms = 10'000;
    bool fail_fast = false;
    std::string smt_cmd;

    pest::SolverConfig config() const {
        pest::SolverConfig cfg;
        if (backend == "oracle") cfg.backend = pest::SolverConfig::Backend::Oracle;
        else if (backend == "smt") cfg.backend = pest::SolverConfig::Backend::Smt;
        else cfg.backend = pest::SolverConfig::Backend::Both;
        cfg.int_bound = bound;
        cfg.array_len_bound = len;
        cfg.timeout_ms = timeout_ms;
        if (workers > 0) cfg.parallel_workers = workers;
        if (const char* env = std::getenv("PEST_SMT_CMD")) cfg.smt_command = env;
        if (!smt_cmd.empty()) cfg.smt_command = smt_cmd;
        return cfg;
    }
};

void add_solver_flags(CLI::App* cmd, SolverArgs& args) {
    cmd->add_option("--backend", args.backend, "entailment backend")
        ->check(CLI::IsMember({"oracle", "smt", "both"}));
    cmd->add_option("--bound", args.bound, "oracle integer bound B")->check(CLI::NonNegativeNumber);
    cmd->add_option("--len", args.len, "oracle array length bound L")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--workers", args.workers, "parallel solver workers");
    cmd->add_option("--timeout-ms", args.timeout_ms, "per-VC solver timeout");
    cmd->add_flag("--fail-fast", args.fail_fast,
                  "skip a procedure's remaining VCs after the first failure");
    cmd->add_option("--smt-cmd", args.smt_cmd, "external solver command (overrides PEST_SMT_CMD)");
}

pest::Value json_to_value(const pest::json& j) {
    if (j.is_boolean()) return pest::Value{j.get<bool>()};
    if (j.is_number_integer()) return pest::Value{pest::Int(j.get<long long>())};
    if (j.is_string()) return pest::Value{pest::Int(j.get<std::string>())};
    if (j.is_array()) {
        pest::Arr arr;
        for (const auto& e : j) {
            if (e.is_number_integer()) arr.push_back(pest::Int(e.get<long long>()));
            else if (e.is_string()) arr.push_back(pest::Int(e.get<std::string>()));
            else throw std::runtime_error("array elements must be integers");
        }
        return pest::Value{std::move(arr)};
    }
    throw std::runtime_error("unsupported argument value: " + j.dump());
}

std::string sanitize_id(std::string id) {
    for (char& c : id)
        if (c == '/' || c == ' ') c = '_';
    return id;
}

int do_verify(const CommonArgs& common, const SolverArgs& solver, const std::string& json_path,
              const std::string& emit_dir, bool no_cbc_skip) {
    pest::SolverConfig cfg = solver.config();
    cfg.fail_fast = solver.fail_fast;
    pest::PipelineOptions opts{cfg, !no_cbc_skip};

    pest::Program parsed = common.parse();
    pest::PipelineResult result = pest::run_pipeline(parsed, opts);

    if (!emit_dir.empty()) {
        std::filesystem::create_directories(emit_dir);
        for (const auto& pr : result.report.procedures)
            for (const auto& out : pr.vcs) {
                std::ofstream f(emit_dir + "/" + sanitize_id(out.vc.id) + ".smt2");
                f << pest::emit_smtlib(out.vc);
            }
    }

    for (const auto& pr : result.report.procedures) {
        std::cerr << pr.procedure << ": " << (pr.pass ? "pass" : "FAIL") << "\n";
        for (const auto& out : pr.vcs) {
            if (out.verdict.passed()) continue;
            std::cerr << "  " << out.vc.id << " at " << out.vc.span.str() << ": "
                      << pest::verdict_name(out.verdict.kind);
            if (!out.verdict.reason.empty()) std::cerr << " (" << out.verdict.reason << ")";
            if (out.verdict.counterexample)
                std::cerr << " counterexample " << pest::state_to_string(*out.verdict.counterexample);
            std::cerr << "\n";
        }
    }

    pest::json report = pest::report_to_json(result.report, common.file);
    if (json_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream f(json_path);
        f << report.dump(2) << "\n";
    }
    return result.report.all_pass() ? kExitOk : kExitVerifyFailed;
}

int do_run(const CommonArgs& common, const std::string& proc, const std::string& args_json,
           bool erased, long long fuel) {
    pest::Program parsed = common.parse();
    pest::TypeEnvs envs = pest::infer_types(parsed);
    pest::Program prog = pest::desugar_program(parsed, envs);
    envs = pest::infer_types(prog);

    const pest::Procedure* p = prog.find(proc);
    if (!p) throw std::runtime_error("no procedure named '" + proc + "'");
    pest::json parsed_args = pest::json::parse(args_json);
    std::vector<pest::Value> args;
    for (const auto& prm : p->params) {
        if (!parsed_args.contains(prm))
            throw std::runtime_error("missing argument '" + prm + "'");
        args.push_back(json_to_value(parsed_args.at(prm)));
    }

    pest::ExecOptions eopts;
    eopts.mode = erased ? pest::RunMode::Erased : pest::RunMode::Checked;
    eopts.fuel = fuel;
    pest::RunResult result = pest::run_procedure(prog, proc, args, eopts);
    if (const auto* stuck = std::get_if<pest::StuckReason>(&result)) {
        std::cerr << common.file << ": " << stuck->str() << "\n";
        std::cerr << "state: " << pest::state_to_string(stuck->state) << "\n";
        return kExitVerifyFailed;
    }
    for (const auto& [name, value] : std::get<pest::State>(result))
        std::cout << name << " = " << pest::value_to_string(value) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pest verification toolchain"};
    app.require_subcommand(1);

    CommonArgs common;
    SolverArgs solver;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("file", common.file, "Pest source file")->required();
        cmd->add_flag("--internal", common.internal,
                      "accept internal syntax (unbounded 'exists')");
    };

    CLI::App* check = app.add_subcommand("check", "parse and type-check only");
    add_common(check);

    CLI::App* expand = app.add_subcommand("expand", "expand for/map into annotated loops");
    add_common(expand);

    CLI::App* strengthen = app.add_subcommand("strengthen", "expand and strengthen annotations");
    add_common(strengthen);

    CLI::App* infer = app.add_subcommand("infer", "infer procedure contracts");
    add_common(infer);
    std::string infer_proc;
    infer->add_option("--proc", infer_proc, "only this procedure");
    add_solver_flags(infer, solver);

    CLI::App* verify = app.add_subcommand("verify", "generate and discharge VCs");
    add_common(verify);
    std::string json_path, emit_dir;
    bool no_cbc_skip = false;
    verify->add_option("--json", json_path, "write the JSON report here (default stdout)");
    verify->add_option("--emit-vcs", emit_dir, "write one .smt2 file per VC into this directory");
    verify->add_flag("--no-cbc-skip", no_cbc_skip,
                     "also verify correct-by-construction map invariants");
    add_solver_flags(verify, solver);

    CLI::App* run = app.add_subcommand("run", "interpret one procedure");
    add_common(run);
    std::string run_proc, run_args = "{}";
    bool erased = false;
    long long fuel = 1'000'000;
    run->add_option("--proc", run_proc, "procedure to run")->required();
    run->add_option("--args", run_args, "JSON object {param: value}");
    run->add_flag("--erased", erased, "skip annotation checks (erasure semantics)");
    run->add_option("--fuel", fuel, "loop iteration budget");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) {
            pest::Program prog = common.parse();
            pest::infer_types(prog);
            std::cout << "ok: " << prog.procedures.size() << " procedure(s)\n";
            return kExitOk;
        }
        if (expand->parsed()) {
            pest::Program prog = common.parse();
            pest::TypeEnvs envs = pest::infer_types(prog);
            std::cout << pest::pretty_print(pest::desugar_program(prog, envs));
            return kExitOk;
        }
        if (strengthen->parsed()) {
            pest::Program prog = common.parse();
            pest::TypeEnvs envs = pest::infer_types(prog);
            pest::Program expanded = pest::desugar_program(prog, envs);
            envs = pest::infer_types(expanded);
            std::cout << pest::pretty_print(pest::strengthen_program(expanded, envs));
            return kExitOk;
        }
        if (infer->parsed()) {
            pest::SolverConfig cfg = solver.config();
            pest::Program prog = common.parse();
            pest::TypeEnvs envs = pest::infer_types(prog);
            pest::Program expanded = pest::desugar_program(prog, envs);
            envs = pest::infer_types(expanded);
            pest::Program strengthened = pest::strengthen_program(expanded, envs);
            for (const auto& p : strengthened.procedures) {
                if (!infer_proc.empty() && p.name != infer_proc) continue;
                pest::InferredContract c =
                    pest::infer_contract(strengthened, p, envs.at(p.name), cfg);
                std::cout << p.name << "\n";
                std::cout << ":? " << pest::pretty_print(pest::simplify(c.pre)) << "\n";
                std::cout << ":! " << pest::pretty_print(pest::simplify(c.post)) << "\n";
            }
            return kExitOk;
        }
        if (verify->parsed()) return do_verify(common, solver, json_path, emit_dir, no_cbc_skip);
        if (run->parsed()) return do_run(common, run_proc, run_args, erased, fuel);
    } catch (const pest::SolverUnavailable& e) {
        std::cerr << "solver unavailable: " << e.what() << "\n";
        return kExitSolverUnavailable;
    } catch (const pest::SideConditionFailure& e) {
        std::cerr << common.file << ": side condition failed: " << e.what() << "\n";
        return kExitVerifyFailed;
    } catch (const pest::ParseError& e) {
        std::cerr << common.file << ":" << e.what() << "\n";
        return kExitUsage;
    } catch (const pest::TypeError& e) {
        std::cerr << common.file << ":" << e.what() << "\n";
        return kExitUsage;
    } catch (const pest::ExpandError& e) {
        std::cerr << common.file << ":" << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
