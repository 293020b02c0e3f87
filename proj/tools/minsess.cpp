#include "minsess/report.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

namespace {

using namespace minsess;

enum Exit { Ok = 0, Fail = 1, Inconclusive = 2, Usage = 64, Parse = 65, Type = 66 };

struct Config {
    std::string command;
    std::string input;
    std::string opt = "none";
    std::string ext;
    int depth = 4;
    int tau_budget = 12;
    std::string format = "text";
    int max_steps = 100;
    bool decomposed = false;
};

template <typename R>
void emit(const Config& cfg, const R& report) {
    if (cfg.format == "json")
        std::cout << nlohmann::json(report).dump(2) << "\n";
    else
        std::cout << render_text(report);
}

bool choice_allowed(const Config& cfg, const Program& prog) {
    if (cfg.ext == "choice" || !uses_choice(prog.ho)) return true;
    std::cerr << cfg.input << ": choice requires --ext choice\n";
    return false;
}

// Exit code for a source that must be well typed before it is transformed.
int precheck(const Config& cfg, const Program& prog) {
    CheckOutcome c = check_program(prog);
    if (c.ok()) return Ok;
    std::cerr << render_text(make_check_report(cfg.input, c));
    return c.report.ok ? Fail : Type;
}

int cmd_check(const Config& cfg, const Program& prog) {
    CheckOutcome c = check_program(prog);
    emit(cfg, make_check_report(cfg.input, c));
    if (!c.report.ok) return Type;
    return c.balanced ? Ok : Fail;
}

int cmd_decompose(const Config& cfg, const Program& prog) {
    if (int rc = precheck(cfg, prog)) return rc;
    if (!choice_allowed(cfg, prog)) return Fail;
    Optimization opt = optimization_from_string(cfg.opt);
    DecompOutcome d = decompose_program(prog, opt);
    emit(cfg, make_decompose_report(cfg.input, opt, d));
    return d.ok() ? Ok : Fail;
}

TraceResult equiv(const Config& cfg, const Program& prog, Optimization opt) {
    DecompOutcome d = decompose_program(prog, opt);
    return bounded_weak_sim(prog.ho, d.term, cfg.depth, cfg.tau_budget, equiv_options(prog, d));
}

int status_exit(SimStatus s) {
    switch (s) {
    case SimStatus::Match:
        return Ok;
    case SimStatus::Mismatch:
        return Fail;
    case SimStatus::Inconclusive:
        return Inconclusive;
    }
    return Fail;
}

int cmd_equiv(const Config& cfg, const Program& prog) {
    if (int rc = precheck(cfg, prog)) return rc;
    if (!choice_allowed(cfg, prog)) return Fail;
    Optimization opt = optimization_from_string(cfg.opt);
    TraceResult r = equiv(cfg, prog, opt);
    emit(cfg, make_equiv_report(cfg.input, opt, cfg.depth, cfg.tau_budget, r));
    return status_exit(r.status);
}

int cmd_run(const Config& cfg, const Program& prog) {
    ProcRef p = prog.ho;
    if (cfg.decomposed) {
        if (int rc = precheck(cfg, prog)) return rc;
        p = decompose_program(prog, optimization_from_string(cfg.opt)).term;
    }
    auto trace = run_trace(p, cfg.max_steps);
    bool stopped = static_cast<int>(trace.size()) < cfg.max_steps;
    emit(cfg, make_run_report(cfg.input, p, trace, stopped));
    return Ok;
}

CorpusEntry corpus_entry(const Config& cfg, const std::string& path) {
    CorpusEntry e;
    e.file = std::filesystem::path(path).filename().string();
    e.check = e.decompose = e.equiv = "skipped";
    try {
        Program prog = load_program_file(path);
        CheckOutcome c = check_program(prog);
        e.check = c.ok() ? "ok" : "fail";
        if (!c.ok()) return e;
        Optimization opt = optimization_from_string(cfg.opt);
        DecompOutcome d = decompose_program(prog, opt);
        e.decompose = d.ok() ? "ok" : "fail";
        if (!d.ok()) return e;
        e.equiv = to_string(equiv(cfg, prog, opt).status);
    } catch (const ParseError& ex) {
        e.check = std::string("parse error: ") + ex.what();
    } catch (const std::exception& ex) {
        (e.check == "skipped" ? e.check : e.decompose == "skipped" ? e.decompose : e.equiv) =
            std::string("error: ") + ex.what();
    }
    return e;
}

int cmd_corpus(const Config& cfg) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(cfg.input)) {
        std::cerr << cfg.input << ": not a directory\n";
        return Usage;
    }
    std::vector<std::string> files;
    for (auto& entry : fs::directory_iterator(cfg.input))
        if (entry.path().extension() == ".ho") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    CorpusReport report;
    if (const char* seed = std::getenv("MINSESS_SEED")) {
        report.seed = seed;
        std::mt19937_64 rng(std::strtoull(seed, nullptr, 10));
        std::shuffle(files.begin(), files.end(), rng);
    }
    for (auto& f : files) {
        CorpusEntry e = corpus_entry(cfg, f);
        bool pass = e.check == "ok" && e.decompose == "ok" && e.equiv == "match";
        report.passed += pass;
        report.entries.push_back(std::move(e));
    }
    report.total = static_cast<int>(files.size());
    emit(cfg, report);
    return report.passed == report.total ? Ok : Fail;
}

int dispatch(const Config& cfg) {
    if (cfg.command == "corpus") return cmd_corpus(cfg);
    Program prog;
    try {
        prog = load_program_file(cfg.input);
    } catch (const ParseError& e) {
        std::cerr << cfg.input << ":" << e.line << ":" << e.column << ": " << e.what() << "\n";
        return Parse;
    }
    if (cfg.command == "check") return cmd_check(cfg, prog);
    if (cfg.command == "decompose") return cmd_decompose(cfg, prog);
    if (cfg.command == "equiv") return cmd_equiv(cfg, prog);
    return cmd_run(cfg, prog);
}

} // namespace

int main(int argc, char** argv) {
    Config cfg;
    CLI::App app{"Minimal session type decomposition"};
    app.require_subcommand(1, 1);
    for (const char* name : {"check", "decompose", "run", "equiv", "corpus"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("FILE", cfg.input)->required();
        sub->add_option("--opt", cfg.opt)->check(CLI::IsMember({"none", "duo", "monadic"}));
        sub->add_option("--ext", cfg.ext)->check(CLI::IsMember({"choice"}));
        sub->add_option("--depth", cfg.depth)->check(CLI::PositiveNumber);
        sub->add_option("--tau-budget", cfg.tau_budget)->check(CLI::PositiveNumber);
        sub->add_option("--format", cfg.format)->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--max-steps", cfg.max_steps)->check(CLI::NonNegativeNumber);
        if (std::string(name) == "run")
            sub->add_flag("--decomposed", cfg.decomposed, "Run the decomposition instead of the source");
        sub->callback([&cfg, name] { cfg.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Usage;
    }
    try {
        return dispatch(cfg);
    } catch (const std::exception& e) {
        std::cerr << cfg.input << ": " << e.what() << "\n";
        return Fail;
    }
}
