#include "minsess/report.hpp"

#include <sstream>

namespace minsess {

namespace {

std::vector<std::string> env_lines(const TypeEnvs& e) {
    std::vector<std::string> out;
    for (auto& [n, t] : e.shared) out.push_back(print(n) + " : " + print(t));
    for (auto& [x, t] : e.shared_vars) out.push_back(x + " : " + print(t));
    for (auto& [x, t] : e.linear) out.push_back(x + " : " + print(t));
    for (auto& [n, t] : e.session) out.push_back(print(n) + " : " + print(t));
    return out;
}

} // namespace

CheckReport make_check_report(const std::string& file, const CheckOutcome& c) {
    CheckReport r;
    r.file = file;
    r.ok = c.ok();
    r.well_typed = c.report.ok;
    r.balanced = c.balanced;
    r.derivation = c.report.derivation;
    if (c.report.error) {
        r.error_rule = c.report.error->rule;
        r.error_location = c.report.error->location;
        r.error_message = c.report.error->message;
    } else if (!c.balanced) {
        r.error_message = "session environment is not balanced";
    }
    return r;
}

DecomposeReport make_decompose_report(const std::string& file, Optimization opt, const DecompOutcome& d) {
    DecomposeReport r;
    r.file = file;
    r.opt = to_string(opt);
    r.ok = d.ok();
    r.degree = d.degree;
    r.term = print(d.term);
    r.environment = env_lines(d.envs);
    r.non_minimal = d.non_minimal;
    if (d.report.error) {
        r.error_rule = d.report.error->rule;
        r.error_location = d.report.error->location;
        r.error_message = d.report.error->message;
    }
    return r;
}

EquivReport make_equiv_report(const std::string& file, Optimization opt, int depth, int budget,
                              const TraceResult& t) {
    EquivReport r;
    r.file = file;
    r.opt = to_string(opt);
    r.depth = depth;
    r.tau_budget = budget;
    r.status = to_string(t.status);
    r.witness = t.witness;
    r.depth_used = t.depth_used;
    r.states = t.states;
    r.reason = t.reason;
    return r;
}

RunReport make_run_report(const std::string& file, const ProcRef& initial, const std::vector<Step>& trace,
                          bool stopped) {
    RunReport r;
    r.file = file;
    r.initial = print(initial);
    for (auto& s : trace) r.steps.push_back({print(s.label), print(s.target)});
    r.stopped = stopped;
    return r;
}

std::string render_text(const CheckReport& r) {
    std::ostringstream out;
    out << r.file << ": " << (r.ok ? "ok" : "FAILED") << "\n";
    if (!r.balanced) out << "  session environment is not balanced\n";
    if (!r.error_message.empty())
        out << "  [" << r.error_rule << "] " << r.error_location << ": " << r.error_message << "\n";
    return out.str();
}

std::string render_text(const DecomposeReport& r) {
    std::ostringstream out;
    out << r.term << "\n\n";
    out << "-- degree " << r.degree << ", optimisation " << r.opt << "\n";
    out << "-- environment:\n";
    for (auto& e : r.environment) out << "--   " << e << "\n";
    for (auto& e : r.non_minimal) out << "-- not minimal: " << e << "\n";
    if (!r.error_message.empty())
        out << "-- type error [" << r.error_rule << "] " << r.error_location << ": " << r.error_message << "\n";
    out << "-- static correctness: " << (r.ok ? "ok" : "FAILED") << "\n";
    return out.str();
}

std::string render_text(const EquivReport& r) {
    std::ostringstream out;
    out << r.file << ": " << r.status << " (depth " << r.depth << ", tau budget " << r.tau_budget
        << ", optimisation " << r.opt << ", " << r.states << " states)\n";
    if (!r.reason.empty()) out << "  " << r.reason << "\n";
    for (auto& [a, b] : r.witness) out << "  " << (a.empty() ? "-" : a) << "  ~  " << (b.empty() ? "-" : b) << "\n";
    return out.str();
}

std::string render_text(const RunReport& r) {
    std::ostringstream out;
    out << "   " << r.initial << "\n";
    int i = 1;
    for (auto& s : r.steps) out << i++ << ". " << s.label << "\n   " << s.term << "\n";
    out << (r.stopped ? "-- no further reductions\n" : "-- step limit reached\n");
    return out.str();
}

std::string render_text(const CorpusReport& r) {
    std::ostringstream out;
    for (auto& e : r.entries)
        out << e.file << ": check " << e.check << ", decompose " << e.decompose << ", equiv " << e.equiv << "\n";
    out << r.passed << "/" << r.total << " passed";
    if (!r.seed.empty()) out << " (seed " << r.seed << ")";
    out << "\n";
    return out.str();
}

} // namespace minsess
