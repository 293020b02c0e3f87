#pragma once

#include "minsess/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace minsess {

// Machine-readable reports of the command-line front end. Every report
// serialises to JSON and parses back to an equal value.

struct CheckReport {
    std::string file;
    bool ok = false;
    bool well_typed = false;
    bool balanced = false;
    std::vector<std::string> derivation;
    std::string error_rule;
    std::string error_location;
    std::string error_message;
    bool operator==(const CheckReport&) const = default;
};

struct DecomposeReport {
    std::string file;
    std::string opt = "none";
    bool ok = false;
    int degree = 0;
    std::string term;
    std::vector<std::string> environment;
    std::vector<std::string> non_minimal;
    std::string error_rule;
    std::string error_location;
    std::string error_message;
    bool operator==(const DecomposeReport&) const = default;
};

struct EquivReport {
    std::string file;
    std::string opt = "none";
    int depth = 4;
    int tau_budget = 12;
    std::string status;
    std::vector<std::pair<std::string, std::string>> witness;
    int depth_used = 0;
    std::size_t states = 0;
    std::string reason;
    bool operator==(const EquivReport&) const = default;
};

struct RunStep {
    std::string label;
    std::string term;
    bool operator==(const RunStep&) const = default;
};

struct RunReport {
    std::string file;
    std::string initial;
    std::vector<RunStep> steps;
    bool stopped = false; // no reduction applies to the last term
    bool operator==(const RunReport&) const = default;
};

struct CorpusEntry {
    std::string file;
    std::string check;
    std::string decompose;
    std::string equiv;
    bool operator==(const CorpusEntry&) const = default;
};

struct CorpusReport {
    std::string seed;
    std::vector<CorpusEntry> entries;
    int passed = 0;
    int total = 0;
    bool operator==(const CorpusReport&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CheckReport, file, ok, well_typed, balanced, derivation, error_rule,
                                   error_location, error_message)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DecomposeReport, file, opt, ok, degree, term, environment, non_minimal,
                                   error_rule, error_location, error_message)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EquivReport, file, opt, depth, tau_budget, status, witness, depth_used,
                                   states, reason)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunStep, label, term)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunReport, file, initial, steps, stopped)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CorpusEntry, file, check, decompose, equiv)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CorpusReport, seed, entries, passed, total)

CheckReport make_check_report(const std::string& file, const CheckOutcome& c);
DecomposeReport make_decompose_report(const std::string& file, Optimization opt, const DecompOutcome& d);
EquivReport make_equiv_report(const std::string& file, Optimization opt, int depth, int budget,
                              const TraceResult& r);
RunReport make_run_report(const std::string& file, const ProcRef& initial, const std::vector<Step>& trace,
                          bool stopped);

std::string render_text(const CheckReport& r);
std::string render_text(const DecomposeReport& r);
std::string render_text(const EquivReport& r);
std::string render_text(const RunReport& r);
std::string render_text(const CorpusReport& r);

} // namespace minsess
