#pragma once

#include "minsess/generate.hpp"
#include "minsess/pipeline.hpp"

#include <map>
#include <string>
#include <vector>

namespace minsess::testing {

// Corpus files, sorted by name.
std::vector<std::string> corpus_files();
std::string corpus_path(const std::string& file);
std::string golden_path(const std::string& file);
std::string read_file(const std::string& path);

Program load_fixture(const std::string& file);
// Session types of the program, declared or annotated, include a
// tail-recursive one.
bool uses_tail_recursion(const Program& prog);

// bounded_weak_sim between a program and a candidate decomposition.
TraceResult equiv(const Program& prog, const DecompOutcome& d, int depth = 4, int budget = 12);

// Outcome of a property run: number of checked instances and the first
// counterexample, if any.
struct PropertyResult {
    int checked = 0;
    int failures = 0;
    int discarded = 0; // generated instances whose premise did not hold
    std::string counterexample;
    bool ok() const { return failures == 0; }
};

// Every one-step reduct of a generated well-typed term (source or
// decomposition) typechecks under the same or a reduced environment.
PropertyResult subject_reduction(int terms, std::uint64_t seed);
// dual(dual(S)) == S and S, dual(S) are dual, on generated types.
PropertyResult dual_involution(int types, std::uint64_t seed);
// Substituting a well-typed value (or a fresh name) for a bound variable
// (or name) of a well-typed continuation preserves typing.
PropertyResult substitution_lemma(int instances, std::uint64_t seed);
// parse_proc(print(P)) is syntactically P.
PropertyResult parse_print(int terms, std::uint64_t seed);

struct MutationSummary {
    int total = 0;
    int mismatched = 0;
    int payload_matches = 0; // payload mutants reported as match
    std::vector<std::string> survivors;
    std::map<std::string, int> sites; // live sites per kind, before sampling
};

// Mutants of the corpus decompositions, `per_kind` of each kind, sampled
// with a fixed seed and checked at depth 4, budget 12.
MutationSummary mutation_suite(int per_kind, std::uint64_t seed);

} // namespace minsess::testing
