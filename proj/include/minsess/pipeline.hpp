#pragma once

#include "minsess/decomp_proc.hpp"
#include "minsess/semantics.hpp"
#include "minsess/surface.hpp"
#include "minsess/typing.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace minsess {

enum class Optimization { None, Duo, Monadic };

std::string to_string(Optimization o);
Optimization optimization_from_string(const std::string& s);

// A source file after parsing: declared environments, the entry process as
// written and its HO form (name passing expanded, recursion encoded).
struct Program {
    SourceFile file;
    TypeEnvs envs;
    ProcRef source;
    ProcRef ho;
};

// Throws ParseError.
Program load_program(const std::string& text);
Program load_program_file(const std::string& path);

bool uses_choice(const ProcRef& p);

struct CheckOutcome {
    TypeReport report;
    bool balanced = true;
    bool ok() const { return report.ok && balanced; }
};

CheckOutcome check_program(const Program& prog);

struct DecompOutcome {
    ProcRef term;
    TypeEnvs envs;
    TypeReport report;
    int degree = 0;
    // Entries of the decomposed environment that are not minimal.
    std::vector<std::string> non_minimal;
    bool ok() const { return report.ok && non_minimal.empty(); }
};

// Decomposes the HO form and re-typechecks the result under the decomposed
// environments. Throws DecompError for unsupported input.
DecompOutcome decompose_program(const Program& prog, Optimization opt);

// Types of the free names the environment can interact with: names whose
// opposite endpoint is not also free in the process.
std::map<Name, TypeRef> observable_types(const Program& prog);
// Decomposed types of the indexed names that stand for observable names.
std::map<Name, TypeRef> observable_types(const Program& prog, const DecompOutcome& d);
// Game options comparing the program with its decomposition.
SimOptions equiv_options(const Program& prog, const DecompOutcome& d);

} // namespace minsess
