#pragma once

#include "minsess/surface.hpp"

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace minsess {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Well-typed programs
// ---------------------------------------------------------------------------

struct ProgramShape {
    int sessions = 2;        // upper bound on the number of sessions
    int max_prefixes = 3;    // upper bound on prefixes per session
    bool higher_order = true; // allow abstraction payloads
    bool free_sessions = true; // allow sessions with only one endpoint present
};

// A well-typed program with a balanced environment. Every session is a
// finite sequence of exchanges; both sides follow one global schedule so the
// program never deadlocks.
SourceFile random_program(Rng& rng, const ProgramShape& shape = {});

// ---------------------------------------------------------------------------
// Types and terms without typing constraints
// ---------------------------------------------------------------------------

// A closed, contractive session type; recursive types are tail-recursive.
TypeRef random_session_type(Rng& rng, int depth, bool choice = true);
TypeRef random_value_type(Rng& rng, int depth);
ValueRef random_literal(Rng& rng);
// An arbitrary term over every namespace, for printer round trips.
ProcRef random_term(Rng& rng, int depth);

// ---------------------------------------------------------------------------
// Mutations of decomposed terms
// ---------------------------------------------------------------------------

enum class MutationKind {
    Payload,        // change one literal sent on a user name
    DropPropagator, // remove the output that activates a trio on a user name
    PermuteIndex    // move one prefix to another index of the same name
};

std::string to_string(MutationKind k);

struct Mutant {
    MutationKind kind;
    ProcRef term;
    std::string site; // printed prefix that was changed
};

// Subjects of the prefixes that fire within `depth` observable actions of
// `p`, under base-value inputs on the names in `types`.
std::set<Name> live_subjects(const ProcRef& p, const std::map<Name, TypeRef>& types, int depth,
                             std::size_t max_states = 20000);

// Every single-site mutant of the given kind whose site is live.
std::vector<Mutant> mutants(const ProcRef& p, MutationKind kind, const std::set<Name>& live);

} // namespace minsess
