#pragma once

#include "minsess/decomp_types.hpp"
#include "minsess/syntax.hpp"
#include "minsess/typing.hpp"

#include <map>
#include <string>
#include <vector>

namespace minsess {

// Types of the names and variables visible at a point of the source term.
struct BreakdownEnv {
    std::map<Name, TypeRef> session;    // endpoint -> current protocol state
    std::map<Name, TypeRef> shared;     // shared name (non-dual) -> chan<U>
    std::map<std::string, TypeRef> vars; // variable -> value type
    std::vector<std::string> order;     // variables in binding order

    static BreakdownEnv from(const TypeEnvs& envs);
    void bind_var(const std::string& x, const TypeRef& t);
    // Free variables of `p`, ordered by binding.
    std::vector<std::string> context(const ProcRef& p) const;
    std::vector<std::string> context(const ValueRef& v) const;
};

struct BreakdownState {
    int k = 1;
    std::vector<std::string> ctx;
};

// Decomposition of a closed, well-typed process. Name passing is expanded
// first; recursion must already be encoded.
ProcRef decompose(const TypeEnvs& envs, const ProcRef& p);
// The environment the decomposition is checked under: free names indexed
// from 1, then every entry decomposed.
TypeEnvs decompose_envs(const TypeEnvs& envs, const ProcRef& p);
// Free names renamed to index 1, both in the process and the environment.
std::pair<TypeEnvs, ProcRef> index_free_names(const TypeEnvs& envs, const ProcRef& p);

// Breakdown of an indexed process from propagator k with context st.ctx.
// Propagators use the base "c"; nested abstractions get their own bases.
ProcRef breakdown(const BreakdownEnv& env, const BreakdownState& st, const ProcRef& p);
ValueRef breakdown_value(const BreakdownEnv& env, const ValueRef& v);

enum class RecursionStyle {
    Direct,  // new s (V(n~, s) | ~s!<V>.0)
    Unrolled // the body once, with the recursive call replaced by the above
};

// Replaces every rec X. P by an abstraction that receives itself over a
// fresh session. Types of the recursion's free names come from `envs` and
// the restriction annotations on the way.
ProcRef encode_recursion(const TypeEnvs& envs, const ProcRef& p,
                         RecursionStyle style = RecursionStyle::Direct);
bool has_recursion(const ProcRef& p);

// Splits every trio of a decomposition into duos by passing the tail as a
// thunk on a fresh propagator.
ProcRef duo_transform(const ProcRef& p);

// Decomposition where every communication carries at most one value.
// Rejects tail-recursive names and choice.
ProcRef monadic_decompose(const TypeEnvs& envs, const ProcRef& p);

// Longest chain of sequential prefixes not crossing Par, restriction or
// abstraction boundaries.
int max_prefix_chain(const ProcRef& p);
// Largest number of values carried by a single prefix.
int max_prefix_arity(const ProcRef& p);

} // namespace minsess
