#pragma once

#include "minsess/syntax.hpp"
#include "minsess/typing.hpp"

#include <stdexcept>
#include <vector>

namespace minsess {

struct DecompError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using MinTypeList = std::vector<TypeRef>;

// mu t.S whose body is a chain of input/output prefixes ending in t, with t
// not occurring in any payload.
bool is_tail_recursive(const TypeRef& s);
// A tail-recursive type or one of its derived unfoldings
// (a suffix of the body's prefixes followed by the recursive type).
bool is_tr_state(const TypeRef& s);
// The recursive type an unfolding state belongs to.
TypeRef tr_root(const TypeRef& s);

// Session types decompose into lists; `end` yields the empty list.
MinTypeList gt(const TypeRef& s);
// Value and shared channel types decompose pointwise.
TypeRef gt_value(const TypeRef& u);
// Decomposition of a channel type as an argument/parameter list entry.
MinTypeList gt_chan(const TypeRef& c);
// gt over a parameter list, concatenated.
MinTypeList gt_params(const std::vector<TypeRef>& cs);

// R on a recursive body; rts skips leading prefixes of an unfolding.
MinTypeList rt(const TypeRef& body);
MinTypeList rts(const TypeRef& s);
int index_of(const TypeRef& s);

TypeEnvs gt_env(const TypeEnvs& envs);

// Free names whose type in `session_types` is tail-recursive.
std::set<Name> rfn(const ProcRef& p, const std::map<Name, TypeRef>& session_types);

} // namespace minsess
