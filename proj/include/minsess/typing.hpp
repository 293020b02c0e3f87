#pragma once

#include "minsess/syntax.hpp"

#include <optional>
#include <string>
#include <vector>

namespace minsess {

struct SourceFile;

// Gamma is split into shared names and variables of shared or base type;
// Lambda holds linear higher-order variables; Delta holds session endpoints.
struct TypeEnvs {
    std::map<Name, TypeRef> shared;             // a : chan<U>, keyed without dual
    std::map<std::string, TypeRef> shared_vars; // x : sh(C~)->o or base type
    std::map<std::string, TypeRef> linear;      // x : lin(C~)->o
    std::map<Name, TypeRef> session;            // s : S, keyed by endpoint

    bool operator==(const TypeEnvs&) const = default;
};

struct TypeError {
    std::string rule;
    std::string location;
    std::string message;
};

struct TypeReport {
    bool ok = true;
    std::vector<std::string> derivation;
    std::optional<TypeError> error;
};

// Structural duality. Recursion variables in payload positions are closed
// with their binder so only the protocol spine is dualised.
TypeRef dual(const TypeRef& s);
bool is_dual(const TypeRef& s, const TypeRef& t);
// Equality up to unfolding of recursive types (coinductive).
bool type_equal(const TypeRef& a, const TypeRef& b);

// Splits declarations of a source file into Gamma and Delta.
TypeEnvs envs_from_decls(const std::vector<std::pair<Name, TypeRef>>& decls);
TypeEnvs envs_from_file(const SourceFile& f);

TypeReport typecheck(const TypeEnvs& envs, const ProcRef& p);
std::pair<TypeRef, TypeReport> typecheck_value(const TypeEnvs& envs, const ValueRef& v);

bool balanced(const std::map<Name, TypeRef>& delta);
std::vector<std::map<Name, TypeRef>> env_reduce(const std::map<Name, TypeRef>& delta);

bool is_minimal(const TypeRef& t);

} // namespace minsess
