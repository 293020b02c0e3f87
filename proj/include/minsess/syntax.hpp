#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace minsess {

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

// User names come from source text. The other namespaces are only produced by
// the decomposition and can never clash with user names.
enum class NameSpace : std::uint8_t { User, Prop, RecProp, Aux };

struct Name {
    std::string base;
    int index = 0; // 0 = not indexed
    bool dual = false;
    NameSpace ns = NameSpace::User;

    auto operator<=>(const Name&) const = default;
    bool operator==(const Name&) const = default;

    bool indexed() const { return index > 0; }
    // The opposite endpoint. Only meaningful for session names.
    Name co() const;
    Name with_index(int i) const;
    Name with_dual(bool d) const;
    // Binding identity: restriction and abstraction bind both endpoints.
    Name key() const;
    bool same_binding(const Name& other) const;
};

Name user_name(std::string base, int index = 0, bool dual = false);
Name prop_name(std::string base, int index = 0, bool dual = false);
Name rec_prop_name(const Name& of);
Name aux_name(std::string base, int index = 0, bool dual = false);

// Fresh names carry a '#k' suffix; the root is the part before it.
std::string root_of(const std::string& base);

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind : std::uint8_t {
    End, Out, In, Rec, Var, Sel, Bra, // session types
    LinArrow, ShArrow, Base, NamePass, // value types
    Chan                               // shared channel type chan<U>
};

enum class BaseType : std::uint8_t { Int, Bool, Str };

struct Type;
using TypeRef = std::shared_ptr<const Type>;
using TypeArms = std::vector<std::pair<std::string, TypeRef>>;

struct Type {
    TypeKind kind = TypeKind::End;
    std::vector<TypeRef> items; // payloads, arrow parameters, chan payload
    TypeRef cont;               // Out/In continuation, Rec body
    std::string var;            // Rec binder or Var
    TypeArms arms;              // Sel/Bra, sorted by label
    BaseType base = BaseType::Int;
};

TypeRef t_end();
TypeRef t_out(std::vector<TypeRef> payload, TypeRef cont);
TypeRef t_in(std::vector<TypeRef> payload, TypeRef cont);
TypeRef t_rec(std::string var, TypeRef body);
TypeRef t_var(std::string var);
TypeRef t_sel(TypeArms arms);
TypeRef t_bra(TypeArms arms);
TypeRef t_lin(std::vector<TypeRef> params);
TypeRef t_sh(std::vector<TypeRef> params);
TypeRef t_base(BaseType b);
TypeRef t_int();
TypeRef t_bool();
TypeRef t_str();
TypeRef t_chan(TypeRef payload);
TypeRef t_namepass(std::vector<TypeRef> params);

bool is_session(const TypeRef& t);
bool is_value_type(const TypeRef& t);
bool is_arrow(const TypeRef& t);
bool is_prefix(const TypeRef& t); // Out or In

// Syntactic equality (no unfolding).
bool type_same(const TypeRef& a, const TypeRef& b);
// Replace free occurrences of a recursion variable.
TypeRef type_subst(const TypeRef& t, const std::string& var, const TypeRef& with);
// Unfold top-level recursion until the head is not a Rec.
TypeRef unfold(const TypeRef& t);
std::set<std::string> free_tvars(const TypeRef& t);
bool type_closed(const TypeRef& t);
bool type_contractive(const TypeRef& t);

// ---------------------------------------------------------------------------
// Values and processes
// ---------------------------------------------------------------------------

struct Value;
struct Proc;
using ValueRef = std::shared_ptr<const Value>;
using ProcRef = std::shared_ptr<const Proc>;

enum class ValueKind : std::uint8_t { Var, Abs, Lit, Expr, Chan };
enum class Op : std::uint8_t { Neg, Add, Eq, Len };

using Literal = std::variant<std::int64_t, bool, std::string>;

struct Param {
    Name name;
    TypeRef type;
};

struct Value {
    ValueKind kind = ValueKind::Var;
    std::string var;           // Var
    std::vector<Param> params; // Abs
    ProcRef body;              // Abs
    Literal lit;               // Lit
    Op op = Op::Neg;           // Expr
    std::vector<ValueRef> args;
    Name chan; // Chan: a name used as a value (name-passing runs only)
};

enum class ProcKind : std::uint8_t {
    Nil, Out, In, App, Par, Res, Sel, Bra,
    OutNames, InNames, // name-passing sugar
    Rec, RecVar        // recursion, accepted only by the encoder
};

using ProcArms = std::vector<std::pair<std::string, ProcRef>>;

struct Proc {
    ProcKind kind = ProcKind::Nil;
    Name subject;                      // Out/In/Sel/Bra/OutNames/InNames
    std::vector<ValueRef> payload;     // Out
    std::vector<std::string> binders;  // In/InNames
    ProcRef cont;                      // prefixes, Res body, Rec body
    ValueRef fun;                      // App
    std::vector<Name> args;            // App, OutNames
    ProcRef left, right;               // Par
    Name binder;                       // Res
    TypeRef annot;                     // Res
    std::string label;                 // Sel
    ProcArms arms;                     // Bra, sorted by label
    std::vector<TypeRef> types;        // sugar annotations
    std::string recvar;                // Rec/RecVar
};

ValueRef v_var(std::string x);
ValueRef v_abs(std::vector<Param> params, ProcRef body);
ValueRef v_int(std::int64_t i);
ValueRef v_bool(bool b);
ValueRef v_str(std::string s);
ValueRef v_lit(Literal l);
ValueRef v_expr(Op op, std::vector<ValueRef> args);
ValueRef v_chan(Name n);

ProcRef p_nil();
ProcRef p_out(Name subj, std::vector<ValueRef> payload, ProcRef cont);
ProcRef p_in(Name subj, std::vector<std::string> binders, ProcRef cont);
ProcRef p_app(ValueRef fun, std::vector<Name> args);
ProcRef p_par(ProcRef l, ProcRef r);
ProcRef p_par(const std::vector<ProcRef>& ps); // right-nested, 0 if empty
ProcRef p_res(Name binder, TypeRef annot, ProcRef body);
ProcRef p_sel(Name subj, std::string label, ProcRef cont);
ProcRef p_bra(Name subj, ProcArms arms);
ProcRef p_out_names(Name subj, std::vector<Name> names, std::vector<TypeRef> types, ProcRef cont);
ProcRef p_in_names(Name subj, std::vector<std::string> binders, std::vector<TypeRef> types,
                   ProcRef cont);
ProcRef p_rec(std::string var, ProcRef body);
ProcRef p_recvar(std::string var);

int op_arity(Op op);
bool value_same(const ValueRef& a, const ValueRef& b);
bool proc_same(const ProcRef& a, const ProcRef& b);

// ---------------------------------------------------------------------------
// Binding structure
// ---------------------------------------------------------------------------

std::set<Name> free_names(const ProcRef& p);
std::set<Name> free_names(const ValueRef& v);
std::set<std::string> free_vars(const ProcRef& p);
std::set<std::string> free_vars(const ValueRef& v);
// Every name occurring anywhere, bound or free. Used to pick fresh names.
void collect_all_names(const ProcRef& p, std::set<Name>& out);
void collect_all_names(const ValueRef& v, std::set<Name>& out);
void collect_all_vars(const ProcRef& p, std::set<std::string>& out);

// Free names whose (supplied) type is tail-recursive.
std::set<Name> rfn(const ProcRef& p, const std::map<Name, TypeRef>& session_types);

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

struct Subst {
    std::map<Name, Name> names;             // exact-name renaming
    std::map<std::string, ValueRef> values; // variable -> value

    bool empty() const { return names.empty() && values.empty(); }
    static Subst name(const Name& from, const Name& to);
    static Subst value(const std::string& x, const ValueRef& v);
};

ProcRef apply_subst(const ProcRef& p, const Subst& s);
ValueRef apply_subst(const ValueRef& v, const Subst& s);

// Returns base#k (or the base itself) avoiding every name in `avoid`.
Name fresh_name(const Name& like, const std::set<Name>& avoid);
std::string fresh_var(const std::string& like, const std::set<std::string>& avoid);

// ---------------------------------------------------------------------------
// Decomposition metrics
// ---------------------------------------------------------------------------

int degree(const ProcRef& p);

// {u1/u} for every unindexed free name u.
Subst init_indices(const ProcRef& p);
// {n_{i+1}/n_i} when the name is a linear, non-tail-recursive session name.
Subst next_index(const Name& n, bool linear_non_recursive);

// ---------------------------------------------------------------------------
// Structural congruence
// ---------------------------------------------------------------------------

ProcRef struct_normalize(const ProcRef& p);
// Normal form with bound names renamed canonically; equal keys imply
// alpha-equivalent congruent terms.
ProcRef canonical(const ProcRef& p);
std::string canonical_key(const ProcRef& p);

struct AlphaOptions {
    bool compare_annotations = true;
};
// Alpha-equivalence modulo structural congruence (Par as a multiset,
// restriction scope extrusion).
bool alpha_congruent(const ProcRef& a, const ProcRef& b, AlphaOptions opt = {});
bool alpha_equal_values(const ValueRef& a, const ValueRef& b, AlphaOptions opt = {});

// Flattened view: top-level restrictions and parallel components.
struct Flat {
    std::vector<std::pair<Name, TypeRef>> binders;
    std::vector<ProcRef> comps;
};
Flat flatten(const ProcRef& p);
ProcRef unflatten(const Flat& f);

// Evaluate closed base expressions; anything else is returned unchanged.
ValueRef eval_value(const ValueRef& v);

} // namespace minsess
