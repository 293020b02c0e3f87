#include "minsess/syntax.hpp"

#include <algorithm>

namespace minsess {

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

Name Name::co() const {
    Name n = *this;
    n.dual = !n.dual;
    return n;
}

Name Name::with_index(int i) const {
    Name n = *this;
    n.index = i;
    return n;
}

Name Name::with_dual(bool d) const {
    Name n = *this;
    n.dual = d;
    return n;
}

Name Name::key() const { return with_dual(false); }

bool Name::same_binding(const Name& other) const {
    return base == other.base && index == other.index && ns == other.ns;
}

Name user_name(std::string base, int index, bool dual) {
    return Name{std::move(base), index, dual, NameSpace::User};
}

Name prop_name(std::string base, int index, bool dual) {
    return Name{std::move(base), index, dual, NameSpace::Prop};
}

Name rec_prop_name(const Name& of) {
    // c^r and c^{~r} are distinct shared channels; the endpoint is folded into
    // the base so that the name itself never needs a dual.
    return Name{(of.dual ? "~" : "") + of.base, 0, false, NameSpace::RecProp};
}

Name aux_name(std::string base, int index, bool dual) {
    return Name{std::move(base), index, dual, NameSpace::Aux};
}

std::string root_of(const std::string& base) {
    auto pos = base.find('#');
    return pos == std::string::npos ? base : base.substr(0, pos);
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

namespace {

TypeRef make_type(Type t) { return std::make_shared<const Type>(std::move(t)); }

TypeArms sorted_arms(TypeArms arms) {
    std::sort(arms.begin(), arms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return arms;
}

} // namespace

TypeRef t_end() {
    static const TypeRef end = make_type(Type{});
    return end;
}

TypeRef t_out(std::vector<TypeRef> payload, TypeRef cont) {
    Type t;
    t.kind = TypeKind::Out;
    t.items = std::move(payload);
    t.cont = std::move(cont);
    return make_type(std::move(t));
}

TypeRef t_in(std::vector<TypeRef> payload, TypeRef cont) {
    Type t;
    t.kind = TypeKind::In;
    t.items = std::move(payload);
    t.cont = std::move(cont);
    return make_type(std::move(t));
}

TypeRef t_rec(std::string var, TypeRef body) {
    Type t;
    t.kind = TypeKind::Rec;
    t.var = std::move(var);
    t.cont = std::move(body);
    return make_type(std::move(t));
}

TypeRef t_var(std::string var) {
    Type t;
    t.kind = TypeKind::Var;
    t.var = std::move(var);
    return make_type(std::move(t));
}

TypeRef t_sel(TypeArms arms) {
    Type t;
    t.kind = TypeKind::Sel;
    t.arms = sorted_arms(std::move(arms));
    return make_type(std::move(t));
}

TypeRef t_bra(TypeArms arms) {
    Type t;
    t.kind = TypeKind::Bra;
    t.arms = sorted_arms(std::move(arms));
    return make_type(std::move(t));
}

TypeRef t_lin(std::vector<TypeRef> params) {
    Type t;
    t.kind = TypeKind::LinArrow;
    t.items = std::move(params);
    return make_type(std::move(t));
}

TypeRef t_sh(std::vector<TypeRef> params) {
    Type t;
    t.kind = TypeKind::ShArrow;
    t.items = std::move(params);
    return make_type(std::move(t));
}

TypeRef t_base(BaseType b) {
    Type t;
    t.kind = TypeKind::Base;
    t.base = b;
    return make_type(std::move(t));
}

TypeRef t_int() { return t_base(BaseType::Int); }
TypeRef t_bool() { return t_base(BaseType::Bool); }
TypeRef t_str() { return t_base(BaseType::Str); }

TypeRef t_chan(TypeRef payload) {
    Type t;
    t.kind = TypeKind::Chan;
    t.items = {std::move(payload)};
    return make_type(std::move(t));
}

TypeRef t_namepass(std::vector<TypeRef> params) {
    Type t;
    t.kind = TypeKind::NamePass;
    t.items = std::move(params);
    return make_type(std::move(t));
}

bool is_session(const TypeRef& t) {
    switch (t->kind) {
    case TypeKind::End:
    case TypeKind::Out:
    case TypeKind::In:
    case TypeKind::Rec:
    case TypeKind::Var:
    case TypeKind::Sel:
    case TypeKind::Bra:
        return true;
    default:
        return false;
    }
}

bool is_value_type(const TypeRef& t) {
    return t->kind == TypeKind::LinArrow || t->kind == TypeKind::ShArrow ||
           t->kind == TypeKind::Base || t->kind == TypeKind::NamePass;
}

bool is_arrow(const TypeRef& t) {
    return t->kind == TypeKind::LinArrow || t->kind == TypeKind::ShArrow;
}

bool is_prefix(const TypeRef& t) { return t->kind == TypeKind::Out || t->kind == TypeKind::In; }

bool type_same(const TypeRef& a, const TypeRef& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->var != b->var || a->base != b->base) return false;
    if (a->items.size() != b->items.size() || a->arms.size() != b->arms.size()) return false;
    for (size_t i = 0; i < a->items.size(); ++i)
        if (!type_same(a->items[i], b->items[i])) return false;
    for (size_t i = 0; i < a->arms.size(); ++i) {
        if (a->arms[i].first != b->arms[i].first) return false;
        if (!type_same(a->arms[i].second, b->arms[i].second)) return false;
    }
    if (static_cast<bool>(a->cont) != static_cast<bool>(b->cont)) return false;
    return !a->cont || type_same(a->cont, b->cont);
}

TypeRef type_subst(const TypeRef& t, const std::string& var, const TypeRef& with) {
    if (!t) return t;
    switch (t->kind) {
    case TypeKind::Var:
        return t->var == var ? with : t;
    case TypeKind::Rec:
        if (t->var == var) return t;
        return t_rec(t->var, type_subst(t->cont, var, with));
    case TypeKind::End:
    case TypeKind::Base:
        return t;
    default:
        break;
    }
    Type copy = *t;
    for (auto& i : copy.items) i = type_subst(i, var, with);
    if (copy.cont) copy.cont = type_subst(copy.cont, var, with);
    for (auto& a : copy.arms) a.second = type_subst(a.second, var, with);
    return make_type(std::move(copy));
}

TypeRef unfold(const TypeRef& t) {
    TypeRef cur = t;
    int guard = 0;
    while (cur->kind == TypeKind::Rec) {
        cur = type_subst(cur->cont, cur->var, cur);
        if (++guard > 64) throw std::runtime_error("unguarded recursive type");
    }
    return cur;
}

namespace {

void collect_tvars(const TypeRef& t, std::set<std::string>& bound, std::set<std::string>& out) {
    if (!t) return;
    if (t->kind == TypeKind::Var) {
        if (!bound.count(t->var)) out.insert(t->var);
        return;
    }
    if (t->kind == TypeKind::Rec) {
        bool fresh = bound.insert(t->var).second;
        collect_tvars(t->cont, bound, out);
        if (fresh) bound.erase(t->var);
        return;
    }
    for (auto& i : t->items) collect_tvars(i, bound, out);
    if (t->cont) collect_tvars(t->cont, bound, out);
    for (auto& a : t->arms) collect_tvars(a.second, bound, out);
}

} // namespace

std::set<std::string> free_tvars(const TypeRef& t) {
    std::set<std::string> bound, out;
    collect_tvars(t, bound, out);
    return out;
}

bool type_closed(const TypeRef& t) { return free_tvars(t).empty(); }

bool type_contractive(const TypeRef& t) {
    if (!t) return true;
    if (t->kind == TypeKind::Rec) {
        TypeRef body = t->cont;
        while (body->kind == TypeKind::Rec) body = body->cont;
        if (body->kind == TypeKind::Var) return false;
    }
    for (auto& i : t->items)
        if (!type_contractive(i)) return false;
    if (t->cont && !type_contractive(t->cont)) return false;
    for (auto& a : t->arms)
        if (!type_contractive(a.second)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Values and processes
// ---------------------------------------------------------------------------

namespace {

ValueRef make_value(Value v) { return std::make_shared<const Value>(std::move(v)); }
ProcRef make_proc(Proc p) { return std::make_shared<const Proc>(std::move(p)); }

} // namespace

ValueRef v_var(std::string x) {
    Value v;
    v.kind = ValueKind::Var;
    v.var = std::move(x);
    return make_value(std::move(v));
}

ValueRef v_abs(std::vector<Param> params, ProcRef body) {
    Value v;
    v.kind = ValueKind::Abs;
    v.params = std::move(params);
    v.body = std::move(body);
    return make_value(std::move(v));
}

ValueRef v_lit(Literal l) {
    Value v;
    v.kind = ValueKind::Lit;
    v.lit = std::move(l);
    return make_value(std::move(v));
}

ValueRef v_int(std::int64_t i) { return v_lit(Literal{i}); }
ValueRef v_bool(bool b) { return v_lit(Literal{b}); }
ValueRef v_str(std::string s) { return v_lit(Literal{std::move(s)}); }

ValueRef v_expr(Op op, std::vector<ValueRef> args) {
    if (static_cast<int>(args.size()) != op_arity(op))
        throw std::invalid_argument("expression arity mismatch");
    Value v;
    v.kind = ValueKind::Expr;
    v.op = op;
    v.args = std::move(args);
    return make_value(std::move(v));
}

ValueRef v_chan(Name n) {
    Value v;
    v.kind = ValueKind::Chan;
    v.chan = std::move(n);
    return make_value(std::move(v));
}

ProcRef p_nil() {
    static const ProcRef nil = make_proc(Proc{});
    return nil;
}

ProcRef p_out(Name subj, std::vector<ValueRef> payload, ProcRef cont) {
    Proc p;
    p.kind = ProcKind::Out;
    p.subject = std::move(subj);
    p.payload = std::move(payload);
    p.cont = std::move(cont);
    return make_proc(std::move(p));
}

ProcRef p_in(Name subj, std::vector<std::string> binders, ProcRef cont) {
    Proc p;
    p.kind = ProcKind::In;
    p.subject = std::move(subj);
    p.binders = std::move(binders);
    p.cont = std::move(cont);
    return make_proc(std::move(p));
}

ProcRef p_app(ValueRef fun, std::vector<Name> args) {
    Proc p;
    p.kind = ProcKind::App;
    p.fun = std::move(fun);
    p.args = std::move(args);
    return make_proc(std::move(p));
}

ProcRef p_par(ProcRef l, ProcRef r) {
    Proc p;
    p.kind = ProcKind::Par;
    p.left = std::move(l);
    p.right = std::move(r);
    return make_proc(std::move(p));
}

ProcRef p_par(const std::vector<ProcRef>& ps) {
    if (ps.empty()) return p_nil();
    ProcRef acc = ps.back();
    for (auto it = ps.rbegin() + 1; it != ps.rend(); ++it) acc = p_par(*it, acc);
    return acc;
}

ProcRef p_res(Name binder, TypeRef annot, ProcRef body) {
    Proc p;
    p.kind = ProcKind::Res;
    p.binder = std::move(binder);
    p.annot = std::move(annot);
    p.cont = std::move(body);
    return make_proc(std::move(p));
}

ProcRef p_sel(Name subj, std::string label, ProcRef cont) {
    Proc p;
    p.kind = ProcKind::Sel;
    p.subject = std::move(subj);
    p.label = std::move(label);
    p.cont = std::move(cont);
    return make_proc(std::move(p));
}

ProcRef p_bra(Name subj, ProcArms arms) {
    std::sort(arms.begin(), arms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 1; i < arms.size(); ++i)
        if (arms[i].first == arms[i - 1].first)
            throw std::invalid_argument("duplicate branch label " + arms[i].first);
    Proc p;
    p.kind = ProcKind::Bra;
    p.subject = std::move(subj);
    p.arms = std::move(arms);
    return make_proc(std::move(p));
}

ProcRef p_out_names(Name subj, std::vector<Name> names, std::vector<TypeRef> types, ProcRef cont) {
    Proc p;
    p.kind = ProcKind::OutNames;
    p.subject = std::move(subj);
    p.args = std::move(names);
    p.types = std::move(types);
    p.cont = std::move(cont);
    return make_proc(std::move(p));
}

ProcRef p_in_names(Name subj, std::vector<std::string> binders, std::vector<TypeRef> types,
                   ProcRef cont) {
    Proc p;
    p.kind = ProcKind::InNames;
    p.subject = std::move(subj);
    p.binders = std::move(binders);
    p.types = std::move(types);
    p.cont = std::move(cont);
    return make_proc(std::move(p));
}

ProcRef p_rec(std::string var, ProcRef body) {
    Proc p;
    p.kind = ProcKind::Rec;
    p.recvar = std::move(var);
    p.cont = std::move(body);
    return make_proc(std::move(p));
}

ProcRef p_recvar(std::string var) {
    Proc p;
    p.kind = ProcKind::RecVar;
    p.recvar = std::move(var);
    return make_proc(std::move(p));
}

int op_arity(Op op) { return (op == Op::Add || op == Op::Eq) ? 2 : 1; }

bool value_same(const ValueRef& a, const ValueRef& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case ValueKind::Var:
        return a->var == b->var;
    case ValueKind::Lit:
        return a->lit == b->lit;
    case ValueKind::Chan:
        return a->chan == b->chan;
    case ValueKind::Expr:
        if (a->op != b->op || a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (!value_same(a->args[i], b->args[i])) return false;
        return true;
    case ValueKind::Abs:
        if (a->params.size() != b->params.size()) return false;
        for (size_t i = 0; i < a->params.size(); ++i) {
            if (a->params[i].name != b->params[i].name) return false;
            if (!type_same(a->params[i].type, b->params[i].type)) return false;
        }
        return proc_same(a->body, b->body);
    }
    return false;
}

bool proc_same(const ProcRef& a, const ProcRef& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    if (a->subject != b->subject || a->binders != b->binders || a->args != b->args ||
        a->binder != b->binder || a->label != b->label || a->recvar != b->recvar)
        return false;
    if (a->payload.size() != b->payload.size() || a->arms.size() != b->arms.size() ||
        a->types.size() != b->types.size())
        return false;
    for (size_t i = 0; i < a->payload.size(); ++i)
        if (!value_same(a->payload[i], b->payload[i])) return false;
    for (size_t i = 0; i < a->arms.size(); ++i) {
        if (a->arms[i].first != b->arms[i].first) return false;
        if (!proc_same(a->arms[i].second, b->arms[i].second)) return false;
    }
    for (size_t i = 0; i < a->types.size(); ++i)
        if (!type_same(a->types[i], b->types[i])) return false;
    if (static_cast<bool>(a->annot) != static_cast<bool>(b->annot)) return false;
    if (a->annot && !type_same(a->annot, b->annot)) return false;
    if (static_cast<bool>(a->fun) != static_cast<bool>(b->fun)) return false;
    if (a->fun && !value_same(a->fun, b->fun)) return false;
    auto same_opt = [](const ProcRef& x, const ProcRef& y) {
        if (static_cast<bool>(x) != static_cast<bool>(y)) return false;
        return !x || proc_same(x, y);
    };
    return same_opt(a->cont, b->cont) && same_opt(a->left, b->left) &&
           same_opt(a->right, b->right);
}

// ---------------------------------------------------------------------------
// Free names and variables
// ---------------------------------------------------------------------------

namespace {

void erase_binding(std::set<Name>& s, const Name& b) {
    for (auto it = s.begin(); it != s.end();) {
        if (it->same_binding(b))
            it = s.erase(it);
        else
            ++it;
    }
}

void fn_value(const ValueRef& v, std::set<Name>& out);

void fn_proc(const ProcRef& p, std::set<Name>& out) {
    switch (p->kind) {
    case ProcKind::Nil:
    case ProcKind::RecVar:
        return;
    case ProcKind::Out:
        out.insert(p->subject);
        for (auto& v : p->payload) fn_value(v, out);
        fn_proc(p->cont, out);
        return;
    case ProcKind::In:
    case ProcKind::Sel:
        out.insert(p->subject);
        fn_proc(p->cont, out);
        return;
    case ProcKind::App:
        fn_value(p->fun, out);
        out.insert(p->args.begin(), p->args.end());
        return;
    case ProcKind::Par:
        fn_proc(p->left, out);
        fn_proc(p->right, out);
        return;
    case ProcKind::Res: {
        std::set<Name> inner;
        fn_proc(p->cont, inner);
        erase_binding(inner, p->binder);
        out.insert(inner.begin(), inner.end());
        return;
    }
    case ProcKind::Bra:
        out.insert(p->subject);
        for (auto& [l, a] : p->arms) fn_proc(a, out);
        return;
    case ProcKind::OutNames:
        out.insert(p->subject);
        out.insert(p->args.begin(), p->args.end());
        fn_proc(p->cont, out);
        return;
    case ProcKind::InNames: {
        out.insert(p->subject);
        std::set<Name> inner;
        fn_proc(p->cont, inner);
        for (auto& b : p->binders) erase_binding(inner, user_name(b));
        out.insert(inner.begin(), inner.end());
        return;
    }
    case ProcKind::Rec:
        fn_proc(p->cont, out);
        return;
    }
}

void fn_value(const ValueRef& v, std::set<Name>& out) {
    switch (v->kind) {
    case ValueKind::Var:
    case ValueKind::Lit:
        return;
    case ValueKind::Chan:
        out.insert(v->chan);
        return;
    case ValueKind::Expr:
        for (auto& a : v->args) fn_value(a, out);
        return;
    case ValueKind::Abs: {
        std::set<Name> inner;
        fn_proc(v->body, inner);
        for (auto& prm : v->params) erase_binding(inner, prm.name);
        out.insert(inner.begin(), inner.end());
        return;
    }
    }
}

void fv_value(const ValueRef& v, std::set<std::string>& out);

void fv_proc(const ProcRef& p, std::set<std::string>& out) {
    switch (p->kind) {
    case ProcKind::Nil:
    case ProcKind::RecVar:
        return;
    case ProcKind::Out:
        for (auto& v : p->payload) fv_value(v, out);
        fv_proc(p->cont, out);
        return;
    case ProcKind::In: {
        std::set<std::string> inner;
        fv_proc(p->cont, inner);
        for (auto& b : p->binders) inner.erase(b);
        out.insert(inner.begin(), inner.end());
        return;
    }
    case ProcKind::App:
        fv_value(p->fun, out);
        return;
    case ProcKind::Par:
        fv_proc(p->left, out);
        fv_proc(p->right, out);
        return;
    case ProcKind::Bra:
        for (auto& [l, a] : p->arms) fv_proc(a, out);
        return;
    default:
        if (p->cont) fv_proc(p->cont, out);
        return;
    }
}

void fv_value(const ValueRef& v, std::set<std::string>& out) {
    switch (v->kind) {
    case ValueKind::Var:
        out.insert(v->var);
        return;
    case ValueKind::Lit:
    case ValueKind::Chan:
        return;
    case ValueKind::Expr:
        for (auto& a : v->args) fv_value(a, out);
        return;
    case ValueKind::Abs:
        fv_proc(v->body, out);
        return;
    }
}

} // namespace

std::set<Name> free_names(const ProcRef& p) {
    std::set<Name> out;
    fn_proc(p, out);
    return out;
}

std::set<Name> free_names(const ValueRef& v) {
    std::set<Name> out;
    fn_value(v, out);
    return out;
}

std::set<std::string> free_vars(const ProcRef& p) {
    std::set<std::string> out;
    fv_proc(p, out);
    return out;
}

std::set<std::string> free_vars(const ValueRef& v) {
    std::set<std::string> out;
    fv_value(v, out);
    return out;
}

void collect_all_names(const ValueRef& v, std::set<Name>& out) {
    switch (v->kind) {
    case ValueKind::Chan:
        out.insert(v->chan);
        return;
    case ValueKind::Expr:
        for (auto& a : v->args) collect_all_names(a, out);
        return;
    case ValueKind::Abs:
        for (auto& prm : v->params) out.insert(prm.name);
        collect_all_names(v->body, out);
        return;
    default:
        return;
    }
}

void collect_all_names(const ProcRef& p, std::set<Name>& out) {
    if (p->kind != ProcKind::Nil && p->kind != ProcKind::App && p->kind != ProcKind::Par &&
        p->kind != ProcKind::Res && p->kind != ProcKind::Rec && p->kind != ProcKind::RecVar)
        out.insert(p->subject);
    if (p->kind == ProcKind::Res) out.insert(p->binder);
    for (auto& v : p->payload) collect_all_names(v, out);
    out.insert(p->args.begin(), p->args.end());
    if (p->kind == ProcKind::InNames)
        for (auto& b : p->binders) out.insert(user_name(b));
    if (p->fun) collect_all_names(p->fun, out);
    if (p->cont) collect_all_names(p->cont, out);
    if (p->left) collect_all_names(p->left, out);
    if (p->right) collect_all_names(p->right, out);
    for (auto& [l, a] : p->arms) collect_all_names(a, out);
}

namespace {

void collect_vars_value(const ValueRef& v, std::set<std::string>& out) {
    if (v->kind == ValueKind::Var) out.insert(v->var);
    for (auto& a : v->args) collect_vars_value(a, out);
    if (v->body) collect_all_vars(v->body, out);
}

} // namespace

void collect_all_vars(const ProcRef& p, std::set<std::string>& out) {
    out.insert(p->binders.begin(), p->binders.end());
    for (auto& v : p->payload) collect_vars_value(v, out);
    if (p->fun) collect_vars_value(p->fun, out);
    if (p->cont) collect_all_vars(p->cont, out);
    if (p->left) collect_all_vars(p->left, out);
    if (p->right) collect_all_vars(p->right, out);
    for (auto& [l, a] : p->arms) collect_all_vars(a, out);
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

Subst Subst::name(const Name& from, const Name& to) {
    Subst s;
    s.names[from] = to;
    return s;
}

Subst Subst::value(const std::string& x, const ValueRef& v) {
    Subst s;
    s.values[x] = v;
    return s;
}

Name fresh_name(const Name& like, const std::set<Name>& avoid) {
    auto taken = [&](const Name& n) {
        for (auto& a : avoid)
            if (a.same_binding(n)) return true;
        return false;
    };
    std::string root = root_of(like.base);
    for (int k = 1;; ++k) {
        Name n = like;
        n.base = root + "#" + std::to_string(k);
        if (!taken(n)) return n;
    }
}

std::string fresh_var(const std::string& like, const std::set<std::string>& avoid) {
    std::string root = root_of(like);
    for (int k = 1;; ++k) {
        std::string v = root + "#" + std::to_string(k);
        if (!avoid.count(v)) return v;
    }
}

namespace {

// A variable bound by an input may be instantiated with a name; name
// positions spelled like the variable then refer to that name.
std::optional<Name> name_for_var(const Subst& s, const Name& n) {
    if (n.ns != NameSpace::User || n.index != 0) return std::nullopt;
    auto it = s.values.find(n.base);
    if (it == s.values.end() || it->second->kind != ValueKind::Chan) return std::nullopt;
    Name target = it->second->chan;
    return n.dual ? target.co() : target;
}

Name subst_name(const Subst& s, const Name& n) {
    auto it = s.names.find(n);
    if (it != s.names.end()) return it->second;
    if (auto via = name_for_var(s, n)) return *via;
    return n;
}

// Restrict a substitution to what can actually reach the given free sets.
Subst prune(const Subst& s, const std::set<Name>& fn, const std::set<std::string>& fv) {
    Subst out;
    for (auto& [k, v] : s.names)
        if (fn.count(k)) out.names.emplace(k, v);
    for (auto& [k, v] : s.values) {
        bool used = fv.count(k) > 0;
        if (!used && v->kind == ValueKind::Chan) {
            for (auto& n : fn)
                if (n.ns == NameSpace::User && n.index == 0 && n.base == k) used = true;
        }
        if (used) out.values.emplace(k, v);
    }
    return out;
}

struct Range {
    std::set<Name> names;
    std::set<std::string> vars;
};

Range range_of(const Subst& s) {
    Range r;
    for (auto& [k, v] : s.names) {
        r.names.insert(v);
        r.names.insert(k);
    }
    for (auto& [k, v] : s.values) {
        auto fn = free_names(v);
        r.names.insert(fn.begin(), fn.end());
        auto fv = free_vars(v);
        r.vars.insert(fv.begin(), fv.end());
    }
    return r;
}

bool range_captures(const Range& r, const Name& b) {
    for (auto& n : r.names)
        if (n.same_binding(b)) return true;
    return false;
}

void drop_binding(Subst& s, const Name& b) {
    for (auto it = s.names.begin(); it != s.names.end();) {
        if (it->first.same_binding(b))
            it = s.names.erase(it);
        else
            ++it;
    }
    if (b.ns == NameSpace::User && b.index == 0) {
        auto it = s.values.find(b.base);
        if (it != s.values.end() && it->second->kind == ValueKind::Chan) s.values.erase(it);
    }
}

ProcRef subst_proc(const ProcRef& p, const Subst& s);
ValueRef subst_value(const ValueRef& v, const Subst& s);

// Prepares a name binder: drops shadowed entries and renames the binder if
// the substitution would capture it. Returns the binder to use and the
// substitution to apply underneath.
std::pair<Name, Subst> enter_name_binder(const Name& b, const Subst& s, const ProcRef& body,
                                         std::set<Name>& extra_avoid) {
    Subst inner = s;
    drop_binding(inner, b);
    Range r = range_of(inner);
    if (inner.empty() || !range_captures(r, b)) return {b, inner};
    std::set<Name> avoid = r.names;
    collect_all_names(body, avoid);
    avoid.insert(extra_avoid.begin(), extra_avoid.end());
    Name nb = fresh_name(b, avoid);
    extra_avoid.insert(nb);
    inner.names[b.with_dual(false)] = nb.with_dual(false);
    inner.names[b.with_dual(true)] = nb.with_dual(true);
    return {nb, inner};
}

ProcRef subst_proc(const ProcRef& p0, const Subst& s0) {
    if (s0.empty()) return p0;
    Subst s = prune(s0, free_names(p0), free_vars(p0));
    if (s.empty()) return p0;
    const Proc& p = *p0;
    switch (p.kind) {
    case ProcKind::Nil:
    case ProcKind::RecVar:
        return p0;
    case ProcKind::Out: {
        std::vector<ValueRef> pl;
        for (auto& v : p.payload) pl.push_back(subst_value(v, s));
        return p_out(subst_name(s, p.subject), std::move(pl), subst_proc(p.cont, s));
    }
    case ProcKind::In: {
        Subst inner = s;
        for (auto& b : p.binders) inner.values.erase(b);
        Range r = range_of(inner);
        std::vector<std::string> binders = p.binders;
        std::set<std::string> avoid = r.vars;
        collect_all_vars(p.cont, avoid);
        avoid.insert(binders.begin(), binders.end());
        for (auto& b : binders) {
            bool capture = r.vars.count(b) > 0;
            for (auto& n : r.names)
                if (n.ns == NameSpace::User && n.index == 0 && n.base == b) capture = true;
            if (!capture) continue;
            std::string nb = fresh_var(b, avoid);
            avoid.insert(nb);
            inner.values[b] = v_var(nb);
            b = nb;
        }
        return p_in(subst_name(s, p.subject), std::move(binders), subst_proc(p.cont, inner));
    }
    case ProcKind::App: {
        std::vector<Name> args;
        for (auto& a : p.args) args.push_back(subst_name(s, a));
        return p_app(subst_value(p.fun, s), std::move(args));
    }
    case ProcKind::Par:
        return p_par(subst_proc(p.left, s), subst_proc(p.right, s));
    case ProcKind::Res: {
        std::set<Name> extra;
        auto [b, inner] = enter_name_binder(p.binder, s, p.cont, extra);
        return p_res(b, p.annot, subst_proc(p.cont, inner));
    }
    case ProcKind::Sel:
        return p_sel(subst_name(s, p.subject), p.label, subst_proc(p.cont, s));
    case ProcKind::Bra: {
        ProcArms arms;
        for (auto& [l, a] : p.arms) arms.emplace_back(l, subst_proc(a, s));
        return p_bra(subst_name(s, p.subject), std::move(arms));
    }
    case ProcKind::OutNames: {
        std::vector<Name> names;
        for (auto& a : p.args) names.push_back(subst_name(s, a));
        return p_out_names(subst_name(s, p.subject), std::move(names), p.types,
                           subst_proc(p.cont, s));
    }
    case ProcKind::InNames: {
        Subst inner = s;
        std::vector<std::string> binders = p.binders;
        std::set<Name> extra;
        for (auto& b : binders) {
            auto [nb, next] = enter_name_binder(user_name(b), inner, p.cont, extra);
            inner = next;
            b = nb.base;
        }
        return p_in_names(subst_name(s, p.subject), std::move(binders), p.types,
                          subst_proc(p.cont, inner));
    }
    case ProcKind::Rec:
        return p_rec(p.recvar, subst_proc(p.cont, s));
    }
    return p0;
}

ValueRef subst_value(const ValueRef& v0, const Subst& s) {
    if (s.empty()) return v0;
    const Value& v = *v0;
    switch (v.kind) {
    case ValueKind::Var: {
        auto it = s.values.find(v.var);
        return it == s.values.end() ? v0 : it->second;
    }
    case ValueKind::Lit:
        return v0;
    case ValueKind::Chan:
        return v_chan(subst_name(s, v.chan));
    case ValueKind::Expr: {
        std::vector<ValueRef> args;
        for (auto& a : v.args) args.push_back(subst_value(a, s));
        return v_expr(v.op, std::move(args));
    }
    case ValueKind::Abs: {
        Subst inner = prune(s, free_names(v0), free_vars(v0));
        if (inner.empty()) return v0;
        std::vector<Param> params = v.params;
        std::set<Name> extra;
        for (auto& prm : params) {
            auto [nb, next] = enter_name_binder(prm.name, inner, v.body, extra);
            inner = next;
            prm.name = nb;
        }
        return v_abs(std::move(params), subst_proc(v.body, inner));
    }
    }
    return v0;
}

} // namespace

ProcRef apply_subst(const ProcRef& p, const Subst& s) { return subst_proc(p, s); }
ValueRef apply_subst(const ValueRef& v, const Subst& s) { return subst_value(v, s); }

// ---------------------------------------------------------------------------
// Degree and indexing
// ---------------------------------------------------------------------------

int degree(const ProcRef& p) {
    switch (p->kind) {
    case ProcKind::Nil:
    case ProcKind::App:
        return 1;
    case ProcKind::Out:
    case ProcKind::In:
    case ProcKind::Sel:
    case ProcKind::OutNames:
        return degree(p->cont) + 1;
    case ProcKind::InNames:
        // t?(y).new z (y z | ~z!<\x.Q>.0): one prefix plus a restricted
        // composition of an application and a one-prefix output.
        return 5;
    case ProcKind::Par:
        return degree(p->left) + degree(p->right) + 1;
    case ProcKind::Res:
        return degree(p->cont);
    case ProcKind::Bra:
        // One trio: the arms travel inside abstractions with their own
        // propagators.
        return 1;
    case ProcKind::Rec:
        return degree(p->cont);
    case ProcKind::RecVar:
        return 1;
    }
    return 1;
}

Subst init_indices(const ProcRef& p) {
    Subst s;
    for (auto& n : free_names(p))
        if (!n.indexed()) s.names[n] = n.with_index(1);
    return s;
}

Subst next_index(const Name& n, bool linear_non_recursive) {
    if (!n.indexed()) throw std::invalid_argument("next_index on unindexed name " + n.base);
    if (!linear_non_recursive) return {};
    return Subst::name(n, n.with_index(n.index + 1));
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

ValueRef eval_value(const ValueRef& v) {
    if (v->kind != ValueKind::Expr) return v;
    std::vector<ValueRef> args;
    bool all_lit = true;
    for (auto& a : v->args) {
        args.push_back(eval_value(a));
        if (args.back()->kind != ValueKind::Lit) all_lit = false;
    }
    if (!all_lit) return v_expr(v->op, std::move(args));
    const Literal& x = args[0]->lit;
    switch (v->op) {
    case Op::Neg:
        if (auto* i = std::get_if<std::int64_t>(&x)) return v_int(-*i);
        break;
    case Op::Len:
        if (auto* s = std::get_if<std::string>(&x))
            return v_int(static_cast<std::int64_t>(s->size()));
        break;
    case Op::Add: {
        auto* a = std::get_if<std::int64_t>(&x);
        auto* b = std::get_if<std::int64_t>(&args[1]->lit);
        if (a && b) return v_int(*a + *b);
        break;
    }
    case Op::Eq:
        return v_bool(x == args[1]->lit);
    }
    return v_expr(v->op, std::move(args));
}

} // namespace minsess
