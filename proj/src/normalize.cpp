#include "minsess/syntax.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace minsess {

namespace {

// ---------------------------------------------------------------------------
// Compact keys used for ordering parallel components.
// ---------------------------------------------------------------------------

struct KeyWriter {
    const std::set<Name>* masked = nullptr;
    std::ostringstream out;

    void name(const Name& n) {
        if (masked) {
            for (auto& m : *masked)
                if (m.same_binding(n)) {
                    out << (n.dual ? "~_" : "_");
                    return;
                }
        }
        out << (n.dual ? "~" : "") << static_cast<int>(n.ns) << n.base;
        if (n.index) out << '@' << n.index;
    }

    void type(const TypeRef& t) {
        if (!t) {
            out << '?';
            return;
        }
        out << '[' << static_cast<int>(t->kind) << t->var << static_cast<int>(t->base);
        for (auto& i : t->items) type(i);
        out << ';';
        if (t->cont) type(t->cont);
        for (auto& [l, a] : t->arms) {
            out << l << ':';
            type(a);
        }
        out << ']';
    }

    void value(const ValueRef& v) {
        switch (v->kind) {
        case ValueKind::Var:
            out << "v" << v->var;
            return;
        case ValueKind::Lit:
            std::visit(
                [&](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, std::string>)
                        out << "s\"" << x << '"';
                    else if constexpr (std::is_same_v<T, bool>)
                        out << (x ? "T" : "F");
                    else
                        out << 'i' << x;
                },
                v->lit);
            return;
        case ValueKind::Chan:
            out << "n";
            name(v->chan);
            return;
        case ValueKind::Expr:
            out << "e" << static_cast<int>(v->op) << '(';
            for (auto& a : v->args) value(a);
            out << ')';
            return;
        case ValueKind::Abs:
            out << "\\(";
            for (auto& p : v->params) {
                name(p.name);
                type(p.type);
            }
            out << ")";
            proc(v->body);
            return;
        }
    }

    void proc(const ProcRef& p) {
        out << '{' << static_cast<int>(p->kind);
        switch (p->kind) {
        case ProcKind::Nil:
            break;
        case ProcKind::Out:
            name(p->subject);
            for (auto& v : p->payload) value(v);
            proc(p->cont);
            break;
        case ProcKind::In:
            name(p->subject);
            for (auto& b : p->binders) out << b << ',';
            proc(p->cont);
            break;
        case ProcKind::App:
            value(p->fun);
            for (auto& a : p->args) name(a);
            break;
        case ProcKind::Par:
            proc(p->left);
            proc(p->right);
            break;
        case ProcKind::Res:
            name(p->binder);
            type(p->annot);
            proc(p->cont);
            break;
        case ProcKind::Sel:
            name(p->subject);
            out << p->label;
            proc(p->cont);
            break;
        case ProcKind::Bra:
            name(p->subject);
            for (auto& [l, a] : p->arms) {
                out << l << ':';
                proc(a);
            }
            break;
        case ProcKind::OutNames:
        case ProcKind::InNames:
            name(p->subject);
            for (auto& a : p->args) name(a);
            for (auto& b : p->binders) out << b << ',';
            for (auto& t : p->types) type(t);
            proc(p->cont);
            break;
        case ProcKind::Rec:
            out << p->recvar;
            proc(p->cont);
            break;
        case ProcKind::RecVar:
            out << p->recvar;
            break;
        }
        out << '}';
    }
};

std::string proc_key(const ProcRef& p, const std::set<Name>* masked = nullptr) {
    KeyWriter w;
    w.masked = masked;
    w.proc(p);
    return w.out.str();
}

bool binds(const std::set<Name>& names, const Name& b) {
    for (auto& n : names)
        if (n.same_binding(b)) return true;
    return false;
}

Subst rename_binding(const Name& from, const Name& to) {
    Subst s;
    s.names[from.with_dual(false)] = to.with_dual(false);
    s.names[from.with_dual(true)] = to.with_dual(true);
    return s;
}

// ---------------------------------------------------------------------------
// Flattening with scope extrusion.
// ---------------------------------------------------------------------------

void flatten_into(const ProcRef& p, Flat& f, std::set<Name>& avoid) {
    switch (p->kind) {
    case ProcKind::Nil:
        return;
    case ProcKind::Par: {
        Flat a, b;
        flatten_into(p->left, a, avoid);
        flatten_into(p->right, b, avoid);
        std::set<Name> fa, fb;
        for (auto& c : a.comps) {
            auto s = free_names(c);
            fa.insert(s.begin(), s.end());
        }
        for (auto& c : b.comps) {
            auto s = free_names(c);
            fb.insert(s.begin(), s.end());
        }
        std::set<Name> abind;
        for (auto& [n, t] : a.binders) abind.insert(n);
        for (auto& [n, t] : b.binders) {
            if (binds(fa, n) || binds(abind, n)) {
                Name fresh = fresh_name(n, avoid);
                avoid.insert(fresh);
                Subst s = rename_binding(n, fresh);
                for (auto& c : b.comps) c = apply_subst(c, s);
                n = fresh;
            }
        }
        std::set<Name> bbind;
        for (auto& [n, t] : b.binders) bbind.insert(n);
        for (auto& [n, t] : a.binders) {
            if (binds(fb, n) || binds(bbind, n)) {
                Name fresh = fresh_name(n, avoid);
                avoid.insert(fresh);
                Subst s = rename_binding(n, fresh);
                for (auto& c : a.comps) c = apply_subst(c, s);
                n = fresh;
            }
        }
        f.binders.insert(f.binders.end(), a.binders.begin(), a.binders.end());
        f.binders.insert(f.binders.end(), b.binders.begin(), b.binders.end());
        f.comps.insert(f.comps.end(), a.comps.begin(), a.comps.end());
        f.comps.insert(f.comps.end(), b.comps.begin(), b.comps.end());
        return;
    }
    case ProcKind::Res: {
        Flat inner;
        flatten_into(p->cont, inner, avoid);
        // An inner binder with the same identity shadows this one.
        for (auto& [n, t] : inner.binders) {
            if (n.same_binding(p->binder)) {
                Name fresh = fresh_name(n, avoid);
                avoid.insert(fresh);
                Subst s = rename_binding(n, fresh);
                for (auto& c : inner.comps) c = apply_subst(c, s);
                n = fresh;
            }
        }
        f.binders.emplace_back(p->binder.with_dual(false), p->annot);
        f.binders.insert(f.binders.end(), inner.binders.begin(), inner.binders.end());
        f.comps.insert(f.comps.end(), inner.comps.begin(), inner.comps.end());
        return;
    }
    default:
        f.comps.push_back(p);
        return;
    }
}

ProcRef normalize_rec(const ProcRef& p);

ValueRef normalize_value(const ValueRef& v) {
    if (v->kind != ValueKind::Abs) return v;
    return v_abs(v->params, normalize_rec(v->body));
}

ProcRef normalize_rec(const ProcRef& p) {
    switch (p->kind) {
    case ProcKind::Nil:
    case ProcKind::RecVar:
        return p;
    case ProcKind::Out: {
        std::vector<ValueRef> pl;
        for (auto& v : p->payload) pl.push_back(normalize_value(v));
        return p_out(p->subject, std::move(pl), normalize_rec(p->cont));
    }
    case ProcKind::In:
        return p_in(p->subject, p->binders, normalize_rec(p->cont));
    case ProcKind::App:
        return p_app(normalize_value(p->fun), p->args);
    case ProcKind::Sel:
        return p_sel(p->subject, p->label, normalize_rec(p->cont));
    case ProcKind::Bra: {
        ProcArms arms;
        for (auto& [l, a] : p->arms) arms.emplace_back(l, normalize_rec(a));
        return p_bra(p->subject, std::move(arms));
    }
    case ProcKind::OutNames:
        return p_out_names(p->subject, p->args, p->types, normalize_rec(p->cont));
    case ProcKind::InNames:
        return p_in_names(p->subject, p->binders, p->types, normalize_rec(p->cont));
    case ProcKind::Rec:
        return p_rec(p->recvar, normalize_rec(p->cont));
    case ProcKind::Par:
    case ProcKind::Res:
        break;
    }
    Flat f = flatten(p);
    for (auto& c : f.comps) c = normalize_rec(c);
    // Components never flatten further once normalized: they are prefixes.
    std::set<Name> used;
    for (auto& c : f.comps) {
        auto s = free_names(c);
        used.insert(s.begin(), s.end());
    }
    Flat g;
    for (auto& b : f.binders)
        if (binds(used, b.first)) g.binders.push_back(b);
    std::vector<std::pair<std::string, ProcRef>> keyed;
    for (auto& c : f.comps) keyed.emplace_back(proc_key(c), c);
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [k, c] : keyed) g.comps.push_back(c);
    std::stable_sort(g.binders.begin(), g.binders.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return unflatten(g);
}

// ---------------------------------------------------------------------------
// Canonical renaming of bound names and variables.
// ---------------------------------------------------------------------------

struct Canon {
    int next_name = 0;
    int next_var = 0;

    Name fresh_like(const Name& n) {
        Name out = n;
        out.base = "_b" + std::to_string(next_name++);
        out.index = 0;
        out.dual = false;
        out.ns = NameSpace::Aux;
        return out;
    }

    ValueRef value(const ValueRef& v) {
        if (v->kind != ValueKind::Abs) {
            if (v->kind == ValueKind::Expr) {
                std::vector<ValueRef> args;
                for (auto& a : v->args) args.push_back(value(a));
                return v_expr(v->op, std::move(args));
            }
            return v;
        }
        std::vector<Param> params = v->params;
        Subst s;
        for (auto& prm : params) {
            Name nb = fresh_like(prm.name);
            s.names[prm.name.with_dual(false)] = nb;
            s.names[prm.name.with_dual(true)] = nb.co();
            prm.name = nb.with_dual(prm.name.dual);
        }
        return v_abs(std::move(params), proc(rename(v->body, s)));
    }

    static ProcRef rename(const ProcRef& p, const Subst& s) { return apply_subst(p, s); }

    ProcRef proc(const ProcRef& p) {
        switch (p->kind) {
        case ProcKind::Nil:
        case ProcKind::RecVar:
            return p;
        case ProcKind::Out: {
            std::vector<ValueRef> pl;
            for (auto& v : p->payload) pl.push_back(value(v));
            return p_out(p->subject, std::move(pl), proc(p->cont));
        }
        case ProcKind::In: {
            Subst s;
            std::vector<std::string> binders;
            for (auto& b : p->binders) {
                std::string nb = "_v" + std::to_string(next_var++);
                s.values[b] = v_var(nb);
                binders.push_back(nb);
            }
            return p_in(p->subject, std::move(binders), proc(apply_subst(p->cont, s)));
        }
        case ProcKind::App:
            return p_app(value(p->fun), p->args);
        case ProcKind::Sel:
            return p_sel(p->subject, p->label, proc(p->cont));
        case ProcKind::Bra: {
            ProcArms arms;
            for (auto& [l, a] : p->arms) arms.emplace_back(l, proc(a));
            return p_bra(p->subject, std::move(arms));
        }
        case ProcKind::OutNames:
            return p_out_names(p->subject, p->args, p->types, proc(p->cont));
        case ProcKind::InNames:
            return p;
        case ProcKind::Rec:
            return p_rec(p->recvar, proc(p->cont));
        case ProcKind::Par:
        case ProcKind::Res:
            break;
        }
        Flat f = flatten(p);
        std::set<Name> masked;
        for (auto& [n, t] : f.binders) masked.insert(n);
        std::vector<std::pair<std::string, ProcRef>> keyed;
        for (auto& c : f.comps) keyed.emplace_back(proc_key(c, &masked), c);
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        // Assign canonical binder names by first free occurrence.
        std::vector<Name> order;
        for (auto& [k, c] : keyed) {
            std::set<Name> all;
            collect_all_names(c, all);
            for (auto& n : all)
                for (auto& [b, t] : f.binders)
                    if (b.same_binding(n) &&
                        std::none_of(order.begin(), order.end(),
                                     [&](const Name& o) { return o.same_binding(b); }))
                        order.push_back(b);
        }
        Subst s;
        Flat g;
        for (auto& b : order) {
            Name nb = fresh_like(b);
            s.names[b.with_dual(false)] = nb;
            s.names[b.with_dual(true)] = nb.co();
            for (auto& [bb, t] : f.binders)
                if (bb.same_binding(b)) g.binders.emplace_back(nb, t);
        }
        for (auto& [k, c] : keyed) g.comps.push_back(proc(apply_subst(c, s)));
        return normalize_rec(unflatten(g));
    }
};

// ---------------------------------------------------------------------------
// Alpha matching modulo congruence.
// ---------------------------------------------------------------------------

using BindKey = std::tuple<std::string, int, NameSpace>;

BindKey bkey(const Name& n) { return {n.base, n.index, n.ns}; }

struct MatchEnv {
    std::map<BindKey, BindKey> fwd, bwd;
    std::map<BindKey, TypeRef> pending_a, pending_b;
    std::map<std::string, std::string> vfwd, vbwd;
};

struct Matcher {
    AlphaOptions opt;

    bool names(const Name& a, const Name& b, MatchEnv& env) const {
        if (a.dual != b.dual) return false;
        auto ka = bkey(a), kb = bkey(b);
        auto it = env.fwd.find(ka);
        if (it != env.fwd.end()) return it->second == kb;
        if (env.bwd.count(kb)) return false;
        auto pa = env.pending_a.find(ka);
        auto pb = env.pending_b.find(kb);
        if (pa == env.pending_a.end() && pb == env.pending_b.end()) return ka == kb;
        if (pa == env.pending_a.end() || pb == env.pending_b.end()) return false;
        if (opt.compare_annotations && !type_same(pa->second, pb->second)) return false;
        env.fwd[ka] = kb;
        env.bwd[kb] = ka;
        env.pending_a.erase(pa);
        env.pending_b.erase(pb);
        return true;
    }

    bool vars(const std::string& a, const std::string& b, const MatchEnv& env) const {
        auto it = env.vfwd.find(a);
        if (it != env.vfwd.end()) return it->second == b;
        if (env.vbwd.count(b)) return false;
        return a == b;
    }

    bool types(const TypeRef& a, const TypeRef& b) const {
        if (!opt.compare_annotations) return true;
        if (!a || !b) return !a && !b;
        return type_same(a, b);
    }

    bool values(const ValueRef& a, const ValueRef& b, MatchEnv& env) const {
        if (a->kind != b->kind) return false;
        switch (a->kind) {
        case ValueKind::Var:
            return vars(a->var, b->var, env);
        case ValueKind::Lit:
            return a->lit == b->lit;
        case ValueKind::Chan:
            return names(a->chan, b->chan, env);
        case ValueKind::Expr:
            if (a->op != b->op) return false;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (!values(a->args[i], b->args[i], env)) return false;
            return true;
        case ValueKind::Abs: {
            if (a->params.size() != b->params.size()) return false;
            MatchEnv inner = env;
            for (size_t i = 0; i < a->params.size(); ++i) {
                if (a->params[i].name.dual != b->params[i].name.dual) return false;
                if (!types(a->params[i].type, b->params[i].type)) return false;
                bind(inner, a->params[i].name, b->params[i].name);
            }
            if (!procs(a->body, b->body, inner)) return false;
            carry_back(env, inner);
            return true;
        }
        }
        return false;
    }

    static void bind(MatchEnv& env, const Name& a, const Name& b) {
        auto ka = bkey(a), kb = bkey(b);
        // Shadowing: drop stale entries for either side.
        if (auto it = env.fwd.find(ka); it != env.fwd.end()) {
            env.bwd.erase(it->second);
            env.fwd.erase(it);
        }
        if (auto it = env.bwd.find(kb); it != env.bwd.end()) {
            env.fwd.erase(it->second);
            env.bwd.erase(it);
        }
        env.pending_a.erase(ka);
        env.pending_b.erase(kb);
        env.fwd[ka] = kb;
        env.bwd[kb] = ka;
    }

    // Bindings of outer pending names made while matching an inner scope
    // must survive; inner-scope entries are harmless to keep only if they
    // do not shadow outer ones, so copy just the outer pending resolutions.
    static void carry_back(MatchEnv& outer, const MatchEnv& inner) {
        for (auto it = outer.pending_a.begin(); it != outer.pending_a.end();) {
            auto f = inner.fwd.find(it->first);
            if (f != inner.fwd.end() && !inner.pending_a.count(it->first)) {
                outer.fwd[it->first] = f->second;
                outer.bwd[f->second] = it->first;
                outer.pending_b.erase(f->second);
                it = outer.pending_a.erase(it);
            } else {
                ++it;
            }
        }
    }

    bool procs(const ProcRef& a, const ProcRef& b, MatchEnv& env) const {
        if (a->kind != b->kind) return false;
        switch (a->kind) {
        case ProcKind::Nil:
            return true;
        case ProcKind::RecVar:
            return a->recvar == b->recvar;
        case ProcKind::Out:
            if (a->payload.size() != b->payload.size()) return false;
            if (!names(a->subject, b->subject, env)) return false;
            for (size_t i = 0; i < a->payload.size(); ++i)
                if (!values(a->payload[i], b->payload[i], env)) return false;
            return procs(a->cont, b->cont, env);
        case ProcKind::In: {
            if (a->binders.size() != b->binders.size()) return false;
            if (!names(a->subject, b->subject, env)) return false;
            MatchEnv inner = env;
            for (size_t i = 0; i < a->binders.size(); ++i) {
                inner.vfwd[a->binders[i]] = b->binders[i];
                inner.vbwd[b->binders[i]] = a->binders[i];
            }
            if (!procs(a->cont, b->cont, inner)) return false;
            carry_back(env, inner);
            return true;
        }
        case ProcKind::App:
            if (a->args.size() != b->args.size()) return false;
            if (!values(a->fun, b->fun, env)) return false;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (!names(a->args[i], b->args[i], env)) return false;
            return true;
        case ProcKind::Sel:
            return a->label == b->label && names(a->subject, b->subject, env) &&
                   procs(a->cont, b->cont, env);
        case ProcKind::Bra:
            if (a->arms.size() != b->arms.size()) return false;
            if (!names(a->subject, b->subject, env)) return false;
            for (size_t i = 0; i < a->arms.size(); ++i) {
                if (a->arms[i].first != b->arms[i].first) return false;
                if (!procs(a->arms[i].second, b->arms[i].second, env)) return false;
            }
            return true;
        case ProcKind::Rec:
            return a->recvar == b->recvar && procs(a->cont, b->cont, env);
        case ProcKind::OutNames:
        case ProcKind::InNames:
            return proc_same(a, b);
        case ProcKind::Par:
        case ProcKind::Res:
            break;
        }
        Flat fa = flatten(a), fb = flatten(b);
        if (fa.binders.size() != fb.binders.size() || fa.comps.size() != fb.comps.size())
            return false;
        MatchEnv inner = env;
        for (auto& [n, t] : fa.binders) {
            auto k = bkey(n);
            if (auto it = inner.fwd.find(k); it != inner.fwd.end()) {
                inner.bwd.erase(it->second);
                inner.fwd.erase(it);
            }
            inner.pending_a[k] = t;
        }
        for (auto& [n, t] : fb.binders) {
            auto k = bkey(n);
            if (auto it = inner.bwd.find(k); it != inner.bwd.end()) {
                inner.fwd.erase(it->second);
                inner.bwd.erase(it);
            }
            inner.pending_b[k] = t;
        }
        std::vector<bool> used(fb.comps.size(), false);
        std::function<bool(size_t, MatchEnv&)> go = [&](size_t i, MatchEnv& e) -> bool {
            if (i == fa.comps.size()) {
                if (!e.pending_a.empty() || !e.pending_b.empty()) {
                    // Unused binders cannot occur in normalized terms, but an
                    // unmatched pair with equal types is still acceptable.
                    if (e.pending_a.size() != e.pending_b.size()) return false;
                }
                carry_back(env, e);
                return true;
            }
            for (size_t j = 0; j < fb.comps.size(); ++j) {
                if (used[j] || fa.comps[i]->kind != fb.comps[j]->kind) continue;
                MatchEnv trial = e;
                if (!procs(fa.comps[i], fb.comps[j], trial)) continue;
                used[j] = true;
                if (go(i + 1, trial)) return true;
                used[j] = false;
            }
            return false;
        };
        return go(0, inner);
    }
};

} // namespace

Flat flatten(const ProcRef& p) {
    std::set<Name> avoid;
    collect_all_names(p, avoid);
    Flat f;
    flatten_into(p, f, avoid);
    return f;
}

ProcRef unflatten(const Flat& f) {
    ProcRef body = p_par(f.comps);
    for (auto it = f.binders.rbegin(); it != f.binders.rend(); ++it)
        body = p_res(it->first, it->second, body);
    return body;
}

ProcRef struct_normalize(const ProcRef& p) { return normalize_rec(p); }

ProcRef canonical(const ProcRef& p) {
    Canon c;
    return c.proc(normalize_rec(p));
}

std::string canonical_key(const ProcRef& p) { return proc_key(canonical(p)); }

bool alpha_congruent(const ProcRef& a, const ProcRef& b, AlphaOptions opt) {
    ProcRef na = struct_normalize(a), nb = struct_normalize(b);
    if (proc_key(na) == proc_key(nb)) return true;
    Matcher m{opt};
    MatchEnv env;
    return m.procs(na, nb, env);
}

bool alpha_equal_values(const ValueRef& a, const ValueRef& b, AlphaOptions opt) {
    Matcher m{opt};
    MatchEnv env;
    auto norm = [](const ValueRef& v) {
        return v->kind == ValueKind::Abs ? v_abs(v->params, struct_normalize(v->body)) : v;
    };
    return m.values(norm(a), norm(b), env);
}

} // namespace minsess
