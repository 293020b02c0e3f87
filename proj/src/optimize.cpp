#include "minsess/decomp_proc.hpp"

#include "minsess/surface.hpp"

#include <algorithm>

namespace minsess {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

namespace {

bool is_prefix_node(const ProcRef& p) {
    switch (p->kind) {
    case ProcKind::Out:
    case ProcKind::In:
    case ProcKind::Sel:
    case ProcKind::Bra:
    case ProcKind::OutNames:
    case ProcKind::InNames:
        return true;
    default:
        return false;
    }
}

int chain_from(const ProcRef& p) {
    if (!is_prefix_node(p)) return 0;
    if (p->kind == ProcKind::Bra) {
        int best = 0;
        for (auto& [l, a] : p->arms) best = std::max(best, chain_from(a));
        return 1 + best;
    }
    return 1 + chain_from(p->cont);
}

template <class F>
void visit(const ProcRef& p, const F& f) {
    f(p);
    auto value = [&](const ValueRef& v) {
        if (v && v->kind == ValueKind::Abs) visit(v->body, f);
    };
    for (auto& v : p->payload) value(v);
    value(p->fun);
    for (const ProcRef* c : {&p->cont, &p->left, &p->right})
        if (*c) visit(*c, f);
    for (auto& [l, a] : p->arms) visit(a, f);
}

} // namespace

int max_prefix_chain(const ProcRef& p) {
    int best = 0;
    visit(p, [&](const ProcRef& q) { best = std::max(best, chain_from(q)); });
    return best;
}

int max_prefix_arity(const ProcRef& p) {
    int best = 0;
    visit(p, [&](const ProcRef& q) {
        if (q->kind == ProcKind::Out) best = std::max(best, static_cast<int>(q->payload.size()));
        if (q->kind == ProcKind::In) best = std::max(best, static_cast<int>(q->binders.size()));
    });
    return best;
}

// ---------------------------------------------------------------------------
// Trios to duos
// ---------------------------------------------------------------------------

namespace {

class Duo {
public:
    Name dummy = aux_name("e");

    static TypeRef dummy_type() { return t_chan(t_sh({t_end()})); }

    ProcRef proc(const ProcRef& p) {
        switch (p->kind) {
        case ProcKind::Nil:
            return p;
        case ProcKind::App:
            return p_app(value(p->fun), p->args);
        case ProcKind::Par:
            return p_par(proc(p->left), proc(p->right));
        case ProcKind::Res:
            return p_res(p->binder, p->annot, proc(p->cont));
        default:
            break;
        }
        bool split = chain_from(p) > 2 ||
                     (p->subject.ns == NameSpace::Aux && p->cont && p->cont->kind == ProcKind::Par);
        if (!split) return shallow(p, [&](const ProcRef& c) { return proc(c); });
        // First prefix, then hand the rest over as a thunk to a control duo.
        Name d = prop_name("d", ++count_);
        auto thunked = [&](const ProcRef& rest) {
            ValueRef thunk = v_abs({Param{aux_name("dx"), dummy_type()}}, proc(rest));
            return p_out(d.co(), {thunk}, p_nil());
        };
        ProcRef first = shallow(p, thunked);
        ProcRef control = p_in(d, {"y"}, p_app(v_var("y"), {dummy}));
        return p_res(d, t_in({t_lin({dummy_type()})}, t_end()), p_par(first, control));
    }

    ValueRef value(const ValueRef& v) {
        if (!v || v->kind != ValueKind::Abs) return v;
        return v_abs(v->params, proc(v->body));
    }

private:
    int count_ = 0;

    // Rebuilds the head prefix with payload values transformed and each
    // continuation mapped through `k`.
    template <class K>
    ProcRef shallow(const ProcRef& p, const K& k) {
        switch (p->kind) {
        case ProcKind::Out: {
            std::vector<ValueRef> payload;
            for (auto& v : p->payload) payload.push_back(value(v));
            return p_out(p->subject, std::move(payload), k(p->cont));
        }
        case ProcKind::In:
            return p_in(p->subject, p->binders, k(p->cont));
        case ProcKind::Sel:
            return p_sel(p->subject, p->label, k(p->cont));
        case ProcKind::Bra: {
            ProcArms arms;
            for (auto& [l, a] : p->arms) arms.emplace_back(l, k(a));
            return p_bra(p->subject, std::move(arms));
        }
        default:
            throw DecompError("duo transform expects a decomposition without name-passing sugar");
        }
    }
};

} // namespace

ProcRef duo_transform(const ProcRef& p) {
    Duo duo;
    ProcRef out = duo.proc(p);
    if (!free_names(out).count(duo.dummy)) return out;
    return p_res(duo.dummy, Duo::dummy_type(), out);
}

// ---------------------------------------------------------------------------
// Monadic decomposition
// ---------------------------------------------------------------------------

namespace {

struct MScope {
    std::string base;
    int count = 0;
    Name prop(int k) const { return prop_name(base, k); }
};

class Monadic {
public:
    ProcRef top(const BreakdownEnv& env, const ProcRef& p) {
        MScope sc{fresh_base()};
        ProcRef body = p_par(activate(sc, 1, p_nil()), proc(sc, env, 1, p));
        return close(sc, degree(p), body);
    }

private:
    int scopes_ = 0;

    std::string fresh_base() {
        int n = scopes_++;
        return n == 0 ? "c" : "c" + std::to_string(n);
    }

    static Name var_prop(const std::string& x) { return prop_name("c" + x); }

    ProcRef close(const MScope& sc, int count, ProcRef body) {
        for (int k = count; k >= 1; --k) body = p_res(sc.prop(k), t_in({}, t_end()), body);
        return body;
    }

    ProcRef trigger(const MScope& sc, int k, ProcRef cont) { return p_in(sc.prop(k), {}, std::move(cont)); }
    ProcRef activate(const MScope& sc, int k, ProcRef cont) {
        return p_out(sc.prop(k).co(), {}, std::move(cont));
    }

    // c_x?(x) for every variable the value needs, outermost first.
    ProcRef fetch(const BreakdownEnv& env, const std::set<std::string>& vars, ProcRef cont) {
        auto order = env.order;
        for (auto it = order.rbegin(); it != order.rend(); ++it)
            if (vars.count(*it)) cont = p_in(var_prop(*it), {*it}, cont);
        return cont;
    }

    static void reject_tr(const BreakdownEnv& env, const Name& u) {
        auto it = env.session.find(u);
        if (it != env.session.end() && is_tr_state(it->second))
            throw DecompError("monadic decomposition does not support tail-recursive name " + print(u));
    }

    // Propagation of a received variable to the trios that use it.
    ProcRef propagate(const std::string& x, const TypeRef& t) {
        Name cx = var_prop(x);
        if (t->kind == TypeKind::LinArrow) return p_out(cx.co(), {v_var(x)}, p_nil());
        // Shared values are served repeatedly: V_x re-sends itself after
        // every use of c_x. The server channel is a propagator as well.
        TypeRef srec = t_rec("t", t_in({t_sh({t_var("t")})}, t_end()));
        Name y = prop_name("y" + x);
        Name s = prop_name("s" + x);
        std::string z = x == "z" ? "z1" : "z";
        ProcRef again = p_res(s, srec, p_par(p_app(v_var(z), {s}), p_out(s.co(), {v_var(z)}, p_nil())));
        ValueRef vx = v_abs({Param{y, srec}}, p_in(y, {z}, p_out(cx, {v_var(x)}, again)));
        return p_res(s, srec, p_par(p_app(vx, {s}), p_out(s.co(), {vx}, p_nil())));
    }

    static TypeRef var_prop_type(const TypeRef& t) {
        TypeRef g = gt_value(t);
        return t->kind == TypeKind::LinArrow ? t_in({g}, t_end()) : t_chan(g);
    }

    ProcRef proc(MScope& sc, const BreakdownEnv& env, int k, const ProcRef& p) {
        switch (p->kind) {
        case ProcKind::Nil:
            return trigger(sc, k, p_nil());
        case ProcKind::In: {
            const Name& u = p->subject;
            reject_tr(env, u);
            if (p->binders.size() != 1)
                throw DecompError("monadic decomposition needs single-value inputs");
            TypeRef ut;
            ProcRef q = p->cont;
            BreakdownEnv next = env;
            if (auto it = env.session.find(u); it != env.session.end()) {
                TypeRef s = unfold(it->second);
                if (s->kind != TypeKind::In || s->items.size() != 1)
                    throw DecompError(print(u) + " is not ready for a single input");
                ut = s->items[0];
                next.session.erase(u);
                next.session[u.with_index(u.index + 1)] = s->cont;
                q = apply_subst(q, next_index(u, true));
            } else if (auto a = env.shared.find(u.key()); a != env.shared.end()) {
                ut = a->second->items[0];
            } else {
                throw DecompError("no type for " + print(u));
            }
            const std::string& x = p->binders[0];
            next.bind_var(x, ut);
            ProcRef trio = trigger(sc, k, p_in(u, {x}, p_par(activate(sc, k + 1, p_nil()), propagate(x, ut))));
            return p_res(var_prop(x), var_prop_type(ut), p_par(trio, proc(sc, next, k + 1, q)));
        }
        case ProcKind::Out: {
            const Name& u = p->subject;
            reject_tr(env, u);
            if (p->payload.size() != 1)
                throw DecompError("monadic decomposition needs single-value outputs");
            ProcRef q = p->cont;
            BreakdownEnv next = env;
            if (auto it = env.session.find(u); it != env.session.end()) {
                TypeRef s = unfold(it->second);
                next.session.erase(u);
                next.session[u.with_index(u.index + 1)] = s->cont;
                q = apply_subst(q, next_index(u, true));
            }
            const ValueRef& v = p->payload[0];
            std::set<std::string> needed;
            if (v->kind != ValueKind::Abs) needed = free_vars(v);
            ProcRef act = p_out(u, {value(env, v)}, activate(sc, k + 1, p_nil()));
            ProcRef trio = trigger(sc, k, fetch(env, needed, act));
            return p_par(trio, proc(sc, next, k + 1, q));
        }
        case ProcKind::App: {
            std::vector<Name> args;
            for (auto& u : p->args) {
                reject_tr(env, u);
                if (auto it = env.session.find(u); it != env.session.end()) {
                    auto g = gt(it->second);
                    for (size_t j = 0; j < g.size(); ++j)
                        args.push_back(u.with_index(u.index + static_cast<int>(j)));
                } else {
                    args.push_back(u);
                }
            }
            std::set<std::string> needed;
            if (p->fun->kind == ValueKind::Var) needed = {p->fun->var};
            return trigger(sc, k, fetch(env, needed, p_app(value(env, p->fun), args)));
        }
        case ProcKind::Par: {
            int l = degree(p->left);
            ProcRef trio = trigger(sc, k, activate(sc, k + 1, activate(sc, k + l + 1, p_nil())));
            return p_par({trio, proc(sc, env, k + 1, p->left), proc(sc, env, k + l + 1, p->right)});
        }
        case ProcKind::Res: {
            const TypeRef& t = p->annot;
            Name b = p->binder.key();
            Name b1 = b.with_index(1);
            ProcRef body = apply_subst(p->cont, Subst{{{b, b1}, {b.co(), b1.co()}}, {}});
            BreakdownEnv inner = env;
            if (t->kind == TypeKind::Chan) {
                inner.shared[b1] = t;
                return p_res(b1, gt_value(t), proc(sc, inner, k, body));
            }
            if (is_tr_state(t))
                throw DecompError("monadic decomposition does not support tail-recursive name " + print(b));
            inner.session[b1] = t;
            inner.session[b1.co()] = dual(t);
            ProcRef out = proc(sc, inner, k, body);
            MinTypeList g = gt(t);
            for (size_t j = g.size(); j-- > 0;) out = p_res(b1.with_index(static_cast<int>(j) + 1), g[j], out);
            return out;
        }
        case ProcKind::Sel:
        case ProcKind::Bra:
            throw DecompError("monadic decomposition does not support selection and branching");
        case ProcKind::OutNames:
        case ProcKind::InNames:
            return proc(sc, env, k, desugar_name_passing(p));
        case ProcKind::Rec:
        case ProcKind::RecVar:
            throw DecompError("recursion must be encoded before decomposition");
        }
        throw DecompError("unknown process form");
    }

    ValueRef value(const BreakdownEnv& env, const ValueRef& v) {
        if (v->kind == ValueKind::Chan) throw DecompError("names passed as values cannot be decomposed");
        if (v->kind != ValueKind::Abs) return v;
        MScope sc{fresh_base()};
        std::vector<Param> params;
        Subst sig;
        BreakdownEnv inner = env;
        for (auto& prm : v->params) {
            Name b = prm.name.with_index(1);
            sig.names[prm.name] = b;
            sig.names[prm.name.co()] = b.co();
            if (prm.type->kind == TypeKind::Chan) {
                params.push_back(Param{b, gt_value(prm.type)});
                inner.shared[b.key()] = prm.type;
                continue;
            }
            if (is_tr_state(prm.type))
                throw DecompError("monadic decomposition does not support tail-recursive parameters");
            MinTypeList g = gt(prm.type);
            for (size_t j = 0; j < g.size(); ++j)
                params.push_back(Param{b.with_index(static_cast<int>(j) + 1), g[j]});
            inner.session[b] = prm.type;
        }
        ProcRef body = apply_subst(v->body, sig);
        ProcRef out = p_par(activate(sc, 1, p_nil()), proc(sc, inner, 1, body));
        return v_abs(std::move(params), close(sc, degree(body), out));
    }
};

} // namespace

ProcRef monadic_decompose(const TypeEnvs& envs, const ProcRef& p0) {
    ProcRef p = has_name_passing(p0) ? desugar_name_passing(p0) : p0;
    if (has_recursion(p)) throw DecompError("recursion must be encoded before decomposition");
    auto [ienv, ip] = index_free_names(envs, p);
    BreakdownEnv env = BreakdownEnv::from(ienv);
    for (auto& [n, t] : env.session)
        if (is_tr_state(t) && free_names(ip).count(n))
            throw DecompError("monadic decomposition does not support tail-recursive name " + print(n));
    Monadic m;
    return m.top(env, ip);
}

} // namespace minsess
