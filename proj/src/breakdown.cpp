#include "minsess/decomp_proc.hpp"

#include "minsess/surface.hpp"

#include <algorithm>
#include <functional>

namespace minsess {

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

BreakdownEnv BreakdownEnv::from(const TypeEnvs& envs) {
    BreakdownEnv env;
    env.session = envs.session;
    env.shared = envs.shared;
    for (auto& [x, t] : envs.shared_vars) env.bind_var(x, t);
    for (auto& [x, t] : envs.linear) env.bind_var(x, t);
    return env;
}

void BreakdownEnv::bind_var(const std::string& x, const TypeRef& t) {
    vars[x] = t;
    order.erase(std::remove(order.begin(), order.end(), x), order.end());
    order.push_back(x);
}

namespace {

std::vector<std::string> ordered(const std::vector<std::string>& order,
                                 const std::set<std::string>& fv) {
    std::vector<std::string> out;
    for (auto& x : order)
        if (fv.count(x)) out.push_back(x);
    for (auto& x : fv)
        if (std::find(order.begin(), order.end(), x) == order.end())
            throw DecompError("variable " + x + " has no known type");
    return out;
}

} // namespace

std::vector<std::string> BreakdownEnv::context(const ProcRef& p) const {
    return ordered(order, free_vars(p));
}

std::vector<std::string> BreakdownEnv::context(const ValueRef& v) const {
    return ordered(order, free_vars(v));
}

// ---------------------------------------------------------------------------
// Breakdown
// ---------------------------------------------------------------------------

namespace {

std::vector<ValueRef> var_values(const std::vector<std::string>& xs) {
    std::vector<ValueRef> out;
    for (auto& x : xs) out.push_back(v_var(x));
    return out;
}

std::vector<Name> indexed_run(const Name& first, size_t n) {
    std::vector<Name> out;
    for (size_t j = 0; j < n; ++j) out.push_back(first.with_index(first.index + static_cast<int>(j)));
    return out;
}

// Propagators of one abstraction body (or of the top level).
struct Scope {
    std::string base;
    std::map<int, TypeRef> props;

    Name prop(int k) const { return prop_name(base, k); }
};

class Breakdown {
public:
    ProcRef proc(Scope& sc, const BreakdownEnv& env, int k, const std::vector<std::string>& ctx,
                 const ProcRef& p) {
        switch (p->kind) {
        case ProcKind::Nil:
            return trigger(sc, env, k, ctx, p_nil());
        case ProcKind::Out:
            return output(sc, env, k, ctx, p);
        case ProcKind::In:
            return input(sc, env, k, ctx, p);
        case ProcKind::App:
            return application(sc, env, k, ctx, p);
        case ProcKind::Par:
            return parallel(sc, env, k, ctx, p);
        case ProcKind::Res:
            return restriction(sc, env, k, ctx, p);
        case ProcKind::Sel:
            return select(sc, env, k, ctx, p);
        case ProcKind::Bra:
            return branch(sc, env, k, ctx, p);
        case ProcKind::OutNames:
        case ProcKind::InNames:
            return proc(sc, env, k, ctx, desugar_name_passing(p));
        case ProcKind::Rec:
        case ProcKind::RecVar:
            throw DecompError("recursion must be encoded before decomposition");
        }
        throw DecompError("unknown process form");
    }

    ValueRef value(const BreakdownEnv& env, const ValueRef& v) {
        switch (v->kind) {
        case ValueKind::Var:
        case ValueKind::Lit:
        case ValueKind::Expr:
            return v;
        case ValueKind::Chan:
            throw DecompError("names passed as values cannot be decomposed");
        case ValueKind::Abs:
            return abstraction(env, v);
        }
        throw DecompError("unknown value form");
    }

    // Whole-process decomposition with servers for free tail-recursive names.
    ProcRef top(const BreakdownEnv& env, const ProcRef& p) {
        Scope sc{fresh_base(), {}};
        std::vector<ProcRef> comps;
        std::vector<std::pair<Name, TypeRef>> rec_binders;
        comps.push_back(activate(sc, 1, {}, p_nil()));
        comps.push_back(proc(sc, env, 1, {}, p));
        for (auto& n : free_names(p)) {
            auto it = env.session.find(n);
            if (it == env.session.end() || !is_tr_state(it->second)) continue;
            auto [server, binder] = rec_server(n, it->second);
            comps.push_back(server);
            rec_binders.push_back(binder);
        }
        return close_scope(sc, degree(p), rec_binders, p_par(comps));
    }

    std::string fresh_base() {
        int n = scopes_++;
        return n == 0 ? "c" : "c" + std::to_string(n);
    }

    ProcRef close_scope(const Scope& sc, int count,
                        const std::vector<std::pair<Name, TypeRef>>& rec_binders, ProcRef body) {
        for (auto it = rec_binders.rbegin(); it != rec_binders.rend(); ++it)
            body = p_res(it->first, it->second, body);
        for (int k = count; k >= 1; --k) {
            auto it = sc.props.find(k);
            if (it == sc.props.end())
                throw DecompError("propagator " + std::to_string(k) + " of scope " + sc.base +
                                  " was never activated");
            body = p_res(sc.prop(k), it->second, body);
        }
        if (static_cast<int>(sc.props.size()) != count)
            throw DecompError("degree mismatch in scope " + sc.base);
        return body;
    }

private:
    int scopes_ = 0;

    // c_k?(x~).cont, recording the propagator's type.
    ProcRef trigger(Scope& sc, const BreakdownEnv& env, int k, const std::vector<std::string>& ctx,
                    ProcRef cont) {
        std::vector<TypeRef> payload;
        for (auto& x : ctx) payload.push_back(gt_value(env.vars.at(x)));
        if (sc.props.count(k)) throw DecompError("propagator " + std::to_string(k) + " used twice");
        sc.props[k] = t_in(std::move(payload), t_end());
        return p_in(sc.prop(k), ctx, std::move(cont));
    }

    ProcRef activate(const Scope& sc, int k, const std::vector<std::string>& vars, ProcRef cont) {
        return p_out(sc.prop(k).co(), var_values(vars), std::move(cont));
    }

    // c^r?(x).x(r~) for a tail-recursive endpoint, with its binder.
    std::pair<ProcRef, std::pair<Name, TypeRef>> rec_server(const Name& r, const TypeRef& state) {
        MinTypeList g = rts(state);
        Name cr = rec_prop_name(r);
        ProcRef server = p_in(cr, {"x"}, p_app(v_var("x"), indexed_run(r, g.size())));
        return {server, {cr, t_chan(t_lin(g))}};
    }

    const TypeRef* session_state(const BreakdownEnv& env, const Name& u) const {
        auto it = env.session.find(u);
        return it == env.session.end() ? nullptr : &it->second;
    }

    static bool tail_recursive(const TypeRef* st) { return st && is_tr_state(*st); }

    // The request c^u!<\z~. body> used for every action on a tail-recursive
    // endpoint; `act` builds the action on z_f(S) around the continuation.
    ProcRef tr_request(const Name& u, const TypeRef& state,
                       const std::function<ProcRef(const Name&, ProcRef)>& act, ProcRef after) {
        MinTypeList g = rts(state);
        std::vector<Param> params;
        std::vector<Name> zs;
        for (size_t j = 0; j < g.size(); ++j) {
            Name z = aux_name("z", static_cast<int>(j) + 1);
            params.push_back(Param{z, g[j]});
            zs.push_back(z);
        }
        int f = index_of(state);
        if (f < 1 || f > static_cast<int>(zs.size()))
            throw DecompError("index of " + print(state) + " out of range");
        Name cu = rec_prop_name(u);
        ProcRef reinstate = p_in(cu, {"x"}, p_app(v_var("x"), zs));
        ProcRef body = act(zs[static_cast<size_t>(f - 1)], p_par(std::move(after), reinstate));
        return p_out(cu, {v_abs(std::move(params), body)}, p_nil());
    }

    static TypeRef advance_tr(const TypeRef& state) {
        TypeRef s = unfold(state);
        return s->cont;
    }

    ProcRef output(Scope& sc, const BreakdownEnv& env, int k, const std::vector<std::string>& ctx,
                   const ProcRef& p) {
        const Name& u = p->subject;
        std::vector<ValueRef> payload;
        for (auto& v : p->payload) payload.push_back(value(env, v));
        const TypeRef* st = session_state(env, u);
        BreakdownEnv next = env;
        ProcRef q = p->cont;
        if (tail_recursive(st)) {
            next.session[u] = advance_tr(*st);
            auto w = next.context(q);
            auto act = [&](const Name& z, ProcRef after) { return p_out(z, payload, std::move(after)); };
            ProcRef trio = trigger(sc, env, k, ctx, tr_request(u, *st, act, activate(sc, k + 1, w, p_nil())));
            return p_par(trio, proc(sc, next, k + 1, w, q));
        }
        if (st) {
            TypeRef s = unfold(*st);
            if (s->kind != TypeKind::Out) throw DecompError(print(u) + " is not ready to output");
            check_not_mixed(u, s->cont);
            next.session.erase(u);
            next.session[u.with_index(u.index + 1)] = s->cont;
            q = apply_subst(q, next_index(u, true));
        } else if (!env.shared.count(u.key())) {
            throw DecompError("no type for " + print(u));
        }
        auto w = next.context(q);
        ProcRef trio = trigger(sc, env, k, ctx, p_out(u, payload, activate(sc, k + 1, w, p_nil())));
        return p_par(trio, proc(sc, next, k + 1, w, q));
    }

    ProcRef input(Scope& sc, const BreakdownEnv& env, int k, const std::vector<std::string>& ctx,
                  const ProcRef& p) {
        const Name& u = p->subject;
        const TypeRef* st = session_state(env, u);
        BreakdownEnv next = env;
        ProcRef q = p->cont;
        std::vector<TypeRef> payload_types;
        if (st) {
            TypeRef s = unfold(*st);
            if (s->kind != TypeKind::In) throw DecompError(print(u) + " is not ready to input");
            payload_types = s->items;
        } else {
            auto it = env.shared.find(u.key());
            if (it == env.shared.end()) throw DecompError("no type for " + print(u));
            payload_types = {it->second->items[0]};
        }
        if (payload_types.size() != p->binders.size()) throw DecompError("arity mismatch on " + print(u));
        for (size_t i = 0; i < payload_types.size(); ++i) next.bind_var(p->binders[i], payload_types[i]);
        if (tail_recursive(st)) {
            next.session[u] = advance_tr(*st);
            auto w = next.context(q);
            auto act = [&](const Name& z, ProcRef after) { return p_in(z, p->binders, std::move(after)); };
            ProcRef trio = trigger(sc, env, k, ctx, tr_request(u, *st, act, activate(sc, k + 1, w, p_nil())));
            return p_par(trio, proc(sc, next, k + 1, w, q));
        }
        if (st) {
            TypeRef s = unfold(*st);
            check_not_mixed(u, s->cont);
            next.session.erase(u);
            next.session[u.with_index(u.index + 1)] = s->cont;
            q = apply_subst(q, next_index(u, true));
        }
        auto w = next.context(q);
        ProcRef trio = trigger(sc, env, k, ctx, p_in(u, p->binders, activate(sc, k + 1, w, p_nil())));
        return p_par(trio, proc(sc, next, k + 1, w, q));
    }

    // A non-recursive prefix followed by a tail-recursive protocol would need
    // the endpoint to change its decomposition midway.
    static void check_not_mixed(const Name& u, const TypeRef& cont) {
        if (is_tr_state(cont))
            throw DecompError("endpoint " + print(u) +
                              " continues into a tail-recursive protocol after a non-recursive prefix");
    }

    ProcRef application(Scope& sc, const BreakdownEnv& env, int k, const std::vector<std::string>& ctx,
                        const ProcRef& p) {
        struct Request {
            Name cu;
            std::vector<Param> params;
        };
        std::vector<Request> requests;
        std::vector<Name> args;
        for (auto& u : p->args) {
            const TypeRef* st = session_state(env, u);
            if (tail_recursive(st)) {
                MinTypeList g = rts(*st);
                std::string base = requests.empty() ? "z" : "z" + std::to_string(requests.size() + 1);
                Request r{rec_prop_name(u), {}};
                for (size_t j = 0; j < g.size(); ++j) {
                    Name z = aux_name(base, static_cast<int>(j) + 1);
                    r.params.push_back(Param{z, g[j]});
                    args.push_back(z);
                }
                requests.push_back(std::move(r));
            } else if (st) {
                auto g = gt(*st);
                auto run = indexed_run(u, g.size());
                args.insert(args.end(), run.begin(), run.end());
            } else if (env.shared.count(u.key())) {
                args.push_back(u);
            } else {
                throw DecompError("no type for " + print(u));
            }
        }
        ProcRef body = p_app(value(env, p->fun), args);
        for (auto it = requests.rbegin(); it != requests.rend(); ++it)
            body = p_out(it->cu, {v_abs(it->params, body)}, p_nil());
        return trigger(sc, env, k, ctx, body);
    }

    ProcRef parallel(Scope& sc, const BreakdownEnv& env, int k, const std::vector<std::string>& ctx,
                     const ProcRef& p) {
        int l = degree(p->left);
        auto y = env.context(p->left);
        auto w = env.context(p->right);
        ProcRef trio = trigger(sc, env, k, ctx,
                               activate(sc, k + 1, y, activate(sc, k + l + 1, w, p_nil())));
        ProcRef left = proc(sc, env, k + 1, y, p->left);
        ProcRef right = proc(sc, env, k + l + 1, w, p->right);
        return p_par({trio, left, right});
    }

    ProcRef restriction(Scope& sc, const BreakdownEnv& env, int k, const std::vector<std::string>& ctx,
                        const ProcRef& p) {
        const TypeRef& t = p->annot;
        if (!t) throw DecompError("restriction of " + print(p->binder) + " has no type");
        Name b = p->binder.key();
        Name b1 = b.indexed() ? b : b.with_index(1);
        Subst sig;
        if (!b.indexed()) {
            sig.names[b] = b1;
            sig.names[b.co()] = b1.co();
        }
        ProcRef body = apply_subst(p->cont, sig);
        BreakdownEnv inner = env;
        if (t->kind == TypeKind::Chan) {
            inner.shared[b1] = t;
            return p_res(b1, gt_value(t), proc(sc, inner, k, ctx, body));
        }
        if (!is_session(t)) throw DecompError("restriction needs a channel type");
        inner.session.erase(b);
        inner.session.erase(b.co());
        inner.session[b1] = t;
        inner.session[b1.co()] = dual(t);
        ProcRef out = proc(sc, inner, k, ctx, body);
        MinTypeList g = gt(t);
        if (is_tr_state(t)) {
            auto [s1, c1] = rec_server(b1, t);
            auto [s2, c2] = rec_server(b1.co(), dual(t));
            out = p_res(c1.first, c1.second,
                        p_res(c2.first, c2.second, p_par({s1, s2, out})));
        }
        auto names = indexed_run(b1, g.size());
        for (size_t j = names.size(); j-- > 0;) out = p_res(names[j], g[j], out);
        return out;
    }

    ProcRef branch(Scope& sc, const BreakdownEnv& env, int k, const std::vector<std::string>& ctx,
                   const ProcRef& p) {
        const Name& u = p->subject;
        const TypeRef* st = session_state(env, u);
        if (!st) throw DecompError("no session type for " + print(u));
        TypeRef s = unfold(*st);
        if (s->kind != TypeKind::Bra || s->arms.size() != p->arms.size())
            throw DecompError("branch on " + print(u) + " does not match " + print(*st));
        ProcArms arms;
        for (size_t i = 0; i < s->arms.size(); ++i) {
            const auto& [label, arm_type] = s->arms[i];
            if (p->arms[i].first != label) throw DecompError("label " + label + " missing in branch");
            // The arm continues on a parameter that stands for the rest of
            // the session; the selecting side supplies the names.
            Name y = aux_name("y");
            BreakdownEnv arm_env = env;
            arm_env.session.erase(u);
            ProcRef body = apply_subst(p->arms[i].second, Subst::name(u, y));
            ValueRef packed = value(arm_env, v_abs({Param{y, arm_type}}, body));
            arms.emplace_back(label, p_out(u, {packed}, p_nil()));
        }
        return trigger(sc, env, k, ctx, p_bra(u, std::move(arms)));
    }

    ProcRef select(Scope& sc, const BreakdownEnv& env, int k, const std::vector<std::string>& ctx,
                   const ProcRef& p) {
        const Name& u = p->subject;
        const TypeRef* st = session_state(env, u);
        if (!st) throw DecompError("no session type for " + print(u));
        TypeRef s = unfold(*st);
        if (s->kind != TypeKind::Sel) throw DecompError(print(u) + " cannot select");
        TypeRef arm;
        for (auto& [l, a] : s->arms)
            if (l == p->label) arm = a;
        if (!arm) throw DecompError("label " + p->label + " not offered on " + print(u));
        if (is_tr_state(arm))
            throw DecompError("selected arm on " + print(u) + " continues tail-recursively");
        MinTypeList received = gt(dual(arm));
        Name u_next = u.with_index(u.index + 1);
        auto cont_names = indexed_run(u_next, received.size());

        BreakdownEnv next = env;
        next.session.erase(u);
        next.session[u_next] = arm;
        ProcRef q = apply_subst(p->cont, Subst::name(u, u_next));
        auto w = next.context(q);

        std::set<std::string> taken(env.order.begin(), env.order.end());
        collect_all_vars(q, taken);
        std::string z = fresh_var("z", taken);
        std::vector<Name> args;
        for (auto& n : cont_names) args.push_back(n.co());
        ProcRef trio = trigger(
            sc, env, k, ctx,
            p_sel(u, p->label, p_in(u, {z}, activate(sc, k + 1, w, p_app(v_var(z), args)))));
        ProcRef out = p_par(trio, proc(sc, next, k + 1, w, q));
        for (size_t j = cont_names.size(); j-- > 0;) {
            const Name& a = args[j];
            TypeRef annot = a.dual ? dual(received[j]) : received[j];
            out = p_res(cont_names[j].key(), annot, out);
        }
        return out;
    }

    ValueRef abstraction(const BreakdownEnv& env, const ValueRef& v) {
        Scope sc{fresh_base(), {}};
        std::vector<Param> params;
        Subst sig;
        BreakdownEnv inner = env;
        std::vector<ProcRef> servers;
        std::vector<std::pair<Name, TypeRef>> rec_binders;
        for (auto& prm : v->params) {
            const TypeRef& c = prm.type;
            if (!c) throw DecompError("abstraction parameter " + print(prm.name) + " has no type");
            Name b = prm.name.indexed() ? prm.name : prm.name.with_index(1);
            if (!prm.name.indexed()) {
                sig.names[prm.name] = b;
                sig.names[prm.name.co()] = b.co();
            }
            if (c->kind == TypeKind::Chan) {
                params.push_back(Param{b, gt_value(c)});
                inner.shared[b.key()] = c;
                continue;
            }
            if (!is_session(c)) throw DecompError("parameter type " + print(c) + " is not a channel type");
            MinTypeList g = gt(c);
            auto names = indexed_run(b, g.size());
            for (size_t j = 0; j < g.size(); ++j) params.push_back(Param{names[j], g[j]});
            inner.session.erase(prm.name);
            inner.session[b] = c;
            if (is_tr_state(c)) {
                auto [server, binder] = rec_server(b, c);
                servers.push_back(server);
                rec_binders.push_back(binder);
            }
        }
        ProcRef body = apply_subst(v->body, sig);
        auto ctx = inner.context(body);
        std::vector<ProcRef> comps = servers;
        comps.push_back(activate(sc, 1, ctx, p_nil()));
        comps.push_back(proc(sc, inner, 1, ctx, body));
        return v_abs(std::move(params), close_scope(sc, degree(body), rec_binders, p_par(comps)));
    }
};

} // namespace

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

ProcRef breakdown(const BreakdownEnv& env, const BreakdownState& st, const ProcRef& p) {
    Breakdown bd;
    Scope sc{bd.fresh_base(), {}};
    return bd.proc(sc, env, st.k, st.ctx, p);
}

ValueRef breakdown_value(const BreakdownEnv& env, const ValueRef& v) {
    Breakdown bd;
    bd.fresh_base();
    return bd.value(env, v);
}

std::pair<TypeEnvs, ProcRef> index_free_names(const TypeEnvs& envs, const ProcRef& p) {
    Subst sig = init_indices(p);
    TypeEnvs out;
    out.shared_vars = envs.shared_vars;
    out.linear = envs.linear;
    for (auto& [n, t] : envs.shared) out.shared[n.indexed() ? n : n.with_index(1)] = t;
    for (auto& [n, t] : envs.session) out.session[n.indexed() ? n : n.with_index(1)] = t;
    return {out, apply_subst(p, sig)};
}

ProcRef decompose(const TypeEnvs& envs, const ProcRef& p0) {
    ProcRef p = has_name_passing(p0) ? desugar_name_passing(p0) : p0;
    if (has_recursion(p)) throw DecompError("recursion must be encoded before decomposition");
    if (!free_vars(p).empty()) throw DecompError("cannot decompose a process with free variables");
    auto [ienv, ip] = index_free_names(envs, p);
    for (auto& n : free_names(ip))
        if (!ienv.session.count(n) && !ienv.shared.count(n.key()))
            throw DecompError("free name " + print(n) + " has no declared type");
    Breakdown bd;
    return bd.top(BreakdownEnv::from(ienv), ip);
}

TypeEnvs decompose_envs(const TypeEnvs& envs, const ProcRef& p) {
    ProcRef q = has_name_passing(p) ? desugar_name_passing(p) : p;
    return gt_env(index_free_names(envs, q).first);
}

} // namespace minsess
