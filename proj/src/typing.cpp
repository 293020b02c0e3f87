#include "minsess/typing.hpp"

#include "minsess/surface.hpp"

#include <algorithm>

namespace minsess {

// ---------------------------------------------------------------------------
// Duality and equality
// ---------------------------------------------------------------------------

namespace {

using RecStack = std::vector<std::pair<std::string, TypeRef>>;

TypeRef close_payload(const TypeRef& t, const RecStack& recs) {
    TypeRef out = t;
    for (auto it = recs.rbegin(); it != recs.rend(); ++it) out = type_subst(out, it->first, it->second);
    return out;
}

std::vector<TypeRef> close_payloads(const std::vector<TypeRef>& ts, const RecStack& recs) {
    std::vector<TypeRef> out;
    for (auto& t : ts) out.push_back(close_payload(t, recs));
    return out;
}

TypeRef dual_impl(const TypeRef& t, RecStack& recs) {
    switch (t->kind) {
    case TypeKind::End:
    case TypeKind::Var:
        return t;
    case TypeKind::Out:
        return t_in(close_payloads(t->items, recs), dual_impl(t->cont, recs));
    case TypeKind::In:
        return t_out(close_payloads(t->items, recs), dual_impl(t->cont, recs));
    case TypeKind::Sel:
    case TypeKind::Bra: {
        TypeArms arms;
        for (auto& [l, a] : t->arms) arms.emplace_back(l, dual_impl(a, recs));
        return t->kind == TypeKind::Sel ? t_bra(std::move(arms)) : t_sel(std::move(arms));
    }
    case TypeKind::Rec: {
        recs.emplace_back(t->var, t);
        TypeRef body = dual_impl(t->cont, recs);
        recs.pop_back();
        return t_rec(t->var, body);
    }
    default:
        return t;
    }
}

bool equal_impl(const TypeRef& a0, const TypeRef& b0, std::set<std::string>& seen) {
    if (a0 == b0 || type_same(a0, b0)) return true;
    TypeRef a = a0, b = b0;
    if (a->kind == TypeKind::Rec || b->kind == TypeKind::Rec) {
        std::string key = print(a) + "\x1f" + print(b);
        if (!seen.insert(key).second) return true;
        if (a->kind == TypeKind::Rec) a = unfold(a);
        if (b->kind == TypeKind::Rec) b = unfold(b);
    }
    if (a->kind != b->kind || a->var != b->var || a->base != b->base) return false;
    if (a->items.size() != b->items.size() || a->arms.size() != b->arms.size()) return false;
    for (size_t i = 0; i < a->items.size(); ++i)
        if (!equal_impl(a->items[i], b->items[i], seen)) return false;
    for (size_t i = 0; i < a->arms.size(); ++i) {
        if (a->arms[i].first != b->arms[i].first) return false;
        if (!equal_impl(a->arms[i].second, b->arms[i].second, seen)) return false;
    }
    if (static_cast<bool>(a->cont) != static_cast<bool>(b->cont)) return false;
    return !a->cont || equal_impl(a->cont, b->cont, seen);
}

} // namespace

TypeRef dual(const TypeRef& s) {
    RecStack recs;
    return dual_impl(s, recs);
}

bool type_equal(const TypeRef& a, const TypeRef& b) {
    std::set<std::string> seen;
    return equal_impl(a, b, seen);
}

bool is_dual(const TypeRef& s, const TypeRef& t) { return type_equal(dual(s), t); }

// ---------------------------------------------------------------------------
// Environments
// ---------------------------------------------------------------------------

TypeEnvs envs_from_decls(const std::vector<std::pair<Name, TypeRef>>& decls) {
    TypeEnvs e;
    for (auto& [n, t] : decls) {
        if (t->kind == TypeKind::Chan)
            e.shared[n.with_dual(false)] = t;
        else if (is_session(t))
            e.session[n] = t;
        else
            throw std::invalid_argument("free name " + print(n) + " must have a channel type");
    }
    return e;
}

TypeEnvs envs_from_file(const SourceFile& f) {
    std::vector<std::pair<Name, TypeRef>> decls;
    for (auto& [n, t] : f.free) decls.emplace_back(n, desugar_np_type(t));
    return envs_from_decls(decls);
}

bool balanced(const std::map<Name, TypeRef>& delta) {
    for (auto& [n, t] : delta) {
        if (n.dual) continue;
        auto it = delta.find(n.co());
        if (it != delta.end() && !is_dual(t, it->second)) return false;
    }
    return true;
}

std::vector<std::map<Name, TypeRef>> env_reduce(const std::map<Name, TypeRef>& delta) {
    std::vector<std::map<Name, TypeRef>> out;
    for (auto& [n, t0] : delta) {
        auto it = delta.find(n.co());
        if (it == delta.end()) continue;
        TypeRef s = unfold(t0), r = unfold(it->second);
        if (s->kind == TypeKind::Out && r->kind == TypeKind::In &&
            s->items.size() == r->items.size()) {
            bool same = true;
            for (size_t i = 0; i < s->items.size(); ++i)
                if (!type_equal(s->items[i], r->items[i])) same = false;
            if (same) {
                auto d = delta;
                d[n] = s->cont;
                d[n.co()] = r->cont;
                out.push_back(std::move(d));
            }
        }
        if (s->kind == TypeKind::Sel && r->kind == TypeKind::Bra) {
            for (auto& [l, sl] : s->arms)
                for (auto& [m, rm] : r->arms)
                    if (l == m) {
                        auto d = delta;
                        d[n] = sl;
                        d[n.co()] = rm;
                        out.push_back(std::move(d));
                    }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Minimality
// ---------------------------------------------------------------------------

namespace {

bool minimal_payloads(const std::vector<TypeRef>& items) {
    return std::all_of(items.begin(), items.end(), [](const TypeRef& t) { return is_minimal(t); });
}

bool minimal_session(const TypeRef& t, bool under_rec) {
    switch (t->kind) {
    case TypeKind::End:
        return true;
    case TypeKind::Var:
        return under_rec;
    case TypeKind::Out:
    case TypeKind::In:
        if (t->cont->kind != TypeKind::End && !(under_rec && t->cont->kind == TypeKind::Var))
            return false;
        return minimal_payloads(t->items);
    case TypeKind::Sel:
    case TypeKind::Bra:
        return std::all_of(t->arms.begin(), t->arms.end(),
                           [&](const auto& a) { return minimal_session(a.second, under_rec); });
    case TypeKind::Rec:
        if (under_rec) return false;
        return minimal_session(t->cont, true);
    default:
        return false;
    }
}

} // namespace

bool is_minimal(const TypeRef& t) {
    switch (t->kind) {
    case TypeKind::Base:
        return true;
    case TypeKind::LinArrow:
    case TypeKind::ShArrow:
        return minimal_payloads(t->items);
    case TypeKind::Chan:
        return is_minimal(t->items[0]);
    case TypeKind::NamePass:
        return false;
    case TypeKind::Var:
        // Occurs as a payload under an enclosing recursion.
        return true;
    default:
        return minimal_session(t, false);
    }
}

// ---------------------------------------------------------------------------
// Checker
// ---------------------------------------------------------------------------

namespace {

struct TypeFail {
    TypeError err;
};

std::string brief(const std::string& s) {
    constexpr size_t kMax = 72;
    return s.size() <= kMax ? s : s.substr(0, kMax - 3) + "...";
}

class Checker {
public:
    explicit Checker(std::vector<std::string>& deriv) : deriv_(deriv) {}

    void proc(TypeEnvs env, const ProcRef& p) {
        restrict_to(env, free_names(p), free_vars(p), p);
        switch (p->kind) {
        case ProcKind::Nil:
            note("Nil", p);
            return;
        case ProcKind::Out:
            return output(std::move(env), p);
        case ProcKind::In:
            return input(std::move(env), p);
        case ProcKind::App:
            return application(std::move(env), p);
        case ProcKind::Par: {
            note("Par", p);
            TypeEnvs left = take(env, free_names(p->left), free_vars(p->left));
            proc(std::move(left), p->left);
            proc(std::move(env), p->right);
            return;
        }
        case ProcKind::Res:
            return restriction(std::move(env), p);
        case ProcKind::Sel:
            return select(std::move(env), p);
        case ProcKind::Bra:
            return branch(std::move(env), p);
        case ProcKind::OutNames:
        case ProcKind::InNames:
            return proc(std::move(env), desugar_name_passing(p));
        case ProcKind::Rec:
        case ProcKind::RecVar:
            fail("Rec", p, "recursion must be encoded before typechecking");
        }
    }

    // Checks a value against an expected type, consuming exactly `env`.
    void value_against(TypeEnvs env, const ValueRef& v, const TypeRef& expected) {
        if (v->kind == ValueKind::Abs && expected->kind == TypeKind::ShArrow) {
            restrict_to(env, free_names(v), free_vars(v), nullptr);
            if (captures_linear(env))
                fail("Prom", v, "shared abstraction captures linear resources");
        }
        if (v->kind == ValueKind::Abs && is_arrow(expected)) {
            check_params(v, expected);
            abstraction_body(std::move(env), v);
            note(expected->kind == TypeKind::ShArrow ? "Prom" : "Abs", v);
            return;
        }
        TypeRef got = value(std::move(env), v);
        if (!type_equal(got, expected))
            fail("Val", v, "expected " + print(expected) + " but found " + print(got));
    }

    // Synthesises the type of a value, consuming exactly `env`.
    TypeRef value(TypeEnvs env, const ValueRef& v) {
        restrict_to(env, free_names(v), free_vars(v), nullptr);
        switch (v->kind) {
        case ValueKind::Var: {
            note("Var", v);
            auto l = env.linear.find(v->var);
            if (l != env.linear.end()) return l->second;
            auto s = env.shared_vars.find(v->var);
            if (s != env.shared_vars.end()) return s->second;
            fail("Var", v, "unbound variable " + v->var);
        }
        case ValueKind::Lit:
            note("Base", v);
            if (std::holds_alternative<std::int64_t>(v->lit)) return t_int();
            if (std::holds_alternative<bool>(v->lit)) return t_bool();
            return t_str();
        case ValueKind::Expr:
            return expression(env, v);
        case ValueKind::Chan:
            fail("Val", v, "names cannot be passed as values");
        case ValueKind::Abs: {
            bool lin = captures_linear(env);
            std::vector<TypeRef> params;
            for (auto& prm : v->params) params.push_back(prm.type);
            abstraction_body(std::move(env), v);
            note(lin ? "Abs" : "Prom", v);
            return lin ? t_lin(params) : t_sh(params);
        }
        }
        fail("Val", v, "unknown value");
    }

private:
    std::vector<std::string>& deriv_;

    template <class T>
    void note(const std::string& rule, const T& at) {
        deriv_.push_back(rule + " " + brief(print(at)));
    }

    [[noreturn]] void fail(const std::string& rule, const ProcRef& at, const std::string& msg) {
        throw TypeFail{TypeError{rule, at ? brief(print(at)) : "", msg}};
    }
    [[noreturn]] void fail(const std::string& rule, const ValueRef& at, const std::string& msg) {
        throw TypeFail{TypeError{rule, brief(print(at)), msg}};
    }

    static bool captures_linear(const TypeEnvs& env) {
        if (!env.linear.empty()) return true;
        for (auto& [n, t] : env.session)
            if (unfold(t)->kind != TypeKind::End) return true;
        return false;
    }

    // Drops resources not free in the term; they must be spent.
    void restrict_to(TypeEnvs& env, const std::set<Name>& fn, const std::set<std::string>& fv,
                     const ProcRef& at) {
        for (auto it = env.session.begin(); it != env.session.end();) {
            if (fn.count(it->first)) {
                ++it;
                continue;
            }
            if (unfold(it->second)->kind != TypeKind::End)
                fail("Lin", at,
                     "session " + print(it->first) + " : " + print(it->second) + " is not used");
            it = env.session.erase(it);
        }
        for (auto it = env.linear.begin(); it != env.linear.end();) {
            if (fv.count(it->first)) {
                ++it;
                continue;
            }
            fail("Lin", at, "linear variable " + it->first + " is not used");
        }
    }

    // Moves the linear resources free in a subterm out of `env`.
    static TypeEnvs take(TypeEnvs& env, const std::set<Name>& fn, const std::set<std::string>& fv) {
        TypeEnvs out;
        out.shared = env.shared;
        out.shared_vars = env.shared_vars;
        for (auto it = env.session.begin(); it != env.session.end();) {
            if (fn.count(it->first)) {
                out.session.insert(*it);
                it = env.session.erase(it);
            } else {
                ++it;
            }
        }
        for (auto it = env.linear.begin(); it != env.linear.end();) {
            if (fv.count(it->first)) {
                out.linear.insert(*it);
                it = env.linear.erase(it);
            } else {
                ++it;
            }
        }
        return out;
    }

    void check_params(const ValueRef& v, const TypeRef& expected) {
        if (v->params.size() != expected->items.size())
            fail("Abs", v, "arity mismatch against " + print(expected));
        for (size_t i = 0; i < v->params.size(); ++i)
            if (!type_equal(v->params[i].type, expected->items[i]))
                fail("Abs", v,
                     "parameter " + print(v->params[i].name) + " : " + print(v->params[i].type) +
                         " does not match " + print(expected->items[i]));
    }

    void bind_name(TypeEnvs& env, const Name& n, const TypeRef& t, const ProcRef& at) {
        if (t->kind == TypeKind::Chan) {
            env.shared[n.with_dual(false)] = t;
        } else if (is_session(t)) {
            if (!type_closed(t)) fail("Abs", at, "open session type " + print(t));
            env.session[n] = t;
        } else {
            fail("Abs", at, "name " + print(n) + " needs a channel type, not " + print(t));
        }
    }

    void abstraction_body(TypeEnvs env, const ValueRef& v) {
        for (auto& prm : v->params) {
            env.session.erase(prm.name);
            env.session.erase(prm.name.co());
            env.shared.erase(prm.name.with_dual(false));
            bind_name(env, prm.name, prm.type, v->body);
        }
        proc(std::move(env), v->body);
    }

    TypeRef expression(const TypeEnvs& env, const ValueRef& v) {
        note("Expr", v);
        std::vector<TypeRef> args;
        for (auto& a : v->args) {
            TypeEnvs sub = env;
            args.push_back(value(std::move(sub), a));
        }
        auto need = [&](size_t i, const TypeRef& t) {
            if (!type_equal(args[i], t))
                fail("Expr", v, "operand " + std::to_string(i + 1) + " must be " + print(t));
        };
        switch (v->op) {
        case Op::Neg:
            need(0, t_int());
            return t_int();
        case Op::Add:
            need(0, t_int());
            need(1, t_int());
            return t_int();
        case Op::Eq:
            need(0, t_int());
            need(1, t_int());
            return t_bool();
        case Op::Len:
            need(0, t_str());
            return t_int();
        }
        return t_int();
    }

    // Session subject first, then shared.
    TypeRef subject_type(const TypeEnvs& env, const Name& u, bool& is_session_subject) {
        auto s = env.session.find(u);
        if (s != env.session.end()) {
            is_session_subject = true;
            return s->second;
        }
        auto a = env.shared.find(u.with_dual(false));
        if (a != env.shared.end()) {
            is_session_subject = false;
            return a->second;
        }
        return nullptr;
    }

    void output(TypeEnvs env, const ProcRef& p) {
        bool sess = false;
        TypeRef st = subject_type(env, p->subject, sess);
        if (!st) fail("Snd", p, "unbound name " + print(p->subject));
        std::vector<TypeRef> expected;
        TypeRef cont;
        if (sess) {
            TypeRef s = unfold(st);
            if (s->kind != TypeKind::Out)
                fail("Snd", p, print(p->subject) + " has type " + print(st) + ", not an output");
            expected = s->items;
            cont = s->cont;
            env.session.erase(p->subject);
            note("Snd", p);
        } else {
            expected = {st->items[0]};
            note("Req", p);
        }
        if (expected.size() != p->payload.size())
            fail(sess ? "Snd" : "Req", p,
                 "expected " + std::to_string(expected.size()) + " payload value(s)");
        for (size_t i = 0; i < expected.size(); ++i) {
            TypeEnvs sub = take(env, free_names(p->payload[i]), free_vars(p->payload[i]));
            value_against(std::move(sub), p->payload[i], expected[i]);
        }
        if (sess) env.session[p->subject] = cont;
        proc(std::move(env), p->cont);
    }

    void bind_var(TypeEnvs& env, const std::string& x, const TypeRef& t, const ProcRef& at) {
        env.linear.erase(x);
        env.shared_vars.erase(x);
        if (t->kind == TypeKind::LinArrow)
            env.linear[x] = t;
        else if (t->kind == TypeKind::ShArrow || t->kind == TypeKind::Base)
            env.shared_vars[x] = t;
        else
            fail("Rcv", at, "cannot receive a value of type " + print(t));
    }

    void input(TypeEnvs env, const ProcRef& p) {
        bool sess = false;
        TypeRef st = subject_type(env, p->subject, sess);
        if (!st) fail("Rcv", p, "unbound name " + print(p->subject));
        std::vector<TypeRef> expected;
        if (sess) {
            TypeRef s = unfold(st);
            if (s->kind != TypeKind::In)
                fail("Rcv", p, print(p->subject) + " has type " + print(st) + ", not an input");
            expected = s->items;
            env.session[p->subject] = s->cont;
            note("Rcv", p);
        } else {
            expected = {st->items[0]};
            note("Acc", p);
        }
        if (expected.size() != p->binders.size())
            fail(sess ? "Rcv" : "Acc", p,
                 "expected " + std::to_string(expected.size()) + " binder(s)");
        for (size_t i = 0; i < expected.size(); ++i) bind_var(env, p->binders[i], expected[i], p);
        proc(std::move(env), p->cont);
    }

    void application(TypeEnvs env, const ProcRef& p) {
        note("App", p);
        TypeRef ft;
        if (p->fun->kind == ValueKind::Var) {
            const std::string& x = p->fun->var;
            if (auto l = env.linear.find(x); l != env.linear.end()) {
                ft = l->second;
                env.linear.erase(l);
            } else if (auto s = env.shared_vars.find(x); s != env.shared_vars.end()) {
                ft = s->second;
            } else {
                fail("App", p, "unbound variable " + x);
            }
        } else if (p->fun->kind == ValueKind::Abs) {
            TypeEnvs sub = take(env, free_names(p->fun), free_vars(p->fun));
            ft = value(std::move(sub), p->fun);
        } else {
            fail("App", p, "only variables and abstractions can be applied");
        }
        if (!is_arrow(ft)) fail("App", p, "applied value has type " + print(ft));
        if (ft->items.size() != p->args.size())
            fail("App", p, "arity mismatch against " + print(ft));
        for (size_t i = 0; i < p->args.size(); ++i) {
            const Name& u = p->args[i];
            const TypeRef& c = ft->items[i];
            if (c->kind == TypeKind::Chan) {
                auto a = env.shared.find(u.with_dual(false));
                if (a == env.shared.end() || !type_equal(a->second, c))
                    fail("App", p, "argument " + print(u) + " is not a shared name of type " + print(c));
                continue;
            }
            auto s = env.session.find(u);
            if (s == env.session.end())
                fail("App", p, "argument " + print(u) + " is not an available session name");
            if (!type_equal(s->second, c))
                fail("App", p,
                     "argument " + print(u) + " : " + print(s->second) + " does not match " +
                         print(c));
            env.session.erase(s);
        }
        if (!env.linear.empty()) fail("App", p, "unused linear variable " + env.linear.begin()->first);
        for (auto& [n, t] : env.session)
            if (unfold(t)->kind != TypeKind::End)
                fail("App", p, "session " + print(n) + " is not used");
    }

    void restriction(TypeEnvs env, const ProcRef& p) {
        const TypeRef& t = p->annot;
        Name b = p->binder.with_dual(false);
        if (!t) fail("Res", p, "restriction without annotation");
        if (t->kind == TypeKind::Chan) {
            note("Res", p);
            env.shared[b] = t;
        } else if (is_session(t)) {
            if (!type_closed(t)) fail("Res", p, "open session type " + print(t));
            note("ResS", p);
            env.session[b] = t;
            env.session[b.co()] = dual(t);
        } else {
            fail("Res", p, "restriction needs a channel type, not " + print(t));
        }
        proc(std::move(env), p->cont);
    }

    void select(TypeEnvs env, const ProcRef& p) {
        auto s = env.session.find(p->subject);
        if (s == env.session.end()) fail("Sel", p, "unbound session " + print(p->subject));
        TypeRef t = unfold(s->second);
        if (t->kind != TypeKind::Sel) fail("Sel", p, "expected a selection type, found " + print(t));
        for (auto& [l, a] : t->arms)
            if (l == p->label) {
                note("Sel", p);
                s->second = a;
                return proc(std::move(env), p->cont);
            }
        fail("Sel", p, "label " + p->label + " not offered by " + print(t));
    }

    void branch(TypeEnvs env, const ProcRef& p) {
        auto s = env.session.find(p->subject);
        if (s == env.session.end()) fail("Bra", p, "unbound session " + print(p->subject));
        TypeRef t = unfold(s->second);
        if (t->kind != TypeKind::Bra) fail("Bra", p, "expected a branching type, found " + print(t));
        if (t->arms.size() != p->arms.size())
            fail("Bra", p, "branch labels do not match " + print(t));
        note("Bra", p);
        for (size_t i = 0; i < t->arms.size(); ++i) {
            if (t->arms[i].first != p->arms[i].first)
                fail("Bra", p, "missing branch label " + t->arms[i].first);
            TypeEnvs arm = env;
            arm.session[p->subject] = t->arms[i].second;
            proc(std::move(arm), p->arms[i].second);
        }
    }
};

} // namespace

TypeReport typecheck(const TypeEnvs& envs, const ProcRef& p) {
    TypeReport r;
    try {
        Checker c(r.derivation);
        c.proc(envs, has_name_passing(p) ? desugar_name_passing(p) : p);
    } catch (const TypeFail& f) {
        r.ok = false;
        r.error = f.err;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = TypeError{"Type", "", e.what()};
    }
    return r;
}

std::pair<TypeRef, TypeReport> typecheck_value(const TypeEnvs& envs, const ValueRef& v) {
    TypeReport r;
    TypeRef t;
    try {
        Checker c(r.derivation);
        t = c.value(envs, desugar_name_passing(v));
    } catch (const TypeFail& f) {
        r.ok = false;
        r.error = f.err;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = TypeError{"Type", "", e.what()};
    }
    return {t, r};
}

} // namespace minsess
