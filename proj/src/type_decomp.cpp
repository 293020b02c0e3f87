#include "minsess/decomp_types.hpp"

#include "minsess/surface.hpp"

namespace minsess {

namespace {

// Prefixes along the spine and the final continuation.
std::pair<std::vector<TypeRef>, TypeRef> spine(const TypeRef& s) {
    std::vector<TypeRef> prefixes;
    TypeRef cur = s;
    while (is_prefix(cur)) {
        prefixes.push_back(cur);
        cur = cur->cont;
    }
    return {prefixes, cur};
}

bool same_prefix(const TypeRef& a, const TypeRef& b) {
    if (a->kind != b->kind || a->items.size() != b->items.size()) return false;
    for (size_t i = 0; i < a->items.size(); ++i)
        if (!type_equal(a->items[i], b->items[i])) return false;
    return true;
}

TypeRef close_with(const TypeRef& t, const std::vector<std::pair<std::string, TypeRef>>& recs) {
    TypeRef out = t;
    for (auto it = recs.rbegin(); it != recs.rend(); ++it) out = type_subst(out, it->first, it->second);
    return out;
}

MinTypeList gt_impl(const TypeRef& s, std::vector<std::pair<std::string, TypeRef>>& recs);

TypeRef gt_value_impl(const TypeRef& u, std::vector<std::pair<std::string, TypeRef>>& recs);

MinTypeList gt_chan_impl(const TypeRef& c, std::vector<std::pair<std::string, TypeRef>>& recs) {
    if (c->kind == TypeKind::Chan) return {t_chan(gt_value_impl(c->items[0], recs))};
    if (is_session(c)) return gt_impl(c, recs);
    throw DecompError("not a channel type: " + print(c));
}

TypeRef gt_value_impl(const TypeRef& u, std::vector<std::pair<std::string, TypeRef>>& recs) {
    switch (u->kind) {
    case TypeKind::Base:
    case TypeKind::Var:
        return u;
    case TypeKind::LinArrow:
    case TypeKind::ShArrow: {
        MinTypeList params;
        for (auto& c : u->items) {
            auto g = gt_chan_impl(c, recs);
            params.insert(params.end(), g.begin(), g.end());
        }
        return u->kind == TypeKind::LinArrow ? t_lin(params) : t_sh(params);
    }
    case TypeKind::Chan:
        return t_chan(gt_value_impl(u->items[0], recs));
    default:
        throw DecompError("not a value type: " + print(u));
    }
}

std::vector<TypeRef> gt_payloads(const std::vector<TypeRef>& items,
                                 std::vector<std::pair<std::string, TypeRef>>& recs) {
    std::vector<TypeRef> out;
    for (auto& u : items) out.push_back(gt_value_impl(u, recs));
    return out;
}

MinTypeList rt_impl(const TypeRef& body, const std::string& var,
                    std::vector<std::pair<std::string, TypeRef>>& recs) {
    MinTypeList out;
    TypeRef cur = body;
    while (is_prefix(cur)) {
        auto payload = gt_payloads(cur->items, recs);
        TypeRef one = cur->kind == TypeKind::Out ? t_out(payload, t_var(var)) : t_in(payload, t_var(var));
        out.push_back(t_rec(var, one));
        cur = cur->cont;
    }
    if (cur->kind != TypeKind::Var) throw DecompError("R applied to a non-recursive type");
    return out;
}

MinTypeList gt_impl(const TypeRef& s, std::vector<std::pair<std::string, TypeRef>>& recs) {
    switch (s->kind) {
    case TypeKind::End:
        return {};
    case TypeKind::Var:
        return {s};
    case TypeKind::Out:
    case TypeKind::In: {
        auto payload = gt_payloads(s->items, recs);
        MinTypeList out{s->kind == TypeKind::Out ? t_out(payload, t_end()) : t_in(payload, t_end())};
        auto rest = gt_impl(s->cont, recs);
        out.insert(out.end(), rest.begin(), rest.end());
        return out;
    }
    case TypeKind::Rec: {
        if (!type_contractive(s)) throw DecompError("unguarded recursive type " + print(s));
        if (is_tail_recursive(s)) return rt_impl(s->cont, s->var, recs);
        if (!recs.empty() && type_closed(s)) {
            std::vector<std::pair<std::string, TypeRef>> none;
            return gt_impl(s, none);
        }
        if (!recs.empty()) throw DecompError("nested recursion in " + print(s));
        recs.emplace_back(s->var, s);
        auto body = gt_impl(s->cont, recs);
        recs.pop_back();
        if (body.size() != 1)
            throw DecompError("recursive type is neither tail-recursive nor decomposes to a "
                              "single minimal type: " +
                              print(s));
        return {t_rec(s->var, body[0])};
    }
    case TypeKind::Bra: {
        TypeArms arms;
        for (auto& [l, a] : s->arms)
            arms.emplace_back(l, t_out({t_lin(gt_impl(a, recs))}, t_end()));
        return {t_bra(std::move(arms))};
    }
    case TypeKind::Sel: {
        TypeArms arms;
        for (auto& [l, a] : s->arms) {
            // The receiving side's protocol is the dual of the arm; close
            // the recursion first so duality flips the right polarity.
            TypeRef closed = close_with(a, recs);
            std::vector<std::pair<std::string, TypeRef>> none;
            arms.emplace_back(l, t_in({t_lin(gt_impl(dual(closed), none))}, t_end()));
        }
        return {t_sel(std::move(arms))};
    }
    default:
        throw DecompError("not a session type: " + print(s));
    }
}

} // namespace

bool is_tail_recursive(const TypeRef& s) {
    if (s->kind != TypeKind::Rec) return false;
    auto [prefixes, last] = spine(s->cont);
    if (prefixes.empty() || last->kind != TypeKind::Var || last->var != s->var) return false;
    for (auto& p : prefixes)
        for (auto& u : p->items)
            if (free_tvars(u).count(s->var)) return false;
    return true;
}

bool is_tr_state(const TypeRef& s) {
    auto [prefixes, last] = spine(s);
    if (!is_tail_recursive(last)) return false;
    if (prefixes.empty()) return true;
    auto [body, end] = spine(last->cont);
    if (prefixes.size() > body.size()) return false;
    size_t off = body.size() - prefixes.size();
    for (size_t i = 0; i < prefixes.size(); ++i) {
        TypeRef expected = type_subst(body[off + i], last->var, last);
        if (!same_prefix(prefixes[i], expected)) return false;
    }
    return true;
}

TypeRef tr_root(const TypeRef& s) {
    if (!is_tr_state(s)) throw DecompError("not a tail-recursive type: " + print(s));
    return spine(s).second;
}

MinTypeList gt(const TypeRef& s) {
    std::vector<std::pair<std::string, TypeRef>> recs;
    if (!is_session(s)) throw DecompError("gt expects a session type: " + print(s));
    if (is_tr_state(s) && s->kind != TypeKind::Rec) return rts(s);
    return gt_impl(s, recs);
}

TypeRef gt_value(const TypeRef& u) {
    std::vector<std::pair<std::string, TypeRef>> recs;
    return gt_value_impl(u, recs);
}

MinTypeList gt_chan(const TypeRef& c) {
    if (is_session(c)) return gt(c);
    std::vector<std::pair<std::string, TypeRef>> recs;
    return gt_chan_impl(c, recs);
}

MinTypeList gt_params(const std::vector<TypeRef>& cs) {
    MinTypeList out;
    for (auto& c : cs) {
        auto g = gt_chan(c);
        out.insert(out.end(), g.begin(), g.end());
    }
    return out;
}

MinTypeList rt(const TypeRef& body) {
    auto [prefixes, last] = spine(body);
    if (last->kind != TypeKind::Var) throw DecompError("R applied to a non-recursive type");
    std::vector<std::pair<std::string, TypeRef>> recs;
    return rt_impl(body, last->var, recs);
}

MinTypeList rts(const TypeRef& s) {
    TypeRef cur = s;
    while (is_prefix(cur)) cur = cur->cont;
    if (cur->kind != TypeKind::Rec) throw DecompError("R* applied to a non-recursive type");
    std::vector<std::pair<std::string, TypeRef>> recs;
    return rt_impl(cur->cont, cur->var, recs);
}

int index_of(const TypeRef& s0) {
    TypeRef s = s0;
    if (s->kind == TypeKind::Rec) s = type_subst(s->cont, s->var, s);
    int l = 0;
    while (is_prefix(s)) {
        ++l;
        s = s->cont;
    }
    if (s->kind != TypeKind::Rec) throw DecompError("index_of expects a recursive type");
    return static_cast<int>(rt(s->cont).size()) - l + 1;
}

TypeEnvs gt_env(const TypeEnvs& envs) {
    TypeEnvs out;
    for (auto& [n, t] : envs.shared) out.shared[n] = gt_value(t);
    for (auto& [x, t] : envs.shared_vars) out.shared_vars[x] = gt_value(t);
    for (auto& [x, t] : envs.linear) out.linear[x] = gt_value(t);
    for (auto& [n, t] : envs.session) {
        if (!n.indexed()) throw DecompError("unindexed session name " + print(n));
        auto g = gt(t);
        for (size_t j = 0; j < g.size(); ++j)
            out.session[n.with_index(n.index + static_cast<int>(j))] = g[j];
    }
    return out;
}

std::set<Name> rfn(const ProcRef& p, const std::map<Name, TypeRef>& session_types) {
    std::set<Name> out;
    for (auto& n : free_names(p)) {
        auto it = session_types.find(n);
        if (it != session_types.end() && is_tr_state(it->second)) out.insert(n);
    }
    return out;
}

} // namespace minsess
