#include "minsess/decomp_types.hpp"
#include "minsess/semantics.hpp"
#include "minsess/surface.hpp"

#include <stdexcept>

namespace minsess {

namespace {

ValueRef base_literal(BaseType b) {
    switch (b) {
    case BaseType::Int:
        return v_int(1);
    case BaseType::Bool:
        return v_bool(true);
    case BaseType::Str:
        return v_str("a");
    }
    return v_int(1);
}

std::vector<Name> indexed_run(const Name& u, int from, size_t n) {
    std::vector<Name> out;
    for (size_t j = 0; j < n; ++j) out.push_back(u.with_index(from + static_cast<int>(j)));
    return out;
}

// t_1!<<n~>>.0 with the name-passing sugar expanded.
ProcRef announce(const std::vector<Name>& names, const MinTypeList& types) {
    return desugar_name_passing(p_out_names(trigger_channel(), names, types, p_nil()));
}

TypeRef close_recursion(const TypeRef& t) {
    TypeRef s = t;
    while (s->kind == TypeKind::Rec) s = type_subst(s->cont, s->var, t_end());
    return s;
}

// Parameters of an arrow type expanded by type decomposition.
std::vector<Param> expanded_params(const TypeRef& arrow, const std::string& base) {
    std::vector<Param> params;
    MinTypeList g = gt_params(arrow->items);
    for (size_t j = 0; j < g.size(); ++j) params.push_back(Param{aux_name(base, static_cast<int>(j) + 1), g[j]});
    return params;
}

} // namespace

Name trigger_channel() { return aux_name("t", 1); }

ProcRef minimal_characteristic(const TypeRef& t0, const Name& u, int i) {
    TypeRef t = close_recursion(t0);
    std::set<Name> avoid{u};
    switch (t->kind) {
    case TypeKind::End:
        return p_nil();
    case TypeKind::In: {
        MinTypeList rest = gt(t->cont);
        std::vector<std::string> xs;
        std::vector<ProcRef> comps{announce(indexed_run(u, i + 1, rest.size()), rest)};
        for (size_t j = 0; j < t->items.size(); ++j) {
            std::string x = "x" + std::to_string(j + 1);
            xs.push_back(x);
            if (is_arrow(t->items[j])) comps.push_back(minimal_characteristic_app(t->items[j], x));
        }
        return p_in(u.with_index(i), xs, p_par(comps));
    }
    case TypeKind::Out: {
        MinTypeList rest = gt(t->cont);
        std::vector<ValueRef> payload;
        for (auto& l : t->items) {
            auto vs = minimal_characteristic_value(l, avoid);
            payload.insert(payload.end(), vs.begin(), vs.end());
        }
        return p_out(u.with_index(i), payload, announce(indexed_run(u, i + 1, rest.size()), rest));
    }
    case TypeKind::Chan: {
        auto payload = minimal_characteristic_value(t->items[0], avoid);
        Name u1 = u.with_index(1);
        return p_out(u1, payload, announce({u1}, {gt_value(t)}));
    }
    default:
        throw std::invalid_argument("no characteristic process for " + print(t));
    }
}

ProcRef minimal_characteristic_app(const TypeRef& arrow, const std::string& x) {
    if (!is_arrow(arrow)) throw std::invalid_argument(print(arrow) + " is not an arrow type");
    std::set<Name> avoid;
    std::vector<Name> args;
    for (auto& c : arrow->items)
        for (auto& v : minimal_characteristic_value(c, avoid)) args.push_back(v->chan);
    return p_app(v_var(x), args);
}

std::vector<ValueRef> minimal_characteristic_value(const TypeRef& t, std::set<Name>& avoid) {
    switch (t->kind) {
    case TypeKind::Base:
        return {base_literal(t->base)};
    case TypeKind::Chan: {
        Name a = fresh_name(aux_name("a", 1), avoid);
        avoid.insert(a);
        return {v_chan(a)};
    }
    case TypeKind::LinArrow:
    case TypeKind::ShArrow: {
        // \x~. <C>_{x,1} on the decomposed parameters.
        std::vector<Param> params;
        std::vector<ProcRef> comps;
        for (size_t j = 0; j < t->items.size(); ++j) {
            const TypeRef& c = t->items[j];
            Name x = aux_name("x" + std::to_string(j + 1));
            MinTypeList g = gt_chan(c);
            for (size_t k = 0; k < g.size(); ++k) params.push_back(Param{x.with_index(static_cast<int>(k) + 1), g[k]});
            if (!g.empty()) comps.push_back(minimal_characteristic(c, x, 1));
        }
        return {v_abs(std::move(params), p_par(comps))};
    }
    default:
        break;
    }
    if (is_session(t)) {
        std::vector<ValueRef> out;
        Name s = fresh_name(aux_name("s", 1), avoid);
        for (size_t j = 0; j < gt(t).size(); ++j) {
            Name sj = s.with_index(static_cast<int>(j) + 1);
            avoid.insert(sj);
            out.push_back(v_chan(sj));
        }
        return out;
    }
    throw std::invalid_argument("no characteristic value for " + print(t));
}

ValueRef minimal_trigger(const TypeRef& arrow, const Name& trig) {
    if (!is_arrow(arrow)) throw std::invalid_argument(print(arrow) + " is not an arrow type");
    auto params = expanded_params(arrow, "x");
    std::vector<Name> xs;
    for (auto& p : params) xs.push_back(p.name);
    return v_abs(std::move(params), p_in(trig, {"y"}, p_app(v_var("y"), xs)));
}

ProcRef trigger_process(const Name& trig, const ValueRef& v) {
    if (v->kind != ValueKind::Abs) throw std::invalid_argument("trigger processes need an abstraction");
    // t?((x~)).(V x~) with the names received through the sugar.
    std::vector<std::string> binders;
    std::vector<TypeRef> types;
    std::vector<Name> args;
    for (size_t j = 0; j < v->params.size(); ++j) {
        std::string x = "x" + std::to_string(j + 1);
        binders.push_back(x);
        types.push_back(v->params[j].type);
        args.push_back(user_name(x));
    }
    return desugar_name_passing(p_in_names(trig, binders, types, p_app(v, args)));
}

} // namespace minsess
