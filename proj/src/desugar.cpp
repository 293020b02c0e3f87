#include "minsess/surface.hpp"

namespace minsess {

namespace {

std::vector<TypeRef> np_types(const std::vector<TypeRef>& ts) {
    std::vector<TypeRef> out;
    for (auto& t : ts) out.push_back(desugar_np_type(t));
    return out;
}

// Type of the channel the receiver hands over: ?(lin(C~)->o);end.
TypeRef handshake_type(const std::vector<TypeRef>& payload) {
    return t_in({t_lin(np_types(payload))}, t_end());
}

} // namespace

TypeRef desugar_np_type(const TypeRef& t) {
    switch (t->kind) {
    case TypeKind::End:
    case TypeKind::Var:
    case TypeKind::Base:
        return t;
    case TypeKind::NamePass:
        return t_lin({handshake_type(t->items)});
    case TypeKind::Out:
        return t_out(np_types(t->items), desugar_np_type(t->cont));
    case TypeKind::In:
        return t_in(np_types(t->items), desugar_np_type(t->cont));
    case TypeKind::Rec:
        return t_rec(t->var, desugar_np_type(t->cont));
    case TypeKind::Sel:
    case TypeKind::Bra: {
        TypeArms arms;
        for (auto& [l, a] : t->arms) arms.emplace_back(l, desugar_np_type(a));
        return t->kind == TypeKind::Sel ? t_sel(std::move(arms)) : t_bra(std::move(arms));
    }
    case TypeKind::LinArrow:
        return t_lin(np_types(t->items));
    case TypeKind::ShArrow:
        return t_sh(np_types(t->items));
    case TypeKind::Chan:
        return t_chan(desugar_np_type(t->items[0]));
    }
    return t;
}

ValueRef desugar_name_passing(const ValueRef& v) {
    if (v->kind == ValueKind::Abs) {
        std::vector<Param> params = v->params;
        for (auto& p : params) p.type = desugar_np_type(p.type);
        return v_abs(std::move(params), desugar_name_passing(v->body));
    }
    return v;
}

ProcRef desugar_name_passing(const ProcRef& p) {
    switch (p->kind) {
    case ProcKind::Nil:
    case ProcKind::RecVar:
        return p;
    case ProcKind::Out: {
        std::vector<ValueRef> pl;
        for (auto& v : p->payload) pl.push_back(desugar_name_passing(v));
        return p_out(p->subject, std::move(pl), desugar_name_passing(p->cont));
    }
    case ProcKind::In:
        return p_in(p->subject, p->binders, desugar_name_passing(p->cont));
    case ProcKind::App:
        return p_app(desugar_name_passing(p->fun), p->args);
    case ProcKind::Par:
        return p_par(desugar_name_passing(p->left), desugar_name_passing(p->right));
    case ProcKind::Res:
        return p_res(p->binder, desugar_np_type(p->annot), desugar_name_passing(p->cont));
    case ProcKind::Sel:
        return p_sel(p->subject, p->label, desugar_name_passing(p->cont));
    case ProcKind::Bra: {
        ProcArms arms;
        for (auto& [l, a] : p->arms) arms.emplace_back(l, desugar_name_passing(a));
        return p_bra(p->subject, std::move(arms));
    }
    case ProcKind::Rec:
        return p_rec(p->recvar, desugar_name_passing(p->cont));
    case ProcKind::OutNames: {
        // t!<\z. z?(x).(x m~)>.P
        std::set<Name> avoid(p->args.begin(), p->args.end());
        Name z = user_name("z");
        if (avoid.count(z) || avoid.count(z.co())) z = fresh_name(z, avoid);
        ProcRef body = p_in(z, {"x"}, p_app(v_var("x"), p->args));
        ValueRef packed = v_abs({Param{z, handshake_type(p->types)}}, body);
        return p_out(p->subject, {packed}, desugar_name_passing(p->cont));
    }
    case ProcKind::InNames: {
        // t?(y).new z (y z | ~z!<\x~. Q>.0)
        ProcRef q = desugar_name_passing(p->cont);
        std::set<Name> avoid = free_names(q);
        for (auto& b : p->binders) avoid.insert(user_name(b));
        Name z = user_name("z");
        bool clash = false;
        for (auto& a : avoid)
            if (a.same_binding(z)) clash = true;
        if (clash) z = fresh_name(z, avoid);
        std::string y = "y";
        auto fv = free_vars(q);
        if (fv.count(y)) y = fresh_var(y, fv);
        std::vector<Param> params;
        for (size_t i = 0; i < p->binders.size(); ++i)
            params.push_back(Param{user_name(p->binders[i]), desugar_np_type(p->types[i])});
        ProcRef inner = p_par(p_app(v_var(y), {z}),
                              p_out(z.co(), {v_abs(std::move(params), q)}, p_nil()));
        return p_in(p->subject, {y}, p_res(z, handshake_type(p->types), inner));
    }
    }
    return p;
}

bool has_name_passing(const ProcRef& p) {
    if (p->kind == ProcKind::OutNames || p->kind == ProcKind::InNames) return true;
    for (auto& v : p->payload)
        if (v->kind == ValueKind::Abs && has_name_passing(v->body)) return true;
    if (p->fun && p->fun->kind == ValueKind::Abs && has_name_passing(p->fun->body)) return true;
    for (const ProcRef* c : {&p->cont, &p->left, &p->right})
        if (*c && has_name_passing(*c)) return true;
    for (auto& [l, a] : p->arms)
        if (has_name_passing(a)) return true;
    return false;
}

} // namespace minsess
