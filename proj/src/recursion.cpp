#include "minsess/decomp_proc.hpp"

#include "minsess/surface.hpp"

namespace minsess {

namespace {

struct NameTypes {
    std::map<Name, TypeRef> session;
    std::map<Name, TypeRef> shared;

    TypeRef of(const Name& n) const {
        if (auto it = session.find(n); it != session.end()) return it->second;
        if (auto it = shared.find(n.key()); it != shared.end()) return it->second;
        return nullptr;
    }
};

bool mentions_recvar(const ProcRef& p) {
    if (p->kind == ProcKind::RecVar) return true;
    for (auto& v : p->payload)
        if (v->kind == ValueKind::Abs && mentions_recvar(v->body)) return true;
    if (p->fun && p->fun->kind == ValueKind::Abs && mentions_recvar(p->fun->body)) return true;
    for (const ProcRef* c : {&p->cont, &p->left, &p->right})
        if (*c && mentions_recvar(*c)) return true;
    for (auto& [l, a] : p->arms)
        if (mentions_recvar(a)) return true;
    return false;
}

ProcRef replace_recvar(const ProcRef& p, const std::string& x, const ProcRef& with) {
    switch (p->kind) {
    case ProcKind::RecVar:
        if (p->recvar != x) throw DecompError("unknown recursion variable " + p->recvar);
        return with;
    case ProcKind::Nil:
    case ProcKind::App:
        return p;
    case ProcKind::Out:
        for (auto& v : p->payload)
            if (v->kind == ValueKind::Abs && mentions_recvar(v->body))
                throw DecompError("recursion variable " + x + " under an abstraction");
        return p_out(p->subject, p->payload, replace_recvar(p->cont, x, with));
    case ProcKind::In:
        return p_in(p->subject, p->binders, replace_recvar(p->cont, x, with));
    case ProcKind::Par:
        return p_par(replace_recvar(p->left, x, with), replace_recvar(p->right, x, with));
    case ProcKind::Res:
        return p_res(p->binder, p->annot, replace_recvar(p->cont, x, with));
    case ProcKind::Sel:
        return p_sel(p->subject, p->label, replace_recvar(p->cont, x, with));
    case ProcKind::Bra: {
        ProcArms arms;
        for (auto& [l, a] : p->arms) arms.emplace_back(l, replace_recvar(a, x, with));
        return p_bra(p->subject, std::move(arms));
    }
    case ProcKind::Rec:
        throw DecompError("nested recursion is not supported");
    case ProcKind::OutNames:
    case ProcKind::InNames:
        break;
    }
    throw DecompError("unexpected form while encoding recursion");
}

class Encoder {
public:
    Encoder(const TypeEnvs& envs, RecursionStyle style) : style_(style) {
        types_.session = envs.session;
        types_.shared = envs.shared;
    }

    ProcRef proc(const ProcRef& p, NameTypes t) {
        switch (p->kind) {
        case ProcKind::Nil:
            return p;
        case ProcKind::RecVar:
            throw DecompError("recursion variable " + p->recvar + " outside its binder");
        case ProcKind::Out: {
            std::vector<ValueRef> payload;
            for (auto& v : p->payload) payload.push_back(value(v, t));
            advance(t, p->subject);
            return p_out(p->subject, std::move(payload), proc(p->cont, t));
        }
        case ProcKind::In:
            advance(t, p->subject);
            return p_in(p->subject, p->binders, proc(p->cont, t));
        case ProcKind::App:
            return p_app(value(p->fun, t), p->args);
        case ProcKind::Par:
            return p_par(proc(p->left, t), proc(p->right, t));
        case ProcKind::Res: {
            NameTypes inner = t;
            Name b = p->binder.key();
            if (p->annot && p->annot->kind == TypeKind::Chan) {
                inner.shared[b] = p->annot;
            } else if (p->annot) {
                inner.session[b] = p->annot;
                inner.session[b.co()] = dual(p->annot);
            }
            return p_res(p->binder, p->annot, proc(p->cont, inner));
        }
        case ProcKind::Sel: {
            auto it = t.session.find(p->subject);
            if (it != t.session.end()) {
                TypeRef s = unfold(it->second);
                for (auto& [l, a] : s->arms)
                    if (l == p->label) it->second = a;
            }
            return p_sel(p->subject, p->label, proc(p->cont, t));
        }
        case ProcKind::Bra: {
            ProcArms arms;
            TypeRef s;
            if (auto it = t.session.find(p->subject); it != t.session.end()) s = unfold(it->second);
            for (size_t i = 0; i < p->arms.size(); ++i) {
                NameTypes arm = t;
                if (s && s->kind == TypeKind::Bra && i < s->arms.size())
                    arm.session[p->subject] = s->arms[i].second;
                arms.emplace_back(p->arms[i].first, proc(p->arms[i].second, arm));
            }
            return p_bra(p->subject, std::move(arms));
        }
        case ProcKind::Rec:
            return encode(p, t);
        case ProcKind::OutNames:
        case ProcKind::InNames:
            return proc(desugar_name_passing(p), t);
        }
        return p;
    }

    NameTypes types_;

private:
    RecursionStyle style_;

    ValueRef value(const ValueRef& v, const NameTypes& t) {
        if (v->kind != ValueKind::Abs) return v;
        NameTypes inner = t;
        for (auto& prm : v->params) {
            if (!prm.type) continue;
            if (prm.type->kind == TypeKind::Chan)
                inner.shared[prm.name.key()] = prm.type;
            else
                inner.session[prm.name] = prm.type;
        }
        return v_abs(v->params, proc(v->body, inner));
    }

    static void advance(NameTypes& t, const Name& u) {
        auto it = t.session.find(u);
        if (it == t.session.end()) return;
        TypeRef s = unfold(it->second);
        if (is_prefix(s)) it->second = s->cont;
    }

    ProcRef encode(const ProcRef& rec, const NameTypes& t) {
        const ProcRef& body = rec->cont;
        std::set<Name> fn = free_names(body);
        std::vector<Name> names(fn.begin(), fn.end());
        std::vector<Param> params;
        std::vector<TypeRef> param_types;
        Subst rename;
        std::set<Name> taken;
        collect_all_names(body, taken);
        for (auto& n : names) {
            TypeRef ty = t.of(n);
            if (!ty) throw DecompError("free name " + print(n) + " of the recursion has no type");
            Name x = fresh_name(aux_name("x" + (n.dual ? std::string("d") : std::string()) + root_of(n.base)),
                                taken);
            taken.insert(x);
            rename.names[n] = x;
            params.push_back(Param{x, ty});
            param_types.push_back(ty);
        }
        // mu t.?(sh(C~, t));end carries the abstraction that restarts the body.
        std::vector<TypeRef> arrow = param_types;
        arrow.push_back(t_var("t"));
        TypeRef srec = t_rec("t", t_in({t_sh(arrow)}, t_end()));
        Name xs = fresh_name(aux_name("xs"), taken);
        taken.insert(xs);
        Name s = fresh_name(aux_name("s"), taken);
        std::set<std::string> vars;
        collect_all_vars(body, vars);
        std::string y = fresh_var("y", vars);

        std::vector<Name> call_args;
        for (auto& prm : params) call_args.push_back(prm.name);
        call_args.push_back(s);
        ProcRef restart = p_res(s, srec, p_par(p_app(v_var(y), call_args), p_out(s.co(), {v_var(y)}, p_nil())));
        ProcRef renamed = apply_subst(body, rename);
        params.push_back(Param{xs, srec});
        ValueRef v = v_abs(params, p_in(xs, {y}, replace_recvar(renamed, rec->recvar, restart)));

        std::vector<Name> outer_args = names;
        outer_args.push_back(s);
        ProcRef start = p_res(s, srec, p_par(p_app(v, outer_args), p_out(s.co(), {v}, p_nil())));
        if (style_ == RecursionStyle::Unrolled && mentions_recvar(body))
            return replace_recvar(body, rec->recvar, start);
        return start;
    }
};

} // namespace

bool has_recursion(const ProcRef& p) {
    if (p->kind == ProcKind::Rec || p->kind == ProcKind::RecVar) return true;
    return mentions_recvar(p) || [&] {
        for (auto& v : p->payload)
            if (v->kind == ValueKind::Abs && has_recursion(v->body)) return true;
        if (p->fun && p->fun->kind == ValueKind::Abs && has_recursion(p->fun->body)) return true;
        for (const ProcRef* c : {&p->cont, &p->left, &p->right})
            if (*c && has_recursion(*c)) return true;
        for (auto& [l, a] : p->arms)
            if (has_recursion(a)) return true;
        return false;
    }();
}

ProcRef encode_recursion(const TypeEnvs& envs, const ProcRef& p, RecursionStyle style) {
    if (!has_recursion(p)) return p;
    Encoder enc(envs, style);
    return enc.proc(p, enc.types_);
}

} // namespace minsess
