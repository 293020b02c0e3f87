#include "lts_internal.hpp"

#include "minsess/surface.hpp"

#include <algorithm>
#include <set>

namespace minsess {

namespace {

std::string values_text(const std::vector<ValueRef>& vs) {
    std::string out;
    for (size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += print(vs[i]);
    }
    return out;
}

bool bound_in(const Flat& f, const Name& n) {
    return std::any_of(f.binders.begin(), f.binders.end(),
                       [&](const auto& b) { return b.first.same_binding(n); });
}

std::vector<ValueRef> evaluated(const std::vector<ValueRef>& vs) {
    std::vector<ValueRef> out;
    out.reserve(vs.size());
    for (auto& v : vs) out.push_back(eval_value(v));
    return out;
}

// (\x~. P) n~ -> P{n~/x~}; nullptr when the application is stuck.
ProcRef beta(const ValueRef& fun, const std::vector<Name>& args) {
    if (fun->kind != ValueKind::Abs || fun->params.size() != args.size()) return nullptr;
    Subst s;
    for (size_t j = 0; j < args.size(); ++j) {
        s.names[fun->params[j].name] = args[j];
        s.names[fun->params[j].name.co()] = args[j].co();
    }
    return apply_subst(fun->body, s);
}

ProcRef receive(const ProcRef& in, const std::vector<ValueRef>& payload) {
    Subst s;
    for (size_t j = 0; j < payload.size(); ++j) s.values[in->binders[j]] = payload[j];
    return apply_subst(in->cont, s);
}

bool partners(const Name& out, const Name& in) { return in == out.co() || in == out; }

// The abstraction a decomposed branch sends back to the selecting side.
bool choice_exchange(const std::vector<ValueRef>& payload) {
    if (payload.size() != 1 || payload[0]->kind != ValueKind::Abs) return false;
    const auto& ps = payload[0]->params;
    return !ps.empty() && ps[0].name.ns == NameSpace::Aux && root_of(ps[0].name.base) == "y";
}

TauClass classify(const Name& subject, const std::vector<ValueRef>& payload) {
    if (is_propagator(subject) || choice_exchange(payload)) return TauClass::NonEssential;
    return TauClass::Essential;
}

struct Builder {
    const Flat& flat;
    std::vector<detail::KeyedStep> out;
    std::set<std::string> seen;

    void add(Label l, std::vector<ProcRef> comps, std::vector<std::pair<Name, TypeRef>> binders) {
        Flat g{std::move(binders), std::move(comps)};
        ProcRef target = struct_normalize(unflatten(g));
        std::string key = canonical_key(target);
        if (!seen.insert(detail::label_key(l) + "\n" + key).second) return;
        out.push_back({std::move(l), std::move(target), std::move(key)});
    }

    void add(Label l, std::vector<ProcRef> comps) { add(std::move(l), std::move(comps), flat.binders); }

    // Restrictions after a synchronisation on `subject`: the annotation of a
    // restricted session name moves past the prefix (or into the arm) used.
    std::vector<std::pair<Name, TypeRef>> advanced(const Name& subject, const std::string& choice) const {
        auto binders = flat.binders;
        for (auto& [n, t] : binders) {
            if (!n.same_binding(subject) || !is_session(t)) continue;
            TypeRef u = unfold(t);
            if (u->kind == TypeKind::Out || u->kind == TypeKind::In) {
                t = u->cont;
            } else if (u->kind == TypeKind::Sel || u->kind == TypeKind::Bra) {
                for (auto& [label, arm] : u->arms)
                    if (label == choice) t = arm;
            }
        }
        return binders;
    }

    std::vector<ProcRef> replaced(size_t i, ProcRef with) const {
        auto comps = flat.comps;
        comps[i] = std::move(with);
        return comps;
    }
};

} // namespace

bool is_propagator(const Name& n) { return n.ns == NameSpace::Prop || n.ns == NameSpace::RecProp; }

std::string print(const Label& l) {
    switch (l.kind) {
    case LabelKind::Tau: {
        if (!l.subject) return "tau";
        std::string s = l.tau_class == TauClass::Essential ? "tau " : "tau~ ";
        if (!l.choice.empty()) return s + print(*l.subject) + "<" + l.choice;
        return s + print(*l.subject) + "!<" + values_text(l.payload) + ">";
    }
    case LabelKind::Out: {
        std::string s;
        for (auto& m : l.extruded) s += "new " + print(m) + " ";
        return s + print(*l.subject) + "!<" + values_text(l.payload) + ">";
    }
    case LabelKind::In:
        return print(*l.subject) + "?(" + values_text(l.payload) + ")";
    case LabelKind::Sel:
        return print(*l.subject) + "<" + l.choice;
    case LabelKind::Bra:
        return print(*l.subject) + ">" + l.choice;
    }
    return "?";
}

namespace detail {

std::string label_key(const Label& l) {
    std::string k = std::to_string(static_cast<int>(l.kind)) + "|" + print(l);
    return k;
}

std::vector<KeyedStep> keyed_steps(const ProcRef& p, const InputCandidates& inputs, bool visible) {
    Flat flat = flatten(p);
    Builder b{flat, {}, {}};
    const auto& comps = flat.comps;
    for (size_t i = 0; i < comps.size(); ++i) {
        const ProcRef& c = comps[i];
        if (c->kind == ProcKind::App) {
            if (ProcRef r = beta(c->fun, c->args)) b.add(Label{}, b.replaced(i, r));
            continue;
        }
        if (c->kind == ProcKind::Out) {
            auto payload = evaluated(c->payload);
            for (size_t j = 0; j < comps.size(); ++j) {
                const ProcRef& d = comps[j];
                if (j == i || d->kind != ProcKind::In || !partners(c->subject, d->subject)) continue;
                if (d->binders.size() != payload.size()) continue;
                auto next = b.replaced(i, c->cont);
                next[j] = receive(d, payload);
                Label l;
                l.subject = c->subject;
                l.payload = payload;
                l.tau_class = classify(c->subject, payload);
                b.add(std::move(l), std::move(next), b.advanced(c->subject, ""));
            }
        }
        if (c->kind == ProcKind::Sel) {
            for (size_t j = 0; j < comps.size(); ++j) {
                const ProcRef& d = comps[j];
                if (j == i || d->kind != ProcKind::Bra || !partners(c->subject, d->subject)) continue;
                for (auto& [label, arm] : d->arms) {
                    if (label != c->label) continue;
                    auto next = b.replaced(i, c->cont);
                    next[j] = arm;
                    Label l;
                    l.subject = c->subject;
                    l.choice = label;
                    l.tau_class = is_propagator(c->subject) ? TauClass::NonEssential : TauClass::Essential;
                    b.add(std::move(l), std::move(next), b.advanced(c->subject, label));
                }
            }
        }
    }
    if (!visible) return std::move(b.out);
    for (size_t i = 0; i < comps.size(); ++i) {
        const ProcRef& c = comps[i];
        switch (c->kind) {
        case ProcKind::Out: {
            if (bound_in(flat, c->subject)) break;
            Label l;
            l.kind = LabelKind::Out;
            l.subject = c->subject;
            l.payload = evaluated(c->payload);
            std::set<Name> fn;
            for (auto& v : l.payload) {
                auto s = free_names(v);
                fn.insert(s.begin(), s.end());
            }
            std::vector<std::pair<Name, TypeRef>> kept;
            for (auto& bd : flat.binders) {
                bool used = std::any_of(fn.begin(), fn.end(), [&](const Name& n) { return n.same_binding(bd.first); });
                if (used)
                    l.extruded.push_back(bd.first);
                else
                    kept.push_back(bd);
            }
            b.add(std::move(l), b.replaced(i, c->cont), std::move(kept));
            break;
        }
        case ProcKind::In: {
            if (!inputs || bound_in(flat, c->subject)) break;
            for (auto& payload : inputs(c->subject, c->binders.size())) {
                if (payload.size() != c->binders.size()) continue;
                Label l;
                l.kind = LabelKind::In;
                l.subject = c->subject;
                l.payload = payload;
                b.add(std::move(l), b.replaced(i, receive(c, payload)));
            }
            break;
        }
        case ProcKind::Sel: {
            if (bound_in(flat, c->subject)) break;
            Label l;
            l.kind = LabelKind::Sel;
            l.subject = c->subject;
            l.choice = c->label;
            b.add(std::move(l), b.replaced(i, c->cont));
            break;
        }
        case ProcKind::Bra: {
            if (bound_in(flat, c->subject)) break;
            for (auto& [label, arm] : c->arms) {
                Label l;
                l.kind = LabelKind::Bra;
                l.subject = c->subject;
                l.choice = label;
                b.add(std::move(l), b.replaced(i, arm));
            }
            break;
        }
        default:
            break;
        }
    }
    return std::move(b.out);
}

} // namespace detail

namespace {

ProcRef prepared(const ProcRef& p) { return has_name_passing(p) ? desugar_name_passing(p) : p; }

std::vector<Step> strip(std::vector<detail::KeyedStep> ks) {
    std::vector<Step> out;
    out.reserve(ks.size());
    for (auto& k : ks) out.push_back({std::move(k.label), std::move(k.target)});
    return out;
}

} // namespace

std::vector<Step> reduce(const ProcRef& p) { return strip(detail::keyed_steps(prepared(p), {}, false)); }

std::vector<Step> lts(const ProcRef& p, const InputCandidates& inputs) {
    return strip(detail::keyed_steps(prepared(p), inputs, true));
}

std::vector<Step> run_trace(const ProcRef& p, int max_steps) {
    std::vector<Step> trace;
    ProcRef cur = prepared(p);
    for (int n = 0; n < max_steps; ++n) {
        auto steps = detail::keyed_steps(cur, {}, false);
        if (steps.empty()) break;
        auto best = std::min_element(steps.begin(), steps.end(),
                                     [](const auto& a, const auto& b) { return a.key < b.key; });
        trace.push_back({best->label, best->target});
        cur = best->target;
    }
    return trace;
}

} // namespace minsess
