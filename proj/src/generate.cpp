#include "minsess/generate.hpp"

#include "minsess/semantics.hpp"
#include "minsess/typing.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace minsess {

namespace {

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& one_of(Rng& rng, const std::vector<T>& xs) {
    return xs[static_cast<size_t>(pick(rng, 0, static_cast<int>(xs.size()) - 1))];
}

const std::vector<std::string> kWords{"a", "hi", "ok", "abc"};

BaseType random_base(Rng& rng) { return one_of(rng, std::vector<BaseType>{BaseType::Int, BaseType::Bool, BaseType::Str}); }

ValueRef literal_of(Rng& rng, BaseType b) {
    switch (b) {
    case BaseType::Int:
        return v_int(pick(rng, 0, 9));
    case BaseType::Bool:
        return v_bool(chance(rng, 0.5));
    case BaseType::Str:
        return v_str(one_of(rng, kWords));
    }
    return v_int(0);
}

// ---------------------------------------------------------------------------
// Program generator
// ---------------------------------------------------------------------------

// One exchange of a session, seen from the endpoint without a tilde.
struct Exchange {
    bool sends;
    TypeRef payload;
};

struct Session {
    Name name;
    std::vector<Exchange> exchanges;
    bool free = false;
    int thread_a = 0;
    int thread_b = 0;

    TypeRef type() const {
        TypeRef t = t_end();
        for (auto it = exchanges.rbegin(); it != exchanges.rend(); ++it)
            t = it->sends ? t_out({it->payload}, t) : t_in({it->payload}, t);
        return t;
    }
};

struct Action {
    Name subject;
    bool output;
    TypeRef payload;
};

// Sequential implementation of a list of actions. Base variables received
// earlier are reused in later output expressions.
class ThreadBuilder {
public:
    ThreadBuilder(Rng& rng, int& fresh) : rng_(rng), fresh_(fresh) {}

    ProcRef build(const std::vector<Action>& actions) {
        struct Built {
            const Action* act;
            ValueRef value;
            std::string binder;
        };
        std::vector<Built> steps;
        for (auto& a : actions) {
            Built b{&a, nullptr, {}};
            if (a.output) {
                b.value = value_of(a.payload);
            } else {
                b.binder = "x" + std::to_string(++fresh_);
                if (a.payload->kind == TypeKind::Base) scope_.emplace_back(b.binder, a.payload->base);
            }
            steps.push_back(std::move(b));
        }
        ProcRef cont = p_nil();
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
            const Action& a = *it->act;
            if (a.output) {
                cont = p_out(a.subject, {it->value}, cont);
            } else if (is_arrow(a.payload)) {
                // Run the received abstraction against a fresh session.
                Name t = user_name("t" + std::to_string(++fresh_));
                TypeRef param = a.payload->items[0];
                ProcRef run = p_res(t, param, p_par(p_app(v_var(it->binder), {t}), serve(t.co(), dual(param))));
                cont = p_in(a.subject, {it->binder}, p_par(cont, run));
            } else {
                cont = p_in(a.subject, {it->binder}, cont);
            }
        }
        return cont;
    }

private:
    Rng& rng_;
    int& fresh_;
    std::vector<std::pair<std::string, BaseType>> scope_;

    std::vector<std::string> vars_of(BaseType b) const {
        std::vector<std::string> out;
        for (auto& [x, t] : scope_)
            if (t == b) out.push_back(x);
        return out;
    }

    ValueRef int_atom() {
        auto xs = vars_of(BaseType::Int);
        if (!xs.empty() && chance(rng_, 0.6)) return v_var(one_of(rng_, xs));
        return v_int(pick(rng_, 0, 9));
    }

    ValueRef base_value(BaseType b) {
        auto xs = vars_of(b);
        switch (b) {
        case BaseType::Int: {
            auto strs = vars_of(BaseType::Str);
            int k = pick(rng_, 0, 3);
            if (k == 1 && !xs.empty()) return v_expr(Op::Add, {v_var(one_of(rng_, xs)), v_int(pick(rng_, 1, 9))});
            if (k == 2 && !strs.empty()) return v_expr(Op::Len, {v_var(one_of(rng_, strs))});
            if (k == 3 && !xs.empty()) return v_expr(Op::Neg, {v_var(one_of(rng_, xs))});
            return int_atom();
        }
        case BaseType::Bool:
            if (!vars_of(BaseType::Int).empty() && chance(rng_, 0.5)) return v_expr(Op::Eq, {int_atom(), int_atom()});
            if (!xs.empty() && chance(rng_, 0.5)) return v_var(one_of(rng_, xs));
            return v_bool(chance(rng_, 0.5));
        case BaseType::Str:
            if (!xs.empty() && chance(rng_, 0.5)) return v_var(one_of(rng_, xs));
            return v_str(one_of(rng_, kWords));
        }
        return v_int(0);
    }

    ValueRef value_of(const TypeRef& u) {
        if (u->kind == TypeKind::Base) return base_value(u->base);
        // lin(S)->o: an abstraction that carries out S on its parameter.
        Name z = user_name("z" + std::to_string(++fresh_));
        TypeRef s = u->items[0];
        return v_abs({Param{z, s}}, serve(z, s));
    }

    // Closed implementation of a finite base-typed session on `n`.
    ProcRef serve(const Name& n, const TypeRef& s) {
        std::vector<Action> acts;
        for (TypeRef cur = s; is_prefix(cur); cur = cur->cont)
            acts.push_back({n, cur->kind == TypeKind::Out, cur->items[0]});
        ThreadBuilder inner(rng_, fresh_);
        return inner.build(acts);
    }
};

TypeRef random_payload(Rng& rng, bool higher_order) {
    if (higher_order && chance(rng, 0.15)) {
        TypeRef s = t_end();
        for (int k = pick(rng, 1, 2); k > 0; --k)
            s = chance(rng, 0.5) ? t_in({t_base(random_base(rng))}, s) : t_out({t_base(random_base(rng))}, s);
        return t_lin({s});
    }
    return t_base(random_base(rng));
}

// ---------------------------------------------------------------------------
// Mutations
// ---------------------------------------------------------------------------

using Visit = std::function<ProcRef(const ProcRef&)>;

ProcRef rewrite(const ProcRef& p, const Visit& at);

ValueRef rewrite_value(const ValueRef& v, const Visit& at) {
    if (v->kind != ValueKind::Abs) return v;
    ProcRef body = rewrite(v->body, at);
    return body == v->body ? v : v_abs(v->params, body);
}

// Preorder rewrite: `at` may replace a node, otherwise its children are
// visited.
ProcRef rewrite(const ProcRef& p, const Visit& at) {
    if (ProcRef r = at(p)) return r;
    auto n = std::make_shared<Proc>(*p);
    bool changed = false;
    for (auto& v : n->payload) {
        ValueRef w = rewrite_value(v, at);
        changed |= w != v;
        v = w;
    }
    if (n->fun) {
        ValueRef w = rewrite_value(n->fun, at);
        changed |= w != n->fun;
        n->fun = w;
    }
    for (ProcRef* c : {&n->cont, &n->left, &n->right}) {
        if (!*c) continue;
        ProcRef w = rewrite(*c, at);
        changed |= w != *c;
        *c = w;
    }
    for (auto& [l, a] : n->arms) {
        ProcRef w = rewrite(a, at);
        changed |= w != a;
        a = w;
    }
    return changed ? ProcRef(n) : p;
}

bool is_action(const ProcRef& p) {
    return p->kind == ProcKind::Out || p->kind == ProcKind::In || p->kind == ProcKind::Sel ||
           p->kind == ProcKind::Bra;
}

ValueRef mutate_literal(const ValueRef& v) {
    return std::visit(
        [](const auto& x) -> ValueRef {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>)
                return v_int(x + 1);
            else if constexpr (std::is_same_v<T, bool>)
                return v_bool(!x);
            else
                return v_str(x + "z");
        },
        v->lit);
}

void collect_prop_inputs(const ProcRef& p, std::map<Name, ProcRef>& out) {
    rewrite(p, [&](const ProcRef& q) -> ProcRef {
        if (q->kind == ProcKind::In && is_propagator(q->subject)) out[q->subject] = q->cont;
        return nullptr;
    });
}

std::string head_of(const ProcRef& p) {
    std::string s = print(p);
    auto dot = s.find(").");
    auto gt = s.find(">.");
    size_t cut = std::min(dot, gt);
    return cut == std::string::npos ? s.substr(0, 60) : s.substr(0, cut + 1);
}

} // namespace

SourceFile random_program(Rng& rng, const ProgramShape& shape) {
    int fresh = 0;
    std::vector<Session> sessions;
    int n = pick(rng, 1, std::max(1, shape.sessions));
    int threads_a = pick(rng, 1, 2), threads_b = pick(rng, 1, 2);
    for (int i = 0; i < n; ++i) {
        Session s;
        s.name = user_name(std::string(1, static_cast<char>('a' + i)));
        for (int k = pick(rng, 1, std::max(1, shape.max_prefixes)); k > 0; --k)
            s.exchanges.push_back({chance(rng, 0.5), random_payload(rng, shape.higher_order)});
        s.free = shape.free_sessions && chance(rng, 0.35);
        s.thread_a = pick(rng, 0, threads_a - 1);
        s.thread_b = pick(rng, 0, threads_b - 1);
        sessions.push_back(std::move(s));
    }
    // A global schedule: a random interleaving of every session's exchanges.
    std::vector<int> order;
    for (int i = 0; i < n; ++i)
        for (size_t k = 0; k < sessions[static_cast<size_t>(i)].exchanges.size(); ++k) order.push_back(i);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<Action>> side_a(static_cast<size_t>(threads_a)), side_b(static_cast<size_t>(threads_b));
    std::vector<size_t> next(static_cast<size_t>(n), 0);
    for (int i : order) {
        Session& s = sessions[static_cast<size_t>(i)];
        const Exchange& e = s.exchanges[next[static_cast<size_t>(i)]++];
        side_a[static_cast<size_t>(s.thread_a)].push_back({s.name, e.sends, e.payload});
        if (!s.free) side_b[static_cast<size_t>(s.thread_b)].push_back({s.name.co(), !e.sends, e.payload});
    }
    std::vector<ProcRef> threads;
    for (auto* side : {&side_a, &side_b})
        for (auto& acts : *side)
            if (!acts.empty()) threads.push_back(ThreadBuilder(rng, fresh).build(acts));

    SourceFile f;
    ProcRef body = p_par(threads);
    for (auto it = sessions.rbegin(); it != sessions.rend(); ++it) {
        if (it->free)
            f.free.insert(f.free.begin(), {it->name, it->type()});
        else
            body = p_res(it->name, it->type(), body);
    }
    f.entry = body;
    return f;
}

ValueRef random_literal(Rng& rng) { return literal_of(rng, random_base(rng)); }

TypeRef random_value_type(Rng& rng, int depth) {
    int k = pick(rng, 0, depth > 0 ? 9 : 5);
    if (k <= 5) return t_base(random_base(rng));
    if (k == 9) return t_chan(t_base(random_base(rng)));
    TypeRef s = random_session_type(rng, depth - 1, false);
    return k <= 7 ? t_lin({s}) : t_sh({s});
}

TypeRef random_session_type(Rng& rng, int depth, bool choice) {
    if (depth <= 0) return t_end();
    int k = pick(rng, 0, 9);
    if (k == 0) return t_end();
    if (k == 1) {
        // Tail recursion: mu t. p1; ...; pn; t
        std::string var = "t" + std::to_string(depth);
        TypeRef body = t_var(var);
        for (int j = pick(rng, 1, 2); j > 0; --j) {
            auto u = random_value_type(rng, depth - 1);
            body = chance(rng, 0.5) ? t_out({u}, body) : t_in({u}, body);
        }
        return t_rec(var, body);
    }
    if (k == 2 && choice) {
        TypeArms arms;
        int n = pick(rng, 1, 2);
        for (int j = 1; j <= n; ++j) arms.emplace_back("l" + std::to_string(j), random_session_type(rng, depth - 1, choice));
        return chance(rng, 0.5) ? t_sel(std::move(arms)) : t_bra(std::move(arms));
    }
    auto u = random_value_type(rng, depth - 1);
    TypeRef cont = random_session_type(rng, depth - 1, choice);
    return chance(rng, 0.5) ? t_out({u}, cont) : t_in({u}, cont);
}

ProcRef random_term(Rng& rng, int depth) {
    auto name = [&]() {
        int ns = pick(rng, 0, 9);
        Name n = user_name(one_of(rng, std::vector<std::string>{"a", "b", "k", "u"}), chance(rng, 0.5) ? pick(rng, 1, 3) : 0,
                           chance(rng, 0.4));
        if (ns == 7) return prop_name("c", pick(rng, 1, 4), n.dual);
        if (ns == 8) return aux_name("y", n.index, n.dual);
        if (ns == 9) return rec_prop_name(n);
        return n;
    };
    auto var = [&]() { return one_of(rng, std::vector<std::string>{"x", "y", "z"}); };
    std::function<ValueRef(int)> value = [&](int d) -> ValueRef {
        switch (pick(rng, 0, d > 0 ? 6 : 4)) {
        case 0:
            return v_var(var());
        case 1:
            return random_literal(rng);
        case 2:
            return v_expr(Op::Add, {v_var(var()), v_int(pick(rng, 0, 9))});
        case 3:
            return v_expr(one_of(rng, std::vector<Op>{Op::Neg, Op::Len}), {v_var(var())});
        case 4:
            return v_chan(name());
        default: {
            std::vector<Param> params;
            for (int j = pick(rng, 0, 2); j > 0; --j)
                params.push_back(Param{user_name("p" + std::to_string(j)), random_session_type(rng, 2)});
            return v_abs(params, random_term(rng, d - 1));
        }
        }
    };
    if (depth <= 0) return p_nil();
    switch (pick(rng, 0, 11)) {
    case 0:
        return p_nil();
    case 1:
    case 2: {
        std::vector<ValueRef> payload;
        for (int j = pick(rng, 0, 2); j > 0; --j) payload.push_back(value(depth - 1));
        return p_out(name(), payload, random_term(rng, depth - 1));
    }
    case 3: {
        std::vector<std::string> bs;
        for (int j = pick(rng, 0, 2); j > 0; --j) bs.push_back(var() + std::to_string(j));
        return p_in(name(), bs, random_term(rng, depth - 1));
    }
    case 4:
        return p_par(random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 5:
        return p_res(user_name("n"), chance(rng, 0.2) ? t_chan(t_int()) : random_session_type(rng, 2),
                     random_term(rng, depth - 1));
    case 6:
        return p_sel(name(), "l" + std::to_string(pick(rng, 1, 2)), random_term(rng, depth - 1));
    case 7: {
        ProcArms arms;
        for (int j = pick(rng, 1, 2); j > 0; --j) arms.emplace_back("l" + std::to_string(j), random_term(rng, depth - 1));
        return p_bra(name(), arms);
    }
    case 8: {
        std::vector<Name> args;
        for (int j = pick(rng, 0, 2); j > 0; --j) args.push_back(name());
        if (chance(rng, 0.5)) return p_app(v_var(var()), args);
        std::vector<Param> params;
        for (size_t j = 0; j < args.size(); ++j)
            params.push_back(Param{user_name("p" + std::to_string(j + 1)), random_session_type(rng, 2)});
        return p_app(v_abs(params, random_term(rng, depth - 1)), args);
    }
    case 9:
        return p_out_names(name(), {name()}, {random_session_type(rng, 1, false)}, random_term(rng, depth - 1));
    case 10:
        return p_in_names(name(), {var()}, {random_session_type(rng, 1, false)}, random_term(rng, depth - 1));
    default:
        return p_rec("X", p_out(name(), {}, chance(rng, 0.5) ? p_recvar("X") : random_term(rng, depth - 1)));
    }
}

std::string to_string(MutationKind k) {
    switch (k) {
    case MutationKind::Payload:
        return "payload";
    case MutationKind::DropPropagator:
        return "drop-propagator";
    case MutationKind::PermuteIndex:
        return "permute-index";
    }
    return "?";
}

std::set<Name> live_subjects(const ProcRef& p0, const std::map<Name, TypeRef>& types, int depth,
                             std::size_t max_states) {
    ProcRef p = struct_normalize(has_name_passing(p0) ? desugar_name_passing(p0) : p0);
    InputCandidates inputs = [&](const Name& n, size_t) {
        std::vector<std::vector<ValueRef>> out;
        auto it = types.find(n);
        if (it == types.end() || it->second->kind == TypeKind::Chan) return out;
        TypeRef s = unfold(it->second);
        if (s->kind != TypeKind::In) return out;
        std::vector<ValueRef> tuple;
        for (auto& u : s->items) {
            if (u->kind != TypeKind::Base) return out;
            std::set<Name> avoid;
            tuple.push_back(minimal_characteristic_value(u, avoid)[0]);
        }
        out.push_back(tuple);
        return out;
    };
    std::set<Name> live;
    std::set<std::string> seen;
    std::deque<std::pair<ProcRef, int>> work{{p, 0}};
    seen.insert(canonical_key(p) + "#0");
    while (!work.empty() && seen.size() < max_states) {
        auto [s, c] = work.front();
        work.pop_front();
        auto fn = free_names(s);
        for (auto& st : lts(s, inputs)) {
            const Label& l = st.label;
            if (l.visible() && fn.count(l.subject->co()) && l.subject->co() != *l.subject) continue;
            int nc = c + (l.essential() ? 1 : 0);
            if (nc > depth) continue;
            if (l.subject) {
                live.insert(*l.subject);
                if (!l.visible()) live.insert(l.subject->co());
            }
            if (seen.insert(canonical_key(st.target) + "#" + std::to_string(nc)).second)
                work.emplace_back(st.target, nc);
        }
    }
    return live;
}

std::vector<Mutant> mutants(const ProcRef& p, MutationKind kind, const std::set<Name>& live) {
    std::map<Name, ProcRef> prop_inputs;
    collect_prop_inputs(p, prop_inputs);
    std::set<Name> all;
    collect_all_names(p, all);

    // Replacement for an eligible node, or null.
    auto mutate = [&](const ProcRef& q) -> ProcRef {
        if (!is_action(q)) return nullptr;
        const Name& u = q->subject;
        switch (kind) {
        case MutationKind::Payload: {
            if (q->kind != ProcKind::Out || u.ns != NameSpace::User || !live.count(u)) return nullptr;
            auto payload = q->payload;
            for (auto& v : payload)
                if (v->kind == ValueKind::Lit) {
                    v = mutate_literal(v);
                    return p_out(u, payload, q->cont);
                }
            return nullptr;
        }
        case MutationKind::DropPropagator: {
            if (q->kind != ProcKind::Out || !is_propagator(u) || !live.count(u)) return nullptr;
            auto it = prop_inputs.find(u.co());
            if (it == prop_inputs.end()) return nullptr;
            const ProcRef& trio = it->second;
            if (!is_action(trio) || trio->subject.ns != NameSpace::User || !live.count(trio->subject)) return nullptr;
            return q->cont;
        }
        case MutationKind::PermuteIndex: {
            if (u.ns != NameSpace::User || !u.indexed() || !live.count(u)) return nullptr;
            std::vector<int> others;
            for (auto& n : all)
                if (n.ns == u.ns && n.base == u.base && n.dual == u.dual && n.index > 0 && n.index != u.index)
                    others.push_back(n.index);
            if (others.empty()) return nullptr;
            auto above = std::find_if(others.begin(), others.end(), [&](int i) { return i > u.index; });
            auto n = std::make_shared<Proc>(*q);
            n->subject = u.with_index(above != others.end() ? *above : others.front());
            return n;
        }
        }
        return nullptr;
    };

    int count = 0;
    rewrite(p, [&](const ProcRef& q) -> ProcRef {
        if (mutate(q)) ++count;
        return nullptr;
    });
    std::vector<Mutant> out;
    for (int target = 0; target < count; ++target) {
        int seen = 0;
        std::string site;
        ProcRef m = rewrite(p, [&](const ProcRef& q) -> ProcRef {
            ProcRef r = mutate(q);
            if (!r) return nullptr;
            if (seen++ != target) return nullptr;
            site = head_of(q);
            return r;
        });
        out.push_back({kind, m, site});
    }
    return out;
}

} // namespace minsess
