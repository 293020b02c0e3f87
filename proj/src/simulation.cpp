#include "lts_internal.hpp"

#include "minsess/decomp_types.hpp"
#include "minsess/surface.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace minsess {

std::string to_string(SimStatus s) {
    switch (s) {
    case SimStatus::Match:
        return "match";
    case SimStatus::Mismatch:
        return "mismatch";
    case SimStatus::Inconclusive:
        return "inconclusive";
    }
    return "?";
}

namespace {

bool names_correspond(const Name& a, const Name& b) {
    return a.ns == b.ns && a.dual == b.dual && root_of(a.base) == root_of(b.base) &&
           (a.index == 0 || a.index == b.index);
}

// Pairs of abstractions that line up in two payloads, or nullopt when the
// payloads do not correspond.
std::optional<std::vector<std::pair<ValueRef, ValueRef>>> align_payloads(const std::vector<ValueRef>& pa,
                                                                         const std::vector<ValueRef>& pb) {
    std::vector<std::pair<ValueRef, ValueRef>> abs;
    size_t j = 0;
    for (auto& v : pa) {
        if (v->kind == ValueKind::Chan) {
            // A name lines up with its (possibly empty) run of indexed names.
            while (j < pb.size() && pb[j]->kind == ValueKind::Chan && names_correspond(v->chan, pb[j]->chan)) ++j;
            continue;
        }
        if (j >= pb.size()) return std::nullopt;
        const ValueRef& w = pb[j++];
        if (v->kind != w->kind) return std::nullopt;
        switch (v->kind) {
        case ValueKind::Lit:
            if (v->lit != w->lit) return std::nullopt;
            break;
        case ValueKind::Expr:
            if (print(v) != print(w)) return std::nullopt;
            break;
        case ValueKind::Abs:
            abs.emplace_back(v, w);
            break;
        default:
            break;
        }
    }
    if (j != pb.size()) return std::nullopt;
    return abs;
}

struct Candidate {
    std::vector<ValueRef> source;
    std::vector<ValueRef> target;
    std::map<Name, TypeRef> new_types;
};

struct Obs {
    Label label;
    ProcRef target;
    std::string key;
};

struct Closure {
    std::vector<Obs> obs;
    bool truncated = false;
};

using Types = std::map<Name, TypeRef>;

std::string types_key(const Types& ts) {
    std::string k;
    for (auto& [n, t] : ts) k += print(n) + ":" + print(t) + ";";
    return k;
}

void advance(Types& ts, const Label& l) {
    if (!l.subject) return;
    Name n = *l.subject;
    auto it = ts.find(n);
    if (it == ts.end()) it = ts.find(n.key());
    if (it == ts.end()) return;
    if (it->second->kind == TypeKind::Chan) return;
    TypeRef s = unfold(it->second);
    if (is_prefix(s)) {
        it->second = s->cont;
    } else if (s->kind == TypeKind::Sel || s->kind == TypeKind::Bra) {
        for (auto& [lab, arm] : s->arms)
            if (lab == l.choice) it->second = arm;
    }
}

// Whether the environment can take part in a visible action under `ts`.
bool permitted(const Types& ts, const Label& l) {
    if (!l.visible()) return true;
    auto it = ts.find(*l.subject);
    if (it == ts.end()) return true;
    if (it->second->kind == TypeKind::Chan) return true;
    TypeKind k = unfold(it->second)->kind;
    switch (l.kind) {
    case LabelKind::Out:
        return k == TypeKind::Out;
    case LabelKind::In:
        return k == TypeKind::In;
    case LabelKind::Sel:
        return k == TypeKind::Sel;
    case LabelKind::Bra:
        return k == TypeKind::Bra;
    default:
        return true;
    }
}

class Game {
public:
    Game(int budget, const SimOptions& opts) : budget_(budget), opts_(opts) {}

    TraceResult play(const ProcRef& p, const ProcRef& q, const Types& types, const Types& qtypes, int depth) {
        TraceResult r = node(p, q, types, qtypes, depth);
        r.states = states_;
        return r;
    }

private:
    int budget_;
    const SimOptions& opts_;
    std::size_t states_ = 0;
    int fresh_ = 0;
    std::map<std::string, TraceResult> memo_;

    // Steps of `s` the closure looks at: essential ones become observations.
    std::vector<detail::KeyedStep> steps_of(const ProcRef& s, const InputCandidates& in, const Types* allowed) {
        ++states_;
        auto fn = free_names(s);
        std::vector<detail::KeyedStep> out;
        for (auto& st : detail::keyed_steps(s, in, true)) {
            // Both endpoints inside: the environment cannot interact.
            if (st.label.visible() && fn.count(st.label.subject->co()) && st.label.subject->co() != *st.label.subject)
                continue;
            if (allowed && !permitted(*allowed, st.label)) continue;
            out.push_back(std::move(st));
        }
        return out;
    }

    static void observe(Closure& c, std::set<std::string>& seen, const detail::KeyedStep& st) {
        if (seen.insert(detail::label_key(st.label) + "\n" + st.key).second)
            c.obs.push_back({st.label, st.target, st.key});
    }

    Closure closure(const ProcRef& x, const InputCandidates& in, const Types* allowed = nullptr) {
        return opts_.confluent_closure ? chain_closure(x, in, allowed) : full_closure(x, in, allowed);
    }

    // Administrative steps are fired in rounds: a round takes every step
    // enabled at its start, so the number of rounds is the length of the
    // longest causal chain rather than the total number of steps. Beta steps
    // are free. Observations are read off the saturated state; one seen on
    // the way but missing at the end is kept as well.
    Closure chain_closure(const ProcRef& x, const InputCandidates& in, const Types* allowed) {
        Closure all, last;
        std::set<std::string> all_seen;
        std::set<std::string> pending; // label keys left in the current round
        std::size_t visited = 0;
        ProcRef s = x;
        int rounds = 0;
        while (true) {
            if (++visited > opts_.max_closure_states) {
                all.truncated = true;
                return all;
            }
            last = Closure{};
            std::set<std::string> last_seen;
            const detail::KeyedStep *beta = nullptr, *next = nullptr;
            auto steps = steps_of(s, in, allowed);
            bool any_admin = false;
            for (auto& st : steps) {
                if (st.label.essential()) {
                    observe(all, all_seen, st);
                    observe(last, last_seen, st);
                    continue;
                }
                any_admin = true;
                if (!st.label.subject) {
                    if (!beta || st.key < beta->key) beta = &st;
                } else if (pending.count(detail::label_key(st.label)) && (!next || st.key < next->key)) {
                    next = &st;
                }
            }
            if (!any_admin) break;
            if (beta) {
                s = beta->target;
                continue;
            }
            if (!next) {
                // Start a new round with every administrative step enabled now.
                if (++rounds > budget_) {
                    all.truncated = true;
                    return all;
                }
                pending.clear();
                for (auto& st : steps)
                    if (!st.label.essential()) {
                        pending.insert(detail::label_key(st.label));
                        if (!next || st.key < next->key) next = &st;
                    }
            }
            pending.erase(detail::label_key(next->label));
            s = next->target;
        }
        std::set<std::string> final_labels;
        for (auto& o : last.obs) final_labels.insert(detail::label_key(o.label));
        for (auto& o : all.obs)
            if (!final_labels.count(detail::label_key(o.label))) last.obs.push_back(o);
        return last;
    }

    // Every interleaving of administrative steps up to budget_ communication
    // steps; beta steps do not consume budget.
    Closure full_closure(const ProcRef& x, const InputCandidates& in, const Types* allowed) {
        Closure c;
        std::map<std::string, int> cost{{canonical_key(x), 0}};
        std::set<std::string> obs_seen;
        std::deque<std::pair<ProcRef, int>> work{{x, 0}};
        while (!work.empty()) {
            auto [s, d] = work.front();
            work.pop_front();
            for (auto& st : steps_of(s, in, allowed)) {
                if (st.label.essential()) {
                    observe(c, obs_seen, st);
                    continue;
                }
                bool beta = !st.label.subject;
                int nd = d + (beta ? 0 : 1);
                if (nd > budget_ || cost.size() >= opts_.max_closure_states) {
                    c.truncated = true;
                    continue;
                }
                auto it = cost.find(st.key);
                if (it != cost.end() && it->second <= nd) continue;
                cost[st.key] = nd;
                if (beta)
                    work.emplace_front(st.target, nd);
                else
                    work.emplace_back(st.target, nd);
            }
        }
        return c;
    }

    std::map<Name, std::vector<Candidate>> candidates(const Types& types, int depth) {
        std::map<Name, std::vector<Candidate>> out;
        for (auto& [n, t] : types) {
            std::vector<TypeRef> payload;
            if (t->kind == TypeKind::Chan) {
                payload = t->items;
            } else {
                TypeRef s = unfold(t);
                if (s->kind != TypeKind::In) continue;
                payload = s->items;
            }
            Candidate c;
            bool ok = true;
            for (size_t j = 0; j < payload.size() && ok; ++j) {
                const TypeRef& u = payload[j];
                if (u->kind == TypeKind::Base) {
                    std::set<Name> avoid;
                    auto lit = minimal_characteristic_value(u, avoid);
                    c.source.push_back(lit[0]);
                    c.target.push_back(lit[0]);
                } else if (is_arrow(u)) {
                    Name trig = aux_name("t" + std::to_string(depth) + "_" + std::to_string(fresh_++));
                    std::vector<Param> params;
                    std::vector<Name> xs;
                    for (size_t k = 0; k < u->items.size(); ++k) {
                        Name x = aux_name("x" + std::to_string(k + 1));
                        params.push_back(Param{x, u->items[k]});
                        xs.push_back(x);
                    }
                    c.source.push_back(v_abs(params, p_in(trig, {"y"}, p_app(v_var("y"), xs))));
                    c.target.push_back(minimal_trigger(u, trig.with_index(1)));
                    c.new_types[trig] = t_in({u}, t_end());
                } else {
                    ok = false;
                }
            }
            if (ok) out[n].push_back(std::move(c));
        }
        return out;
    }

    // Applies the abstractions of an output to fresh characteristic names so
    // their behaviour is compared in the next round.
    bool compose(const std::vector<std::pair<ValueRef, ValueRef>>& abs, ProcRef& p, ProcRef& q,
                 Types& types, Types& qtypes) {
        for (auto& [v, w] : abs) {
            std::vector<Name> pargs, qargs;
            for (auto& prm : v->params) {
                if (!prm.type) return true;
                Name s = aux_name("w" + std::to_string(fresh_++));
                pargs.push_back(s);
                if (prm.type->kind == TypeKind::Chan) {
                    qargs.push_back(s.with_index(1));
                    types[s] = prm.type;
                    qtypes[s.with_index(1)] = gt_value(prm.type);
                    continue;
                }
                auto parts = gt(prm.type);
                for (size_t k = 0; k < parts.size(); ++k) {
                    qargs.push_back(s.with_index(static_cast<int>(k) + 1));
                    qtypes[s.with_index(static_cast<int>(k) + 1)] = parts[k];
                }
                types[s] = prm.type;
            }
            if (w->params.size() != qargs.size()) return false;
            p = p_par(p, p_app(v, pargs));
            q = p_par(q, p_app(w, qargs));
        }
        return true;
    }

    struct Pairing {
        bool ok = false;
        ProcRef p, q;
        Types types, qtypes;
    };

    Pairing pair_up(const Obs& a, const Obs& b, const Types& types, const Types& qtypes,
                    const std::map<Name, std::vector<Candidate>>& cands) {
        Pairing out;
        if (!labels_correspond(a.label, b.label)) return out;
        out.p = a.target;
        out.q = b.target;
        out.types = types;
        out.qtypes = qtypes;
        advance(out.qtypes, b.label);
        switch (a.label.kind) {
        case LabelKind::Tau:
            break;
        case LabelKind::Out: {
            auto abs = align_payloads(a.label.payload, b.label.payload);
            if (!abs) return out;
            advance(out.types, a.label);
            if (!compose(*abs, out.p, out.q, out.types, out.qtypes)) return out;
            break;
        }
        case LabelKind::In: {
            auto it = cands.find(*a.label.subject);
            if (it == cands.end()) return out;
            const Candidate* hit = nullptr;
            for (auto& c : it->second)
                if (c.source == a.label.payload && c.target == b.label.payload) hit = &c;
            if (!hit) return out;
            advance(out.types, a.label);
            for (auto& [n, t] : hit->new_types) out.types[n] = t;
            break;
        }
        case LabelKind::Sel:
        case LabelKind::Bra:
            advance(out.types, a.label);
            break;
        }
        out.ok = true;
        return out;
    }

    TraceResult node(const ProcRef& p, const ProcRef& q, const Types& types, const Types& qtypes, int depth) {
        TraceResult res;
        if (depth <= 0) return res;
        std::string key = canonical_key(p) + "\n~\n" + canonical_key(q) + "\n" + types_key(types) + "\n" +
                          types_key(qtypes) + "\n" + std::to_string(depth);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        auto cands = candidates(types, depth);
        InputCandidates in_p = [&](const Name& n, size_t) {
            std::vector<std::vector<ValueRef>> out;
            if (n.index != 0) return out;
            if (auto it = cands.find(n); it != cands.end())
                for (auto& c : it->second) out.push_back(c.source);
            return out;
        };
        InputCandidates in_q = [&](const Name& n, size_t) {
            std::vector<std::vector<ValueRef>> out;
            if (auto it = cands.find(n.with_index(0)); it != cands.end())
                for (auto& c : it->second) out.push_back(c.target);
            return out;
        };
        Closure cp = closure(p, in_p);
        Closure cq = closure(q, in_q, &qtypes);

        bool inconclusive = cp.truncated || cq.truncated;
        std::string reason = inconclusive ? "tau budget exhausted" : "";

        // One direction of the game; `source_side` tells which closure moves.
        auto challenge = [&](const Closure& mover, const Closure& answer, bool source_moves) -> bool {
            for (auto& a : mover.obs) {
                if (!source_moves && !a.label.essential()) continue;
                SimStatus best = SimStatus::Mismatch;
                TraceResult best_sub;
                const Obs* best_answer = nullptr;
                for (auto& b : answer.obs) {
                    Pairing pr = source_moves ? pair_up(a, b, types, qtypes, cands)
                                              : pair_up(b, a, types, qtypes, cands);
                    if (!pr.ok) continue;
                    TraceResult sub = node(pr.p, pr.q, pr.types, pr.qtypes, depth - 1);
                    res.depth_used = std::max(res.depth_used, sub.depth_used + 1);
                    if (sub.status == SimStatus::Match) {
                        best = SimStatus::Match;
                        break;
                    }
                    if (sub.status == SimStatus::Inconclusive || !best_answer) {
                        if (sub.status == SimStatus::Inconclusive) best = SimStatus::Inconclusive;
                        best_sub = sub;
                        best_answer = &b;
                    }
                }
                if (best == SimStatus::Match) continue;
                if (best == SimStatus::Mismatch && answer.truncated) best = SimStatus::Inconclusive;
                res.status = best;
                std::string mine = print(a.label), theirs = best_answer ? print(best_answer->label) : "";
                if (source_moves)
                    res.witness.emplace_back(mine, theirs);
                else
                    res.witness.emplace_back(theirs, mine);
                if (best_answer)
                    res.witness.insert(res.witness.end(), best_sub.witness.begin(), best_sub.witness.end());
                res.reason = best == SimStatus::Inconclusive
                                 ? (best_sub.reason.empty() ? "tau budget exhausted" : best_sub.reason)
                                 : (source_moves ? "source action not matched" : "candidate action not matched");
                return false;
            }
            return true;
        };

        if (challenge(cp, cq, true) && challenge(cq, cp, false)) {
            res.status = inconclusive ? SimStatus::Inconclusive : SimStatus::Match;
            res.reason = reason;
        }
        if (res.depth_used == 0 && !cp.obs.empty()) res.depth_used = 1;
        memo_[key] = res;
        return res;
    }
};

} // namespace

bool labels_correspond(const Label& a, const Label& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == LabelKind::Tau && (!a.essential() || !b.essential())) return false;
    if (!a.subject || !b.subject || !names_correspond(*a.subject, *b.subject)) return false;
    if (a.choice != b.choice) return false;
    if (a.kind == LabelKind::In) {
        if (a.payload.size() != b.payload.size()) return false;
        for (size_t j = 0; j < a.payload.size(); ++j)
            if (a.payload[j]->kind != b.payload[j]->kind) return false;
        return true;
    }
    return align_payloads(a.payload, b.payload).has_value();
}

TraceResult bounded_weak_sim(const ProcRef& p0, const ProcRef& q0, int depth, int tau_budget,
                             const SimOptions& opts) {
    ProcRef p = has_name_passing(p0) ? desugar_name_passing(p0) : p0;
    ProcRef q = has_name_passing(q0) ? desugar_name_passing(q0) : q0;
    Game g(tau_budget, opts);
    return g.play(struct_normalize(p), struct_normalize(q), opts.source_types, opts.candidate_types, depth);
}

} // namespace minsess
