#include "support.hpp"

#include "minsess/decomp_types.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace minsess::testing {

namespace fs = std::filesystem;

std::vector<std::string> corpus_files() {
    std::vector<std::string> out;
    for (auto& e : fs::directory_iterator(MINSESS_CORPUS_DIR))
        if (e.path().extension() == ".ho") out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::string corpus_path(const std::string& file) { return (fs::path(MINSESS_CORPUS_DIR) / file).string(); }
std::string golden_path(const std::string& file) { return (fs::path(MINSESS_GOLDEN_DIR) / file).string(); }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Program load_fixture(const std::string& file) { return load_program_file(corpus_path(file)); }

namespace {

bool mentions_tr(const TypeRef& t) {
    if (!t) return false;
    if (is_session(t) && is_tail_recursive(t)) return true;
    if (std::any_of(t->items.begin(), t->items.end(), mentions_tr)) return true;
    if (mentions_tr(t->cont)) return true;
    return std::any_of(t->arms.begin(), t->arms.end(), [](auto& a) { return mentions_tr(a.second); });
}

bool annotations_mention_tr(const ProcRef& p) {
    if (!p) return false;
    if (p->kind == ProcKind::Res && mentions_tr(p->annot)) return true;
    for (auto& v : p->payload)
        if (v->kind == ValueKind::Abs) {
            for (auto& prm : v->params)
                if (mentions_tr(prm.type)) return true;
            if (annotations_mention_tr(v->body)) return true;
        }
    for (auto& a : p->arms)
        if (annotations_mention_tr(a.second)) return true;
    return annotations_mention_tr(p->cont) || annotations_mention_tr(p->left) ||
           annotations_mention_tr(p->right);
}

} // namespace

bool uses_tail_recursion(const Program& prog) {
    for (auto& [n, t] : prog.envs.session)
        if (mentions_tr(t)) return true;
    return annotations_mention_tr(prog.source);
}

TraceResult equiv(const Program& prog, const DecompOutcome& d, int depth, int budget) {
    return bounded_weak_sim(prog.ho, d.term, depth, budget, equiv_options(prog, d));
}

namespace {

void fail(PropertyResult& r, const std::string& what) {
    if (r.failures++ == 0) r.counterexample = what;
}

Program generated(Rng& rng) {
    ProgramShape shape;
    shape.sessions = 3;
    shape.max_prefixes = 3;
    return load_program(print_file(random_program(rng, shape)));
}

} // namespace

PropertyResult subject_reduction(int terms, std::uint64_t seed) {
    PropertyResult r;
    Rng rng(seed);
    for (int i = 0; i < terms; ++i) {
        Program prog = generated(rng);
        TypeEnvs envs = prog.envs;
        ProcRef term = prog.ho;
        if (i % 2 == 1) {
            DecompOutcome d = decompose_program(prog, Optimization::None);
            envs = d.envs;
            term = d.term;
        }
        if (!typecheck(envs, term).ok) {
            fail(r, "generated term is ill-typed: " + print(term));
            continue;
        }
        ++r.checked;
        for (auto& st : reduce(term)) {
            bool ok = typecheck(envs, st.target).ok;
            for (auto& delta : env_reduce(envs.session)) {
                if (ok) break;
                TypeEnvs e = envs;
                e.session = delta;
                ok = typecheck(e, st.target).ok;
            }
            if (!ok) fail(r, print(term) + "\n  --" + print(st.label) + "-->\n" + print(st.target));
        }
    }
    return r;
}

PropertyResult dual_involution(int types, std::uint64_t seed) {
    PropertyResult r;
    Rng rng(seed);
    for (int i = 0; i < types; ++i) {
        TypeRef s = random_session_type(rng, 4);
        TypeRef d = dual(s);
        ++r.checked;
        if (!type_same(dual(d), s) || !is_dual(s, d) || !is_dual(d, s))
            fail(r, print(s) + " / dual " + print(d) + " / dual of dual " + print(dual(d)));
    }
    return r;
}

namespace {

// Closed value of a value type: literals for base types and, for arrows
// over finite first-order sessions, an abstraction that plays the session.
// Null when no such value is built.
class ValueBuilder {
public:
    ValueRef of(const TypeRef& u) {
        switch (u->kind) {
        case TypeKind::Base:
            switch (u->base) {
            case BaseType::Int:
                return v_int(7);
            case BaseType::Bool:
                return v_bool(true);
            case BaseType::Str:
                return v_str("v");
            }
            return nullptr;
        case TypeKind::LinArrow:
        case TypeKind::ShArrow: {
            std::vector<Param> params;
            std::vector<ProcRef> parts;
            for (auto& c : u->items) {
                if (!is_session(c)) return nullptr;
                Name z = user_name("vz" + std::to_string(fresh_++));
                ProcRef body = play(z, c);
                if (!body) return nullptr;
                params.push_back({z, c});
                parts.push_back(body);
            }
            return v_abs(params, p_par(parts));
        }
        default:
            return nullptr;
        }
    }

private:
    ProcRef play(const Name& z, const TypeRef& s) {
        switch (s->kind) {
        case TypeKind::End:
            return p_nil();
        case TypeKind::Out: {
            std::vector<ValueRef> vs;
            for (auto& u : s->items) {
                ValueRef v = of(u);
                if (!v) return nullptr;
                vs.push_back(v);
            }
            ProcRef k = play(z, s->cont);
            return k ? p_out(z, vs, k) : nullptr;
        }
        case TypeKind::In: {
            std::vector<std::string> xs;
            std::vector<ProcRef> parts;
            for (auto& u : s->items) {
                std::string x = "vx" + std::to_string(fresh_++);
                xs.push_back(x);
                if (u->kind == TypeKind::Base || u->kind == TypeKind::ShArrow) continue;
                // A linear value is consumed by applying it to a fresh session
                // whose other endpoint is played here.
                if (u->kind != TypeKind::LinArrow || u->items.size() != 1 || !is_session(u->items[0]))
                    return nullptr;
                Name t = user_name("vt" + std::to_string(fresh_++));
                ProcRef other = play(t.co(), dual(u->items[0]));
                if (!other) return nullptr;
                parts.push_back(p_res(t, u->items[0], p_par(p_app(v_var(x), {t}), other)));
            }
            ProcRef k = play(z, s->cont);
            if (!k) return nullptr;
            parts.push_back(k);
            return p_in(z, xs, p_par(parts));
        }
        default:
            return nullptr;
        }
    }

    int fresh_ = 0;
};

// Typing environment of a point inside a term: current protocol states of
// the endpoints in scope and the types of the variables bound so far.
struct Scope {
    TypeEnvs envs;

    TypeEnvs restrict_to(const ProcRef& c) const {
        TypeEnvs e;
        e.shared = envs.shared;
        auto fv = free_vars(c);
        auto fn = free_names(c);
        for (auto& [x, t] : envs.shared_vars)
            if (fv.count(x)) e.shared_vars[x] = t;
        for (auto& [x, t] : envs.linear)
            if (fv.count(x)) e.linear[x] = t;
        for (auto& [n, t] : envs.session)
            if (fn.count(n)) e.session[n] = t;
        return e;
    }

    void bind_var(const std::string& x, const TypeRef& t) {
        envs.shared_vars.erase(x);
        envs.linear.erase(x);
        (t->kind == TypeKind::LinArrow ? envs.linear : envs.shared_vars)[x] = t;
    }

    void bind_name(const Name& n, const TypeRef& t) {
        if (t->kind == TypeKind::Chan) {
            envs.shared[n.with_dual(false)] = t;
        } else {
            envs.session[n] = t;
            envs.session[n.co()] = dual(t);
        }
    }

    // Payload types of an action on `n`, advancing its state.
    std::optional<std::vector<TypeRef>> step(const Name& n) {
        auto it = envs.session.find(n);
        if (it != envs.session.end()) {
            TypeRef u = unfold(it->second);
            if (u->kind != TypeKind::Out && u->kind != TypeKind::In) return std::nullopt;
            it->second = u->cont;
            return u->items;
        }
        auto sh = envs.shared.find(n.with_dual(false));
        if (sh != envs.shared.end()) return sh->second->items;
        return std::nullopt;
    }
};

struct LemmaChecker {
    PropertyResult& result;
    ValueBuilder values;
    int wanted;

    void check(const TypeEnvs& premise_env, const ProcRef& premise, const TypeEnvs& env, const ProcRef& conclusion,
               const std::string& what) {
        if (result.checked >= wanted) return;
        // Instances whose premise does not hold are skipped.
        if (!typecheck(premise_env, premise).ok) {
            ++result.discarded;
            return;
        }
        ++result.checked;
        if (!typecheck(env, conclusion).ok)
            fail(result, what + "\n  premise: " + print(premise) + "\n  conclusion: " + print(conclusion));
    }

    void name_instance(const Scope& sc, const Name& a, const TypeRef& t, const ProcRef& body) {
        Scope before = sc;
        before.bind_name(a, t);
        std::set<Name> all;
        collect_all_names(body, all);
        for (auto& [n, _] : sc.envs.session) all.insert(n);
        Name b = fresh_name(a, all);
        Subst s;
        s.names[a] = b;
        if (t->kind != TypeKind::Chan) s.names[a.co()] = b.co();
        else s.names[a.with_dual(!a.dual)] = b.with_dual(!a.dual);
        ProcRef renamed = apply_subst(body, s);
        Scope after = sc;
        after.bind_name(b, t);
        check(before.restrict_to(body), body, after.restrict_to(renamed), renamed,
              "name " + print(a) + " := " + print(b));
    }

    void value_instance(const Scope& sc, const std::string& x, const TypeRef& u, const ProcRef& cont) {
        ValueRef v = values.of(u);
        if (!v) return;
        ProcRef substituted = apply_subst(cont, Subst::value(x, v));
        Scope without = sc;
        without.envs.shared_vars.erase(x);
        without.envs.linear.erase(x);
        check(sc.restrict_to(cont), cont, without.restrict_to(substituted), substituted,
              "value " + x + " := " + print(v));
    }

    void walk_value(const Scope& sc, const ValueRef& v) {
        if (v->kind != ValueKind::Abs) return;
        Scope inner = sc;
        for (auto& prm : v->params) inner.bind_name(prm.name, prm.type);
        walk(inner, v->body);
    }

    void walk(Scope sc, const ProcRef& p) {
        if (!p || result.checked >= wanted) return;
        switch (p->kind) {
        case ProcKind::Par:
            walk(sc, p->left);
            walk(sc, p->right);
            return;
        case ProcKind::Res:
            name_instance(sc, p->binder, p->annot, p->cont);
            sc.bind_name(p->binder, p->annot);
            walk(sc, p->cont);
            return;
        case ProcKind::Out:
            for (auto& v : p->payload) walk_value(sc, v);
            sc.step(p->subject);
            walk(sc, p->cont);
            return;
        case ProcKind::In: {
            auto items = sc.step(p->subject);
            if (!items || items->size() != p->binders.size()) return;
            for (size_t i = 0; i < items->size(); ++i) sc.bind_var(p->binders[i], (*items)[i]);
            for (size_t i = 0; i < items->size(); ++i) value_instance(sc, p->binders[i], (*items)[i], p->cont);
            walk(sc, p->cont);
            return;
        }
        case ProcKind::App:
            walk_value(sc, p->fun);
            return;
        default:
            return;
        }
    }
};

} // namespace

PropertyResult substitution_lemma(int instances, std::uint64_t seed) {
    PropertyResult r;
    Rng rng(seed);
    LemmaChecker checker{r, {}, instances};
    for (int i = 0; i < 50 * instances && r.checked < instances; ++i) {
        Program prog = generated(rng);
        Scope sc{prog.envs};
        if (i % 2 == 0) {
            checker.walk(sc, prog.ho);
        } else {
            DecompOutcome d = decompose_program(prog, Optimization::None);
            checker.walk(Scope{d.envs}, d.term);
        }
    }
    if (r.checked < instances) fail(r, "only " + std::to_string(r.checked) + " instances generated");
    return r;
}

PropertyResult parse_print(int terms, std::uint64_t seed) {
    PropertyResult r;
    Rng rng(seed);
    for (int i = 0; i < terms; ++i) {
        ProcRef t = random_term(rng, 4);
        std::string text = print(t);
        ++r.checked;
        try {
            ProcRef back = parse_proc(text);
            if (!proc_same(back, t)) fail(r, text + "\n  reparsed as\n" + print(back));
        } catch (const std::exception& e) {
            fail(r, text + "\n  " + e.what());
        }
    }
    return r;
}

MutationSummary mutation_suite(int per_kind, std::uint64_t seed) {
    struct Site {
        std::string file;
        const Program* prog;
        const DecompOutcome* d;
        Mutant m;
    };
    std::vector<Program> progs;
    std::vector<DecompOutcome> decomps;
    auto files = corpus_files();
    progs.reserve(files.size());
    decomps.reserve(files.size());
    std::map<MutationKind, std::vector<Site>> sites;
    for (auto& f : files) {
        progs.push_back(load_fixture(f));
        decomps.push_back(decompose_program(progs.back(), Optimization::None));
        const Program& prog = progs.back();
        const DecompOutcome& d = decomps.back();
        auto live = live_subjects(d.term, observable_types(prog, d), 4);
        for (auto kind : {MutationKind::Payload, MutationKind::DropPropagator, MutationKind::PermuteIndex})
            for (auto& m : mutants(d.term, kind, live)) sites[kind].push_back({f, &prog, &d, m});
    }
    MutationSummary s;
    Rng rng(seed);
    for (auto& [kind, all] : sites) {
        s.sites[to_string(kind)] = static_cast<int>(all.size());
        std::shuffle(all.begin(), all.end(), rng);
        for (size_t i = 0; i < all.size() && static_cast<int>(i) < per_kind; ++i) {
            const Site& site = all[i];
            TraceResult r = bounded_weak_sim(site.prog->ho, site.m.term, 4, 12, equiv_options(*site.prog, *site.d));
            ++s.total;
            if (r.status == SimStatus::Mismatch) {
                ++s.mismatched;
                continue;
            }
            if (kind == MutationKind::Payload && r.status == SimStatus::Match) ++s.payload_matches;
            s.survivors.push_back(site.file + ": " + to_string(kind) + " at " + site.m.site + ": " +
                                  to_string(r.status));
        }
    }
    return s;
}

} // namespace minsess::testing
