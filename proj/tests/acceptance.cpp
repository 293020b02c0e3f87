// Acceptance checks: one line per criterion, nonzero exit if any fails.
#include "support.hpp"

#include "minsess/decomp_types.hpp"

#include <chrono>
#include <deque>
#include <functional>
#include <iostream>
#include <sstream>
#include <unordered_map>

namespace {

using namespace minsess;
using namespace minsess::testing;

constexpr double kTimeLimit = 10.0; // seconds per criterion

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (cond) return;
        if (!ok) detail << "; ";
        ok = false;
        detail << what;
    }
};

bool run_criterion(int n, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.expect(secs < kTimeLimit, "took " + std::to_string(secs) + " s");
    std::cout << (out.ok ? "[PASS] " : "[FAIL] ") << n << " " << title << " (" << static_cast<int>(secs * 1000)
              << " ms)";
    if (!out.ok) std::cout << ": " << out.detail.str();
    std::cout << std::endl;
    return out.ok;
}

bool same_list(const MinTypeList& got, const std::vector<std::string>& want) {
    if (got.size() != want.size()) return false;
    for (size_t i = 0; i < got.size(); ++i)
        if (!type_same(got[i], parse_type(want[i]))) return false;
    return true;
}

std::string show(const MinTypeList& ts) {
    std::string s = "[";
    for (size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + print(ts[i]);
    return s + "]";
}

// Number of reduction steps after which a state alpha-congruent to
// `target` is first reached, by breadth-first search over reductions.
struct Search {
    int depth = -1;
    std::size_t states = 0;
    bool exhausted = false;
};

Search reach(const ProcRef& start, const ProcRef& target, std::size_t max_states) {
    Search s;
    AlphaOptions opt{false};
    std::unordered_map<std::string, int> seen;
    std::deque<std::pair<ProcRef, int>> work{{struct_normalize(start), 0}};
    seen[canonical_key(work.front().first)] = 0;
    while (!work.empty() && seen.size() <= max_states) {
        auto [p, d] = work.front();
        work.pop_front();
        if (alpha_congruent(p, target, opt)) {
            s.depth = d;
            break;
        }
        for (auto& st : reduce(p))
            if (seen.emplace(canonical_key(st.target), d + 1).second) work.emplace_back(st.target, d + 1);
    }
    s.states = seen.size();
    s.exhausted = work.empty();
    return s;
}

bool choice_free(const Program& prog) { return !uses_choice(prog.ho); }

std::vector<std::string> first_order_fixtures() {
    std::vector<std::string> out;
    for (auto& f : corpus_files()) {
        Program prog = load_fixture(f);
        if (choice_free(prog) && !uses_tail_recursion(prog)) out.push_back(f);
    }
    return out;
}

void c1(Outcome& o) {
    auto g1 = gt(parse_type("?(int);?(int);!(bool);end"));
    o.expect(same_list(g1, {"?(int);end", "?(int);end", "!(bool);end"}), "prefix chain: " + show(g1));
    auto g2 = gt(parse_type("mu t.?(int);?(bool);!(bool);t"));
    o.expect(same_list(g2, {"mu t.?(int);t", "mu t.?(bool);t", "mu t.!(bool);t"}), "tail recursion: " + show(g2));
    auto g3 = gt(parse_type("mu t.?(sh(?(str);!(str);end, t)->o);end"));
    o.expect(same_list(g3, {"mu t.?(sh(?(str);end, !(str);end, t)->o);end"}), "non-tail recursion: " + show(g3));
}

void c2(Outcome& o) {
    auto deg = [](const std::string& text) {
        Program prog = load_program(text);
        return decompose_program(prog, Optimization::None).degree;
    };
    int q = deg("free m : !(<<chan<int>>>);end\n"
                "free ~m : ?(<<chan<int>>>);end\n"
                "free u : !(<<!(<<chan<int>>>);end>>);end\n"
                "u!<<m : !(<<chan<int>>>);end>>.~m?((b: chan<int>)).0\n");
    int r = deg("free k : chan<int>\n"
                "free ~u : ?(<<!(<<chan<int>>>);end>>);end\n"
                "~u?((x: !(<<chan<int>>>);end)).x!<<k : chan<int>>>.0\n");
    int p = decompose_program(load_fixture("name_passing.ho"), Optimization::None).degree;
    int e = decompose_program(load_fixture("decomp_proc_types.ho"), Optimization::None).degree;
    o.expect(q == 6, "sender degree " + std::to_string(q));
    o.expect(r == 5, "receiver degree " + std::to_string(r));
    o.expect(p == 12, "name_passing degree " + std::to_string(p));
    o.expect(e == 10, "decomp_proc_types degree " + std::to_string(e));
}

void c3(Outcome& o) {
    auto files = corpus_files();
    o.expect(files.size() >= 12, "only " + std::to_string(files.size()) + " fixtures");
    for (auto& f : files) {
        DecompOutcome d = decompose_program(load_fixture(f), Optimization::None);
        o.expect(d.report.ok, f + " does not typecheck after decomposition");
        for (auto& [n, t] : d.envs.session) o.expect(is_minimal(t), f + ": " + print(n) + " not minimal");
        for (auto& [n, t] : d.envs.shared) o.expect(is_minimal(t), f + ": " + print(n) + " not minimal");
        o.expect(d.non_minimal.empty(), f + ": non-minimal entries");
    }
}

void c4(Outcome& o) {
    Program np = load_fixture("np_exchange.ho");
    Search s1 = reach(np.ho, parse_proc("m!<5>.0"), 1000);
    o.expect(s1.depth == 4, "np_exchange reached P|Q{m/x} at depth " + std::to_string(s1.depth));

    Program bd = load_fixture("name_passing.ho");
    DecompOutcome d = decompose_program(bd, Optimization::None);
    ProcRef golden = parse_proc(read_file(golden_path("name_passing_after7.ho")));
    Search s2 = reach(d.term, golden, 1000);
    o.expect(s2.depth == 7, "name_passing golden state at depth " + std::to_string(s2.depth) + " after " +
                                std::to_string(s2.states) + " states");
}

void c5(Outcome& o) {
    for (auto& f : corpus_files()) {
        Program prog = load_fixture(f);
        TraceResult r = equiv(prog, decompose_program(prog, Optimization::None));
        o.expect(r.status == SimStatus::Match, f + ": " + to_string(r.status) + " " + r.reason);
    }
    MutationSummary m = mutation_suite(20, 7);
    std::string sites;
    for (auto& [kind, n] : m.sites) sites += " " + kind + "=" + std::to_string(n);
    o.expect(m.total == 60, "only " + std::to_string(m.total) + " mutants; live sites" + sites);
    o.expect(m.mismatched * 100 >= 95 * m.total,
             std::to_string(m.mismatched) + "/" + std::to_string(m.total) + " mutants mismatched");
    o.expect(m.payload_matches == 0, std::to_string(m.payload_matches) + " payload mutants matched");
    for (auto& s : m.survivors) std::cerr << "  survivor: " << s << "\n";
}

void c6(Outcome& o) {
    Program prog = load_fixture("math_server.ho");
    DecompOutcome d = decompose_program(prog, Optimization::None);
    bool seen = false;
    for (auto& st : run_trace(d.term, 100)) {
        const Label& l = st.label;
        if (l.kind == LabelKind::Tau && l.subject && *l.subject == user_name("u", 4) && l.payload.size() == 1 &&
            value_same(l.payload[0], v_int(42)))
            seen = true;
    }
    o.expect(seen, "no exchange of 42 on u@4");
    TraceResult r = equiv(prog, d, 5, 16);
    o.expect(r.status == SimStatus::Match, "depth 5: " + to_string(r.status) + " " + r.reason);
}

void c7(Outcome& o) {
    auto files = first_order_fixtures();
    o.expect(files.size() >= 6, "only " + std::to_string(files.size()) + " fixtures without choice or tail recursion");
    for (auto& f : files) {
        Program prog = load_fixture(f);
        for (auto opt : {Optimization::Duo, Optimization::Monadic}) {
            std::string tag = f + " (" + to_string(opt) + ")";
            DecompOutcome d = decompose_program(prog, opt);
            o.expect(d.ok(), tag + " decomposition rejected");
            if (opt == Optimization::Duo)
                o.expect(max_prefix_chain(d.term) <= 2, tag + " chain " + std::to_string(max_prefix_chain(d.term)));
            else
                o.expect(max_prefix_arity(d.term) <= 1, tag + " arity " + std::to_string(max_prefix_arity(d.term)));
            TraceResult r = equiv(prog, d);
            o.expect(r.status == SimStatus::Match, tag + ": " + to_string(r.status) + " " + r.reason);
        }
    }
    DecompOutcome m = decompose_program(load_fixture("decomp_proc_types.ho"), Optimization::Monadic);
    ProcRef golden = parse_proc(read_file(golden_path("decomp_proc_types_monadic.ho")));
    o.expect(alpha_congruent(m.term, golden, AlphaOptions{false}), "monadic decomp_proc_types differs from golden");
}

void property(Outcome& o, const std::string& name, const PropertyResult& r, int want) {
    o.expect(r.checked >= want, name + ": " + std::to_string(r.checked) + " instances");
    o.expect(r.ok(), name + ": " + std::to_string(r.failures) + " failures, first: " + r.counterexample);
}

void c8(Outcome& o) {
    property(o, "subject reduction", subject_reduction(200, 1), 200);
    property(o, "dual involution", dual_involution(500, 2), 500);
    property(o, "substitution", substitution_lemma(500, 3), 500);
    property(o, "parse/print", parse_print(500, 4), 500);
}

} // namespace

int main() {
    bool ok = true;
    ok &= run_criterion(1, "type decomposition goldens", c1);
    ok &= run_criterion(2, "decomposition degrees", c2);
    ok &= run_criterion(3, "corpus decomposes to minimal types", c3);
    ok &= run_criterion(4, "reduction chains", c4);
    ok &= run_criterion(5, "corpus equivalence and mutation detection", c5);
    ok &= run_criterion(6, "math server run and equivalence", c6);
    ok &= run_criterion(7, "duo and monadic decompositions", c7);
    ok &= run_criterion(8, "typing and syntax properties", c8);
    return ok ? 0 : 1;
}
