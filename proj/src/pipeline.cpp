#include "minsess/pipeline.hpp"

#include <fstream>
#include <sstream>

namespace minsess {

std::string to_string(Optimization o) {
    switch (o) {
    case Optimization::None:
        return "none";
    case Optimization::Duo:
        return "duo";
    case Optimization::Monadic:
        return "monadic";
    }
    return "none";
}

Optimization optimization_from_string(const std::string& s) {
    if (s == "none") return Optimization::None;
    if (s == "duo") return Optimization::Duo;
    if (s == "monadic") return Optimization::Monadic;
    throw std::invalid_argument("unknown optimization " + s);
}

Program load_program(const std::string& text) {
    Program prog;
    prog.file = parse_file(text);
    prog.envs = envs_from_file(prog.file);
    prog.source = prog.file.entry;
    ProcRef p = has_name_passing(prog.source) ? desugar_name_passing(prog.source) : prog.source;
    prog.ho = encode_recursion(prog.envs, p);
    return prog;
}

Program load_program_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_program(ss.str());
}

namespace {

template <typename F>
bool any_proc(const ProcRef& p, const F& pred) {
    if (pred(p)) return true;
    for (auto& v : p->payload)
        if (v->kind == ValueKind::Abs && any_proc(v->body, pred)) return true;
    if (p->fun && p->fun->kind == ValueKind::Abs && any_proc(p->fun->body, pred)) return true;
    for (const ProcRef* c : {&p->cont, &p->left, &p->right})
        if (*c && any_proc(*c, pred)) return true;
    for (auto& [l, a] : p->arms)
        if (any_proc(a, pred)) return true;
    return false;
}

void restriction_types(const ProcRef& p, std::vector<std::pair<Name, TypeRef>>& out) {
    any_proc(p, [&](const ProcRef& q) {
        if (q->kind == ProcKind::Res && q->annot) out.emplace_back(q->binder, q->annot);
        return false;
    });
}

} // namespace

bool uses_choice(const ProcRef& p) {
    return any_proc(p, [](const ProcRef& q) { return q->kind == ProcKind::Sel || q->kind == ProcKind::Bra; });
}

CheckOutcome check_program(const Program& prog) {
    CheckOutcome out;
    out.report = typecheck(prog.envs, prog.ho);
    out.balanced = balanced(prog.envs.session);
    return out;
}

DecompOutcome decompose_program(const Program& prog, Optimization opt) {
    DecompOutcome out;
    out.degree = degree(prog.ho);
    switch (opt) {
    case Optimization::None:
        out.term = decompose(prog.envs, prog.ho);
        break;
    case Optimization::Duo:
        out.term = duo_transform(decompose(prog.envs, prog.ho));
        break;
    case Optimization::Monadic:
        out.term = monadic_decompose(prog.envs, prog.ho);
        break;
    }
    out.envs = decompose_envs(prog.envs, prog.ho);
    out.report = typecheck(out.envs, out.term);
    for (auto& [n, t] : out.envs.session)
        if (!is_minimal(t)) out.non_minimal.push_back(print(n) + " : " + print(t));
    std::vector<std::pair<Name, TypeRef>> bound;
    restriction_types(out.term, bound);
    for (auto& [n, t] : bound)
        if (is_session(t) && !is_minimal(t)) out.non_minimal.push_back("new " + print(n) + " : " + print(t));
    return out;
}

std::map<Name, TypeRef> observable_types(const Program& prog) {
    std::map<Name, TypeRef> out;
    auto fn = free_names(prog.ho);
    for (auto& [n, t] : prog.envs.session)
        if (fn.count(n) && !fn.count(n.co())) out[n] = t;
    for (auto& [n, t] : prog.envs.shared) out[n] = t;
    return out;
}

std::map<Name, TypeRef> observable_types(const Program& prog, const DecompOutcome& d) {
    auto source = observable_types(prog);
    std::map<Name, TypeRef> out;
    for (auto& [n, t] : d.envs.session)
        if (source.count(n.with_index(0))) out[n] = t;
    for (auto& [n, t] : d.envs.shared) out[n] = t;
    return out;
}

SimOptions equiv_options(const Program& prog, const DecompOutcome& d) {
    SimOptions so;
    so.source_types = observable_types(prog);
    so.candidate_types = observable_types(prog, d);
    return so;
}

} // namespace minsess
