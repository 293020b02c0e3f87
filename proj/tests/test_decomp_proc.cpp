#include "support.hpp"

#include "minsess/decomp_proc.hpp"

#include <gtest/gtest.h>

namespace minsess {
namespace {

using testing::corpus_files;
using testing::load_fixture;

// Number of distinct top-level propagators %c@k in a decomposition.
int propagator_count(const ProcRef& p) {
    std::set<Name> all;
    collect_all_names(p, all);
    std::set<int> ks;
    for (auto& n : all)
        if (n.ns == NameSpace::Prop && n.base == "c" && n.indexed()) ks.insert(n.index);
    return static_cast<int>(ks.size());
}

TEST(Breakdown, DegreeMatchesPropagatorsUsed) {
    for (auto& f : corpus_files()) {
        Program prog = load_fixture(f);
        DecompOutcome d = decompose_program(prog, Optimization::None);
        EXPECT_EQ(d.degree, propagator_count(d.term)) << f;
    }
}

TEST(Breakdown, CorpusDecompositionsTypecheck) {
    for (auto& f : corpus_files()) {
        DecompOutcome d = decompose_program(load_fixture(f), Optimization::None);
        EXPECT_TRUE(d.ok()) << f << ": " << (d.report.error ? d.report.error->message : "non-minimal");
    }
}

TEST(Breakdown, FirstOrderRelay) {
    Program prog = load_fixture("relay.ho");
    DecompOutcome d = decompose_program(prog, Optimization::None);
    // b splits into two indexed names, one per output.
    auto fn = free_names(d.term);
    EXPECT_TRUE(fn.count(user_name("a", 1)));
    EXPECT_TRUE(fn.count(user_name("b", 1)));
    EXPECT_TRUE(fn.count(user_name("b", 2)));
    EXPECT_EQ(d.degree, 4);
}

TEST(Breakdown, EnvironmentIndexesFreeNames) {
    Program prog = load_fixture("relay.ho");
    TypeEnvs e = decompose_envs(prog.envs, prog.ho);
    EXPECT_TRUE(type_same(e.session.at(user_name("b", 1)), parse_type("!(int);end")));
    EXPECT_TRUE(type_same(e.session.at(user_name("b", 2)), parse_type("!(int);end")));
    EXPECT_FALSE(e.session.count(user_name("b")));
}

// Trios have three prefixes; a decomposed branch carries one more.
TEST(Breakdown, ChainsAreTrios) {
    for (auto& f : corpus_files()) {
        Program prog = load_fixture(f);
        DecompOutcome d = decompose_program(prog, Optimization::None);
        EXPECT_LE(max_prefix_chain(d.term), uses_choice(prog.ho) ? 4 : 3) << f;
    }
}

TEST(Recursion, EncodingRemovesRecursion) {
    Program prog = load_fixture("rec_server.ho");
    EXPECT_TRUE(has_recursion(prog.source));
    EXPECT_FALSE(has_recursion(prog.ho));
    EXPECT_TRUE(typecheck(prog.envs, prog.ho).ok);
}

TEST(Recursion, BothStylesTypecheck) {
    Program prog = load_fixture("rec_server.ho");
    for (auto style : {RecursionStyle::Direct, RecursionStyle::Unrolled}) {
        ProcRef p = encode_recursion(prog.envs, prog.source, style);
        EXPECT_TRUE(typecheck(prog.envs, p).ok) << print(p);
    }
}

TEST(Duo, ChainsHaveAtMostTwoPrefixes) {
    for (auto& f : corpus_files()) {
        Program prog = load_fixture(f);
        DecompOutcome d = decompose_program(prog, Optimization::Duo);
        EXPECT_TRUE(d.ok()) << f;
        EXPECT_LE(max_prefix_chain(d.term), 2) << f;
    }
}

TEST(Monadic, PrefixesCarryAtMostOneValue) {
    for (auto& f : corpus_files()) {
        Program prog = load_fixture(f);
        if (uses_choice(prog.ho) || testing::uses_tail_recursion(prog)) continue;
        DecompOutcome d = decompose_program(prog, Optimization::Monadic);
        EXPECT_TRUE(d.ok()) << f;
        EXPECT_LE(max_prefix_arity(d.term), 1) << f;
    }
}

TEST(Monadic, RejectsChoiceAndTailRecursion) {
    EXPECT_THROW(decompose_program(load_fixture("math_server.ho"), Optimization::Monadic), DecompError);
    EXPECT_THROW(decompose_program(load_fixture("rec_server.ho"), Optimization::Monadic), DecompError);
}

TEST(Monadic, MatchesGolden) {
    DecompOutcome m = decompose_program(load_fixture("decomp_proc_types.ho"), Optimization::Monadic);
    ProcRef golden = parse_proc(testing::read_file(testing::golden_path("decomp_proc_types_monadic.ho")));
    EXPECT_TRUE(alpha_congruent(m.term, golden, AlphaOptions{false})) << print(m.term);
}

TEST(Metrics, ChainAndArity) {
    ProcRef p = parse_proc("a!<1, 2>.b?(x).c!<x>.0 | d?(y).0");
    EXPECT_EQ(max_prefix_chain(p), 3);
    EXPECT_EQ(max_prefix_arity(p), 2);
}

TEST(Property, GeneratedProgramsDecompose) {
    Rng rng(9);
    for (int i = 0; i < 60; ++i) {
        Program prog = load_program(print_file(random_program(rng)));
        for (auto opt : {Optimization::None, Optimization::Duo, Optimization::Monadic}) {
            DecompOutcome d = decompose_program(prog, opt);
            EXPECT_TRUE(d.ok()) << to_string(opt) << "\n" << print(prog.source);
            if (opt == Optimization::None) {
                EXPECT_EQ(d.degree, propagator_count(d.term));
            }
        }
    }
}

} // namespace
} // namespace minsess
