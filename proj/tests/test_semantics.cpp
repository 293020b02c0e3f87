#include "support.hpp"

#include "minsess/semantics.hpp"

#include <gtest/gtest.h>

namespace minsess {
namespace {

using testing::corpus_files;
using testing::load_fixture;

TEST(Reduction, CommunicationSubstitutes) {
    auto steps = reduce(parse_proc("new (s: !(int);end) (s!<3>.0 | ~s?(x).a!<x + 1>.0)"));
    ASSERT_EQ(steps.size(), 1u);
    EXPECT_EQ(steps[0].label.kind, LabelKind::Tau);
    EXPECT_EQ(steps[0].label.tau_class, TauClass::Essential);
    EXPECT_TRUE(alpha_congruent(steps[0].target, parse_proc("a!<3 + 1>.0")) ||
                alpha_congruent(steps[0].target, parse_proc("a!<4>.0")));
}

TEST(Reduction, AnnotationsAdvance) {
    auto steps = reduce(parse_proc("new (s: !(int);?(bool);end) (s!<3>.s?(b).0 | ~s?(x).~s!<true>.0)"));
    ASSERT_EQ(steps.size(), 1u);
    Flat f = flatten(steps[0].target);
    ASSERT_EQ(f.binders.size(), 1u);
    EXPECT_TRUE(type_same(f.binders[0].second, parse_type("?(bool);end")));
}

TEST(Reduction, BetaHasNoSubject) {
    auto steps = reduce(parse_proc("(\\(z: !(int);end). z!<1>.0) a"));
    ASSERT_EQ(steps.size(), 1u);
    EXPECT_FALSE(steps[0].label.subject.has_value());
    EXPECT_TRUE(alpha_congruent(steps[0].target, parse_proc("a!<1>.0")));
}

TEST(Reduction, BranchSelectsArm) {
    auto steps = reduce(parse_proc("new (u: &{l: end, r: !(int);end}) (u>{l: 0, r: u!<1>.0} | ~u<r.~u?(x).0)"));
    ASSERT_EQ(steps.size(), 1u);
    EXPECT_EQ(steps[0].label.choice, "r");
}

TEST(Reduction, PropagatorStepsAreAdministrative) {
    auto steps = reduce(parse_proc("new (%c@1: ?();end) (~%c@1!<>.0 | %c@1?().a!<1>.0)"));
    ASSERT_EQ(steps.size(), 1u);
    EXPECT_FALSE(steps[0].label.essential());
}

TEST(Lts, VisibleActionsOnFreeNames) {
    ProcRef p = parse_proc("a!<1>.0 | b?(x).0");
    InputCandidates inputs = [](const Name&, size_t) { return std::vector<std::vector<ValueRef>>{{v_int(5)}}; };
    auto steps = lts(p, inputs);
    int outs = 0, ins = 0;
    for (auto& s : steps) {
        outs += s.label.kind == LabelKind::Out;
        ins += s.label.kind == LabelKind::In;
    }
    EXPECT_EQ(outs, 1);
    EXPECT_EQ(ins, 1);
    EXPECT_TRUE(lts(parse_proc("b?(x).0")).empty());
}

TEST(Lts, OutputExtrudesRestrictedNames) {
    auto steps = lts(parse_proc("new (s: !(int);end) a!<\\(z: end). s!<1>.0>.~s?(x).0"));
    ASSERT_EQ(steps.size(), 1u);
    ASSERT_EQ(steps[0].label.extruded.size(), 1u);
}

TEST(Lts, TauStepsAgreeWithReduce) {
    for (auto& f : corpus_files()) {
        ProcRef p = load_fixture(f).ho;
        size_t taus = 0;
        for (auto& s : lts(p)) taus += s.label.kind == LabelKind::Tau;
        EXPECT_EQ(taus, reduce(p).size()) << f;
    }
}

TEST(Run, NameExchangeTakesFourSteps) {
    auto trace = run_trace(load_fixture("np_exchange.ho").ho, 20);
    ASSERT_EQ(trace.size(), 4u);
    EXPECT_TRUE(alpha_congruent(trace.back().target, parse_proc("m!<5>.0")));
}

TEST(Run, MathServerAnswers42) {
    Program prog = load_fixture("math_server.ho");
    bool seen = false;
    for (auto& s : run_trace(prog.ho, 50))
        if (s.label.subject && s.label.subject->base == "u" && s.label.payload.size() == 1 &&
            value_same(s.label.payload[0], v_int(42)))
            seen = true;
    EXPECT_TRUE(seen);
}

TEST(Characteristic, ProcessesTypecheck) {
    for (const char* text : {"!(int);?(bool);end", "?(lin(?(int);end)->o);end", "mu t.!(int);t"}) {
        TypeRef s = parse_type(text);
        ProcRef p = minimal_characteristic(s, user_name("u"), 1);
        EXPECT_FALSE(free_names(p).empty()) << text;
    }
    std::set<Name> avoid;
    auto vs = minimal_characteristic_value(parse_type("!(int);!(int);end"), avoid);
    EXPECT_EQ(vs.size(), 2u);
    std::set<Name> avoid2;
    auto one = minimal_characteristic_value(t_int(), avoid2);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0]->kind, ValueKind::Lit);
}

TEST(Correspondence, SubjectsUpToIndexing) {
    Label src;
    src.kind = LabelKind::Out;
    src.subject = user_name("b");
    src.payload = {v_int(1)};
    Label tgt = src;
    tgt.subject = user_name("b", 2);
    EXPECT_TRUE(labels_correspond(src, tgt));
    tgt.payload = {v_int(2)};
    EXPECT_FALSE(labels_correspond(src, tgt));
    tgt.payload = {v_int(1)};
    tgt.subject = user_name("c", 2);
    EXPECT_FALSE(labels_correspond(src, tgt));
}

TEST(Simulation, IdenticalProcessesMatch) {
    ProcRef p = parse_proc("a!<1>.a!<2>.0");
    EXPECT_EQ(bounded_weak_sim(p, p, 4, 12).status, SimStatus::Match);
}

TEST(Simulation, DifferentPayloadMismatches) {
    TraceResult r = bounded_weak_sim(parse_proc("a!<1>.0"), parse_proc("a!<2>.0"), 4, 12);
    EXPECT_EQ(r.status, SimStatus::Mismatch);
    EXPECT_FALSE(r.witness.empty());
}

TEST(Simulation, AdministrativeStepsAreInvisible) {
    ProcRef p = parse_proc("a!<1>.0");
    ProcRef q = parse_proc("new (%c@1: ?();end) (~%c@1!<>.0 | %c@1?().a@1!<1>.0)");
    EXPECT_EQ(bounded_weak_sim(p, q, 4, 12).status, SimStatus::Match);
}

TEST(Simulation, MissingActionMismatches) {
    ProcRef p = parse_proc("a!<1>.a!<2>.0");
    ProcRef q = parse_proc("a@1!<1>.0");
    EXPECT_EQ(bounded_weak_sim(p, q, 4, 12).status, SimStatus::Mismatch);
}

TEST(Simulation, CorpusDecompositionsMatch) {
    for (auto& f : corpus_files()) {
        Program prog = load_fixture(f);
        for (auto opt : {Optimization::None, Optimization::Duo}) {
            TraceResult r = testing::equiv(prog, decompose_program(prog, opt));
            EXPECT_EQ(r.status, SimStatus::Match) << f << " " << to_string(opt) << ": " << r.reason;
        }
    }
}

// The chain closure fires administrative steps in one fixed order; on
// decompositions that order must not change the verdict.
TEST(Simulation, ChainClosureAgreesWithFullInterleaving) {
    for (const char* f : {"relay.ho", "equality.ho", "np_exchange.ho", "decomp_proc_types.ho", "random_11.ho"}) {
        Program prog = load_fixture(f);
        DecompOutcome d = decompose_program(prog, Optimization::None);
        SimOptions chain = equiv_options(prog, d);
        SimOptions full = chain;
        full.confluent_closure = false;
        auto a = bounded_weak_sim(prog.ho, d.term, 3, 12, chain);
        auto b = bounded_weak_sim(prog.ho, d.term, 3, 12, full);
        EXPECT_EQ(a.status, SimStatus::Match) << f;
        EXPECT_EQ(a.status, b.status) << f << ": " << b.reason;
    }
}

TEST(Simulation, MutantsAreDetected) {
    auto m = testing::mutation_suite(10, 11);
    EXPECT_EQ(m.total, 30);
    EXPECT_GE(m.mismatched * 100, 95 * m.total);
    EXPECT_EQ(m.payload_matches, 0);
}

TEST(Mutation, PayloadChangesALiteral) {
    ProcRef p = parse_proc("new (%c@1: ?();end) (~%c@1!<>.0 | %c@1?().a@1!<1>.0)");
    auto live = live_subjects(p, {}, 4);
    EXPECT_TRUE(live.count(user_name("a", 1)));
    auto ms = mutants(p, MutationKind::Payload, live);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(bounded_weak_sim(parse_proc("a!<1>.0"), ms[0].term, 4, 12).status, SimStatus::Mismatch);
}

} // namespace
} // namespace minsess
