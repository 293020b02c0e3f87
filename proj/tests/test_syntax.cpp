#include "minsess/surface.hpp"
#include "minsess/syntax.hpp"

#include <gtest/gtest.h>

namespace minsess {
namespace {

TEST(Names, CoFlipsPolarityOnly) {
    Name a = user_name("a", 2);
    EXPECT_EQ(a.co(), user_name("a", 2, true));
    EXPECT_EQ(a.co().co(), a);
    EXPECT_TRUE(a.same_binding(a.co()));
    EXPECT_FALSE(a.same_binding(a.with_index(3)));
}

TEST(Names, NamespacesNeverClash) {
    Name u = user_name("c", 1);
    Name p = prop_name("c", 1);
    EXPECT_NE(u, p);
    EXPECT_FALSE(u.same_binding(p));
    EXPECT_TRUE(rec_prop_name(u).ns == NameSpace::RecProp);
}

TEST(Names, FreshNameAvoidsEveryGivenName) {
    std::set<Name> avoid{user_name("x"), user_name("x#1")};
    Name f = fresh_name(user_name("x"), avoid);
    EXPECT_FALSE(avoid.count(f));
    EXPECT_EQ(root_of(f.base), "x");
}

TEST(Types, SyntacticEqualityDoesNotUnfold) {
    TypeRef r = parse_type("mu t.!(int);t");
    EXPECT_TRUE(type_same(r, parse_type("mu t.!(int);t")));
    EXPECT_FALSE(type_same(r, unfold(r)));
    EXPECT_EQ(unfold(r)->kind, TypeKind::Out);
}

TEST(Types, ClosedAndContractive) {
    EXPECT_TRUE(type_closed(parse_type("mu t.?(int);t")));
    EXPECT_FALSE(type_closed(t_out({t_int()}, t_var("t"))));
    EXPECT_FALSE(type_contractive(t_rec("t", t_var("t"))));
    EXPECT_EQ(free_tvars(t_out({t_int()}, t_var("s"))), std::set<std::string>{"s"});
}

TEST(Binding, RestrictionBindsBothEndpoints) {
    ProcRef p = parse_proc("new (s: !(int);end) (s!<1>.0 | ~s?(x).a!<x>.0)");
    EXPECT_EQ(free_names(p), std::set<Name>{user_name("a")});
}

TEST(Binding, InputBindsVariables) {
    ProcRef p = parse_proc("a?(x).b!<x + y>.0");
    EXPECT_EQ(free_vars(p), std::set<std::string>{"y"});
}

TEST(Substitution, AvoidsCapture) {
    // Substituting the free name b for a under a binder named b renames it.
    ProcRef p = parse_proc("new (b: !(int);end) (a!<1>.0 | b!<2>.0 | ~b?(x).0)");
    ProcRef q = apply_subst(p, Subst::name(user_name("a"), user_name("b")));
    EXPECT_TRUE(free_names(q).count(user_name("b")));
    EXPECT_EQ(free_names(q).size(), 1u);
    EXPECT_FALSE(alpha_congruent(q, parse_proc("new (b: !(int);end) (b!<1>.0 | b!<2>.0 | ~b?(x).0)")));
}

TEST(Substitution, ValueIntoOutput) {
    ProcRef p = parse_proc("a?(x).b!<x>.0");
    ProcRef q = apply_subst(p->cont, Subst::value("x", v_int(3)));
    EXPECT_TRUE(proc_same(q, parse_proc("b!<3>.0")));
}

TEST(Congruence, ParallelIsAMultiset) {
    EXPECT_TRUE(alpha_congruent(parse_proc("a!<1>.0 | (b!<2>.0 | 0)"), parse_proc("b!<2>.0 | a!<1>.0")));
    EXPECT_FALSE(alpha_congruent(parse_proc("a!<1>.0 | b!<2>.0"), parse_proc("a!<2>.0 | b!<1>.0")));
}

TEST(Congruence, ScopeExtrusionAndRenaming) {
    ProcRef p = parse_proc("new (s: !(int);end) s!<1>.0 | a!<2>.0");
    ProcRef q = parse_proc("new (r: !(int);end) (a!<2>.0 | r!<1>.0)");
    EXPECT_TRUE(alpha_congruent(p, q));
    EXPECT_EQ(canonical_key(p), canonical_key(q));
}

TEST(Congruence, AnnotationsComparedOnRequest) {
    ProcRef p = parse_proc("new (s: !(int);end) s!<1>.0");
    ProcRef q = parse_proc("new (s: !(bool);end) s!<1>.0");
    EXPECT_FALSE(alpha_congruent(p, q));
    EXPECT_TRUE(alpha_congruent(p, q, AlphaOptions{false}));
}

TEST(Congruence, UnusedRestrictionsVanish) {
    EXPECT_TRUE(alpha_congruent(parse_proc("new (s: !(int);end) a!<1>.0"), parse_proc("a!<1>.0")));
}

TEST(Evaluation, ClosedExpressions) {
    EXPECT_TRUE(value_same(eval_value(parse_value("16 + 26")), v_int(42)));
    EXPECT_TRUE(value_same(eval_value(parse_value("-4")), v_int(-4)));
    EXPECT_TRUE(value_same(eval_value(parse_value("len(\"abc\")")), v_int(3)));
    EXPECT_TRUE(value_same(eval_value(parse_value("2 = 2")), v_bool(true)));
    // Open expressions stay as they are.
    EXPECT_EQ(eval_value(parse_value("x + 1"))->kind, ValueKind::Expr);
}

// Size of a process counted by hand: every prefix, nil, application and
// parallel composition contributes one.
TEST(Degree, CountsPrefixesAndCompositions) {
    EXPECT_EQ(degree(parse_proc("0")), 1);
    EXPECT_EQ(degree(parse_proc("a!<1>.b?(x).0")), 3);
    EXPECT_EQ(degree(parse_proc("a!<1>.0 | b!<2>.0")), 5);
    EXPECT_EQ(degree(parse_proc("new (s: !(int);end) (s!<1>.0 | ~s?(x).0)")), 5);
    EXPECT_EQ(degree(parse_proc("x a")), 1);
}

TEST(Indices, InitialAndNext) {
    ProcRef p = parse_proc("a!<1>.~b?(x).0");
    ProcRef q = apply_subst(p, init_indices(p));
    EXPECT_EQ(free_names(q), (std::set<Name>{user_name("a", 1), user_name("b", 1, true)}));
    Subst s = next_index(user_name("a", 1), true);
    EXPECT_EQ(s.names.at(user_name("a", 1)), user_name("a", 2));
    EXPECT_TRUE(next_index(user_name("a", 1), false).names.empty());
}

} // namespace
} // namespace minsess
