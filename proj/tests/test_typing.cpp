#include "support.hpp"

#include "minsess/typing.hpp"

#include <gtest/gtest.h>

namespace minsess {
namespace {

TypeReport check(const std::string& text) {
    Program prog = load_program(text);
    return typecheck(prog.envs, prog.ho);
}

TEST(Duality, FlipsDirectionAndChoice) {
    EXPECT_TRUE(type_same(dual(parse_type("!(int);?(bool);end")), parse_type("?(int);!(bool);end")));
    EXPECT_TRUE(type_same(dual(parse_type("+{a: end, b: !(int);end}")), parse_type("&{a: end, b: ?(int);end}")));
    EXPECT_TRUE(type_same(dual(parse_type("mu t.!(int);t")), parse_type("mu t.?(int);t")));
}

TEST(Duality, PayloadsAreNotDualised) {
    TypeRef t = parse_type("!(lin(?(int);end)->o);end");
    EXPECT_TRUE(type_same(dual(t), parse_type("?(lin(?(int);end)->o);end")));
}

TEST(Duality, UpToUnfolding) {
    EXPECT_TRUE(is_dual(parse_type("mu t.!(int);t"), parse_type("?(int);mu t.?(int);t")));
    EXPECT_FALSE(is_dual(parse_type("!(int);end"), parse_type("?(bool);end")));
}

TEST(Equality, CoinductiveUnfolding) {
    EXPECT_TRUE(type_equal(parse_type("mu t.!(int);t"), parse_type("mu s.!(int);!(int);s")));
    EXPECT_FALSE(type_equal(parse_type("mu t.!(int);t"), parse_type("mu t.?(int);t")));
}

TEST(Checker, AcceptsWellTypedSession) {
    auto r = check("new (s: !(int);?(bool);end) (s!<1>.s?(b).0 | ~s?(x).~s!<x = 1>.0)");
    EXPECT_TRUE(r.ok) << (r.error ? r.error->message : "");
}

TEST(Checker, RejectsPayloadMismatch) {
    auto r = check("new (s: !(int);end) (s!<true>.0 | ~s?(x).0)");
    ASSERT_FALSE(r.ok);
    ASSERT_TRUE(r.error.has_value());
    EXPECT_FALSE(r.error->rule.empty());
}

TEST(Checker, RejectsUnfinishedSession) {
    EXPECT_FALSE(check("new (s: !(int);!(int);end) (s!<1>.0 | ~s?(x).~s?(y).0)").ok);
}

TEST(Checker, RejectsLinearNameUsedTwice) {
    EXPECT_FALSE(check("free a : !(int);end\na!<1>.0 | a!<2>.0").ok);
}

TEST(Checker, RejectsUnusedLinearVariable) {
    EXPECT_FALSE(check("new (s: !(lin(?(int);end)->o);end) (s!<\\(z: ?(int);end). z?(x).0>.0 | ~s?(y).0)").ok);
}

TEST(Checker, AcceptsHigherOrderApplication) {
    auto r = check("new (s: !(lin(?(int);end)->o);end) ("
                   "s!<\\(z: ?(int);end). z?(x).0>.0"
                   " | ~s?(y).new (t: ?(int);end) (y t | ~t!<3>.0))");
    EXPECT_TRUE(r.ok) << (r.error ? r.error->message : "");
}

TEST(Checker, SharedNamesMayBeReused) {
    auto r = check("free k : chan<int>\nk!<1>.0 | k!<2>.0 | ~k?(x).0");
    EXPECT_TRUE(r.ok) << (r.error ? r.error->message : "");
}

TEST(Environment, Balance) {
    EXPECT_TRUE(balanced({{user_name("a"), parse_type("!(int);end")},
                          {user_name("a", 0, true), parse_type("?(int);end")}}));
    EXPECT_FALSE(balanced({{user_name("a"), parse_type("!(int);end")},
                           {user_name("a", 0, true), parse_type("!(int);end")}}));
    EXPECT_TRUE(balanced({{user_name("a"), parse_type("!(int);end")}}));
}

TEST(Environment, ReductionAdvancesBothEndpoints) {
    std::map<Name, TypeRef> delta{{user_name("a"), parse_type("!(int);?(bool);end")},
                                  {user_name("a", 0, true), parse_type("?(int);!(bool);end")}};
    auto next = env_reduce(delta);
    ASSERT_EQ(next.size(), 1u);
    EXPECT_TRUE(type_equal(next[0].at(user_name("a")), parse_type("?(bool);end")));
    EXPECT_TRUE(type_equal(next[0].at(user_name("a", 0, true)), parse_type("!(bool);end")));
}

TEST(Minimality, Examples) {
    EXPECT_TRUE(is_minimal(parse_type("!(int);end")));
    EXPECT_TRUE(is_minimal(parse_type("mu t.?(int);t")));
    EXPECT_TRUE(is_minimal(parse_type("end")));
    EXPECT_FALSE(is_minimal(parse_type("!(int);?(int);end")));
    EXPECT_FALSE(is_minimal(parse_type("mu t.!(int);?(int);t")));
    EXPECT_FALSE(is_minimal(parse_type("!(lin(!(int);!(int);end)->o);end")));
    // Choice is minimal when every arm is.
    EXPECT_TRUE(is_minimal(parse_type("+{a: end, b: end}")));
    EXPECT_FALSE(is_minimal(parse_type("+{a: end, b: !(int);!(int);end}")));
}

TEST(Property, DualIsAnInvolution) {
    auto r = testing::dual_involution(500, 2);
    EXPECT_EQ(r.checked, 500);
    EXPECT_TRUE(r.ok()) << r.counterexample;
}

TEST(Property, SubjectReduction) {
    auto r = testing::subject_reduction(200, 1);
    EXPECT_EQ(r.checked, 200);
    EXPECT_TRUE(r.ok()) << r.counterexample;
}

TEST(Property, SubstitutionPreservesTyping) {
    auto r = testing::substitution_lemma(500, 3);
    EXPECT_EQ(r.checked, 500);
    EXPECT_TRUE(r.ok()) << r.counterexample;
    // The generator tracks types precisely enough that premises rarely fail.
    EXPECT_LT(r.discarded, r.checked / 10);
}

TEST(Property, GeneratedProgramsAreWellTypedAndBalanced) {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        Program prog = load_program(print_file(random_program(rng)));
        CheckOutcome c = check_program(prog);
        EXPECT_TRUE(c.ok()) << print(prog.source);
    }
}

} // namespace
} // namespace minsess
