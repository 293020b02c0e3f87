#include "support.hpp"

#include "minsess/surface.hpp"

#include <gtest/gtest.h>

namespace minsess {
namespace {

TEST(Parser, TypesWithAliasesAndRecursion) {
    SourceFile f = parse_file("type U = lin(?(bool);end)->o\nfree a : !(U);end\n0\n");
    ASSERT_EQ(f.free.size(), 1u);
    EXPECT_TRUE(type_same(f.free[0].second, parse_type("!(lin(?(bool);end)->o);end")));
}

TEST(Parser, ChoiceArmsAreSorted) {
    TypeRef t = parse_type("&{neg: ?(int);end, add: ?(int);end}");
    ASSERT_EQ(t->arms.size(), 2u);
    EXPECT_EQ(t->arms[0].first, "add");
}

TEST(Parser, IndexedAndDualNames) {
    ProcRef p = parse_proc("~u@3!<1>.0");
    EXPECT_EQ(p->subject, user_name("u", 3, true));
    ProcRef q = parse_proc("%c@2?().0");
    EXPECT_EQ(q->subject, prop_name("c", 2));
}

TEST(Parser, ReportsPosition) {
    try {
        parse_proc("a!<1>.\n  b?(x.0");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 2);
        EXPECT_GT(e.column, 1);
    }
}

TEST(Parser, CommentsAreSkipped) {
    EXPECT_TRUE(proc_same(parse_proc("-- nothing here\n0"), p_nil()));
}

TEST(Printer, RoundTripsCorpus) {
    for (auto& f : testing::corpus_files()) {
        SourceFile src = parse_file(testing::read_file(testing::corpus_path(f)));
        SourceFile back = parse_file(print_file(src));
        EXPECT_TRUE(proc_same(src.entry, back.entry)) << f;
        ASSERT_EQ(src.free.size(), back.free.size()) << f;
        for (size_t i = 0; i < src.free.size(); ++i) EXPECT_TRUE(type_same(src.free[i].second, back.free[i].second)) << f;
    }
}

TEST(Printer, TypesRoundTrip) {
    Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        TypeRef t = random_session_type(rng, 4);
        EXPECT_TRUE(type_same(parse_type(print(t)), t)) << print(t);
    }
}

TEST(Property, ParseAfterPrintIsIdentity) {
    auto r = testing::parse_print(500, 4);
    EXPECT_EQ(r.checked, 500);
    EXPECT_TRUE(r.ok()) << r.counterexample;
}

TEST(NamePassing, DesugarsToAbstractionPassing) {
    ProcRef p = parse_proc("n!<<m : !(int);end>>.0 | ~n?((x: !(int);end)).x!<5>.0");
    ASSERT_TRUE(has_name_passing(p));
    ProcRef d = desugar_name_passing(p);
    EXPECT_FALSE(has_name_passing(d));
    EXPECT_EQ(free_names(d), free_names(p));
}

TEST(NamePassing, TypeBecomesArrowOverTrigger) {
    TypeRef t = desugar_np_type(parse_type("!(<<!(int);end>>);end"));
    ASSERT_EQ(t->kind, TypeKind::Out);
    EXPECT_EQ(t->items[0]->kind, TypeKind::LinArrow);
}

} // namespace
} // namespace minsess
