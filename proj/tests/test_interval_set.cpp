#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "generators.hpp"
#include "mcomp/interval_set.hpp"

using namespace mcomp;

namespace {

IntervalSet S(const char* text) { return IntervalSet::parse(text); }

} // namespace

TEST(Rat, CanonicalFormAndParsing)
{
    EXPECT_EQ(Rat(6, -8).str(), "-3/4");
    EXPECT_EQ(Rat::parse("10/4"), Rat(5, 2));
    EXPECT_EQ(Rat::parse("0.125"), Rat(1, 8));
    EXPECT_EQ(Rat::parse("-3.5e-2"), Rat(-7, 200));
    EXPECT_EQ(Rat::parse("1e-9"), Rat(1, 1000000000));
    EXPECT_EQ(Rat::parse("+7"), Rat(7));
    EXPECT_THROW(Rat::parse("1/0"), Error);
    EXPECT_THROW(Rat::parse("abc"), Error);
    EXPECT_THROW(Rat::parse(""), Error);
}

TEST(Interval, DegenerateAndEmpty)
{
    EXPECT_TRUE(Interval::point(Rat(1)).is_point());
    EXPECT_TRUE(Interval(Rat(1), Rat(1), true, false).empty());
    EXPECT_THROW(Interval(Rat(2), Rat(1), true, true), Error);
    Interval ray = Interval::open(ExtRat::neg_inf(), Rat(0));
    EXPECT_FALSE(ray.bounded());
    EXPECT_THROW(ray.length(), Error);
}

TEST(Combine, DifferenceOfSelfIsEmpty)
{
    EXPECT_TRUE(combine(S("[0,1]"), S("[0,1]"), SetOp::Difference).empty());
}

TEST(Combine, RemovingMiddleQuarterGivesStageOneShape)
{
    auto r = combine(S("[0,1]"), S("(3/8,5/8)"), SetOp::Difference);
    EXPECT_EQ(r, S("[0,3/8]∪[5/8,1]"));
    EXPECT_EQ(r.str(), "[0,3/8]∪[5/8,1]");
}

TEST(Combine, OverlapOfClosedIntervals)
{
    EXPECT_EQ(combine(S("[0,2]"), S("[1,3]"), SetOp::Intersection), S("[1,2]"));
}

TEST(Measure, Examples)
{
    EXPECT_EQ(measure(S("[0,1]")), Rat(1));
    EXPECT_EQ(measure(IntervalSet{}), Rat(0));
    EXPECT_EQ(measure(S("[0,3/8]∪[5/8,1]")), Rat(3, 4));
    EXPECT_EQ(measure(S("{1}u{2}")), Rat(0));
    try {
        measure(S("(-inf,0]"));
        FAIL() << "expected UnboundedSet";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnboundedSet);
    }
}

TEST(SymmetricDifference, Examples)
{
    auto a = S("[0,1/2)∪{3}");
    EXPECT_TRUE(symmetric_difference(a, a).empty());

    auto boundary = symmetric_difference(S("[0,1]"), S("(0,1)"));
    EXPECT_EQ(boundary, S("{0}∪{1}"));
    EXPECT_EQ(measure(boundary), Rat(0));

    auto d = symmetric_difference(S("[0,2]"), S("[1,3]"));
    EXPECT_EQ(d, S("[0,1)∪(2,3]"));
    EXPECT_EQ(measure(d), Rat(2));
}

TEST(Normalize, MergingRespectsEndpointFlags)
{
    EXPECT_EQ(S("[0,1)∪[1,2]"), S("[0,2]"));
    EXPECT_EQ(S("(0,1)∪(1,2)").size(), 2u);
    EXPECT_EQ(S("(0,1)∪{1}∪(1,2)"), S("(0,2)"));
    EXPECT_EQ(S("[0,1]∪[1/2,3/4)"), S("[0,1]"));
}

TEST(Complement, RaysAndPoints)
{
    EXPECT_EQ(S("[0,1]").complement(), S("(-inf,0)∪(1,+inf)"));
    EXPECT_EQ(S("(0,1)∪(1,2)").complement(), S("(-inf,0]∪{1}∪[2,+inf)"));
    EXPECT_EQ(IntervalSet{}.complement(), S("(-inf,+inf)"));
    EXPECT_TRUE(S("(-inf,+inf)").complement().empty());
}

TEST(Serialization, AsciiAliasAndErrors)
{
    EXPECT_EQ(S("[0,1/2) u (3/4,1]"), S("[0,1/2)∪(3/4,1]"));
    EXPECT_EQ(S("∅"), IntervalSet{});
    EXPECT_EQ(S("{1/3}").str(), "[1/3,1/3]");
    EXPECT_THROW(S("[0,1"), Error);
    EXPECT_THROW(S("[2,1]"), Error);
    EXPECT_THROW(S("[-inf,0]"), Error);
}

// ---- properties over random sets -------------------------------------------

class SetProperties : public ::testing::Test {
protected:
    std::mt19937_64 rng{20241015};
};

TEST_F(SetProperties, InclusionExclusionOfMeasure)
{
    for (int i = 0; i < 400; ++i) {
        auto a = gen::random_set(rng);
        auto b = gen::random_set(rng);
        EXPECT_EQ(measure(set_union(a, b)) + measure(set_intersection(a, b)), measure(a) + measure(b))
            << a.str() << " / " << b.str();
    }
}

TEST_F(SetProperties, AlgebraicLaws)
{
    for (int i = 0; i < 300; ++i) {
        auto a = gen::random_set(rng);
        auto b = gen::random_set(rng);
        auto c = gen::random_set(rng);
        EXPECT_EQ(set_union(a, b), set_union(b, a));
        EXPECT_EQ(set_intersection(a, b), set_intersection(b, a));
        EXPECT_EQ(set_union(set_union(a, b), c), set_union(a, set_union(b, c)));
        EXPECT_EQ(set_intersection(set_intersection(a, b), c), set_intersection(a, set_intersection(b, c)));
        EXPECT_EQ(set_difference(a, IntervalSet{}), a);
        EXPECT_EQ(set_union(set_difference(a, b), set_intersection(a, b)), a);
        EXPECT_TRUE(set_intersection(set_difference(a, b), b).empty());
        EXPECT_EQ(a.complement().complement(), a);
    }
}

TEST_F(SetProperties, NormalizationIsOrderIndependentAndIdempotent)
{
    for (int i = 0; i < 200; ++i) {
        std::vector<Interval> parts;
        for (int k = 0; k < 6; ++k) {
            parts.push_back(gen::random_interval(rng));
        }
        IntervalSet once(parts);
        std::shuffle(parts.begin(), parts.end(), rng);
        EXPECT_EQ(IntervalSet(parts), once);
        EXPECT_EQ(IntervalSet(once.components()), once);
        for (std::size_t k = 1; k < once.size(); ++k) {
            const auto& l = once.components()[k - 1];
            const auto& r = once.components()[k];
            bool separated = l.hi() < r.lo() || (l.hi() == r.lo() && !l.hi_closed() && !r.lo_closed());
            EXPECT_TRUE(separated) << once.str();
        }
    }
}

TEST_F(SetProperties, NullSymmetricDifferenceMeansIsolatedPoints)
{
    for (int i = 0; i < 200; ++i) {
        auto a = gen::random_set(rng);
        auto pts = gen::random_points(rng);
        auto b = set_union(set_difference(a, pts), gen::random_points(rng));
        auto d = symmetric_difference(a, b);
        EXPECT_EQ(measure(d), Rat(0));
        EXPECT_TRUE(is_finite_point_set(d));
        auto c = set_union(a, S("[5,6]"));
        EXPECT_FALSE(is_finite_point_set(symmetric_difference(a, c)));
    }
}

TEST_F(SetProperties, TextRoundTrip)
{
    for (int i = 0; i < 200; ++i) {
        auto a = gen::random_set(rng);
        EXPECT_EQ(IntervalSet::parse(a.str()), a);
    }
}
