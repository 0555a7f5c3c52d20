#include <gtest/gtest.h>

#include <chrono>

#include "mcomp/fat_cantor.hpp"

using namespace mcomp;

namespace {

// Independent construction: repeatedly cut the centred middle out of every
// component using plain set difference.
IntervalSet brute_force_stage(unsigned n, const RemovalSchedule& s)
{
    IntervalSet cur(Interval::closed(Rat(0), Rat(1)));
    for (unsigned k = 1; k <= n; ++k) {
        std::vector<Interval> cuts;
        Rat r = s.removal(k);
        for (const auto& c : cur.components()) {
            Rat mid = (c.lo().value() + c.hi().value()) / Rat(2);
            cuts.push_back(Interval::open(mid - r / Rat(2), mid + r / Rat(2)));
        }
        cur = set_difference(cur, IntervalSet(cuts));
    }
    return cur;
}

} // namespace

TEST(FatCantor, SmallStages)
{
    EXPECT_EQ(svc_stage(0).surviving(), IntervalSet(Interval::closed(Rat(0), Rat(1))));
    auto s1 = svc_stage(1);
    EXPECT_EQ(s1.surviving(), IntervalSet::parse("[0,3/8]∪[5/8,1]"));
    ASSERT_EQ(s1.gaps().size(), 1u);
    EXPECT_EQ(s1.gaps()[0].interval, Interval::open(Rat(3, 8), Rat(5, 8)));
    EXPECT_EQ(s1.gaps()[0].generation, 1u);
    EXPECT_EQ(s1.measure(), Rat(3, 4));
    EXPECT_EQ(svc_stage(2).measure(), Rat(5, 8));
    EXPECT_EQ(svc_stage(3).measure(), Rat(9, 16));
}

TEST(FatCantor, ComponentLengths)
{
    EXPECT_EQ(component_length(svc_stage(0)), Rat(1));
    EXPECT_EQ(component_length(svc_stage(1)), Rat(3, 8));
    EXPECT_EQ(component_length(svc_stage(2)), Rat(5, 32));
}

TEST(FatCantor, MatchesBruteForceConstruction)
{
    for (auto sched : {RemovalSchedule::standard(), RemovalSchedule::geometric(Rat(1, 3), Rat(1, 5)),
                       RemovalSchedule::eventually_geometric({Rat(1, 2), Rat(1, 20)}, Rat(1, 100), Rat(1, 3))}) {
        for (unsigned n = 0; n <= 7; ++n) {
            FatCantorStage st(n, sched);
            auto oracle = brute_force_stage(n, sched);
            EXPECT_EQ(st.surviving(), oracle) << sched.str() << " n=" << n;
            EXPECT_EQ(st.measure(), measure(oracle));
            EXPECT_EQ(st.measure(), Rat(1) - sched.removed_through(n));
            EXPECT_EQ(st.surviving().size(), st.component_count());
            // surviving and gaps tile [0,1]
            std::vector<Interval> all = st.surviving().components();
            for (const auto& g : st.gaps()) {
                EXPECT_EQ(g.interval.length(), sched.removal(g.generation));
                all.push_back(g.interval);
            }
            EXPECT_EQ(IntervalSet(all), IntervalSet(Interval::closed(Rat(0), Rat(1))));
        }
    }
}

TEST(FatCantor, NestingAndDecreasingMeasure)
{
    for (unsigned n = 0; n < 10; ++n) {
        auto a = svc_stage(n);
        auto b = svc_stage(n + 1);
        EXPECT_TRUE(is_subset(b.surviving(), a.surviving()));
        EXPECT_LT(b.measure(), a.measure());
        EXPECT_GT(b.measure(), Rat(1, 2));
        EXPECT_LT(b.component_length(), Rat::pow2(-static_cast<long>(n + 1)));
    }
}

TEST(FatCantor, GapEndpointsAvoidEarlierComponentEndpoints)
{
    auto st = svc_stage(6);
    for (unsigned k = 0; k < 6; ++k) {
        auto earlier = svc_stage(k).endpoints();
        for (const auto& g : st.gaps()) {
            if (g.generation <= k) {
                continue;
            }
            for (const auto& e : earlier) {
                EXPECT_NE(g.interval.lo().value(), e);
                EXPECT_NE(g.interval.hi().value(), e);
            }
        }
    }
}

TEST(FatCantor, StageThirtyIsClosedForm)
{
    auto t0 = std::chrono::steady_clock::now();
    auto st = svc_stage(30);
    Rat m = st.measure();
    EXPECT_EQ(m, Rat(1, 2) + Rat::pow2(-31));
    EXPECT_LT((m - Rat(1, 2)).abs(), Rat(1, 100000000));
    EXPECT_FALSE(st.listable());
    EXPECT_THROW(st.surviving(), Error);
    // last component ends at 1
    EXPECT_EQ(st.component(st.component_count() - 1).hi(), ExtRat(Rat(1)));
    EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(1));
    EXPECT_THROW(svc_stage(31), Error);
}

TEST(FatCantor, LocateAgreesWithListing)
{
    auto st = svc_stage(5);
    auto surv = st.surviving();
    for (long i = 0; i <= 1024; ++i) {
        Rat x(i, 1024);
        auto loc = st.locate(x);
        EXPECT_EQ(!loc.in_gap, surv.contains(x)) << x.str();
        EXPECT_TRUE(loc.where.contains(x));
    }
    EXPECT_THROW(st.locate(Rat(2)), Error);
}

TEST(FatCantor, ScheduleValidation)
{
    EXPECT_EQ(RemovalSchedule::standard().total_removal(), Rat(1, 2));
    EXPECT_EQ(RemovalSchedule::parse("geometric:1/4,1/4"), RemovalSchedule::standard());
    EXPECT_THROW(RemovalSchedule::geometric(Rat(1, 2), Rat(1, 2)), Error);  // diverges
    EXPECT_THROW(RemovalSchedule::geometric(Rat(3, 4), Rat(1, 4)), Error);  // total 3/2
    EXPECT_THROW(RemovalSchedule::geometric(Rat(1, 2), Rat(1, 4)), Error);  // total exactly 1
    EXPECT_THROW(RemovalSchedule::geometric(Rat(0), Rat(1, 4)), Error);
    EXPECT_THROW(RemovalSchedule::parse("quadratic"), Error);
    try {
        RemovalSchedule::geometric(Rat(1), Rat(1, 8));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScheduleTooFat);
    }
}

TEST(Rat, DecimalRendering)
{
    EXPECT_EQ(Rat(9, 16).decimal(4), "0.5625");
    EXPECT_EQ(Rat(2, 3).decimal(3), "0.667");
    EXPECT_EQ(Rat(-1, 8).decimal(2), "-0.13");
    EXPECT_EQ(Rat(5).decimal(0), "5");
    EXPECT_EQ(Rat(1, 1000).decimal(1), "0.0");
}
