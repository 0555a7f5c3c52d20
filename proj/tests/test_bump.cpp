#include <gtest/gtest.h>

#include <random>

#include "mcomp/bump.hpp"

using namespace mcomp;

namespace {

// Reference values from tests/oracles/bump_oracle.py (mpmath, 60 digits).
constexpr const char* kIPsi = "0.4439938161680794378230489211705526637612";
constexpr const char* kPsi0 = "0.367879441171442321595523770161";
constexpr const char* kPsiHalf = "0.263597138115726770079033945634";
constexpr const char* kPsi9_10 = "0.00517892437059775329517756124672";
constexpr const char* kM[] = {"0.3678794411714423", "0.79842975183359954", "7.7497049416941454", "186.39992131882830",
                              "8315.8900708955872"};
constexpr const char* kImage[] = {"0.00346912511431224330", "4.23425499122696138872e-7",
                                  "7.52154781343064703e-22", "5.99e-80"};

// Does the enclosure meet the reference value widened by a relative tolerance?
::testing::AssertionResult agrees(const BoundedReal& x, const char* ref, const char* rel)
{
    Rat v = Rat::parse(ref);
    Rat slack = v.abs() * Rat::parse(rel);
    BoundedReal target = BoundedReal::between(v - slack, v + slack);
    if (x.overlaps(target)) {
        return ::testing::AssertionSuccess();
    }
    return ::testing::AssertionFailure() << "[" << x.lo_str(25) << ", " << x.hi_str(25) << "] vs " << ref;
}

} // namespace

TEST(Psi, PointValues)
{
    EXPECT_TRUE(agrees(psi(Rat(0)), kPsi0, "1e-29"));
    EXPECT_TRUE(agrees(psi(Rat(1, 2)), kPsiHalf, "1e-29"));
    EXPECT_TRUE(agrees(psi(Rat(9, 10)), kPsi9_10, "1e-29"));
    EXPECT_TRUE(agrees(psi(Rat(-1, 2)), kPsiHalf, "1e-29"));
    EXPECT_LT(psi(Rat(0)).err_double(), 1e-35);
    EXPECT_THROW(psi(Rat(1)), Error);
    EXPECT_THROW(psi(Rat(-3, 2)), Error);
    EXPECT_EQ(psi_total(Rat(1)).hi_double(), 0.0);
}

TEST(Psi, Derivatives)
{
    EXPECT_TRUE(agrees(psi_derivative(2, Rat(1, 2)), "-1.35378283279188069571454470844", "1e-28"));
    EXPECT_TRUE(agrees(psi_derivative(4, Rat(3, 10)), "-5.90518693588478511852763935441", "1e-28"));
    EXPECT_TRUE(agrees(psi_derivative(3, Rat(-7, 10)), "-10.6115719523494612591377939453", "1e-28"));
    // numerator of the second derivative is 6x^4 - 2
    EXPECT_EQ(detail::bump_numerator(2), Polynomial({Rat(-2), Rat(0), Rat(0), Rat(0), Rat(6)}));
}

TEST(Psi, TotalIntegral)
{
    const auto& ip = bump_integral();
    EXPECT_TRUE(agrees(ip, kIPsi, "1e-17"));
    EXPECT_LT(ip.err_double(), 1e-17);
}

TEST(Psi, DerivativeMaxima)
{
    for (unsigned n = 0; n <= 2; ++n) {
        auto m = bump_derivative_max(n);
        EXPECT_TRUE(agrees(m, kM[n], "1e-12")) << n;
        EXPECT_LT((m.hi_double() - m.lo_double()) / m.hi_double(), 2e-6);
    }
    EXPECT_THROW(bump_derivative_max(5), Error);
}

TEST(PathologicalFn, HValues)
{
    PathologicalFn f(3);
    ASSERT_TRUE(f.h(Rat(0)).is_exact());
    EXPECT_EQ(f.h(Rat(0)).exact(), Rat(0));
    EXPECT_TRUE(f.h(Rat(3, 8)).certainly_zero()); // gap endpoint is surviving
    EXPECT_TRUE(agrees(f.h(Rat(1, 2)).enclosure(), "0.0229924650732151450997", "1e-20"));
    // generation-2 gaps have length 1/16: h < 2^-16 there
    auto gen2 = svc_stage(2).gaps();
    for (const auto& g : gen2) {
        if (g.generation != 2) {
            continue;
        }
        Rat mid = (g.interval.lo().value() + g.interval.hi().value()) / Rat(2);
        EXPECT_TRUE(f.h(mid).enclosure().certainly_less(Rat::pow2(-16)));
        EXPECT_TRUE(f.h(mid).enclosure().certainly_positive());
    }
}

TEST(PathologicalFn, FValues)
{
    PathologicalFn f1(1);
    EXPECT_EQ(f1.f(Rat(0)).exact(), Rat(0));
    EXPECT_TRUE(agrees(f1.f(Rat(1)).enclosure(), "0.00346870168881312060799", "1e-17"));
    EXPECT_TRUE(agrees(f1.f(Rat(1, 2)).enclosure(), "0.00173435084440656030", "1e-17"));
    EXPECT_TRUE(agrees(f1.f(Rat(7, 16)).enclosure(), "0.000426536823172832777429", "1e-16"));
    // f(5/8) - f(3/8) is the whole generation-1 gap mass
    auto inc = f1.increment(Rat(3, 8), Rat(5, 8));
    EXPECT_TRUE(inc.overlaps(f1.gap_integral(1)));
    EXPECT_TRUE(inc.certainly_positive());
}

TEST(PathologicalFn, FInsideDeeperStages)
{
    PathologicalFn f2(2);
    EXPECT_TRUE(agrees(f2.f(Rat(1, 2)).enclosure(), "0.00173456255715612165168964376981", "1e-16"));
    EXPECT_TRUE(agrees(f2.f(Rat(3, 16)).enclosure(), "0.000000105856374780673846679460745137", "1e-16"));
}

TEST(PathologicalFn, FMatchesGapByGapSum)
{
    // independent of the descent bookkeeping: add partial masses of every gap
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> pick(0, 1 << 20);
    for (unsigned n : {2u, 4u, 6u}) {
        PathologicalFn f(n);
        auto gaps = f.stage().gaps();
        for (int i = 0; i < 60; ++i) {
            Rat x(pick(rng), 1 << 20);
            BoundedReal sum = BoundedReal::zero();
            for (const auto& g : gaps) {
                sum += bump_partial_integral(g.interval.lo().value(), g.interval.hi().value(), x);
            }
            EXPECT_TRUE(f.f(x).enclosure().overlaps(sum)) << n << " " << x.str();
        }
    }
}

TEST(PathologicalFn, PrecisionBudget)
{
    PathologicalFn f(2);
    EXPECT_NO_THROW(f.f(Rat(1, 3), Rat::parse("1e-15")));
    try {
        f.f(Rat(1, 3), Rat::parse("1e-60"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PrecisionUnreachable);
    }
}

TEST(PathologicalFn, ImageMeasureOfSurvivingSet)
{
    for (unsigned n = 0; n < 4; ++n) {
        auto m = PathologicalFn(n).image_measure_surviving();
        EXPECT_TRUE(agrees(m, kImage[n], n == 3 ? "1e-2" : "1e-15")) << n;
    }
    EXPECT_TRUE(PathologicalFn(2).image_measure_surviving().certainly_less(Rat::parse("1e-18")));
    // stage 0: the whole limit integral
    EXPECT_TRUE(PathologicalFn(0).image_measure_surviving().overlaps(PathologicalFn(8).total()));
}

TEST(PathologicalFn, ImageMeasureDecreasesToZero)
{
    BoundedReal prev = PathologicalFn(0).image_measure_surviving();
    for (unsigned n = 1; n <= 12; ++n) {
        auto m = PathologicalFn(n).image_measure_surviving();
        EXPECT_TRUE(m.certainly_less(prev.lo_rat())) << n;
        prev = m;
    }
    EXPECT_TRUE(prev.certainly_less(Rat::parse("1e-1000")));
}

TEST(PathologicalFn, TotalIsSumOfGapMasses)
{
    for (unsigned n = 1; n <= 6; ++n) {
        PathologicalFn f(n);
        BoundedReal sum = BoundedReal::zero();
        for (const auto& g : f.stage().gaps()) {
            sum += bump_gap_integral(g.interval.lo().value(), g.interval.hi().value());
        }
        EXPECT_TRUE(f.total().overlaps(sum));
        // and the truncated total plus the limit's surviving mass is the same for every n
        EXPECT_TRUE((f.total() + f.image_measure_surviving()).overlaps(PathologicalFn(0).image_measure_surviving()));
    }
}

TEST(PathologicalFn, StrictlyIncreasingAcrossGaps)
{
    PathologicalFn f(3);
    auto gaps = f.stage().gaps();
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> pick(0, 1 << 16);
    int checked = 0;
    while (checked < 300) {
        Rat x(pick(rng), 1 << 16), y(pick(rng), 1 << 16);
        if (y < x) {
            std::swap(x, y);
        }
        bool spans = std::any_of(gaps.begin(), gaps.end(), [&](const Gap& g) {
            return x <= g.interval.lo().value() && g.interval.hi().value() <= y;
        });
        if (!spans) {
            continue;
        }
        ++checked;
        EXPECT_TRUE(f.increment(x, y).certainly_positive()) << x.str() << " " << y.str();
    }
}

TEST(PathologicalFn, HBelowDerivativeBound)
{
    PathologicalFn f(3);
    for (const auto& g : f.stage().gaps()) {
        Rat a = g.interval.lo().value(), b = g.interval.hi().value();
        auto bound = derivative_sup_bound(0, g.interval);
        for (int i = 1; i < 16; ++i) {
            Rat x = a + (b - a) * Rat(i, 16);
            EXPECT_FALSE(f.h(x).enclosure().certainly_greater(bound.hi_rat()));
        }
        EXPECT_TRUE(bound.certainly_less(bump_height(b - a).hi_rat() + Rat(1, 1000000)));
    }
}

TEST(DerivativeBound, Examples)
{
    Interval g1 = Interval::open(Rat(3, 8), Rat(5, 8));
    auto b0 = derivative_sup_bound(0, g1);
    EXPECT_TRUE(agrees(b0, "0.0229924650732151450997", "1e-6")); // 2^-4 e^-1
    auto b1 = derivative_sup_bound(1, g1);
    // 2^-4 * 2 * 4 * M_1
    EXPECT_TRUE(agrees(b1, "0.39921487591679977", "1e-6"));
    // generation k: 2^(-4^k) e^-1, decreasing in k
    BoundedReal prev = b0;
    for (unsigned k = 2; k <= 5; ++k) {
        auto gap = svc_stage(k).gaps()[0];
        ASSERT_EQ(gap.generation, k);
        auto b = derivative_sup_bound(0, gap.interval);
        EXPECT_TRUE(b.certainly_less(prev.lo_rat()));
        prev = b;
    }
    EXPECT_THROW(derivative_sup_bound(0, Interval::point(Rat(1))), Error);
}
