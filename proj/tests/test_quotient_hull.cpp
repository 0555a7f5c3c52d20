#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "mcomp/fn_spec.hpp"
#include "mcomp/quotient_hull.hpp"

using namespace mcomp;

namespace {

// Brute-force oracle: the hull's outer range must contain every quotient.
void expect_contains_samples(const PiecewiseFn& f, const Rat& x, const QuotientHull& h, std::mt19937_64& rng)
{
    auto r = h.range();
    Scalar fx;
    try {
        fx = f(x);
    } catch (const Error&) {
        EXPECT_TRUE(r.lo_is_neg_inf() && r.hi_is_pos_inf());
        return;
    }
    std::uniform_int_distribution<long> k(1, 4095);
    for (int i = 0; i < 64; ++i) {
        Rat off = h.delta * Rat(k(rng), 4096);
        for (const Rat& y : {x - off, x + off}) {
            if (!f.domain().contains(y)) {
                continue;
            }
            Scalar q;
            try {
                q = (f(y) - fx) / Scalar(y - x);
            } catch (const Error& e) {
                ASSERT_EQ(e.code(), ErrorCode::StubPiece);
                continue;
            }
            EXPECT_TRUE(r.overlaps(q.enclosure()))
                << f.str() << " x=" << x.str() << " y=" << y.str() << " q=" << q.str() << " hull=" << h.str();
        }
    }
}

} // namespace

TEST(QuotientHull, AffineIsExactSingleton)
{
    auto f = parse_fn_spec("affine 3 1 on [-1,1]");
    for (Rat x : {Rat(-1), Rat(0), Rat(1, 3), Rat(1)}) {
        for (const auto& h : quotient_hull(f, x, default_deltas())) {
            ASSERT_TRUE(h.lo_exact && h.hi_exact);
            EXPECT_EQ(*h.lo_exact, Rat(3));
            EXPECT_EQ(*h.hi_exact, Rat(3));
            EXPECT_TRUE(h.certified);
        }
    }
}

TEST(QuotientHull, AbsoluteValueAtZero)
{
    auto f = parse_fn_spec("piecewise [-1,1]: [-1,0) affine -1 0; [0,1] affine 1 0");
    for (const auto& h : quotient_hull(f, Rat(0), default_deltas())) {
        EXPECT_EQ(*h.lo_exact, Rat(-1));
        EXPECT_EQ(*h.hi_exact, Rat(1));
    }
    EXPECT_EQ(*quotient_hull_at(f, Rat(1, 2), Rat(1, 4)).lo_exact, Rat(1));
    // the window straddles the kink: (|y| - 1/4) / (y - 1/4) tends to 0 at y = -1/4
    auto w = quotient_hull_at(f, Rat(1, 4), Rat(1, 2));
    EXPECT_EQ(*w.lo_exact, Rat(0));
    EXPECT_FALSE(w.lo_attained);
    EXPECT_EQ(*w.hi_exact, Rat(1));
}

TEST(QuotientHull, SquareShrinksToZero)
{
    auto f = parse_fn_spec("poly 0 0 1 on [-1,1]");
    for (const auto& h : quotient_hull(f, Rat(0), default_deltas())) {
        EXPECT_EQ(*h.lo_exact, -h.delta);
        EXPECT_EQ(*h.hi_exact, h.delta);
        EXPECT_FALSE(h.lo_attained);
    }
    // off-centre: quotient x + y on (x - d, x + d)
    auto h = quotient_hull_at(f, Rat(1, 2), Rat(1, 8));
    EXPECT_EQ(*h.lo_exact, Rat(7, 8));
    EXPECT_EQ(*h.hi_exact, Rat(9, 8));
}

TEST(QuotientHull, JumpsGiveInfiniteEnds)
{
    auto f = parse_fn_spec("piecewise [0,1]: [0,1/2) const 0; [1/2,1] const 1");
    auto h = quotient_hull_at(f, Rat(1, 2), Rat(1, 8));
    EXPECT_TRUE(h.lo.certainly_greater(Rat(0)) || h.lo_exact == Rat(0));
    EXPECT_TRUE(h.hi.hi_is_pos_inf());
    // a removable spike sends the upper end to +inf and the lower end to 0
    auto g = parse_fn_spec("const 0 on [0,1] @1/2=1");
    auto s = quotient_hull_at(g, Rat(1, 4), Rat(1, 2));
    EXPECT_EQ(*s.hi_exact, Rat(4));
    EXPECT_EQ(*s.lo_exact, Rat(0));
    auto at = quotient_hull_at(g, Rat(1, 2), Rat(1, 8));
    EXPECT_TRUE(at.lo.lo_is_neg_inf());
    EXPECT_TRUE(at.hi.hi_is_pos_inf());
}

TEST(QuotientHull, StubsAreBoxed)
{
    auto f = parse_fn_spec("piecewise [0,1]: [0,1/2] affine 0 0; (1/2,1] stub cantor 0 1 1");
    auto far = quotient_hull_at(f, Rat(0), Rat(1));
    EXPECT_TRUE(far.range().contains(Rat(0)));
    EXPECT_TRUE(far.range().contains(Rat(1)));
    EXPECT_TRUE(far.range().finite());
    auto inside = quotient_hull_at(f, Rat(3, 4), Rat(1, 8));
    EXPECT_TRUE(inside.lo.lo_is_neg_inf());
}

TEST(QuotientHull, PathologicalFlatOnSurvivingPoints)
{
    auto f = make_pathological(2);
    for (const auto& x : cantor_endpoint_grid(2)) {
        EXPECT_TRUE(quotient_hull_at(f, x, Rat::pow2(-20)).touches_zero(default_zero_tol())) << x.str();
    }
    // inside a gap the hull pins down h(x)
    Rat x(1, 2);
    auto h = quotient_hull_at(f, x, Rat::pow2(-20));
    auto hx = PathologicalFn(2).h(x).enclosure();
    EXPECT_TRUE(h.range().contains(hx));
    EXPECT_LT(h.range().err_double(), 1e-6 * hx.mid_double());
}

TEST(QuotientHullProperty, NestedAndContainsSamples)
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        auto f = trial % 3 == 2 ? make_pathological(1 + trial % 3) : gen::random_member(rng, 8, trial % 4 == 1);
        Rat x = gen::random_rat(rng, 0, 1, 64);
        std::vector<Rat> ds{Rat(1, 4), Rat(1, 16), Rat(1, 64)};
        auto hs = quotient_hull(f, x, ds);
        for (std::size_t i = 0; i < hs.size(); ++i) {
            expect_contains_samples(f, x, hs[i], rng);
            if (i > 0) {
                auto outer = hs[i - 1].range();
                auto inner = hs[i].range();
                EXPECT_TRUE(inner.lo_is_neg_inf() ? outer.lo_is_neg_inf() : !inner.lo_less_than(outer.widened(BoundedReal(Rat::pow2(-100)))))
                    << f.str() << " at " << x.str();
                EXPECT_TRUE(inner.hi_is_pos_inf() ? outer.hi_is_pos_inf()
                                                  : !inner.hi_greater_than(outer.widened(BoundedReal(Rat::pow2(-100)))))
                    << f.str() << " at " << x.str();
            }
        }
    }
}

TEST(QuotientHullProperty, DerivativeInFinestHull)
{
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        Polynomial p({gen::random_rat(rng, -2, 2), gen::random_rat(rng, -2, 2), gen::random_rat(rng, -2, 2),
                      gen::random_rat(rng, -2, 2)});
        PiecewiseFn f({Piece::poly(Interval::closed(Rat(-1), Rat(1)), p)});
        Rat x = gen::random_rat(rng, -1, 1, 32);
        auto h = quotient_hull_at(f, x, Rat::pow2(-20));
        EXPECT_TRUE(h.range().contains(p.derivative()(x)));
        EXPECT_LT(h.range().err_double(), 1e-4);
    }
}

TEST(QuotientHullProperty, SampledInsideCertified)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        auto f = gen::random_member(rng, 6);
        Rat x = gen::random_rat(rng, 0, 1, 16);
        auto cert = quotient_hull(f, x, {Rat(1, 8)});
        auto samp = sampled_quotient_hull([&](const Rat& y) { return f(y); }, f.domain(), x, {Rat(1, 8)});
        EXPECT_FALSE(samp[0].certified);
        EXPECT_TRUE(cert[0].range().contains(samp[0].range())) << f.str() << " at " << x.str();
    }
}

TEST(QuotientHull, Errors)
{
    auto f = parse_fn_spec("affine 1 0 on [0,1]");
    EXPECT_THROW(quotient_hull(f, Rat(1, 2), {Rat(1, 8), Rat(1, 4)}), Error);
    EXPECT_THROW(quotient_hull_at(f, Rat(2), Rat(1)), Error);
    auto stub = parse_fn_spec("piecewise [0,1]: [0,1] stub cantor 0 1 1");
    try {
        sampled_quotient_hull([&](const Rat& y) { return stub(y); }, Interval::closed(Rat(0), Rat(1)), Rat(0),
                              {Rat(1, 4)});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SamplerExhausted);
    }
}

TEST(SfScan, Examples)
{
    auto affine = parse_fn_spec("affine 3 0 on [0,1]");
    auto rep = sf_scan(affine, uniform_grid(affine.domain(), 100));
    EXPECT_TRUE(rep.flagged.empty());
    EXPECT_EQ(rep.measure_proxy, Rat(0));
    EXPECT_TRUE(rep.heuristic);

    auto p = make_pathological(2);
    auto grid = cantor_endpoint_grid(2);
    auto pr = sf_scan(p, grid);
    EXPECT_EQ(pr.flagged.size(), grid.size());

    auto cube = parse_fn_spec("poly 0 0 0 1 on [-1,1]");
    auto cr = sf_scan(cube, uniform_grid(cube.domain(), 201));
    ASSERT_EQ(cr.flagged.size(), 1u);
    EXPECT_EQ(cr.flagged[0], Rat(0));
    EXPECT_EQ(cr.measure_proxy, Rat(1, 100));
}

TEST(SfScan, PathologicalProxyCoversSurvivingSet)
{
    auto p = make_pathological(3);
    auto rep = sf_scan(p, uniform_grid(p.domain(), 1025));
    EXPECT_GE(rep.measure_proxy, Rat(9, 16));
}

TEST(SfScanProperty, AffineFlagsNothingBelowSlope)
{
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        Rat m = gen::random_rat(rng, 1, 5);
        auto f = PiecewiseFn({Piece::affine(Interval::closed(Rat(0), Rat(1)), m, Rat(0))});
        EXPECT_TRUE(sf_scan(f, uniform_grid(f.domain(), 17), default_deltas(), m - Rat(1, 64)).flagged.empty());
    }
}

TEST(EnClassify, Examples)
{
    auto id = parse_fn_spec("affine 1 0 on [0,1]");
    EXPECT_TRUE(en_classify(id, Rat(1, 2), 2));
    EXPECT_FALSE(en_classify(id, Rat(1, 2), 1));
    auto cube = parse_fn_spec("poly 0 0 0 1 on [-2,2]");
    EXPECT_TRUE(en_classify(cube, Rat(1), 10));
    EXPECT_FALSE(en_classify(cube, Rat(0), 10));
    // x + x^3 at 0: quotients 1 + y^2 > 1, infimum 1 not attained
    auto g = parse_fn_spec("poly 0 1 0 1 on [-1,1]");
    EXPECT_TRUE(en_classify(g, Rat(0), 1));
    EXPECT_EQ(en_stratum(g, Rat(0), 100), 1u);
    EXPECT_FALSE(en_stratum(cube, Rat(0), 1000).has_value());
}

TEST(EnClassifyProperty, ConsistentWithHull)
{
    auto g = parse_fn_spec("poly 0 1 0 1 on [-1,1]");
    for (const auto& x : uniform_grid(g.domain(), 64)) {
        auto n = en_stratum(g, x, 10000);
        ASSERT_TRUE(n.has_value()) << x.str();
        auto h = quotient_hull_at(g, x, Rat(1, static_cast<long>(*n)));
        EXPECT_TRUE(h.lo.lo_at_least(Rat(1, static_cast<long>(*n))));
    }
}

TEST(LipschitzInverse, Examples)
{
    auto id = parse_fn_spec("affine 1 0 on [0,1]");
    auto r = lipschitz_inverse_check(id, {Rat(1, 10), Rat(1, 5), Rat(3, 10)}, 2);
    EXPECT_TRUE(r.applicable);
    EXPECT_EQ(r.pairs_checked, 3u);
    EXPECT_TRUE(r.violations.empty());

    auto cube = parse_fn_spec("poly 0 0 0 1 on [0,2]");
    auto c = lipschitz_inverse_check(cube, {Rat(1), Rat(21, 20), Rat(11, 10)}, 1);
    EXPECT_TRUE(c.applicable);
    EXPECT_TRUE(c.violations.empty());

    auto n = lipschitz_inverse_check(cube, {Rat(1, 100), Rat(2, 100)}, 1);
    EXPECT_FALSE(n.applicable);
    EXPECT_FALSE(n.reason.empty());

    try {
        lipschitz_inverse_check(id, {Rat(0), Rat(1, 2)}, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PreconditionUnmet);
    }
}
