#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcomp/piecewise.hpp"

namespace mcomp {

/// Closed hull of the difference quotients (f(y) - f(x)) / (y - x) over
/// 0 < |y - x| < delta, in the extended reals. `lo` and `hi` are enclosures
/// of the two ends (possibly infinite). When an end is exact, `*_exact`
/// holds it and `*_attained` says whether some quotient equals it.
struct QuotientHull {
    Rat delta;
    BoundedReal lo;
    BoundedReal hi;
    std::optional<Rat> lo_exact;
    std::optional<Rat> hi_exact;
    bool lo_attained = true;
    bool hi_attained = true;
    std::size_t samples = 0;
    bool certified = false;

    /// Outer enclosure of the whole hull.
    BoundedReal range() const { return BoundedReal::hull(lo.lower_edge(), hi.upper_edge()); }

    /// The hull meets [-tol, tol].
    bool touches_zero(const Rat& tol) const { return !lo.certainly_greater(tol) && !hi.certainly_less(-tol); }

    std::string str() const
    {
        auto end = [](const BoundedReal& v, const std::optional<Rat>& e, bool lower) {
            if (e) {
                return e->str();
            }
            return lower ? v.lo_str(12) : v.hi_str(12);
        };
        return "[" + end(lo, lo_exact, true) + ", " + end(hi, hi_exact, false) + "]";
    }
};

namespace detail {

struct HullEnd {
    BoundedReal v;
    std::optional<Rat> exact;
    bool attained = true;
};

class HullAccumulator {
public:
    void candidate(const Scalar& q, bool attained)
    {
        HullEnd e{q.enclosure(), q.is_exact() ? std::optional<Rat>(q.exact()) : std::nullopt, attained};
        merge(lo_, e, true);
        merge(hi_, e, false);
    }
    void range(const BoundedReal& r)
    {
        merge(lo_, HullEnd{r.lower_edge(), std::nullopt, true}, true);
        merge(hi_, HullEnd{r.upper_edge(), std::nullopt, true}, false);
    }
    void lower(const BoundedReal& v) { merge(lo_, HullEnd{v, std::nullopt, true}, true); }
    void upper(const BoundedReal& v) { merge(hi_, HullEnd{v, std::nullopt, true}, false); }
    void count() { ++parts_; }

    QuotientHull finish(const Rat& delta) const
    {
        if (!lo_ || !hi_) {
            throw Error(ErrorCode::IsolatedPoint, "no admissible y near the point");
        }
        QuotientHull h;
        h.delta = delta;
        h.lo = lo_->v;
        h.hi = hi_->v;
        h.lo_exact = lo_->exact;
        h.hi_exact = hi_->exact;
        h.lo_attained = lo_->attained;
        h.hi_attained = hi_->attained;
        h.samples = parts_;
        return h;
    }

private:
    static void merge(std::optional<HullEnd>& cur, HullEnd e, bool want_min)
    {
        if (!cur) {
            cur = std::move(e);
            return;
        }
        if (cur->exact && e.exact) {
            if (*e.exact == *cur->exact) {
                cur->attained = cur->attained || e.attained;
            } else if ((*e.exact < *cur->exact) == want_min) {
                cur = std::move(e);
            }
            return;
        }
        // keep an exact end when the other candidate provably does not beat it
        auto beats_not = [&](const HullEnd& inexact, const Rat& ex, bool& tie) {
            bool strict = want_min ? inexact.v.certainly_greater(ex) : inexact.v.certainly_less(ex);
            bool weak = want_min ? inexact.v.lo_at_least(ex) : inexact.v.hi_at_most(ex);
            tie = weak && !strict;
            return weak;
        };
        bool tie = false;
        if (cur->exact && beats_not(e, *cur->exact, tie)) {
            cur->attained = cur->attained || tie;
            return;
        }
        if (e.exact && beats_not(*cur, *e.exact, tie)) {
            e.attained = e.attained || tie;
            cur = std::move(e);
            return;
        }
        cur->v = want_min ? BoundedReal::min_of(cur->v, e.v) : BoundedReal::max_of(cur->v, e.v);
        cur->exact.reset();
        cur->attained = true;
    }

    std::optional<HullEnd> lo_, hi_;
    std::size_t parts_ = 0;
};

/// r(y) / (y - x) at an exact point or over a root bracket.
inline Scalar rational_quotient(const Polynomial& r, const Rat& x, const RootBracket& at)
{
    if (at.exact()) {
        return Scalar(r(at.lo) / (at.lo - x));
    }
    BoundedReal y = at.enclosure();
    return Scalar(r(y) / (y - BoundedReal(x)));
}

inline void add_roots(HullAccumulator& acc, const Polynomial& n, const Rat& u, const Rat& v,
                      const std::function<Scalar(const RootBracket&)>& value)
{
    if (n.is_zero() || n.degree() == 0) {
        return;
    }
    for (auto r : real_roots(n, u, v)) {
        if (r.exact() && (r.lo == u || r.lo == v)) {
            continue;
        }
        acc.candidate(value(refine(n, r, Rat::pow2(-80))), true);
    }
}

/// Quotients over y in the open segment (u, v) of one piece, on one side of
/// x. `jump` is f(x+) - f(x) (right side) or f(x) - f(x-) (left side) and
/// only matters when the segment touches x.
inline void segment_quotients(HullAccumulator& acc, const Piece& piece, const Rat& x, const Scalar& fx,
                              const Rat& u, const Rat& v, bool right, const Scalar& jump)
{
    acc.count();
    const bool adjacent = right ? u == x : v == x;
    const Rat far = right ? v - x : x - u; // distance to the far end

    if (piece.is_stub()) {
        if (adjacent) {
            acc.range(BoundedReal::entire());
            return;
        }
        BoundedReal d = BoundedReal::between(u - x, v - x);
        acc.range((piece.stub_value_box() - fx.enclosure()) / d);
        return;
    }

    auto p = piece.polynomial();
    if (p && fx.is_exact()) {
        const Rat f0 = fx.exact();
        if (adjacent) {
            Rat c = (*p)(x) - f0;
            Polynomial q = Polynomial::divmod(*p - Polynomial::constant((*p)(x)), Polynomial({-x, Rat(1)})).first;
            if (c.is_zero()) {
                bool flat = q.degree() <= 0; // constant quotient: every value attained
                acc.candidate(Scalar(q(x)), flat);
                acc.candidate(Scalar(q(right ? v : u)), flat);
                add_roots(acc, q.derivative(), u, v, [&](const RootBracket& r) {
                    return r.exact() ? Scalar(q(r.lo)) : Scalar(q(r.enclosure()));
                });
                return;
            }
            auto qr = range_on(q, u, v);
            // c / (y - x) seen from this side
            Rat t = right ? c : -c;
            if (t.sign() > 0) {
                acc.lower(qr.min.enclosure().lower_edge() + BoundedReal(t / far));
                acc.upper(BoundedReal::pos_inf());
            } else {
                acc.upper(qr.max.enclosure().upper_edge() + BoundedReal(t / far));
                acc.lower(BoundedReal::neg_inf());
            }
            return;
        }
        Polynomial r = *p - Polynomial::constant(f0);
        acc.candidate(Scalar(r(u) / (u - x)), false);
        acc.candidate(Scalar(r(v) / (v - x)), false);
        Polynomial n = r.derivative() * Polynomial({-x, Rat(1)}) - r;
        if (n.is_zero()) {
            acc.candidate(Scalar(r(u) / (u - x)), true);
        }
        add_roots(acc, n, u, v, [&](const RootBracket& at) { return rational_quotient(r, x, at); });
        return;
    }

    // mean-value bounds from slope metadata
    BoundedReal s = piece.slope_range(u, v);
    auto add_slopes = [&] {
        if (s.finite() && s.lo_rat() == s.hi_rat()) {
            acc.candidate(Scalar(s.lo_rat()), true);
        } else {
            acc.range(s);
        }
    };
    if (adjacent) {
        if (jump.certainly_zero()) {
            add_slopes();
            return;
        }
        auto sign = jump.sign();
        if (!sign) {
            acc.range(BoundedReal::entire());
        } else if (*sign > 0) {
            acc.lower(s.lower_edge() + jump.enclosure().lower_edge() / BoundedReal(far));
            acc.upper(BoundedReal::pos_inf());
        } else {
            acc.upper(s.upper_edge() + jump.enclosure().upper_edge() / BoundedReal(far));
            acc.lower(BoundedReal::neg_inf());
        }
        return;
    }
    // Q(y) is a convex combination of the quotient at the near end and a
    // mean slope over the segment
    const Rat& near = right ? u : v;
    acc.candidate((piece.eval(near) - fx) / Scalar(near - x), false);
    add_slopes();
}

} // namespace detail

/// Certified hull at one scale, from piece metadata.
inline QuotientHull quotient_hull_at(const PiecewiseFn& f, const Rat& x, const Rat& delta)
{
    if (delta.sign() <= 0) {
        throw Error(ErrorCode::DomainError, "delta must be positive");
    }
    Scalar fx;
    try {
        fx = f(x);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::StubPiece) {
            throw;
        }
        QuotientHull h;
        h.delta = delta;
        h.lo = BoundedReal::neg_inf();
        h.hi = BoundedReal::pos_inf();
        h.certified = true;
        return h;
    }
    const Rat wl = max(x - delta, f.domain_lo());
    const Rat wr = min(x + delta, f.domain_hi());
    detail::HullAccumulator acc;

    // explicitly valued points and piece ends inside the window
    auto point = [&](const Rat& y) {
        if (y != x && wl < y && y < wr) {
            acc.candidate((f(y) - fx) / Scalar(y - x), true);
        }
    };
    for (auto it = f.values().upper_bound(wl); it != f.values().end() && it->first < wr; ++it) {
        point(it->first);
    }

    const auto& pieces = f.pieces();
    std::size_t i = wl == f.domain_lo() ? 0 : f.piece_left_of(wl);
    bool x_is_break = f.values().count(x) > 0;
    for (std::size_t j = i; j < pieces.size() && pieces[j].lo() < wr; ++j) {
        if (pieces[j].lo() == x || pieces[j].hi() == x) {
            x_is_break = true;
        }
    }
    std::optional<Jump> jx;
    auto jump_from = [&](bool right) {
        if (!x_is_break) {
            return Scalar();
        }
        if (!jx) {
            jx = f.jump_at(x);
        }
        return right ? jx->right : jx->left;
    };
    for (std::size_t j = i; j < pieces.size() && pieces[j].lo() < wr; ++j) {
        const Piece& pc = pieces[j];
        Rat u = max(pc.lo(), wl), v = min(pc.hi(), wr);
        if (!(u < v)) {
            continue;
        }
        if (pc.lo() > wl) {
            point(pc.lo());
        }
        if (u < x && x < v) {
            detail::segment_quotients(acc, pc, x, fx, u, x, false, jump_from(false));
            detail::segment_quotients(acc, pc, x, fx, x, v, true, jump_from(true));
        } else {
            bool right = u >= x;
            detail::segment_quotients(acc, pc, x, fx, u, v, right, jump_from(right));
        }
    }
    QuotientHull h = acc.finish(delta);
    h.certified = true;
    return h;
}

inline std::vector<QuotientHull> quotient_hull(const PiecewiseFn& f, const Rat& x, const std::vector<Rat>& deltas)
{
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        if (!(deltas[i] < deltas[i - 1])) {
            throw Error(ErrorCode::DomainError, "deltas must be strictly decreasing");
        }
    }
    std::vector<QuotientHull> out;
    out.reserve(deltas.size());
    for (const auto& d : deltas) {
        out.push_back(quotient_hull_at(f, x, d));
    }
    return out;
}

/// delta = 2^-k for k = 3..20.
inline std::vector<Rat> default_deltas()
{
    std::vector<Rat> d;
    for (int k = 3; k <= 20; ++k) {
        d.push_back(Rat::pow2(-k));
    }
    return d;
}

using ScalarFn = std::function<Scalar(const Rat&)>;

/// Uncertified hull of sampled quotients for a black-box function: `per_side`
/// evenly spaced y on each side of x inside the window.
inline std::vector<QuotientHull> sampled_quotient_hull(const ScalarFn& f, const Interval& domain, const Rat& x,
                                                       const std::vector<Rat>& deltas, unsigned per_side = 64)
{
    Scalar fx = f(x);
    std::vector<QuotientHull> out;
    for (const auto& d : deltas) {
        detail::HullAccumulator acc;
        bool any_y = false;
        for (unsigned k = 1; k <= per_side; ++k) {
            Rat off = d * Rat(static_cast<long>(k), static_cast<long>(per_side) + 1);
            for (const Rat& y : {x - off, x + off}) {
                if (!domain.contains(y)) {
                    continue;
                }
                any_y = true;
                try {
                    acc.candidate((f(y) - fx) / Scalar(y - x), true);
                    acc.count();
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::StubPiece) {
                        throw;
                    }
                }
            }
        }
        if (!any_y) {
            throw Error(ErrorCode::IsolatedPoint, "no sample point near " + x.str());
        }
        try {
            out.push_back(acc.finish(d));
        } catch (const Error&) {
            throw Error(ErrorCode::SamplerExhausted, "no evaluable sample near " + x.str());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// S_f scan and E_n strata

/// `uniform:N` with N >= 2 points including both ends.
inline std::vector<Rat> uniform_grid(const Interval& dom, unsigned n)
{
    if (n < 2) {
        throw Error(ErrorCode::DomainError, "a uniform grid needs at least 2 points");
    }
    const Rat a = dom.lo().value(), b = dom.hi().value();
    std::vector<Rat> g;
    for (unsigned i = 0; i < n; ++i) {
        g.push_back(a + (b - a) * Rat(static_cast<long>(i), static_cast<long>(n) - 1));
    }
    return g;
}

inline std::vector<Rat> cantor_endpoint_grid(unsigned stage, const RemovalSchedule& sched = RemovalSchedule::standard())
{
    return FatCantorStage(stage, sched).endpoints();
}

struct SfScanReport {
    std::vector<Rat> grid;
    std::vector<Rat> flagged;
    Rat measure_proxy;
    Rat zero_tol;
    Rat finest_delta;
    bool heuristic = true; // sampling evidence, never a certificate
};

/// Default tolerance 10^-9.
inline Rat default_zero_tol() { return Rat(1, 1000000000); }

/// Flags grid points whose finest hull meets [-tol, tol]. The proxy is the
/// exact measure of the union of cells [x - s_l/2, x + s_r/2] around flagged
/// points, s_l and s_r being the distances to the grid neighbours.
inline SfScanReport sf_scan(const PiecewiseFn& f, std::vector<Rat> grid, const std::vector<Rat>& deltas = default_deltas(),
                            const Rat& zero_tol = default_zero_tol())
{
    if (deltas.empty()) {
        throw Error(ErrorCode::DomainError, "sf_scan needs at least one delta");
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    SfScanReport rep;
    rep.zero_tol = zero_tol;
    rep.finest_delta = *std::min_element(deltas.begin(), deltas.end());
    std::vector<Interval> cells;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Rat& x = grid[i];
        QuotientHull h = quotient_hull_at(f, x, rep.finest_delta);
        if (!h.touches_zero(zero_tol)) {
            continue;
        }
        rep.flagged.push_back(x);
        Rat lo = i > 0 ? (grid[i - 1] + x) / Rat(2) : x;
        Rat hi = i + 1 < grid.size() ? (x + grid[i + 1]) / Rat(2) : x;
        cells.push_back(Interval::closed(lo, hi));
    }
    rep.grid = std::move(grid);
    rep.measure_proxy = IntervalSet(std::move(cells)).measure();
    return rep;
}

/// x belongs to E_n: every quotient over 0 < |y - x| < 1/n exceeds 1/n.
/// Decided from the certified hull, so `true` is a proof.
inline bool en_classify(const PiecewiseFn& f, const Rat& x, unsigned n)
{
    if (n == 0) {
        throw Error(ErrorCode::DomainError, "n must be positive");
    }
    Rat bound(1, static_cast<long>(n));
    QuotientHull h = quotient_hull_at(f, x, bound);
    if (h.lo.certainly_greater(bound)) {
        return true;
    }
    return h.lo_exact && *h.lo_exact == bound && !h.lo_attained;
}

/// Smallest n <= n_max with x in E_n, if any.
inline std::optional<unsigned> en_stratum(const PiecewiseFn& f, const Rat& x, unsigned n_max)
{
    // E_n grows with n, so bisect on the first success
    if (!en_classify(f, x, n_max)) {
        return std::nullopt;
    }
    unsigned lo = 1, hi = n_max;
    while (lo < hi) {
        unsigned mid = lo + (hi - lo) / 2;
        if (en_classify(f, x, mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

struct LipschitzReport {
    unsigned k = 0;
    bool applicable = false;
    std::string reason;
    std::size_t pairs_checked = 0;
    std::vector<std::pair<Rat, Rat>> violations; // |x - y| < k |f(x) - f(y)| certainly fails
    std::vector<std::pair<Rat, Rat>> undecided;  // enclosures too wide to decide
};

/// Checks |x - y| < k |f(x) - f(y)| for all pairs of points that lie within
/// 1/k of each other and in E_k.
inline LipschitzReport lipschitz_inverse_check(const PiecewiseFn& f, const std::vector<Rat>& points, unsigned k)
{
    if (k == 0) {
        throw Error(ErrorCode::DomainError, "k must be positive");
    }
    LipschitzReport rep;
    rep.k = k;
    const Rat width(1, static_cast<long>(k));
    if (!points.empty()) {
        auto [mn, mx] = std::minmax_element(points.begin(), points.end());
        if (*mx - *mn >= width) {
            throw Error(ErrorCode::PreconditionUnmet,
                        "points spread over " + (*mx - *mn).str() + ", not below 1/k = " + width.str());
        }
    }
    for (const auto& x : points) {
        if (!en_classify(f, x, k)) {
            rep.reason = x.str() + " is not certified in E_" + std::to_string(k);
            return rep;
        }
    }
    rep.applicable = true;
    std::vector<Scalar> vals;
    for (const auto& x : points) {
        vals.push_back(f(x));
    }
    const Scalar kk(Rat(static_cast<long>(k)));
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (points[i] == points[j]) {
                continue;
            }
            ++rep.pairs_checked;
            Scalar gap = kk * (vals[i] - vals[j]).abs() - Scalar((points[i] - points[j]).abs());
            auto s = gap.sign();
            if (!s) {
                rep.undecided.emplace_back(points[i], points[j]);
            } else if (*s <= 0) {
                rep.violations.emplace_back(points[i], points[j]);
            }
        }
    }
    return rep;
}

} // namespace mcomp
