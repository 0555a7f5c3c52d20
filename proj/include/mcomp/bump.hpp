#pragma once

#include <algorithm>
#include <array>
#include <mutex>
#include <queue>
#include <vector>

#include "mcomp/fat_cantor.hpp"
#include "mcomp/polynomial.hpp"

namespace mcomp {

// The bump psi(x) = exp(-1/(1 - x^2)) on (-1, 1), its derivatives, and its
// integral. Writing w = 1 - x^2 and u = 1/w,
//     psi^(n)(x) = psi(x) P_n(x) / w^(2n) = e^-u u^(2n) P_n(x),
// with P_0 = 1 and P_{n+1} = -2x P_n + w^2 P_n' + 4n x w P_n.

namespace detail {

inline const Polynomial& bump_numerator(unsigned n)
{
    static const std::vector<Polynomial> table = [] {
        const Polynomial x({Rat(0), Rat(1)});
        const Polynomial w({Rat(1), Rat(0), Rat(-1)});
        std::vector<Polynomial> p{Polynomial::constant(Rat(1))};
        for (unsigned k = 0; k < 8; ++k) {
            const Polynomial& pk = p.back();
            Polynomial next = Polynomial::constant(Rat(-2)) * x * pk + w * w * pk.derivative() +
                              Polynomial::constant(Rat(4L * k)) * x * w * pk;
            p.push_back(next);
        }
        return p;
    }();
    if (n >= table.size()) {
        throw Error(ErrorCode::DomainError, "bump derivatives tabulated up to order 8");
    }
    return table[n];
}

/// e^-u u^(2n) at an exact u.
inline BoundedReal bump_radial(const Rat& u, unsigned n)
{
    return BoundedReal(-u).exp() * BoundedReal(u).pow(2 * n);
}

/// Enclosure of |psi^(n)| over [xl, xh] with 0 <= xl <= xh <= 1.
inline BoundedReal bump_derivative_abs_range(const Rat& xl, const Rat& xh, unsigned n)
{
    // g(u) = e^-u u^(2n) rises up to u = 2n and decays after it
    BoundedReal g_at_lo = bump_radial((Rat(1) - xl * xl).inverse(), n);
    BoundedReal g_at_hi = xh == Rat(1) ? BoundedReal::zero() : bump_radial((Rat(1) - xh * xh).inverse(), n);
    BoundedReal g_min = BoundedReal::min_of(g_at_lo, g_at_hi);
    BoundedReal g_max = BoundedReal::max_of(g_at_lo, g_at_hi);
    Rat peak(2L * n);
    Rat u_lo = (Rat(1) - xl * xl).inverse();
    bool peak_inside = u_lo <= peak && (xh == Rat(1) || peak <= (Rat(1) - xh * xh).inverse());
    if (peak_inside) {
        g_max = BoundedReal::max_of(g_max, bump_radial(peak, n));
    }
    BoundedReal p = bump_numerator(n)(BoundedReal::between(xl, xh)).abs();
    return BoundedReal::hull(g_min.lower_edge() * p.lower_edge(), g_max.upper_edge() * p.upper_edge());
}

/// Boole-rule panels covering [0, cut] with cumulative integral enclosures.
/// The per-panel remainder (8/945) h^7 sup|psi^(6)| (h = width/4) is folded
/// into each enclosure, so every partial sum is certified.
class BumpIntegralTable {
public:
    static const BumpIntegralTable& instance()
    {
        static const BumpIntegralTable t;
        return t;
    }

    /// Enclosure of the integral of psi over [-1, 1].
    const BoundedReal& total() const { return total_; }

    /// Enclosure of the integral of psi over [0, s], 0 <= s <= 1.
    BoundedReal from_zero(const Rat& s) const
    {
        if (s >= cut_) {
            BoundedReal tail = BoundedReal::between(Rat(0), s - cut_) * psi_at(cut_).upper_edge();
            return cum_.back() + BoundedReal::hull(BoundedReal::zero(), tail);
        }
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
        std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        if (nodes_[i] == s) {
            return cum_[i];
        }
        return cum_[i] + boole(nodes_[i], s);
    }

    /// Enclosure of the integral of psi over [-1, t], -1 <= t <= 1.
    BoundedReal from_minus_one(const Rat& t) const
    {
        BoundedReal half = total_.scaled_pow2(-1);
        BoundedReal part = from_zero(t.abs());
        BoundedReal r = t.sign() >= 0 ? half + part : half - part;
        return r.clamped_below(Rat(0));
    }

    std::size_t panels() const { return nodes_.size() - 1; }

    static BoundedReal psi_at(const Rat& x)
    {
        if (x.abs() >= Rat(1)) {
            return BoundedReal::zero();
        }
        return BoundedReal(-(Rat(1) - x * x).inverse()).exp();
    }

    /// One Boole panel on [a, b] (0 <= a < b <= cut) with its remainder.
    static BoundedReal boole(const Rat& a, const Rat& b)
    {
        Rat h = (b - a) / Rat(4);
        BoundedReal s = BoundedReal(Rat(7)) * (psi_at(a) + psi_at(b)) +
                        BoundedReal(Rat(32)) * (psi_at(a + h) + psi_at(a + Rat(3) * h)) +
                        BoundedReal(Rat(12)) * psi_at(a + Rat(2) * h);
        s = s * BoundedReal(Rat(2) * h / Rat(45));
        BoundedReal rem = BoundedReal(Rat(8, 945) * h.pow(7)) * bump_derivative_abs_range(a, b, 6).upper_edge();
        return s.widened(rem);
    }

private:
    BumpIntegralTable()
    {
        // psi(cut) < e^-512, so the uncovered tail is far below the panel error
        cut_ = Rat(1) - Rat::pow2(-10);
        const Rat tol_density = Rat::pow2(-60);
        nodes_.push_back(Rat(0));
        cum_.push_back(BoundedReal::zero());
        build(Rat(0), cut_, tol_density, 0);
        BoundedReal tail = BoundedReal::hull(BoundedReal::zero(), BoundedReal(Rat(1) - cut_) * psi_at(cut_).upper_edge());
        total_ = (cum_.back() + tail).scaled_pow2(1);
    }

    void build(const Rat& a, const Rat& b, const Rat& tol_density, int depth)
    {
        Rat h = (b - a) / Rat(4);
        BoundedReal rem = BoundedReal(Rat(8, 945) * h.pow(7)) * bump_derivative_abs_range(a, b, 6).upper_edge();
        if (depth >= 40 || rem.hi_at_most(tol_density * (b - a))) {
            cum_.push_back(cum_.back() + boole(a, b));
            nodes_.push_back(b);
            return;
        }
        Rat m = (a + b) / Rat(2);
        build(a, m, tol_density, depth + 1);
        build(m, b, tol_density, depth + 1);
    }

    Rat cut_;
    std::vector<Rat> nodes_;
    std::vector<BoundedReal> cum_;
    BoundedReal total_;
};

/// Certified enclosure of M_n = max |psi^(n)| by branch and bound over [0, 1]
/// (|psi^(n)| is even). Lower edge from point values, upper from range bounds.
inline BoundedReal bump_derivative_max_uncached(unsigned n)
{
    struct Box {
        Rat lo, hi;
        BoundedReal bound;
    };
    auto point_abs = [n](const Rat& x) -> BoundedReal {
        if (x == Rat(1)) {
            return BoundedReal::zero();
        }
        Rat u = (Rat(1) - x * x).inverse();
        return (bump_radial(u, n) * BoundedReal(bump_numerator(n)(x))).abs();
    };
    auto lower = [](const Box& x, const Box& y) { return y.bound.hi_greater_than(x.bound); };
    std::priority_queue<Box, std::vector<Box>, decltype(lower)> work(lower);
    BoundedReal best = point_abs(Rat(0));
    const int pieces = 64;
    for (int i = 0; i < pieces; ++i) {
        Rat a(i, pieces), b(i + 1, pieces);
        work.push({a, b, bump_derivative_abs_range(a, b, n)});
        best = BoundedReal::max_of(best, point_abs((a + b) / Rat(2)));
    }
    // the top box bounds everything still queued; stop once it is within
    // a relative 1e-6 of the best sampled value
    const Rat slack = Rat(1) + Rat(1, 1000000);
    BoundedReal upper;
    for (int iter = 0;; ++iter) {
        Box top = work.top();
        if (top.bound.hi_at_most(best.lo_rat() * slack) || iter > 200000) {
            upper = top.bound.upper_edge();
            break;
        }
        work.pop();
        Rat m = (top.lo + top.hi) / Rat(2);
        best = BoundedReal::max_of(best, point_abs(m));
        work.push({top.lo, m, bump_derivative_abs_range(top.lo, m, n)});
        work.push({m, top.hi, bump_derivative_abs_range(m, top.hi, n)});
    }
    upper = BoundedReal::max_of(upper, best.upper_edge());
    return BoundedReal::hull(best.lower_edge(), upper.upper_edge());
}

} // namespace detail

/// psi(x) for |x| < 1.
inline BoundedReal psi(const Rat& x)
{
    if (x.abs() >= Rat(1)) {
        throw Error(ErrorCode::DomainError, "psi needs |x| < 1, got " + x.str());
    }
    return detail::BumpIntegralTable::psi_at(x);
}

/// psi extended by 0 outside (-1, 1).
inline BoundedReal psi_total(const Rat& x) { return detail::BumpIntegralTable::psi_at(x); }

/// psi^(n)(x) for |x| < 1, n <= 8.
inline BoundedReal psi_derivative(unsigned n, const Rat& x)
{
    if (x.abs() >= Rat(1)) {
        throw Error(ErrorCode::DomainError, "psi needs |x| < 1, got " + x.str());
    }
    return detail::bump_radial((Rat(1) - x * x).inverse(), n) * BoundedReal(detail::bump_numerator(n)(x));
}

/// Integral of psi over [-1, 1].
inline const BoundedReal& bump_integral() { return detail::BumpIntegralTable::instance().total(); }

/// Enclosure of M_n = max |psi^(n)| for n <= 4.
inline BoundedReal bump_derivative_max(unsigned n)
{
    if (n > 4) {
        throw Error(ErrorCode::DomainError, "derivative maxima are supported for n <= 4");
    }
    static std::array<std::once_flag, 5> flags;
    static std::array<BoundedReal, 5> values;
    std::call_once(flags[n], [n] { values[n] = detail::bump_derivative_max_uncached(n); });
    return values[n];
}

/// 2^(-1/(b-a)), the height scale of the bump on a gap of length b - a.
inline BoundedReal bump_height(const Rat& length)
{
    return BoundedReal(-length.inverse()).exp2();
}

/// The gap bump h(x) = 2^(-1/(b-a)) psi((2x-a-b)/(b-a)) on (a, b), zero elsewhere.
inline BoundedReal bump_value(const Rat& a, const Rat& b, const Rat& x)
{
    if (x <= a || x >= b) {
        return BoundedReal::zero();
    }
    return bump_height(b - a) * psi((Rat(2) * x - a - b) / (b - a));
}

/// Integral of the gap bump over the whole gap:
/// 2^(-1/(b-a)) ((b-a)/2) I_psi.
inline BoundedReal bump_gap_integral(const Rat& a, const Rat& b)
{
    return bump_height(b - a) * BoundedReal((b - a) / Rat(2)) * bump_integral();
}

/// Integral of the gap bump over [a, min(x, b)].
inline BoundedReal bump_partial_integral(const Rat& a, const Rat& b, const Rat& x)
{
    if (x <= a) {
        return BoundedReal::zero();
    }
    if (x >= b) {
        return bump_gap_integral(a, b);
    }
    Rat t = (Rat(2) * x - a - b) / (b - a);
    BoundedReal part = bump_height(b - a) * BoundedReal((b - a) / Rat(2)) *
                       detail::BumpIntegralTable::instance().from_minus_one(t);
    return part.intersected(BoundedReal::hull(BoundedReal::zero(), bump_gap_integral(a, b)));
}

/// Upper bound for sup |h^(n)| over a gap: 2^(-1/(b-a)) 2^n (b-a)^(-n) M_n.
inline BoundedReal derivative_sup_bound(unsigned n, const Interval& gap)
{
    if (!gap.bounded() || gap.empty() || gap.is_point()) {
        throw Error(ErrorCode::DomainError, "derivative bound needs a bounded gap with b > a");
    }
    Rat len = gap.length();
    BoundedReal scale = bump_height(len) * BoundedReal(Rat::pow2(n) * len.inverse().pow(n));
    return (scale * bump_derivative_max(n)).upper_edge();
}

/// The stage-n truncation of the smooth strictly increasing function built
/// on a fat Cantor set: h is the gap bump on every removed gap of generation
/// <= n and 0 on the surviving set; f(x) is the integral of h over [0, x].
class PathologicalFn {
public:
    explicit PathologicalFn(FatCantorStage stage) : stage_(std::move(stage))
    {
        for (unsigned k = 1; k <= stage_.stage(); ++k) {
            Rat r = stage_.removal(k);
            gap_mass_.push_back(bump_gap_integral(Rat(0), r));
        }
    }
    explicit PathologicalFn(unsigned n) : PathologicalFn(svc_stage(n)) {}

    const FatCantorStage& stage() const { return stage_; }

    /// Integral of h over one generation-k gap.
    const BoundedReal& gap_integral(unsigned k) const { return gap_mass_.at(k - 1); }

    Scalar h(const Rat& x) const
    {
        auto loc = stage_.locate(x);
        if (!loc.in_gap) {
            return Scalar(Rat(0));
        }
        return Scalar(bump_value(loc.where.lo().value(), loc.where.hi().value(), x));
    }

    /// f(x); exactly 0 at x = 0. With `max_err`, throws PrecisionUnreachable
    /// when the enclosure radius exceeds it.
    Scalar f(const Rat& x, std::optional<Rat> max_err = std::nullopt) const
    {
        if (x.is_zero()) {
            return Scalar(Rat(0));
        }
        BoundedReal v = integral_to(x);
        if (max_err) {
            BoundedReal radius = (v.upper_edge() - v.lower_edge()).scaled_pow2(-1);
            if (!radius.hi_at_most(*max_err)) {
                throw Error(ErrorCode::PrecisionUnreachable,
                            "f enclosure radius " + radius.hi_str(3) + " exceeds requested " + max_err->decimal(40));
            }
        }
        return Scalar(v);
    }

    /// f(y) - f(x) for x <= y. The lower edge is at least the mass of all
    /// gaps lying wholly inside [x, y], so it is positive whenever [x, y]
    /// contains a gap.
    BoundedReal increment(const Rat& x, const Rat& y) const
    {
        if (y < x) {
            throw Error(ErrorCode::DomainError, "increment needs x <= y");
        }
        std::vector<long long> cx = whole_gap_counts(x), cy = whole_gap_counts(y);
        BoundedReal whole = BoundedReal::zero();
        for (std::size_t k = 0; k < gap_mass_.size(); ++k) {
            // whole gaps in [x, y] of generation k+1 (the gap holding x, if
            // any, is counted only by its partial integral)
            long long d = cy[k] - cx[k] - (holds_gap(x, k + 1) ? 1 : 0);
            if (d > 0) {
                whole += BoundedReal(Rat(static_cast<long>(d))) * gap_mass_[k];
            }
        }
        BoundedReal diff = integral_to(y) - integral_to(x);
        return diff.clamped_below(whole.lo_rat());
    }

    /// f(1), the total mass of h.
    BoundedReal total() const { return integral_to(Rat(1)); }

    /// Mass the limit construction places on the stage-n surviving set,
    /// sum_{k>n} 2^(k-1) G_k, with a certified geometric tail. It is the
    /// measure of f(C_n) for the limit function and tends to 0 with n.
    BoundedReal image_measure_surviving() const { return limit_mass_beyond(stage_.stage(), stage_.schedule()); }

    static BoundedReal limit_mass_beyond(unsigned n, const RemovalSchedule& sched)
    {
        BoundedReal sum = BoundedReal::zero();
        unsigned k = n + 1;
        const unsigned first_geometric = static_cast<unsigned>(sched.prefix_length()) + 1;
        for (;; ++k) {
            BoundedReal term = BoundedReal(Rat::pow2(k - 1)) * bump_gap_integral(Rat(0), sched.removal(k));
            bool geometric = k >= first_geometric;
            // stop once the term is negligible against the running sum or
            // has vanished below any representable scale
            bool tiny = geometric && !sum.lo_rat().is_zero() &&
                        term.hi_at_most(sum.lo_rat() * Rat::pow2(-(precision() + 8)));
            bool deep = geometric && k > n + 64;
            if (tiny || deep) {
                // terms from k on are bounded by term * (2q)^j: ratio of
                // consecutive terms is 2 q 2^(1/r_k - 1/r_{k+1}) <= 2q
                BoundedReal tail = term.upper_edge() / BoundedReal(Rat(1) - sched.tail_term_ratio());
                return sum + BoundedReal::hull(BoundedReal::zero(), tail);
            }
            sum += term;
        }
    }

private:
    // f(x) = sum_k c_k(x) G_k + (partial mass of the gap holding x).
    BoundedReal integral_to(const Rat& x) const
    {
        auto counts = whole_gap_counts(x);
        BoundedReal v = BoundedReal::zero();
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (counts[k] > 0) {
                v += BoundedReal(Rat(static_cast<long>(counts[k]))) * gap_mass_[k];
            }
        }
        auto loc = stage_.locate(x);
        if (loc.in_gap) {
            v += bump_partial_integral(loc.where.lo().value(), loc.where.hi().value(), x);
        }
        return v;
    }

    bool holds_gap(const Rat& x, unsigned k) const
    {
        auto loc = stage_.locate(x);
        return loc.in_gap && loc.generation == k;
    }

    // Number of generation-k gaps lying wholly in [0, x], per k. Going right
    // at generation j passes the generation-j gap and every gap of the left
    // child: 2^(k-j-1) of each deeper generation k.
    std::vector<long long> whole_gap_counts(const Rat& x) const
    {
        const unsigned n = stage_.stage();
        std::vector<long long> c(n, 0);
        auto loc = stage_.locate(x);
        for (unsigned j = 1; j <= loc.went_right.size(); ++j) {
            if (!loc.went_right[j - 1]) {
                continue;
            }
            c[j - 1] += 1;
            for (unsigned k = j + 1; k <= n; ++k) {
                c[k - 1] += 1LL << (k - j - 1);
            }
        }
        if (loc.in_gap) {
            // a point inside a generation-j gap has passed its left sibling
            for (unsigned k = loc.generation + 1; k <= n; ++k) {
                c[k - 1] += 1LL << (k - loc.generation - 1);
            }
        }
        return c;
    }

    FatCantorStage stage_;
    std::vector<BoundedReal> gap_mass_;
};

} // namespace mcomp
