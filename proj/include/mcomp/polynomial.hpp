#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "mcomp/bounded_real.hpp"

namespace mcomp {

/// Polynomial with rational coefficients, `coeffs()[i]` multiplying x^i.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rat> c) : c_(std::move(c)) { trim(); }
    static Polynomial constant(const Rat& v) { return Polynomial({v}); }
    static Polynomial affine(const Rat& slope, const Rat& intercept) { return Polynomial({intercept, slope}); }
    /// coef * (x - shift)^k + offset, expanded.
    static Polynomial shifted_power(unsigned k, const Rat& coef, const Rat& shift, const Rat& offset)
    {
        std::vector<Rat> c(k + 1);
        // binomial expansion of (x - s)^k
        mpz_class binom(1);
        for (unsigned i = 0; i <= k; ++i) {
            // term C(k,i) x^i (-s)^(k-i)
            Rat term = Rat(mpq_class(binom)) * (-shift).pow(k - i) * coef;
            c[i] = term;
            binom = binom * (k - i) / (i + 1);
        }
        c[0] += offset;
        return Polynomial(std::move(c));
    }

    const std::vector<Rat>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
    Rat leading() const { return c_.empty() ? Rat(0) : c_.back(); }
    Rat coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rat(0); }

    Rat operator()(const Rat& x) const
    {
        Rat acc;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc = acc * x + *it;
        }
        return acc;
    }
    /// Interval Horner evaluation (an outer enclosure of the range over x).
    BoundedReal operator()(const BoundedReal& x) const
    {
        BoundedReal acc(Rat(0));
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc = acc * x + BoundedReal(*it);
        }
        return acc;
    }

    Polynomial derivative() const
    {
        std::vector<Rat> d;
        for (std::size_t i = 1; i < c_.size(); ++i) {
            d.push_back(c_[i] * Rat(static_cast<long>(i)));
        }
        return Polynomial(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] = a.coeff(i) + b.coeff(i);
        }
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] = a.coeff(i) - b.coeff(i);
        }
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<Rat> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                c[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return Polynomial(std::move(c));
    }
    Polynomial operator-() const
    {
        std::vector<Rat> c = c_;
        for (auto& x : c) {
            x = -x;
        }
        return Polynomial(std::move(c));
    }

    /// Euclidean division: a = q*b + r with deg r < deg b.
    static std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b)
    {
        if (b.is_zero()) {
            throw Error(ErrorCode::DomainError, "polynomial division by zero");
        }
        std::vector<Rat> q(std::max(0, a.degree() - b.degree() + 1));
        Polynomial r = a;
        while (!r.is_zero() && r.degree() >= b.degree()) {
            std::size_t shift = static_cast<std::size_t>(r.degree() - b.degree());
            Rat f = r.leading() / b.leading();
            q[shift] = f;
            std::vector<Rat> sub(shift + b.c_.size());
            for (std::size_t i = 0; i < b.c_.size(); ++i) {
                sub[i + shift] = b.c_[i] * f;
            }
            r = r - Polynomial(std::move(sub));
        }
        return {Polynomial(std::move(q)), r};
    }

    static Polynomial gcd(Polynomial a, Polynomial b)
    {
        while (!b.is_zero()) {
            auto r = divmod(a, b).second;
            a = std::move(b);
            b = std::move(r);
        }
        if (a.is_zero()) {
            return a;
        }
        Rat lead = a.leading();
        for (auto& x : a.c_) {
            x /= lead;
        }
        return a;
    }

    /// Product of the distinct irreducible factors (same real roots, all simple).
    Polynomial square_free() const
    {
        if (degree() < 1) {
            return *this;
        }
        Polynomial g = gcd(*this, derivative());
        return divmod(*this, g).first;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

private:
    void trim()
    {
        while (!c_.empty() && c_.back().is_zero()) {
            c_.pop_back();
        }
    }

    std::vector<Rat> c_;
};

/// An isolated real root. When lo == hi the root is that rational; otherwise
/// it is irrational and is the only root in the open interval (lo, hi).
struct RootBracket {
    Rat lo;
    Rat hi;
    bool exact() const { return lo == hi; }
    BoundedReal enclosure() const { return BoundedReal::between(lo, hi); }
};

namespace detail {

class SturmChain {
public:
    explicit SturmChain(const Polynomial& p)
    {
        chain_.push_back(p);
        chain_.push_back(p.derivative());
        while (!chain_.back().is_zero()) {
            auto r = Polynomial::divmod(chain_[chain_.size() - 2], chain_.back()).second;
            if (r.is_zero()) {
                break;
            }
            chain_.push_back(-r);
        }
    }

    int variations(const Rat& x) const
    {
        int count = 0;
        int prev = 0;
        for (const auto& p : chain_) {
            int s = p(x).sign();
            if (s == 0) {
                continue;
            }
            if (prev != 0 && s != prev) {
                ++count;
            }
            prev = s;
        }
        return count;
    }

    /// Number of distinct roots in (a, b].
    int count(const Rat& a, const Rat& b) const { return variations(a) - variations(b); }

private:
    std::vector<Polynomial> chain_;
};

/// Integer scale of the leading coefficient after clearing denominators; any
/// rational root is a multiple of 1/|scale| (rational root theorem).
inline mpz_class rational_root_denominator(const Polynomial& p)
{
    mpz_class l(1);
    for (const auto& c : p.coeffs()) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.den().get_mpz_t());
    }
    mpz_class lead = (p.leading() * Rat(mpq_class(l))).num();
    mpz_class content(0);
    for (const auto& c : p.coeffs()) {
        mpz_class ci = (c * Rat(mpq_class(l))).num();
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), ci.get_mpz_t());
    }
    lead /= content;
    return abs(lead);
}

inline RootBracket settle(const Polynomial& q, Rat lo, Rat hi, const mpz_class& den)
{
    // q has exactly one simple root in (lo, hi) and q(hi) != 0
    const Rat target = Rat(mpq_class(mpz_class(1), den)) / Rat(2);
    const int shi = q(hi).sign();
    while (hi - lo >= target) {
        Rat mid = (lo + hi) / Rat(2);
        int sm = q(mid).sign();
        if (sm == 0) {
            return {mid, mid};
        }
        (sm == shi ? hi : lo) = mid;
    }
    // at most one multiple of 1/den fits strictly inside (lo, hi)
    mpz_class k;
    Rat scaled = lo * Rat(mpq_class(den));
    mpz_fdiv_q(k.get_mpz_t(), scaled.num().get_mpz_t(), scaled.den().get_mpz_t());
    k += 1;
    Rat cand = Rat(mpq_class(k, den));
    if (cand < hi && q(cand).is_zero()) {
        return {cand, cand};
    }
    return {lo, hi};
}

inline void isolate(const Polynomial& q, const SturmChain& chain, const Rat& a, const Rat& b, const mpz_class& den,
                    std::vector<RootBracket>& out)
{
    int n = chain.count(a, b);
    if (n == 0) {
        return;
    }
    if (n == 1) {
        if (q(b).is_zero()) {
            out.push_back({b, b});
        } else {
            out.push_back(settle(q, a, b, den));
        }
        return;
    }
    Rat mid = (a + b) / Rat(2);
    isolate(q, chain, a, mid, den, out);
    isolate(q, chain, mid, b, den, out);
}

} // namespace detail

/// Real roots of a nonzero polynomial on the closed interval [a, b], sorted.
/// Rational roots are returned exactly; irrational ones as isolating brackets.
inline std::vector<RootBracket> real_roots(const Polynomial& p, const Rat& a, const Rat& b)
{
    if (p.is_zero()) {
        throw Error(ErrorCode::DomainError, "roots of the zero polynomial");
    }
    std::vector<RootBracket> out;
    if (p.degree() == 0 || b < a) {
        return out;
    }
    Polynomial q = p.square_free();
    if (q(a).is_zero()) {
        out.push_back({a, a});
    }
    if (a == b) {
        return out;
    }
    detail::SturmChain chain(q);
    detail::isolate(q, chain, a, b, detail::rational_root_denominator(q), out);
    return out;
}

/// Shrink an irrational bracket to width below `width`.
inline RootBracket refine(const Polynomial& p, RootBracket r, const Rat& width)
{
    if (r.exact()) {
        return r;
    }
    Polynomial q = p.square_free();
    const int shi = q(r.hi).sign();
    while (r.hi - r.lo >= width) {
        Rat mid = (r.lo + r.hi) / Rat(2);
        int sm = q(mid).sign();
        if (sm == 0) {
            return {mid, mid};
        }
        (sm == shi ? r.hi : r.lo) = mid;
    }
    return r;
}

/// Extremes of p over [a, b]; each is exact when attained at a rational point.
struct PolyRange {
    Scalar min;
    Scalar max;
};

inline PolyRange range_on(const Polynomial& p, const Rat& a, const Rat& b)
{
    std::vector<Scalar> vals{Scalar(p(a)), Scalar(p(b))};
    Polynomial d = p.derivative();
    if (!d.is_zero() && a < b) {
        for (const auto& r : real_roots(d, a, b)) {
            if (r.exact()) {
                vals.emplace_back(p(r.lo));
            } else {
                auto tight = refine(d, r, Rat::pow2(-80));
                vals.emplace_back(p(tight.enclosure()));
            }
        }
    }
    auto pick = [&](bool want_min) {
        // exact when the best exact candidate provably dominates every enclosure
        Rat best = vals[0].exact();
        for (const auto& v : vals) {
            if (v.is_exact()) {
                best = want_min ? min(best, v.exact()) : max(best, v.exact());
            }
        }
        bool dominated = std::all_of(vals.begin(), vals.end(), [&](const Scalar& v) {
            return v.is_exact() || (want_min ? v.enclosure().lo_at_least(best) : v.enclosure().hi_at_most(best));
        });
        if (dominated) {
            return Scalar(best);
        }
        BoundedReal acc = vals[0].enclosure();
        for (const auto& v : vals) {
            acc = want_min ? BoundedReal::min_of(acc, v.enclosure()) : BoundedReal::max_of(acc, v.enclosure());
        }
        return Scalar(acc);
    };
    return {pick(true), pick(false)};
}

} // namespace mcomp
