#pragma once

#include <compare>
#include <string>
#include <utility>

#include "mcomp/rat.hpp"

namespace mcomp {

/// A rational or one of the two infinities.
class ExtRat {
public:
    enum class Kind { NegInf, Finite, PosInf };

    ExtRat() = default;
    ExtRat(Rat r) : kind_(Kind::Finite), value_(std::move(r)) {}
    ExtRat(long n) : ExtRat(Rat(n)) {}
    ExtRat(int n) : ExtRat(Rat(n)) {}

    static ExtRat neg_inf() { return ExtRat(Kind::NegInf); }
    static ExtRat pos_inf() { return ExtRat(Kind::PosInf); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    const Rat& value() const
    {
        if (!is_finite()) {
            throw Error(ErrorCode::UnboundedSet, "infinite endpoint has no rational value");
        }
        return value_;
    }

    std::string str() const
    {
        switch (kind_) {
        case Kind::NegInf: return "-inf";
        case Kind::PosInf: return "+inf";
        default: return value_.str();
        }
    }

    friend bool operator==(const ExtRat& a, const ExtRat& b)
    {
        return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
    }
    friend std::strong_ordering operator<=>(const ExtRat& a, const ExtRat& b)
    {
        if (a.kind_ != b.kind_) {
            return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
        }
        if (a.kind_ != Kind::Finite) {
            return std::strong_ordering::equal;
        }
        return a.value_ <=> b.value_;
    }

private:
    explicit ExtRat(Kind k) : kind_(k) {}

    Kind kind_ = Kind::Finite;
    Rat value_;
};

/// Interval with exact endpoints and per-endpoint closedness. Infinite
/// endpoints are always open. An interval whose endpoints coincide is either a
/// closed degenerate point or empty.
class Interval {
public:
    /// The empty interval.
    Interval() = default;

    Interval(ExtRat lo, ExtRat hi, bool lo_closed, bool hi_closed)
        : lo_(std::move(lo)), hi_(std::move(hi)), lo_closed_(lo_closed), hi_closed_(hi_closed)
    {
        if (!lo_.is_finite()) {
            lo_closed_ = false;
        }
        if (!hi_.is_finite()) {
            hi_closed_ = false;
        }
        if (lo_.kind() == ExtRat::Kind::PosInf || hi_.kind() == ExtRat::Kind::NegInf || hi_ < lo_) {
            throw Error(ErrorCode::DomainError, "interval with lo > hi");
        }
        empty_ = (lo_ == hi_) && !(lo_closed_ && hi_closed_);
        if (empty_) {
            *this = Interval();
        }
    }

    static Interval closed(Rat a, Rat b) { return {std::move(a), std::move(b), true, true}; }
    static Interval open(ExtRat a, ExtRat b) { return {std::move(a), std::move(b), false, false}; }
    static Interval closed_open(Rat a, ExtRat b) { return {std::move(a), std::move(b), true, false}; }
    static Interval open_closed(ExtRat a, Rat b) { return {std::move(a), std::move(b), false, true}; }
    static Interval point(const Rat& a) { return {a, a, true, true}; }
    static Interval real_line() { return {ExtRat::neg_inf(), ExtRat::pos_inf(), false, false}; }

    bool empty() const { return empty_; }
    bool is_point() const { return !empty_ && lo_ == hi_; }
    bool bounded() const { return lo_.is_finite() && hi_.is_finite(); }
    const ExtRat& lo() const { return lo_; }
    const ExtRat& hi() const { return hi_; }
    bool lo_closed() const { return lo_closed_; }
    bool hi_closed() const { return hi_closed_; }

    Rat length() const
    {
        if (empty_) {
            return Rat(0);
        }
        if (!bounded()) {
            throw Error(ErrorCode::UnboundedSet, "length of unbounded interval " + str());
        }
        return hi_.value() - lo_.value();
    }

    bool contains(const Rat& x) const
    {
        if (empty_) {
            return false;
        }
        ExtRat e(x);
        bool above = lo_closed_ ? lo_ <= e : lo_ < e;
        bool below = hi_closed_ ? e <= hi_ : e < hi_;
        return above && below;
    }

    /// Open interior (possibly empty).
    Interval interior() const
    {
        if (empty_ || is_point()) {
            return {};
        }
        return {lo_, hi_, false, false};
    }

    /// Canonical text: `[a,b]`, `(a,b)`, `[a,b)`, `(a,b]`; empty prints `∅`.
    std::string str() const
    {
        if (empty_) {
            return "∅";
        }
        return std::string(lo_closed_ ? "[" : "(") + lo_.str() + "," + hi_.str() + (hi_closed_ ? "]" : ")");
    }

    friend bool operator==(const Interval& a, const Interval& b)
    {
        if (a.empty_ || b.empty_) {
            return a.empty_ == b.empty_;
        }
        return a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.lo_closed_ == b.lo_closed_ && a.hi_closed_ == b.hi_closed_;
    }

private:
    ExtRat lo_{0};
    ExtRat hi_{0};
    bool lo_closed_ = false;
    bool hi_closed_ = false;
    bool empty_ = true;
};

/// Intersection of two intervals (possibly empty).
inline Interval intersect(const Interval& a, const Interval& b)
{
    if (a.empty() || b.empty()) {
        return {};
    }
    ExtRat lo = a.lo();
    bool lo_closed = a.lo_closed();
    if (b.lo() > lo) {
        lo = b.lo();
        lo_closed = b.lo_closed();
    } else if (b.lo() == lo) {
        lo_closed = lo_closed && b.lo_closed();
    }
    ExtRat hi = a.hi();
    bool hi_closed = a.hi_closed();
    if (b.hi() < hi) {
        hi = b.hi();
        hi_closed = b.hi_closed();
    } else if (b.hi() == hi) {
        hi_closed = hi_closed && b.hi_closed();
    }
    if (hi < lo) {
        return {};
    }
    return {lo, hi, lo_closed, hi_closed};
}

} // namespace mcomp
