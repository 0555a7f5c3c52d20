#pragma once

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "mcomp/rat.hpp"

namespace mcomp {

namespace detail {

inline std::atomic<long>& precision_slot()
{
    static std::atomic<long> bits = [] {
        long p = 128;
        if (const char* env = std::getenv("MCOMP_PRECISION")) {
            long v = std::strtol(env, nullptr, 10);
            if (v >= 53 && v <= 65536) {
                p = v;
            }
        }
        return p;
    }();
    return bits;
}

/// MPFR's exponent range is per thread. Widen it so super-exponentially small
/// bump masses such as 2^(-4^30) stay representable instead of underflowing.
inline void widen_exponent_range()
{
    thread_local const bool done = [] {
        mpfr_set_emin(mpfr_get_emin_min());
        mpfr_set_emax(mpfr_get_emax_max());
        return true;
    }();
    (void)done;
}

/// Owning RAII handle for one mpfr_t.
class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Mpfr(const Mpfr& o)
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Mpfr(Mpfr&& o) noexcept
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Mpfr& operator=(const Mpfr& o)
    {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Mpfr& operator=(Mpfr&& o) noexcept
    {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Mpfr() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

} // namespace detail

/// Working precision (bits) for new enclosures. Initialised from the
/// MCOMP_PRECISION environment variable, default 128.
inline long precision()
{
    detail::widen_exponent_range();
    return detail::precision_slot().load();
}
inline void set_precision(long bits) { detail::precision_slot().store(std::clamp(bits, 53L, 65536L)); }

/// Certified real: the true value lies in the closed interval [lo, hi].
/// Endpoints are MPFR floats rounded outward, and may be infinite, which
/// gives the extended-real hulls used by the quotient module.
class BoundedReal {
public:
    BoundedReal() : lo_(precision()), hi_(precision()) {}
    BoundedReal(long n) : BoundedReal(Rat(n)) {}
    BoundedReal(int n) : BoundedReal(Rat(n)) {}
    BoundedReal(const Rat& r) : BoundedReal()
    {
        mpfr_set_q(lo_.get(), r.mpq().get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(hi_.get(), r.mpq().get_mpq_t(), MPFR_RNDU);
    }

    /// Enclosure [a, b] of rationals (a <= b).
    static BoundedReal between(const Rat& a, const Rat& b)
    {
        BoundedReal r;
        mpfr_set_q(r.lo_.get(), a.mpq().get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_.get(), b.mpq().get_mpq_t(), MPFR_RNDU);
        r.check();
        return r;
    }
    static BoundedReal hull(const BoundedReal& a, const BoundedReal& b)
    {
        BoundedReal r;
        mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return r;
    }
    /// Enclosures of min(a, b) and max(a, b).
    static BoundedReal min_of(const BoundedReal& a, const BoundedReal& b)
    {
        BoundedReal r;
        mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_min(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return r;
    }
    static BoundedReal max_of(const BoundedReal& a, const BoundedReal& b)
    {
        BoundedReal r;
        mpfr_max(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return r;
    }
    static BoundedReal entire()
    {
        BoundedReal r;
        mpfr_set_inf(r.lo_.get(), -1);
        mpfr_set_inf(r.hi_.get(), 1);
        return r;
    }
    static BoundedReal pos_inf()
    {
        BoundedReal r;
        mpfr_set_inf(r.lo_.get(), 1);
        mpfr_set_inf(r.hi_.get(), 1);
        return r;
    }
    static BoundedReal neg_inf()
    {
        BoundedReal r;
        mpfr_set_inf(r.lo_.get(), -1);
        mpfr_set_inf(r.hi_.get(), -1);
        return r;
    }
    /// e^-1 style constants are built from exp; this is [0, 0].
    static BoundedReal zero() { return BoundedReal(Rat(0)); }

    // -- inspection ---------------------------------------------------------

    double lo_double() const { return mpfr_get_d(lo_.get(), MPFR_RNDD); }
    double hi_double() const { return mpfr_get_d(hi_.get(), MPFR_RNDU); }
    double mid_double() const
    {
        detail::Mpfr m(precision());
        mid_into(m);
        return mpfr_get_d(m.get(), MPFR_RNDN);
    }
    /// Upper bound on half the width.
    double err_double() const
    {
        if (!finite()) {
            return std::numeric_limits<double>::infinity();
        }
        detail::Mpfr m(precision());
        mpfr_sub(m.get(), hi_.get(), lo_.get(), MPFR_RNDU);
        mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDU);
        return mpfr_get_d(m.get(), MPFR_RNDU);
    }

    bool finite() const { return mpfr_number_p(lo_.get()) && mpfr_number_p(hi_.get()); }
    bool lo_is_neg_inf() const { return mpfr_inf_p(lo_.get()) && mpfr_sgn(lo_.get()) < 0; }
    bool hi_is_pos_inf() const { return mpfr_inf_p(hi_.get()) && mpfr_sgn(hi_.get()) > 0; }

    /// Exact rational value of the endpoints (finite endpoints only).
    Rat lo_rat() const { return to_rat(lo_); }
    Rat hi_rat() const { return to_rat(hi_); }

    bool contains(const Rat& x) const
    {
        return mpfr_cmp_q(lo_.get(), x.mpq().get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), x.mpq().get_mpq_t()) >= 0;
    }
    bool contains(const BoundedReal& o) const
    {
        return mpfr_lessequal_p(lo_.get(), o.lo_.get()) && mpfr_greaterequal_p(hi_.get(), o.hi_.get());
    }
    bool overlaps(const BoundedReal& o) const
    {
        return mpfr_lessequal_p(lo_.get(), o.hi_.get()) && mpfr_lessequal_p(o.lo_.get(), hi_.get());
    }
    bool certainly_positive() const { return mpfr_sgn(lo_.get()) > 0; }
    bool certainly_negative() const { return mpfr_sgn(hi_.get()) < 0; }
    bool certainly_nonnegative() const { return mpfr_sgn(lo_.get()) >= 0; }
    bool certainly_less(const BoundedReal& o) const { return mpfr_less_p(hi_.get(), o.lo_.get()); }
    bool certainly_less(const Rat& r) const { return mpfr_cmp_q(hi_.get(), r.mpq().get_mpq_t()) < 0; }
    bool certainly_greater(const Rat& r) const { return mpfr_cmp_q(lo_.get(), r.mpq().get_mpq_t()) > 0; }
    bool lo_at_least(const Rat& r) const { return mpfr_cmp_q(lo_.get(), r.mpq().get_mpq_t()) >= 0; }
    bool hi_at_most(const Rat& r) const { return mpfr_cmp_q(hi_.get(), r.mpq().get_mpq_t()) <= 0; }
    bool lo_less_than(const BoundedReal& o) const { return mpfr_less_p(lo_.get(), o.lo_.get()); }
    bool hi_greater_than(const BoundedReal& o) const { return mpfr_greater_p(hi_.get(), o.hi_.get()); }

    // -- arithmetic ---------------------------------------------------------

    friend BoundedReal operator+(const BoundedReal& a, const BoundedReal& b)
    {
        BoundedReal r;
        mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        r.fix_nan();
        return r;
    }
    friend BoundedReal operator-(const BoundedReal& a, const BoundedReal& b)
    {
        BoundedReal r;
        mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
        mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
        r.fix_nan();
        return r;
    }
    BoundedReal operator-() const
    {
        BoundedReal r;
        mpfr_neg(r.lo_.get(), hi_.get(), MPFR_RNDD);
        mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
        return r;
    }
    friend BoundedReal operator*(const BoundedReal& a, const BoundedReal& b)
    {
        // take min/max over the four endpoint products, each rounded outward
        BoundedReal r;
        detail::Mpfr t(precision());
        mpfr_set_inf(r.lo_.get(), 1);
        mpfr_set_inf(r.hi_.get(), -1);
        const detail::Mpfr* as[2] = {&a.lo_, &a.hi_};
        const detail::Mpfr* bs[2] = {&b.lo_, &b.hi_};
        for (auto* x : as) {
            for (auto* y : bs) {
                if ((mpfr_zero_p(x->get()) && mpfr_inf_p(y->get())) || (mpfr_inf_p(x->get()) && mpfr_zero_p(y->get()))) {
                    mpfr_set_zero(t.get(), 1);
                    mpfr_min(r.lo_.get(), r.lo_.get(), t.get(), MPFR_RNDD);
                    mpfr_max(r.hi_.get(), r.hi_.get(), t.get(), MPFR_RNDU);
                    continue;
                }
                mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDD);
                mpfr_min(r.lo_.get(), r.lo_.get(), t.get(), MPFR_RNDD);
                mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDU);
                mpfr_max(r.hi_.get(), r.hi_.get(), t.get(), MPFR_RNDU);
            }
        }
        return r;
    }
    friend BoundedReal operator/(const BoundedReal& a, const BoundedReal& b)
    {
        if (b.contains(Rat(0))) {
            throw Error(ErrorCode::DomainError, "division by an enclosure containing zero");
        }
        BoundedReal inv;
        mpfr_ui_div(inv.lo_.get(), 1, b.hi_.get(), MPFR_RNDD);
        mpfr_ui_div(inv.hi_.get(), 1, b.lo_.get(), MPFR_RNDU);
        return a * inv;
    }
    BoundedReal& operator+=(const BoundedReal& o) { return *this = *this + o; }
    BoundedReal& operator-=(const BoundedReal& o) { return *this = *this - o; }
    BoundedReal& operator*=(const BoundedReal& o) { return *this = *this * o; }

    /// Multiply by 2^e exactly.
    BoundedReal scaled_pow2(long e) const
    {
        BoundedReal r = *this;
        if (e >= 0) {
            mpfr_mul_2ui(r.lo_.get(), r.lo_.get(), static_cast<unsigned long>(e), MPFR_RNDD);
            mpfr_mul_2ui(r.hi_.get(), r.hi_.get(), static_cast<unsigned long>(e), MPFR_RNDU);
        } else {
            mpfr_div_2ui(r.lo_.get(), r.lo_.get(), static_cast<unsigned long>(-e), MPFR_RNDD);
            mpfr_div_2ui(r.hi_.get(), r.hi_.get(), static_cast<unsigned long>(-e), MPFR_RNDU);
        }
        return r;
    }

    /// Enclosure of |x| over the interval.
    BoundedReal abs() const
    {
        if (mpfr_sgn(lo_.get()) >= 0) {
            return *this;
        }
        if (mpfr_sgn(hi_.get()) <= 0) {
            return -*this;
        }
        BoundedReal r;
        mpfr_set_zero(r.lo_.get(), 1);
        mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
        mpfr_max(r.hi_.get(), r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }

    /// Monotone increasing elementary functions on the enclosure.
    BoundedReal exp() const { return monotone(mpfr_exp); }
    BoundedReal exp2() const { return monotone(mpfr_exp2); }

    /// x^k for natural k (exact interval power).
    BoundedReal pow(unsigned k) const
    {
        if (k == 0) {
            return BoundedReal(Rat(1));
        }
        if (k % 2 == 1 || mpfr_sgn(lo_.get()) >= 0) {
            BoundedReal r;
            mpfr_pow_ui(r.lo_.get(), lo_.get(), k, MPFR_RNDD);
            mpfr_pow_ui(r.hi_.get(), hi_.get(), k, MPFR_RNDU);
            return r;
        }
        return abs().pow(k);
    }

    /// Widen both ends by `e` (>= 0).
    BoundedReal widened(const BoundedReal& e) const
    {
        BoundedReal r;
        mpfr_sub(r.lo_.get(), lo_.get(), e.hi_.get(), MPFR_RNDD);
        mpfr_add(r.hi_.get(), hi_.get(), e.hi_.get(), MPFR_RNDU);
        return r;
    }

    /// Replace the lower edge by max(lo, v); used for quantities known to be
    /// bounded below by an exact value (e.g. integrals of nonnegative data).
    BoundedReal clamped_below(const Rat& v) const
    {
        BoundedReal r = *this;
        if (mpfr_cmp_q(r.lo_.get(), v.mpq().get_mpq_t()) < 0) {
            mpfr_set_q(r.lo_.get(), v.mpq().get_mpq_t(), MPFR_RNDD);
        }
        if (mpfr_cmp_q(r.hi_.get(), v.mpq().get_mpq_t()) < 0) {
            mpfr_set_q(r.hi_.get(), v.mpq().get_mpq_t(), MPFR_RNDU);
        }
        return r;
    }

    /// Intersection with another enclosure of the same quantity.
    BoundedReal intersected(const BoundedReal& o) const
    {
        BoundedReal r;
        mpfr_max(r.lo_.get(), lo_.get(), o.lo_.get(), MPFR_RNDD);
        mpfr_min(r.hi_.get(), hi_.get(), o.hi_.get(), MPFR_RNDU);
        if (mpfr_greater_p(r.lo_.get(), r.hi_.get())) {
            throw Error(ErrorCode::DomainError, "disjoint enclosures intersected");
        }
        return r;
    }

    BoundedReal lower_edge() const
    {
        BoundedReal r;
        mpfr_set(r.lo_.get(), lo_.get(), MPFR_RNDD);
        mpfr_set(r.hi_.get(), lo_.get(), MPFR_RNDU);
        return r;
    }
    BoundedReal upper_edge() const
    {
        BoundedReal r;
        mpfr_set(r.lo_.get(), hi_.get(), MPFR_RNDD);
        mpfr_set(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    std::string value_str(int digits = 17) const
    {
        if (!finite()) {
            if (lo_is_neg_inf() && hi_is_pos_inf()) {
                return "nan";
            }
            return lo_is_neg_inf() ? "-inf" : "+inf";
        }
        detail::Mpfr m(precision());
        mid_into(m);
        return format(m, digits, MPFR_RNDN);
    }
    /// Decimal upper bound on the radius.
    std::string err_str(int digits = 3) const
    {
        if (!finite()) {
            return "inf";
        }
        detail::Mpfr m(precision());
        mpfr_sub(m.get(), hi_.get(), lo_.get(), MPFR_RNDU);
        mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDU);
        return format(m, digits, MPFR_RNDU);
    }
    std::string lo_str(int digits = 17) const { return format(lo_, digits, MPFR_RNDD); }
    std::string hi_str(int digits = 17) const { return format(hi_, digits, MPFR_RNDU); }

private:
    template <class Fn>
    BoundedReal monotone(Fn fn) const
    {
        BoundedReal r;
        fn(r.lo_.get(), lo_.get(), MPFR_RNDD);
        fn(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }

    void mid_into(detail::Mpfr& m) const
    {
        mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
        mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    }

    static std::string format(const detail::Mpfr& v, int digits, mpfr_rnd_t rnd)
    {
        if (mpfr_inf_p(v.get())) {
            return mpfr_sgn(v.get()) < 0 ? "-inf" : "+inf";
        }
        if (mpfr_zero_p(v.get())) {
            return "0";
        }
        mpfr_exp_t e = 0;
        char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<std::size_t>(std::max(digits, 2)), v.get(), rnd);
        std::string d(raw);
        mpfr_free_str(raw);
        std::string sign;
        if (!d.empty() && d[0] == '-') {
            sign = "-";
            d.erase(0, 1);
        }
        while (d.size() > 1 && d.back() == '0') {
            d.pop_back();
        }
        std::string out = sign + d.substr(0, 1);
        if (d.size() > 1) {
            out += "." + d.substr(1);
        }
        long exponent = static_cast<long>(e) - 1;
        if (exponent != 0) {
            out += "e" + std::to_string(exponent);
        }
        return out;
    }

    static Rat to_rat(const detail::Mpfr& v)
    {
        if (!mpfr_number_p(v.get())) {
            throw Error(ErrorCode::DomainError, "non-finite enclosure endpoint");
        }
        mpq_class q;
        mpfr_get_q(q.get_mpq_t(), v.get());
        return Rat(q);
    }

    void fix_nan()
    {
        // inf - inf style results: widen to the full line
        if (mpfr_nan_p(lo_.get())) {
            mpfr_set_inf(lo_.get(), -1);
        }
        if (mpfr_nan_p(hi_.get())) {
            mpfr_set_inf(hi_.get(), 1);
        }
    }

    void check() const
    {
        if (mpfr_greater_p(lo_.get(), hi_.get())) {
            throw Error(ErrorCode::DomainError, "enclosure with lo > hi");
        }
    }

    detail::Mpfr lo_;
    detail::Mpfr hi_;
};

/// A real number that is either known exactly (rational) or only through a
/// certified enclosure. Exactness is preserved through + - * where possible.
class Scalar {
public:
    Scalar() : v_(Rat(0)) {}
    Scalar(Rat r) : v_(std::move(r)) {}
    Scalar(long n) : v_(Rat(n)) {}
    Scalar(int n) : v_(Rat(n)) {}
    Scalar(BoundedReal b) : v_(std::move(b)) {}

    bool is_exact() const { return std::holds_alternative<Rat>(v_); }
    const Rat& exact() const
    {
        if (!is_exact()) {
            throw Error(ErrorCode::DomainError, "value is only known as an enclosure");
        }
        return std::get<Rat>(v_);
    }
    BoundedReal enclosure() const
    {
        return is_exact() ? BoundedReal(std::get<Rat>(v_)) : std::get<BoundedReal>(v_);
    }

    /// -1, 0, +1 when decidable.
    std::optional<int> sign() const
    {
        if (is_exact()) {
            return exact().sign();
        }
        const auto& b = std::get<BoundedReal>(v_);
        if (b.certainly_positive()) {
            return 1;
        }
        if (b.certainly_negative()) {
            return -1;
        }
        return std::nullopt;
    }
    bool certainly_zero() const { return is_exact() && exact().is_zero(); }

    std::string str(int digits = 17) const
    {
        return is_exact() ? exact().str() : std::get<BoundedReal>(v_).value_str(digits);
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b)
    {
        if (a.is_exact() && b.is_exact()) {
            return a.exact() + b.exact();
        }
        return a.enclosure() + b.enclosure();
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b)
    {
        if (a.is_exact() && b.is_exact()) {
            return a.exact() - b.exact();
        }
        return a.enclosure() - b.enclosure();
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b)
    {
        if (a.is_exact() && b.is_exact()) {
            return a.exact() * b.exact();
        }
        if ((a.is_exact() && a.exact().is_zero()) || (b.is_exact() && b.exact().is_zero())) {
            return Rat(0);
        }
        return a.enclosure() * b.enclosure();
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b)
    {
        if (a.is_exact() && b.is_exact()) {
            return a.exact() / b.exact();
        }
        if (a.certainly_zero() && b.sign().value_or(0) != 0) {
            return Rat(0);
        }
        return a.enclosure() / b.enclosure();
    }
    Scalar operator-() const { return is_exact() ? Scalar(-exact()) : Scalar(-enclosure()); }
    Scalar abs() const { return is_exact() ? Scalar(exact().abs()) : Scalar(enclosure().abs()); }
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }

    /// Sign of a - b when decidable.
    friend std::optional<int> compare(const Scalar& a, const Scalar& b) { return (a - b).sign(); }

    /// Rational bounds of the value (both equal the value when exact).
    Rat lo_rat() const { return is_exact() ? exact() : enclosure().lo_rat(); }
    Rat hi_rat() const { return is_exact() ? exact() : enclosure().hi_rat(); }

private:
    std::variant<Rat, BoundedReal> v_;
};

} // namespace mcomp
