#pragma once

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "mcomp/error.hpp"

namespace mcomp {

/// Arbitrary-precision rational in canonical form (reduced, positive
/// denominator). Thin value wrapper over GMP's mpq_class so that expression
/// templates never leak into user code.
class Rat {
public:
    Rat() = default;
    Rat(long n) : q_(n) {}
    Rat(int n) : q_(static_cast<long>(n)) {}
    Rat(long n, long d)
    {
        if (d == 0) {
            throw Error(ErrorCode::DomainError, "zero denominator");
        }
        q_ = mpq_class(n, d);
        q_.canonicalize();
    }
    explicit Rat(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }
    explicit Rat(const mpz_class& z) : q_(z) {}

    /// Accepts `p`, `p/q`, signed forms, and finite decimals such as
    /// `0.125`, `-3.5e-2`, `1e-9`.
    static Rat parse(std::string_view text)
    {
        std::string s;
        for (char c : text) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                s.push_back(c);
            }
        }
        if (s.empty()) {
            throw Error(ErrorCode::ParseError, "empty rational");
        }
        auto bad = [&] { return Error(ErrorCode::ParseError, "malformed rational '" + std::string(text) + "'"); };
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            mpz_class num, den;
            if (!is_integer_text(s.substr(0, slash)) || !is_integer_text(s.substr(slash + 1))) {
                throw bad();
            }
            num.set_str(strip_plus(s.substr(0, slash)), 10);
            den.set_str(strip_plus(s.substr(slash + 1)), 10);
            if (den == 0) {
                throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
            }
            mpq_class q(num, den);
            q.canonicalize();
            return Rat(std::move(q));
        }
        // decimal / scientific
        std::string mant = s;
        long exp10 = 0;
        auto epos = s.find_first_of("eE");
        if (epos != std::string::npos) {
            mant = s.substr(0, epos);
            std::string e = s.substr(epos + 1);
            if (!is_integer_text(e)) {
                throw bad();
            }
            exp10 = std::stol(e);
        }
        bool neg = false;
        if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
            neg = mant[0] == '-';
            mant.erase(0, 1);
        }
        auto dot = mant.find('.');
        std::string digits = mant;
        if (dot != std::string::npos) {
            digits = mant.substr(0, dot) + mant.substr(dot + 1);
            exp10 -= static_cast<long>(mant.size() - dot - 1);
        }
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            throw bad();
        }
        mpz_class num(digits, 10);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
        mpq_class q = exp10 >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
        q.canonicalize();
        if (neg) {
            q = -q;
        }
        return Rat(std::move(q));
    }

    /// Canonical text: `p` for integers, `p/q` otherwise.
    std::string str() const
    {
        if (q_.get_den() == 1) {
            return q_.get_num().get_str();
        }
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    /// Fixed-point decimal with `digits` fractional digits, rounded half away from zero.
    std::string decimal(unsigned digits) const
    {
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
        mpq_class scaled = abs_q() * scale + mpq_class(1, 2);
        mpz_class units;
        mpz_fdiv_q(units.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
        std::string d = units.get_str();
        if (d.size() <= digits) {
            d.insert(0, digits + 1 - d.size(), '0');
        }
        std::string out = (sign() < 0 && units != 0 ? "-" : "") + d.substr(0, d.size() - digits);
        if (digits > 0) {
            out += "." + d.substr(d.size() - digits);
        }
        return out;
    }

    const mpq_class& mpq() const { return q_; }
    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }
    int sign() const { return sgn(q_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return q_.get_den() == 1; }
    double to_double() const { return q_.get_d(); }

    /// 2^e for any integer exponent.
    static Rat pow2(long e)
    {
        mpz_class p(1);
        mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
        return e >= 0 ? Rat(p) : Rat(mpq_class(mpz_class(1), p));
    }

    Rat pow(unsigned long k) const
    {
        mpz_class n, d;
        mpz_pow_ui(n.get_mpz_t(), q_.get_num_mpz_t(), k);
        mpz_pow_ui(d.get_mpz_t(), q_.get_den_mpz_t(), k);
        return Rat(mpq_class(n, d));
    }

    Rat abs() const { return sign() < 0 ? -*this : *this; }
    Rat inverse() const
    {
        if (is_zero()) {
            throw Error(ErrorCode::DomainError, "inverse of zero");
        }
        return Rat(mpq_class(1) / q_);
    }

    Rat operator-() const { return Rat(mpq_class(-q_)); }
    Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
    Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
    Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
    Rat& operator/=(const Rat& o)
    {
        if (o.is_zero()) {
            throw Error(ErrorCode::DomainError, "division by zero");
        }
        q_ /= o.q_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.q_, b.q_) == 0; }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b)
    {
        int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    mpq_class abs_q() const { return sign() < 0 ? mpq_class(-q_) : q_; }
    static bool is_integer_text(const std::string& s)
    {
        std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        return i < s.size() && s.find_first_not_of("0123456789", i) == std::string::npos;
    }
    static std::string strip_plus(std::string s)
    {
        if (!s.empty() && s[0] == '+') {
            s.erase(0, 1);
        }
        return s;
    }

    mpq_class q_;
};

inline Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

} // namespace mcomp
