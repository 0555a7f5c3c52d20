#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcomp/bump.hpp"
#include "mcomp/fat_cantor.hpp"
#include "mcomp/interval_set.hpp"
#include "mcomp/polynomial.hpp"

namespace mcomp {

enum class PieceKind { Constant, Affine, Power, Poly, Bump, AcTable, Stub };

/// Zeros of a derivative: an exact set plus finitely many irrational points.
struct DerivativeZeros {
    IntervalSet set;
    std::vector<RootBracket> algebraic;
};

/// One piece of a piecewise function, living on `span` (bounded, nondegenerate).
///
/// - Constant: a fixed value.
/// - Affine / Power / Poly: an exact rational polynomial.
/// - Bump: offset + the gap bump on (a, b), i.e. the derivative of the
///   pathological function on one gap.
/// - AcTable: offset + the integral of the gap bump from a, evaluated from
///   the certified quadrature table. Slopes are available unless the piece
///   was declared without them.
/// - Stub: a declared continuous singular piece (think Cantor function).
///   Only its end values and total variation are known; evaluating inside
///   throws StubPiece.
///
/// Constant, Bump and AcTable pieces may be chained: their offset is chosen
/// so the piece starts where its left neighbour ends. Chained junctions are
/// continuous by construction, which lets jumps there be exactly zero even
/// when values are only enclosed.
class Piece {
public:
    static Piece constant(Interval span, Scalar value)
    {
        Piece p(PieceKind::Constant, std::move(span));
        p.offset_ = std::move(value);
        return p;
    }
    static Piece affine(Interval span, const Rat& slope, const Rat& intercept)
    {
        Piece p(PieceKind::Affine, std::move(span));
        p.poly_ = Polynomial::affine(slope, intercept);
        return p;
    }
    /// coef * (x - shift)^k + offset.
    static Piece power(Interval span, unsigned k, const Rat& coef, const Rat& shift, const Rat& offset)
    {
        if (k == 0) {
            throw Error(ErrorCode::DomainError, "power piece needs exponent >= 1");
        }
        Piece p(PieceKind::Power, std::move(span));
        p.poly_ = Polynomial::shifted_power(k, coef, shift, offset);
        p.power_ = {Rat(static_cast<long>(k)), coef, shift, offset};
        return p;
    }
    static Piece poly(Interval span, Polynomial q)
    {
        Piece p(PieceKind::Poly, std::move(span));
        p.poly_ = std::move(q);
        return p;
    }
    static Piece bump(Interval span, const Rat& a, const Rat& b, Scalar offset = Scalar())
    {
        Piece p(PieceKind::Bump, std::move(span));
        p.set_gap(a, b);
        p.offset_ = std::move(offset);
        return p;
    }
    static Piece ac_table(Interval span, const Rat& a, const Rat& b, Scalar offset = Scalar(), bool slopes = true)
    {
        Piece p(PieceKind::AcTable, std::move(span));
        p.set_gap(a, b);
        p.offset_ = std::move(offset);
        p.slopes_ = slopes;
        return p;
    }
    static Piece stub(Interval span, std::string label, const Rat& v0, const Rat& v1, const Rat& variation)
    {
        if (label.empty() || label.find_first_of(" \t;@") != std::string::npos) {
            throw Error(ErrorCode::ParseError, "stub label must be a single word");
        }
        if (variation < (v1 - v0).abs()) {
            throw Error(ErrorCode::DomainError, "stub variation below |v1 - v0|");
        }
        Piece p(PieceKind::Stub, std::move(span));
        p.label_ = std::move(label);
        p.v0_ = v0;
        p.v1_ = v1;
        p.variation_ = variation;
        return p;
    }

    /// Same piece, continuing from its left neighbour's end value.
    Piece chained() const
    {
        if (kind_ != PieceKind::Constant && kind_ != PieceKind::Bump && kind_ != PieceKind::AcTable) {
            throw Error(ErrorCode::ParseError, "only const, bump and actable pieces can be chained");
        }
        Piece p = *this;
        p.chained_ = true;
        return p;
    }

    PieceKind kind() const { return kind_; }
    const Interval& span() const { return span_; }
    const Rat& lo() const { return span_.lo().value(); }
    const Rat& hi() const { return span_.hi().value(); }
    bool is_chained() const { return chained_; }
    bool is_stub() const { return kind_ == PieceKind::Stub; }
    bool has_slopes() const { return kind_ != PieceKind::Stub && slopes_; }
    const std::string& label() const { return label_; }
    const Scalar& offset() const { return offset_; }
    const Rat& gap_lo() const { return a_; }
    const Rat& gap_hi() const { return b_; }
    Rat stub_rise() const { return v1_ - v0_; }
    /// Values a stub can take: |f - v0| + |v1 - f| <= variation.
    BoundedReal stub_value_box() const
    {
        return BoundedReal::between((v0_ + v1_ - variation_) / Rat(2), (v0_ + v1_ + variation_) / Rat(2));
    }

    /// Exact polynomial form, when the piece has one.
    std::optional<Polynomial> polynomial() const
    {
        if (is_poly_kind()) {
            return poly_;
        }
        if (kind_ == PieceKind::Constant && offset_.is_exact()) {
            return Polynomial::constant(offset_.exact());
        }
        return std::nullopt;
    }

    /// Value at x in the closure of the span.
    Scalar eval(const Rat& x) const
    {
        if (x < lo() || x > hi()) {
            throw Error(ErrorCode::DomainError, x.str() + " outside piece " + span_.str());
        }
        switch (kind_) {
        case PieceKind::Constant: return offset_;
        case PieceKind::Affine:
        case PieceKind::Power:
        case PieceKind::Poly: return Scalar(poly_(x));
        case PieceKind::Bump:
            if (x <= a_ || x >= b_) {
                return offset_;
            }
            return offset_ + Scalar(bump_value(a_, b_, x));
        case PieceKind::AcTable:
            if (x <= a_) {
                return offset_;
            }
            return offset_ + Scalar(bump_partial_integral(a_, b_, x));
        case PieceKind::Stub:
            if (x == lo()) {
                return Scalar(v0_);
            }
            if (x == hi()) {
                return Scalar(v1_);
            }
            throw Error(ErrorCode::StubPiece, "singular stub '" + label_ + "' is not evaluable at " + x.str());
        }
        return {};
    }

    /// One-sided derivative at an end of the span (inward direction).
    std::optional<Scalar> end_derivative(bool right_end) const
    {
        const Rat& e = right_end ? hi() : lo();
        switch (kind_) {
        case PieceKind::Constant: return Scalar();
        case PieceKind::Affine:
        case PieceKind::Power:
        case PieceKind::Poly: return Scalar(poly_.derivative()(e));
        case PieceKind::Bump:
            if (e <= a_ || e >= b_) {
                return Scalar();
            }
            return Scalar(bump_height(b_ - a_) * BoundedReal(Rat(2) / (b_ - a_)) * psi_derivative(1, gap_coord(e)));
        case PieceKind::AcTable:
            if (!slopes_) {
                return std::nullopt;
            }
            if (e <= a_ || e >= b_) {
                return Scalar();
            }
            return Scalar(bump_value(a_, b_, e));
        case PieceKind::Stub: return std::nullopt;
        }
        return std::nullopt;
    }

    /// Enclosure of the derivative over [u, v] (inside the span's closure).
    BoundedReal slope_range(const Rat& u, const Rat& v) const
    {
        switch (kind_) {
        case PieceKind::Constant: return BoundedReal::zero();
        case PieceKind::Affine:
        case PieceKind::Power:
        case PieceKind::Poly: {
            auto r = range_on(poly_.derivative(), u, v);
            return BoundedReal::hull(r.min.enclosure(), r.max.enclosure());
        }
        case PieceKind::Bump: {
            Rat tl = gap_coord(std::max(u, a_)), th = gap_coord(std::min(v, b_));
            BoundedReal scale = bump_height(b_ - a_) * BoundedReal(Rat(2) / (b_ - a_));
            // psi' = -2t e^-u u^2 is negative for t > 0 and positive for t < 0
            BoundedReal r;
            if (tl.sign() >= 0) {
                r = -detail::bump_derivative_abs_range(tl, th, 1);
            } else if (th.sign() <= 0) {
                r = detail::bump_derivative_abs_range(-th, -tl, 1);
            } else {
                r = BoundedReal::hull(-detail::bump_derivative_abs_range(Rat(0), th, 1),
                                      detail::bump_derivative_abs_range(Rat(0), -tl, 1));
            }
            return scale * r;
        }
        case PieceKind::AcTable: {
            if (!slopes_) {
                throw Error(ErrorCode::MetadataMissing, "actable piece on " + span_.str() + " has no slope data");
            }
            Rat tl = gap_coord(std::max(u, a_)), th = gap_coord(std::min(v, b_));
            Rat m0 = (tl.sign() <= 0 && th.sign() >= 0) ? Rat(0) : min(tl.abs(), th.abs());
            Rat m1 = max(tl.abs(), th.abs());
            return bump_height(b_ - a_) * detail::bump_derivative_abs_range(m0, m1, 0);
        }
        case PieceKind::Stub:
            throw Error(ErrorCode::MetadataMissing, "stub '" + label_ + "' has no slope data");
        }
        return BoundedReal::entire();
    }

    /// Zeros of the derivative inside the open span. Stubs report the whole
    /// interior: a singular piece has zero derivative almost everywhere.
    DerivativeZeros interior_zeros() const
    {
        DerivativeZeros z;
        Interval inner = span_.interior();
        switch (kind_) {
        case PieceKind::Constant:
        case PieceKind::Stub: z.set = IntervalSet(inner); break;
        case PieceKind::Affine:
        case PieceKind::Power:
        case PieceKind::Poly: {
            Polynomial d = poly_.derivative();
            if (d.is_zero()) {
                z.set = IntervalSet(inner);
                break;
            }
            std::vector<Rat> pts;
            for (const auto& r : real_roots(d, lo(), hi())) {
                if (r.exact() && inner.contains(r.lo)) {
                    pts.push_back(r.lo);
                } else if (!r.exact()) {
                    z.algebraic.push_back(r);
                }
            }
            z.set = IntervalSet::points(pts);
            break;
        }
        case PieceKind::Bump: {
            Rat mid = (a_ + b_) / Rat(2);
            if (inner.contains(mid)) {
                z.set = IntervalSet::points({mid});
            }
            break;
        }
        case PieceKind::AcTable:
            if (!slopes_) {
                throw Error(ErrorCode::MetadataMissing, "actable piece on " + span_.str() + " has no slope data");
            }
            break; // h > 0 strictly inside its gap
        }
        return z;
    }

    /// Strictly increasing on the closed span, certified from metadata.
    bool certified_increasing() const
    {
        switch (kind_) {
        case PieceKind::Affine:
        case PieceKind::Power:
        case PieceKind::Poly: {
            Polynomial d = poly_.derivative();
            if (d.is_zero()) {
                return false;
            }
            // p' >= 0 with finitely many zeros
            return range_on(d, lo(), hi()).min.sign().value_or(-1) >= 0;
        }
        case PieceKind::Bump: return hi() <= (a_ + b_) / Rat(2);
        case PieceKind::AcTable: return true;
        default: return false;
        }
    }

    /// Total variation over the closed span.
    Scalar variation() const
    {
        switch (kind_) {
        case PieceKind::Constant: return Scalar();
        case PieceKind::Stub: return Scalar(variation_);
        case PieceKind::AcTable: return eval(hi()) - eval(lo());
        default: break;
        }
        Scalar total;
        Scalar prev = eval(lo());
        for (const auto& v : turning_values()) {
            total = total + (v - prev).abs();
            prev = v;
        }
        return total + (eval(hi()) - prev).abs();
    }

    /// Same piece plus a constant.
    Piece plus(const Scalar& k) const
    {
        Piece p = *this;
        switch (kind_) {
        case PieceKind::Constant:
        case PieceKind::Bump:
        case PieceKind::AcTable: p.offset_ = offset_ + k; break;
        case PieceKind::Affine:
        case PieceKind::Power:
        case PieceKind::Poly:
            if (!k.is_exact()) {
                throw Error(ErrorCode::DomainError, "polynomial pieces only shift by exact constants");
            }
            p.poly_ = poly_ + Polynomial::constant(k.exact());
            if (kind_ == PieceKind::Power) {
                p.power_[3] += k.exact();
            }
            break;
        case PieceKind::Stub:
            if (!k.is_exact()) {
                throw Error(ErrorCode::DomainError, "stubs only shift by exact constants");
            }
            p.v0_ += k.exact();
            p.v1_ += k.exact();
            break;
        }
        return p;
    }

    /// Monotone stretches of the span: (c, d, direction), direction +1 or -1.
    /// Constant pieces yield a single stretch with direction 0. Irrational
    /// turning points are refined to tiny brackets that are skipped here and
    /// reported in `gaps`.
    struct Stretch {
        Rat c, d;
        bool c_closed, d_closed;
        int dir;
    };
    std::vector<Stretch> stretches(std::vector<RootBracket>& gaps) const
    {
        std::vector<Stretch> out;
        auto push = [&](const Rat& c, bool cc, const Rat& d, bool dc, int dir) {
            if (c < d || (c == d && cc && dc)) {
                out.push_back({c, d, cc, dc, dir});
            }
        };
        switch (kind_) {
        case PieceKind::Stub:
            throw Error(ErrorCode::NotPiecewiseMonotone, "stub '" + label_ + "' has no monotone inverse data");
        case PieceKind::Constant: push(lo(), span_.lo_closed(), hi(), span_.hi_closed(), 0); break;
        case PieceKind::AcTable: push(lo(), span_.lo_closed(), hi(), span_.hi_closed(), 1); break;
        case PieceKind::Bump: {
            Rat mid = (a_ + b_) / Rat(2);
            if (hi() <= mid) {
                push(lo(), span_.lo_closed(), hi(), span_.hi_closed(), 1);
            } else if (lo() >= mid) {
                push(lo(), span_.lo_closed(), hi(), span_.hi_closed(), -1);
            } else {
                push(lo(), span_.lo_closed(), mid, true, 1);
                push(mid, true, hi(), span_.hi_closed(), -1);
            }
            break;
        }
        default: {
            Polynomial d = poly_.derivative();
            if (d.is_zero()) {
                push(lo(), span_.lo_closed(), hi(), span_.hi_closed(), 0);
                break;
            }
            Rat c = lo();
            bool cc = span_.lo_closed();
            for (auto r : real_roots(d, lo(), hi())) {
                if (r.exact() && (r.lo == lo() || r.lo == hi())) {
                    continue;
                }
                r = refine(d, r, Rat::pow2(-64));
                if (r.exact()) {
                    push(c, cc, r.lo, true, direction(c, r.lo));
                    c = r.lo;
                    cc = true;
                } else {
                    push(c, cc, r.lo, true, direction(c, r.lo));
                    gaps.push_back(r);
                    c = r.hi;
                    cc = true;
                }
            }
            push(c, cc, hi(), span_.hi_closed(), direction(c, hi()));
        }
        }
        return out;
    }

    /// Some x in [c, d] with g(x) = t, assuming g is monotone on [c, d] and
    /// t lies between g(c) and g(d). Exact for polynomials with a rational
    /// solution; otherwise a certified bracket.
    RootBracket solve(const Rat& c, const Rat& d, int dir, const Rat& t) const
    {
        if (is_poly_kind()) {
            auto roots = real_roots(poly_ - Polynomial::constant(t), c, d);
            if (!roots.empty()) {
                return refine(poly_ - Polynomial::constant(t), roots.front(), Rat::pow2(-64));
            }
            return {c, d};
        }
        Rat lo_x = c, hi_x = d;
        for (int it = 0; it < 72; ++it) {
            Rat m = (lo_x + hi_x) / Rat(2);
            auto s = compare(eval(m), Scalar(t));
            if (!s) {
                break;
            }
            if (*s == 0) {
                return {m, m};
            }
            ((*s < 0) == (dir > 0) ? lo_x : hi_x) = m;
        }
        return {lo_x, hi_x};
    }

    /// Grammar text for the piece (without its span).
    std::string body_str() const
    {
        auto scalar_text = [](const Scalar& s) { return s.is_exact() ? s.exact().str() : s.str(20); };
        switch (kind_) {
        case PieceKind::Constant: return "const " + (chained_ ? std::string("~") : scalar_text(offset_));
        case PieceKind::Affine: return "affine " + poly_.coeff(1).str() + " " + poly_.coeff(0).str();
        case PieceKind::Power:
            return "power " + power_[0].str() + " " + power_[1].str() + " " + power_[2].str() + " " + power_[3].str();
        case PieceKind::Poly: {
            std::string s = "poly";
            for (const auto& c : poly_.coeffs()) {
                s += " " + c.str();
            }
            return poly_.is_zero() ? s + " 0" : s;
        }
        case PieceKind::Bump: {
            std::string s = "bump " + a_.str() + " " + b_.str();
            if (chained_) {
                return s + " ~";
            }
            return offset_.certainly_zero() ? s : s + " " + scalar_text(offset_);
        }
        case PieceKind::AcTable:
            return "actable " + a_.str() + " " + b_.str() + " " + (chained_ ? std::string("~") : scalar_text(offset_)) +
                   (slopes_ ? "" : " noslopes");
        case PieceKind::Stub:
            return "stub " + label_ + " " + v0_.str() + " " + v1_.str() + " " + variation_.str();
        }
        return {};
    }

    std::string str() const { return span_.str() + " " + body_str(); }

private:
    friend class PiecewiseFn;

    Piece(PieceKind k, Interval span) : kind_(k), span_(std::move(span))
    {
        if (span_.empty() || !span_.bounded() || span_.is_point()) {
            throw Error(ErrorCode::DomainError, "piece span must be a bounded nondegenerate interval");
        }
    }

    void set_gap(const Rat& a, const Rat& b)
    {
        if (!(a < b) || lo() < a || hi() > b) {
            throw Error(ErrorCode::DomainError,
                        "gap piece span " + span_.str() + " must sit inside [" + a.str() + "," + b.str() + "]");
        }
        a_ = a;
        b_ = b;
    }

    bool is_poly_kind() const
    {
        return kind_ == PieceKind::Affine || kind_ == PieceKind::Power || kind_ == PieceKind::Poly;
    }

    Rat gap_coord(const Rat& x) const { return (Rat(2) * x - a_ - b_) / (b_ - a_); }

    int direction(const Rat& c, const Rat& d) const
    {
        Rat m = (c + d) / Rat(2);
        return poly_.derivative()(m).sign() >= 0 ? 1 : -1;
    }

    /// Values at interior turning points, left to right.
    std::vector<Scalar> turning_values() const
    {
        std::vector<Scalar> out;
        if (kind_ == PieceKind::Bump) {
            Rat mid = (a_ + b_) / Rat(2);
            if (lo() < mid && mid < hi()) {
                out.push_back(eval(mid));
            }
            return out;
        }
        Polynomial d = poly_.derivative();
        if (d.is_zero()) {
            return out;
        }
        for (const auto& r : real_roots(d, lo(), hi())) {
            if (r.exact()) {
                if (r.lo != lo() && r.lo != hi()) {
                    out.emplace_back(poly_(r.lo));
                }
            } else {
                out.emplace_back(poly_(refine(d, r, Rat::pow2(-96)).enclosure()));
            }
        }
        return out;
    }

    PieceKind kind_;
    Interval span_;
    Polynomial poly_;
    std::vector<Rat> power_; // k, coef, shift, offset as written
    Rat a_, b_;
    Scalar offset_;
    bool chained_ = false;
    bool slopes_ = true;
    std::string label_;
    Rat v0_, v1_, variation_;
};

/// One-sided jumps at t: left = f(t) - f(t-), right = f(t+) - f(t).
struct Jump {
    Rat at;
    Scalar left;
    Scalar right;
};

/// A finite jump function:
///     f_j(x) = base + sum_{t < x} right(t) + sum_{t <= x} left(t).
class StepFn {
public:
    StepFn() = default;
    explicit StepFn(std::vector<Jump> jumps, Scalar base = Scalar()) : jumps_(std::move(jumps)), base_(std::move(base))
    {
        std::sort(jumps_.begin(), jumps_.end(), [](const Jump& a, const Jump& b) { return a.at < b.at; });
    }

    const std::vector<Jump>& jumps() const { return jumps_; }
    const Scalar& base() const { return base_; }
    bool is_zero() const { return jumps_.empty() && base_.certainly_zero(); }

    Scalar operator()(const Rat& x) const
    {
        Scalar acc = base_;
        for (const auto& j : jumps_) {
            if (j.at < x) {
                acc = acc + j.right + j.left;
            } else if (j.at == x) {
                acc = acc + j.left;
            } else {
                break;
            }
        }
        return acc;
    }

    Scalar total_variation() const
    {
        Scalar acc;
        for (const auto& j : jumps_) {
            acc = acc + j.left.abs() + j.right.abs();
        }
        return acc;
    }

private:
    std::vector<Jump> jumps_;
    Scalar base_;
};

/// A function on a closed bounded interval, tiled by pieces, with optional
/// explicit values at single points. Every point of the domain is either
/// covered by exactly one piece span or carries an explicit value (which
/// then wins over any piece).
class PiecewiseFn {
public:
    PiecewiseFn(std::vector<Piece> pieces, std::map<Rat, Scalar> values = {}, std::string origin = {})
        : pieces_(std::move(pieces)), values_(std::move(values)), origin_(std::move(origin))
    {
        if (pieces_.empty()) {
            throw Error(ErrorCode::DomainError, "a piecewise function needs at least one piece");
        }
        std::sort(pieces_.begin(), pieces_.end(), [](const Piece& a, const Piece& b) { return a.lo() < b.lo(); });
        for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
            const auto& l = pieces_[i].span();
            const auto& r = pieces_[i + 1].span();
            if (pieces_[i].hi() != pieces_[i + 1].lo()) {
                throw Error(ErrorCode::DomainError, "pieces " + l.str() + " and " + r.str() + " do not tile");
            }
            if (l.hi_closed() && r.lo_closed()) {
                throw Error(ErrorCode::DomainError, "pieces " + l.str() + " and " + r.str() + " overlap");
            }
            if (!l.hi_closed() && !r.lo_closed() && !values_.count(pieces_[i].hi())) {
                throw Error(ErrorCode::DomainError, "no value at " + pieces_[i].hi().str());
            }
        }
        const Rat& a = pieces_.front().lo();
        const Rat& b = pieces_.back().hi();
        if ((!pieces_.front().span().lo_closed() && !values_.count(a)) ||
            (!pieces_.back().span().hi_closed() && !values_.count(b))) {
            throw Error(ErrorCode::DomainError, "no value at a domain endpoint");
        }
        for (const auto& [p, v] : values_) {
            if (p < a || p > b) {
                throw Error(ErrorCode::DomainError, "explicit value at " + p.str() + " outside the domain");
            }
        }
        resolve_chains();
    }

    Interval domain() const { return Interval::closed(pieces_.front().lo(), pieces_.back().hi()); }
    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::map<Rat, Scalar>& values() const { return values_; }
    const std::string& origin() const { return origin_; }
    bool has_stub() const
    {
        return std::any_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.is_stub(); });
    }
    bool has_slopes() const
    {
        return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.has_slopes(); });
    }

    Scalar operator()(const Rat& x) const { return eval(x); }
    Scalar eval(const Rat& x) const
    {
        check_domain(x);
        if (auto it = values_.find(x); it != values_.end()) {
            return it->second;
        }
        return pieces_[covering(x)].eval(x);
    }

    /// f(x-) (x above the domain start) and f(x+) (x below the domain end).
    Scalar left_limit(const Rat& x) const
    {
        check_domain(x);
        if (x == domain_lo()) {
            throw Error(ErrorCode::DomainError, "no left limit at the domain start");
        }
        return pieces_[piece_left_of(x)].eval(x);
    }
    Scalar right_limit(const Rat& x) const
    {
        check_domain(x);
        if (x == domain_hi()) {
            throw Error(ErrorCode::DomainError, "no right limit at the domain end");
        }
        return pieces_[piece_right_of(x)].eval(x);
    }

    /// Piece ends and explicitly valued points, sorted, domain ends included.
    std::vector<Rat> breakpoints() const
    {
        std::vector<Rat> out;
        for (const auto& p : pieces_) {
            out.push_back(p.lo());
        }
        out.push_back(domain_hi());
        for (const auto& [p, v] : values_) {
            out.push_back(p);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Jumps at t. Zero structurally when the value and the limit come from
    /// the same piece or across a chained junction.
    Jump jump_at(const Rat& t) const
    {
        check_domain(t);
        Jump j{t, Scalar(), Scalar()};
        auto value_it = values_.find(t);
        bool has_left = t > domain_lo(), has_right = t < domain_hi();
        std::size_t li = has_left ? piece_left_of(t) : 0;
        std::size_t ri = has_right ? piece_right_of(t) : 0;
        if (value_it != values_.end()) {
            if (has_left) {
                j.left = value_it->second - pieces_[li].eval(t);
            }
            if (has_right) {
                j.right = pieces_[ri].eval(t) - value_it->second;
            }
            return j;
        }
        if (!has_left || !has_right || li == ri) {
            return j;
        }
        // t is a junction covered by one of the two pieces
        bool chained = pieces_[ri].is_chained();
        Scalar across = chained ? Scalar() : pieces_[ri].eval(t) - pieces_[li].eval(t);
        if (pieces_[li].span().contains(t)) {
            j.right = across;
        } else {
            j.left = across;
        }
        return j;
    }

    std::string str() const
    {
        if (!origin_.empty()) {
            return origin_;
        }
        std::string s = "piecewise " + domain().str() + ":";
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            s += (i ? "; " : " ") + pieces_[i].str();
        }
        for (const auto& [p, v] : values_) {
            s += " @" + p.str() + "=" + (v.is_exact() ? v.exact().str() : v.str(20));
        }
        return s;
    }

    const Rat& domain_lo() const { return pieces_.front().lo(); }
    const Rat& domain_hi() const { return pieces_.back().hi(); }

    /// Index of the piece whose span contains x (x not an explicit value point
    /// outside every span).
    std::size_t covering(const Rat& x) const
    {
        std::size_t i = piece_right_or_last(x);
        if (pieces_[i].span().contains(x)) {
            return i;
        }
        if (i > 0 && pieces_[i - 1].span().contains(x)) {
            return i - 1;
        }
        throw Error(ErrorCode::DomainError, "no piece covers " + x.str());
    }

    /// Piece just left of x (containing (x - e, x)).
    std::size_t piece_left_of(const Rat& x) const
    {
        auto it = std::lower_bound(pieces_.begin(), pieces_.end(), x,
                                   [](const Piece& p, const Rat& v) { return p.lo() < v; });
        return static_cast<std::size_t>(it - pieces_.begin()) - 1;
    }
    /// Piece just right of x (containing (x, x + e)).
    std::size_t piece_right_of(const Rat& x) const { return piece_right_or_last(x); }

private:
    void check_domain(const Rat& x) const
    {
        if (x < domain_lo() || x > domain_hi()) {
            throw Error(ErrorCode::DomainError, x.str() + " outside the domain " + domain().str());
        }
    }

    std::size_t piece_right_or_last(const Rat& x) const
    {
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                                   [](const Rat& v, const Piece& p) { return v < p.lo(); });
        std::size_t i = static_cast<std::size_t>(it - pieces_.begin());
        return i == 0 ? 0 : i - 1;
    }

    void resolve_chains()
    {
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            Piece& p = pieces_[i];
            if (!p.chained_) {
                continue;
            }
            if (i == 0) {
                throw Error(ErrorCode::ParseError, "the first piece has nothing to chain from");
            }
            Scalar start = pieces_[i - 1].eval(p.lo());
            if (p.kind_ == PieceKind::Constant) {
                p.offset_ = start;
            } else {
                p.offset_ = Scalar();
                p.offset_ = start - p.eval(p.lo());
            }
        }
    }

    std::vector<Piece> pieces_;
    std::map<Rat, Scalar> values_;
    std::string origin_;
};

// ---------------------------------------------------------------------------
// Jumps, variation, decomposition

/// The jump function f_j of f. Only nonzero (or undecided) jumps are listed,
/// so a continuous f gives the zero StepFn.
inline StepFn jump_part(const PiecewiseFn& f)
{
    std::vector<Jump> out;
    for (const auto& t : f.breakpoints()) {
        Jump j = f.jump_at(t);
        if (!j.left.certainly_zero() || !j.right.certainly_zero()) {
            out.push_back(std::move(j));
        }
    }
    return StepFn(std::move(out));
}

inline Scalar total_variation(const PiecewiseFn& f)
{
    Scalar acc;
    for (const auto& p : f.pieces()) {
        acc = acc + p.variation();
    }
    return acc + jump_part(f).total_variation();
}

struct BvDecomposition {
    PiecewiseFn absolutely_continuous;
    PiecewiseFn singular;
    StepFn jumps;
};

/// f = f_a + f_s + f_j. f_s collects the declared stubs (constant between
/// them), f_j is the jump part, f_a the remainder with stubs replaced by
/// constants.
inline BvDecomposition bv_decompose(const PiecewiseFn& f)
{
    StepFn fj = jump_part(f);
    std::vector<Piece> sing, ac;
    Rat s_before;
    for (const auto& p : f.pieces()) {
        Rat mid = (p.lo() + p.hi()) / Rat(2);
        Scalar j_inside = fj(mid);
        if (p.is_stub()) {
            Rat rise = p.stub_rise();
            sing.push_back(Piece::stub(p.span(), p.label(), s_before, s_before + rise, p.variation().exact()));
            ac.push_back(Piece::constant(p.span(), Scalar(p.eval(p.lo()).exact() - s_before) - j_inside));
            s_before += rise;
        } else {
            sing.push_back(Piece::constant(p.span(), Scalar(s_before)));
            ac.push_back(p.plus(-(Scalar(s_before) + j_inside)));
        }
    }
    // explicit values: f_s is continuous there; f_a takes the rest
    std::map<Rat, Scalar> sv, av;
    for (const auto& [p, v] : f.values()) {
        (void)v;
        Scalar s_here = p > f.domain_lo() ? sing[f.piece_left_of(p)].eval(p) : sing.front().eval(p);
        sv[p] = s_here;
        av[p] = f.eval(p) - s_here - fj(p);
    }
    return {PiecewiseFn(std::move(ac), std::move(av)), PiecewiseFn(std::move(sing), std::move(sv)), std::move(fj)};
}

// ---------------------------------------------------------------------------
// Derivative metadata

/// Points where f is differentiable with f' = 0, from piece metadata. At a
/// breakpoint this needs matching one-sided values and both one-sided
/// derivatives exactly zero (only the inward one at a domain end).
inline DerivativeZeros derivative_zero_set(const PiecewiseFn& f)
{
    DerivativeZeros z;
    for (const auto& p : f.pieces()) {
        auto pz = p.interior_zeros();
        z.set = set_union(z.set, pz.set);
        z.algebraic.insert(z.algebraic.end(), pz.algebraic.begin(), pz.algebraic.end());
    }
    std::vector<Rat> add, drop;
    for (const auto& t : f.breakpoints()) {
        Jump j = f.jump_at(t);
        bool continuous = j.left.certainly_zero() && j.right.certainly_zero();
        bool flat = continuous;
        if (flat && t > f.domain_lo()) {
            const auto& lp = f.pieces()[f.piece_left_of(t)];
            auto d = lp.hi() == t ? lp.end_derivative(true) : std::optional<Scalar>{};
            flat = lp.hi() == t ? (d && d->certainly_zero()) : z.set.contains(t);
        }
        if (flat && t < f.domain_hi()) {
            const auto& rp = f.pieces()[f.piece_right_of(t)];
            auto d = rp.lo() == t ? rp.end_derivative(false) : std::optional<Scalar>{};
            flat = rp.lo() == t ? (d && d->certainly_zero()) : z.set.contains(t);
        }
        (flat ? add : drop).push_back(t);
    }
    z.set = set_difference(z.set, IntervalSet::points(drop));
    z.set = set_union(z.set, IntervalSet::points(add));
    return z;
}

/// Strictly increasing on the whole domain, certified from metadata.
inline bool certified_increasing(const PiecewiseFn& f)
{
    for (const auto& p : f.pieces()) {
        if (!p.certified_increasing()) {
            return false;
        }
    }
    for (const auto& t : f.breakpoints()) {
        Jump j = f.jump_at(t);
        if (j.left.sign().value_or(-1) < 0 || j.right.sign().value_or(-1) < 0) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Preimages

struct Preimage {
    IntervalSet set;
    bool exact = true; // false: `set` is an outer approximation
};

namespace detail {

/// Does value v land in s? nullopt when the enclosure straddles.
inline std::optional<bool> lands_in(const Scalar& v, const IntervalSet& s)
{
    if (v.is_exact()) {
        return s.contains(v.exact());
    }
    if (is_subset(IntervalSet(Interval::closed(v.lo_rat(), v.hi_rat())), s)) {
        return true;
    }
    if (set_intersection(IntervalSet(Interval::closed(v.lo_rat(), v.hi_rat())), s).empty()) {
        return false;
    }
    return std::nullopt;
}

/// Preimage of the interval `iv` under an increasing stretch. For a
/// decreasing stretch, the caller passes sign = -1 and the reflected interval.
inline Interval stretch_preimage(const Piece& piece, const Piece::Stretch& st, int sign, const Interval& iv,
                                 bool& exact)
{
    auto g = [&](const Rat& x) { return sign > 0 ? piece.eval(x) : -piece.eval(x); };
    auto cmp = [](const Scalar& v, const Rat& t) { return compare(v, Scalar(t)); };
    Scalar gc = g(st.c), gd = g(st.d);

    Rat lx = st.c, ux = st.d;
    bool lc = st.c_closed, uc = st.d_closed;

    if (iv.lo().is_finite()) {
        const Rat& a = iv.lo().value();
        auto s1 = cmp(gc, a);
        if (!s1) {
            exact = false;
        } else if (*s1 == 0) {
            lc = lc && iv.lo_closed();
        } else if (*s1 < 0) {
            auto s2 = cmp(gd, a);
            if (!s2) {
                exact = false;
            } else if (*s2 < 0 || (*s2 == 0 && !(st.d_closed && iv.lo_closed()))) {
                return {};
            } else if (*s2 == 0) {
                lx = st.d;
                lc = true;
            } else {
                auto br = piece.solve(st.c, st.d, st.dir, sign > 0 ? a : -a);
                lx = br.lo;
                lc = br.exact() ? iv.lo_closed() : true;
                exact = exact && br.exact();
            }
        }
    }
    if (iv.hi().is_finite()) {
        const Rat& b = iv.hi().value();
        auto s1 = cmp(gd, b);
        if (!s1) {
            exact = false;
        } else if (*s1 == 0) {
            uc = uc && iv.hi_closed();
        } else if (*s1 > 0) {
            auto s2 = cmp(gc, b);
            if (!s2) {
                exact = false;
            } else if (*s2 > 0 || (*s2 == 0 && !(st.c_closed && iv.hi_closed()))) {
                return {};
            } else if (*s2 == 0) {
                ux = st.c;
                uc = true;
            } else {
                auto br = piece.solve(st.c, st.d, st.dir, sign > 0 ? b : -b);
                ux = br.hi;
                uc = br.exact() ? iv.hi_closed() : true;
                exact = exact && br.exact();
            }
        }
    }
    if (ux < lx) {
        return {};
    }
    return Interval(lx, ux, lc, uc);
}

inline Interval reflect(const Interval& iv)
{
    auto neg = [](const ExtRat& e) {
        if (!e.is_finite()) {
            return e.kind() == ExtRat::Kind::PosInf ? ExtRat::neg_inf() : ExtRat::pos_inf();
        }
        return ExtRat(-e.value());
    };
    return Interval(neg(iv.hi()), neg(iv.lo()), iv.hi_closed(), iv.lo_closed());
}

} // namespace detail

/// f^-1(s). Exact when every boundary solves rationally; otherwise an outer
/// approximation with certified-bracket endpoints, flagged inexact.
inline Preimage preimage(const PiecewiseFn& f, const IntervalSet& s)
{
    Preimage out;
    std::vector<Interval> parts;
    for (const auto& piece : f.pieces()) {
        std::vector<RootBracket> turning;
        auto sts = piece.stretches(turning);
        for (const auto& st : sts) {
            if (st.dir == 0) {
                auto in = detail::lands_in(piece.eval(st.c), s);
                if (!in || *in) {
                    parts.emplace_back(st.c, st.d, st.c_closed, st.d_closed);
                    out.exact = out.exact && in.has_value();
                }
                continue;
            }
            for (const auto& comp : s.components()) {
                Interval iv = st.dir > 0 ? comp : detail::reflect(comp);
                Interval got = detail::stretch_preimage(piece, st, st.dir, iv, out.exact);
                if (!got.empty()) {
                    parts.push_back(got);
                }
            }
        }
        for (const auto& br : turning) {
            // tiny bracket around an irrational turning point
            Scalar v(piece.polynomial()->operator()(br.enclosure()));
            auto in = detail::lands_in(v, s);
            if (!in || *in) {
                parts.push_back(Interval::closed(br.lo, br.hi));
                out.exact = false;
            }
        }
    }
    IntervalSet result(std::move(parts));
    std::vector<Rat> pts, drop;
    for (const auto& [p, v] : f.values()) {
        drop.push_back(p);
        auto in = detail::lands_in(v, s);
        if (!in || *in) {
            pts.push_back(p);
            out.exact = out.exact && in.has_value();
        }
    }
    result = set_difference(result, IntervalSet::points(drop));
    out.set = set_union(result, IntervalSet::points(pts));
    return out;
}

// ---------------------------------------------------------------------------
// Pathological function as a piecewise member

/// The stage-n pathological function: constant on surviving components
/// (starting at 0), the bump integral across every gap, all chained.
inline PiecewiseFn make_pathological(unsigned n, const RemovalSchedule& sched = RemovalSchedule::standard())
{
    FatCantorStage stage(n, sched);
    std::vector<Piece> pieces;
    auto comps = stage.surviving().components();
    auto gaps = stage.gaps();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i == 0) {
            pieces.push_back(Piece::constant(comps[i], Scalar()));
        } else {
            const auto& g = gaps[i - 1].interval;
            pieces.push_back(
                Piece::ac_table(g, g.lo().value(), g.hi().value()).chained());
            pieces.push_back(Piece::constant(comps[i], Scalar()).chained());
        }
    }
    std::string origin = "pathological " + std::to_string(n);
    if (!(sched == RemovalSchedule::standard())) {
        origin += " schedule " + sched.str();
    }
    return PiecewiseFn(std::move(pieces), {}, origin);
}

} // namespace mcomp
