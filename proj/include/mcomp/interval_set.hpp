#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "mcomp/interval.hpp"

namespace mcomp {

enum class SetOp { Union, Intersection, Difference };

/// Finite disjoint union of intervals, kept sorted with no two components
/// that could be merged. The empty component list is the empty set.
class IntervalSet {
public:
    IntervalSet() = default;
    IntervalSet(Interval i) : IntervalSet(std::vector<Interval>{std::move(i)}) {}
    IntervalSet(std::vector<Interval> parts) : comps_(normalize(std::move(parts))) {}

    static IntervalSet points(const std::vector<Rat>& xs)
    {
        std::vector<Interval> v;
        v.reserve(xs.size());
        for (const auto& x : xs) {
            v.push_back(Interval::point(x));
        }
        return IntervalSet(std::move(v));
    }

    const std::vector<Interval>& components() const { return comps_; }
    bool empty() const { return comps_.empty(); }
    std::size_t size() const { return comps_.size(); }

    bool bounded() const
    {
        return std::all_of(comps_.begin(), comps_.end(), [](const Interval& i) { return i.bounded(); });
    }

    bool contains(const Rat& x) const
    {
        auto it = std::partition_point(comps_.begin(), comps_.end(),
                                       [&](const Interval& i) { return i.hi() < ExtRat(x); });
        return it != comps_.end() && it->contains(x);
    }

    /// Exact Lebesgue measure; rejects sets with an infinite endpoint.
    Rat measure() const
    {
        Rat total;
        for (const auto& c : comps_) {
            if (!c.bounded()) {
                throw Error(ErrorCode::UnboundedSet, "measure of unbounded set " + str());
            }
            total += c.length();
        }
        return total;
    }

    IntervalSet complement() const
    {
        std::vector<Interval> out;
        ExtRat prev = ExtRat::neg_inf();
        bool prev_closed = false; // closedness of the complement's next lower endpoint
        bool first = true;
        for (const auto& c : comps_) {
            if (!(first && c.lo().kind() == ExtRat::Kind::NegInf)) {
                out.emplace_back(prev, c.lo(), first ? false : prev_closed, !c.lo_closed());
            }
            first = false;
            prev = c.hi();
            prev_closed = !c.hi_closed();
        }
        if (first) {
            return IntervalSet(Interval::real_line());
        }
        if (prev.kind() != ExtRat::Kind::PosInf) {
            out.emplace_back(prev, ExtRat::pos_inf(), prev_closed, false);
        }
        return IntervalSet(std::move(out));
    }

    /// Union of the open interiors of the components.
    IntervalSet interior() const
    {
        std::vector<Interval> out;
        for (const auto& c : comps_) {
            if (!c.is_point()) {
                out.push_back(c.interior());
            }
        }
        return IntervalSet(std::move(out));
    }

    IntervalSet closure() const
    {
        std::vector<Interval> out;
        for (const auto& c : comps_) {
            out.emplace_back(c.lo(), c.hi(), true, true);
        }
        return IntervalSet(std::move(out));
    }

    /// Canonical serialization; components joined by `∪`, empty set `∅`.
    std::string str() const
    {
        if (comps_.empty()) {
            return "∅";
        }
        std::string s;
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            if (i) {
                s += "∪";
            }
            s += comps_[i].str();
        }
        return s;
    }

    /// Inverse of str(). Also accepts the ASCII union alias `u`/`U`, `{a}` for
    /// a single point, and `{}`/`empty` for the empty set.
    static IntervalSet parse(std::string_view text);

    friend bool operator==(const IntervalSet& a, const IntervalSet& b) { return a.comps_ == b.comps_; }

private:
    static bool lo_before(const Interval& a, const Interval& b)
    {
        if (a.lo() != b.lo()) {
            return a.lo() < b.lo();
        }
        return a.lo_closed() && !b.lo_closed();
    }

    static std::vector<Interval> normalize(std::vector<Interval> parts)
    {
        std::erase_if(parts, [](const Interval& i) { return i.empty(); });
        std::sort(parts.begin(), parts.end(), lo_before);
        std::vector<Interval> out;
        for (auto& nx : parts) {
            if (!out.empty()) {
                Interval& cur = out.back();
                bool touches = cur.hi() > nx.lo() || (cur.hi() == nx.lo() && (cur.hi_closed() || nx.lo_closed()));
                if (touches) {
                    if (nx.hi() > cur.hi()) {
                        cur = Interval(cur.lo(), nx.hi(), cur.lo_closed(), nx.hi_closed());
                    } else if (nx.hi() == cur.hi() && nx.hi_closed() && !cur.hi_closed()) {
                        cur = Interval(cur.lo(), cur.hi(), cur.lo_closed(), true);
                    }
                    continue;
                }
            }
            out.push_back(std::move(nx));
        }
        return out;
    }

    std::vector<Interval> comps_;
};

namespace detail {

inline IntervalSet intersect_sets(const IntervalSet& a, const IntervalSet& b)
{
    std::vector<Interval> out;
    const auto& x = a.components();
    const auto& y = b.components();
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        Interval c = intersect(x[i], y[j]);
        if (!c.empty()) {
            out.push_back(c);
        }
        // advance whichever ends first (ties: the open end is "earlier")
        bool x_first = x[i].hi() < y[j].hi() || (x[i].hi() == y[j].hi() && !x[i].hi_closed());
        if (x_first) {
            ++i;
        } else {
            ++j;
        }
    }
    return IntervalSet(std::move(out));
}

} // namespace detail

/// Exact set algebra on normalized interval sets.
inline IntervalSet combine(const IntervalSet& a, const IntervalSet& b, SetOp mode)
{
    switch (mode) {
    case SetOp::Union: {
        std::vector<Interval> parts = a.components();
        parts.insert(parts.end(), b.components().begin(), b.components().end());
        return IntervalSet(std::move(parts));
    }
    case SetOp::Intersection: return detail::intersect_sets(a, b);
    case SetOp::Difference: return detail::intersect_sets(a, b.complement());
    }
    return {};
}

inline IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) { return combine(a, b, SetOp::Union); }
inline IntervalSet set_intersection(const IntervalSet& a, const IntervalSet& b)
{
    return combine(a, b, SetOp::Intersection);
}
inline IntervalSet set_difference(const IntervalSet& a, const IntervalSet& b)
{
    return combine(a, b, SetOp::Difference);
}

inline IntervalSet symmetric_difference(const IntervalSet& a, const IntervalSet& b)
{
    return set_union(set_difference(a, b), set_difference(b, a));
}

inline Rat measure(const IntervalSet& s) { return s.measure(); }

inline bool is_subset(const IntervalSet& a, const IntervalSet& b) { return set_difference(a, b).empty(); }

/// True when every component is a degenerate point, i.e. the set is finite.
inline bool is_finite_point_set(const IntervalSet& s)
{
    return std::all_of(s.components().begin(), s.components().end(), [](const Interval& i) { return i.is_point(); });
}

namespace detail {

inline std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

inline ExtRat parse_endpoint(const std::string& t)
{
    std::string s = trim(t);
    if (s == "-inf" || s == "-∞") {
        return ExtRat::neg_inf();
    }
    if (s == "+inf" || s == "inf" || s == "∞" || s == "+∞") {
        return ExtRat::pos_inf();
    }
    return Rat::parse(s);
}

inline Interval parse_interval(const std::string& tok)
{
    std::string s = trim(tok);
    if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
        return Interval::point(Rat::parse(s.substr(1, s.size() - 2)));
    }
    if (s.size() < 5 || (s.front() != '[' && s.front() != '(') || (s.back() != ']' && s.back() != ')')) {
        throw Error(ErrorCode::ParseError, "malformed interval '" + s + "'");
    }
    auto comma = s.find(',');
    if (comma == std::string::npos) {
        throw Error(ErrorCode::ParseError, "interval missing ',' in '" + s + "'");
    }
    ExtRat lo = parse_endpoint(s.substr(1, comma - 1));
    ExtRat hi = parse_endpoint(s.substr(comma + 1, s.size() - comma - 2));
    bool lc = s.front() == '[';
    bool hc = s.back() == ']';
    if ((lc && !lo.is_finite()) || (hc && !hi.is_finite())) {
        throw Error(ErrorCode::ParseError, "infinite endpoints must be open in '" + s + "'");
    }
    if (hi < lo) {
        throw Error(ErrorCode::ParseError, "interval with lo > hi: '" + s + "'");
    }
    return {lo, hi, lc, hc};
}

} // namespace detail

inline IntervalSet IntervalSet::parse(std::string_view text)
{
    std::string s = detail::trim(text);
    if (s.empty() || s == "∅" || s == "{}" || s == "empty") {
        return {};
    }
    // unify the union separators
    std::string unified;
    const std::string cup = "∪";
    for (std::size_t i = 0; i < s.size();) {
        if (s.compare(i, cup.size(), cup) == 0) {
            unified += '|';
            i += cup.size();
        } else if (s[i] == 'u' || s[i] == 'U') {
            unified += '|';
            ++i;
        } else {
            unified += s[i++];
        }
    }
    std::vector<Interval> parts;
    std::size_t start = 0;
    while (start <= unified.size()) {
        auto bar = unified.find('|', start);
        std::string tok = unified.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
        if (detail::trim(tok).empty()) {
            throw Error(ErrorCode::ParseError, "empty component in '" + s + "'");
        }
        parts.push_back(detail::parse_interval(tok));
        if (bar == std::string::npos) {
            break;
        }
        start = bar + 1;
    }
    return IntervalSet(std::move(parts));
}

} // namespace mcomp
