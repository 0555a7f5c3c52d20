#pragma once

#include <string>
#include <string_view>

#include "mcomp/interval_set.hpp"

namespace mcomp {

/// A set X presented as a base set corrected by finitely many points:
/// X = (base \ removed_null) ∪ added_null.
class MarkedSet {
public:
    MarkedSet() = default;
    explicit MarkedSet(IntervalSet base, IntervalSet removed_null = {}, IntervalSet added_null = {})
        : base_(std::move(base)), removed_(std::move(removed_null)), added_(std::move(added_null))
    {
        if (!is_finite_point_set(removed_) || !is_finite_point_set(added_)) {
            throw Error(ErrorCode::PreconditionUnmet, "null corrections must be finite point sets");
        }
        if (!is_subset(removed_, base_)) {
            throw Error(ErrorCode::PreconditionUnmet, "removed points " + removed_.str() + " not in base");
        }
        if (!set_intersection(added_, base_).empty()) {
            throw Error(ErrorCode::PreconditionUnmet, "added points " + added_.str() + " meet the base");
        }
    }

    const IntervalSet& base() const { return base_; }
    const IntervalSet& removed_null() const { return removed_; }
    const IntervalSet& added_null() const { return added_; }

    IntervalSet effective() const { return set_union(set_difference(base_, removed_), added_); }

    /// "BASE [minus POINTS] [plus POINTS]".
    std::string str() const
    {
        std::string s = base_.str();
        if (!removed_.empty()) {
            s += " minus " + removed_.str();
        }
        if (!added_.empty()) {
            s += " plus " + added_.str();
        }
        return s;
    }

    static MarkedSet parse(std::string_view text)
    {
        std::string s(text);
        auto cut = [&](const std::string& key) -> std::string {
            auto at = s.find(" " + key + " ");
            if (at == std::string::npos) {
                return {};
            }
            auto end = s.find(key == "minus" ? " plus " : " minus ", at + 1);
            std::string part = s.substr(at + key.size() + 2, end == std::string::npos ? std::string::npos
                                                                                      : end - at - key.size() - 2);
            s.erase(at, end == std::string::npos ? std::string::npos : end - at);
            return part;
        };
        std::string minus = cut("minus");
        std::string plus = cut("plus");
        return MarkedSet(IntervalSet::parse(s), minus.empty() ? IntervalSet() : IntervalSet::parse(minus),
                         plus.empty() ? IntervalSet() : IntervalSet::parse(plus));
    }

private:
    IntervalSet base_, removed_, added_;
};

/// X = (U \ V) ⊔ W with U open and V ⊆ U, W ∩ U = ∅ both null.
struct EssOpenWitness {
    IntervalSet U, V, W;
};

/// Empty when the witness is valid for x, otherwise the first defect found.
inline std::string witness_defect(const MarkedSet& x, const EssOpenWitness& w)
{
    for (const auto& c : w.U.components()) {
        if (c.is_point() || c.lo_closed() || c.hi_closed()) {
            return "U component " + c.str() + " is not open";
        }
    }
    // Representable null sets are exactly the finite point sets.
    if (!is_finite_point_set(w.V)) {
        return "V = " + w.V.str() + " is not null";
    }
    if (!is_finite_point_set(w.W)) {
        return "W = " + w.W.str() + " is not null";
    }
    if (!is_subset(w.V, w.U)) {
        return "V is not inside U";
    }
    if (!set_intersection(w.W, w.U).empty()) {
        return "W meets U";
    }
    IntervalSet rebuilt = set_union(set_difference(w.U, w.V), w.W);
    if (!(rebuilt == x.effective())) {
        return "(U \\ V) ∪ W = " + rebuilt.str() + " differs from X = " + x.effective().str();
    }
    return {};
}

inline bool verify_witness(const MarkedSet& x, const EssOpenWitness& w) { return witness_defect(x, w).empty(); }

/// U is the interior of X once its isolated holes are filled, so that e.g.
/// (0,1) \ {1/2} is witnessed by U = (0,1), V = {1/2}.
inline EssOpenWitness essential_open_witness(const MarkedSet& x)
{
    IntervalSet X = x.effective();
    std::vector<Rat> holes;
    IntervalSet outside = X.complement();
    for (const auto& c : outside.components()) {
        if (c.is_point()) {
            holes.push_back(c.lo().value());
        }
    }
    IntervalSet U = set_union(X, IntervalSet::points(holes)).interior();
    return {U, set_difference(U, X), set_difference(X, U)};
}

/// Component construction: U collects the interiors of the non-degenerate
/// base components; degenerate components and closed endpoints go to W.
inline EssOpenWitness from_countable_components(const MarkedSet& y)
{
    IntervalSet X = y.effective();
    IntervalSet U = y.base().interior();
    return {U, set_difference(U, X), set_difference(X, U)};
}

/// μ(X Δ U); zero for every witness this module produces.
inline Rat discrepancy_measure(const MarkedSet& x, const IntervalSet& U)
{
    return symmetric_difference(x.effective(), U).measure();
}

} // namespace mcomp
