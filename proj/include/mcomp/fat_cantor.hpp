#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mcomp/interval_set.hpp"

namespace mcomp {

/// Removal lengths r_k for k >= 1, in eventually geometric form: an explicit
/// prefix r_1..r_m followed by r_{m+j} = tail_first * ratio^(j-1).
///
/// Construction rejects any schedule whose total removal
/// sum_k 2^(k-1) r_k is not strictly below 1. That single condition is
/// equivalent to every generation fitting strictly inside every surviving
/// component, and it keeps the limit set's measure positive.
class RemovalSchedule {
public:
    /// r_k = 4^-k.
    static RemovalSchedule standard() { return geometric(Rat(1, 4), Rat(1, 4)); }

    /// r_k = r1 * q^(k-1).
    static RemovalSchedule geometric(const Rat& r1, const Rat& q) { return RemovalSchedule({}, r1, q); }

    static RemovalSchedule eventually_geometric(std::vector<Rat> prefix, const Rat& tail_first, const Rat& q)
    {
        return RemovalSchedule(std::move(prefix), tail_first, q);
    }

    /// `geometric:R1,Q`, or `standard`.
    static RemovalSchedule parse(std::string_view text)
    {
        std::string s(text);
        if (s == "standard" || s == "default") {
            return standard();
        }
        const std::string tag = "geometric:";
        auto comma = s.find(',');
        if (s.rfind(tag, 0) != 0 || comma == std::string::npos) {
            throw Error(ErrorCode::ParseError, "schedule must look like geometric:R1,Q, got '" + s + "'");
        }
        return geometric(Rat::parse(s.substr(tag.size(), comma - tag.size())), Rat::parse(s.substr(comma + 1)));
    }

    Rat removal(unsigned k) const
    {
        if (k == 0) {
            throw Error(ErrorCode::DomainError, "generations start at 1");
        }
        if (k <= prefix_.size()) {
            return prefix_[k - 1];
        }
        return tail_first_ * ratio_.pow(k - prefix_.size() - 1);
    }

    /// sum_{k=1..n} 2^(k-1) r_k, exactly.
    Rat removed_through(unsigned n) const
    {
        Rat total;
        unsigned m = std::min<unsigned>(n, static_cast<unsigned>(prefix_.size()));
        for (unsigned k = 1; k <= m; ++k) {
            total += Rat::pow2(k - 1) * prefix_[k - 1];
        }
        if (n > m) {
            // geometric part: 2^m tail_first * sum_{j<n-m} (2q)^j
            Rat two_q = Rat(2) * ratio_;
            unsigned cnt = n - m;
            Rat series = two_q == Rat(1) ? Rat(static_cast<long>(cnt)) : (Rat(1) - two_q.pow(cnt)) / (Rat(1) - two_q);
            total += Rat::pow2(m) * tail_first_ * series;
        }
        return total;
    }

    /// Total removal over all generations (finite because 2q < 1).
    Rat total_removal() const
    {
        unsigned m = static_cast<unsigned>(prefix_.size());
        return removed_through(m) + Rat::pow2(m) * tail_first_ / (Rat(1) - Rat(2) * ratio_);
    }

    /// Measure of the limit set, 1 - total_removal().
    Rat limit_measure() const { return Rat(1) - total_removal(); }

    /// Ratio between consecutive tail terms of 2^(k-1) r_k, i.e. 2q.
    Rat tail_term_ratio() const { return Rat(2) * ratio_; }
    std::size_t prefix_length() const { return prefix_.size(); }

    std::string str() const
    {
        if (!prefix_.empty()) {
            std::string s = "prefix:";
            for (std::size_t i = 0; i < prefix_.size(); ++i) {
                s += (i ? "," : "") + prefix_[i].str();
            }
            return s + ";geometric:" + tail_first_.str() + "," + ratio_.str();
        }
        return "geometric:" + tail_first_.str() + "," + ratio_.str();
    }

    friend bool operator==(const RemovalSchedule&, const RemovalSchedule&) = default;

private:
    RemovalSchedule(std::vector<Rat> prefix, Rat tail_first, Rat q)
        : prefix_(std::move(prefix)), tail_first_(std::move(tail_first)), ratio_(std::move(q))
    {
        for (const auto& r : prefix_) {
            if (r.sign() <= 0) {
                throw Error(ErrorCode::ScheduleTooFat, "removal lengths must be positive");
            }
        }
        if (tail_first_.sign() <= 0 || ratio_.sign() <= 0) {
            throw Error(ErrorCode::ScheduleTooFat, "geometric tail needs positive first term and ratio");
        }
        if (Rat(2) * ratio_ >= Rat(1)) {
            throw Error(ErrorCode::ScheduleTooFat,
                        "ratio " + ratio_.str() + " >= 1/2 removes infinite total length");
        }
        if (total_removal() >= Rat(1)) {
            throw Error(ErrorCode::ScheduleTooFat,
                        "total removal " + total_removal().str() + " leaves no positive-measure limit");
        }
    }

    std::vector<Rat> prefix_;
    Rat tail_first_;
    Rat ratio_;
};

struct Gap {
    Interval interval; // open
    unsigned generation = 0;
};

/// Where a point of [0,1] sits in a stage: inside a removed gap, or inside a
/// surviving component. `went_right[j-1]` records the branch taken at
/// generation j on the way down.
struct CantorLocation {
    bool in_gap = false;
    unsigned generation = 0; // of the gap, when in_gap
    Interval where;          // the gap, or the stage-n component
    std::vector<bool> went_right;
};

/// Stage n of a Smith-Volterra-Cantor construction on [0,1]. Every stage-(k-1)
/// component loses its centred open middle of length r_k.
///
/// All scalar data (component length, measure, endpoints of any component)
/// is closed-form, so stages far beyond what can be listed are usable.
/// Listing the 2^n components is refused above `max_listed_stage`.
class FatCantorStage {
public:
    static constexpr unsigned default_max_stage = 30;
    static constexpr unsigned max_listed_stage = 20;

    FatCantorStage(unsigned n, RemovalSchedule sched, unsigned max_stage = default_max_stage)
        : n_(n), sched_(std::move(sched))
    {
        if (n > max_stage) {
            throw Error(ErrorCode::DomainError,
                        "stage " + std::to_string(n) + " above cap " + std::to_string(max_stage));
        }
        ell_.push_back(Rat(1));
        for (unsigned k = 1; k <= n; ++k) {
            Rat r = sched_.removal(k);
            if (r >= ell_.back()) {
                throw Error(ErrorCode::ScheduleTooFat, "generation " + std::to_string(k) + " removal " + r.str() +
                                                           " does not fit in components of length " +
                                                           ell_.back().str());
            }
            ell_.push_back((ell_.back() - r) / Rat(2));
        }
    }

    unsigned stage() const { return n_; }
    const RemovalSchedule& schedule() const { return sched_; }

    /// Common length of the 2^n surviving components.
    const Rat& component_length() const { return ell_.back(); }
    /// Component length after generation k (k <= n).
    const Rat& component_length(unsigned k) const { return ell_.at(k); }
    Rat removal(unsigned k) const { return sched_.removal(k); }

    std::uint64_t component_count() const { return std::uint64_t{1} << n_; }

    /// 2^n * l_n, equal to 1 - sum_{k<=n} 2^(k-1) r_k.
    Rat measure() const { return Rat::pow2(n_) * ell_.back(); }

    /// Left endpoint of the i-th surviving component (0-based, left to right).
    Rat component_left(std::uint64_t i) const
    {
        Rat x;
        for (unsigned j = 1; j <= n_; ++j) {
            if ((i >> (n_ - j)) & 1u) {
                x += ell_[j] + sched_.removal(j);
            }
        }
        return x;
    }

    Interval component(std::uint64_t i) const
    {
        Rat a = component_left(i);
        return Interval::closed(a, a + ell_.back());
    }

    bool listable() const { return n_ <= max_listed_stage; }

    IntervalSet surviving() const
    {
        require_listable();
        std::vector<Interval> parts;
        parts.reserve(component_count());
        for (std::uint64_t i = 0; i < component_count(); ++i) {
            parts.push_back(component(i));
        }
        return IntervalSet(std::move(parts));
    }

    /// Removed open gaps, left to right.
    std::vector<Gap> gaps() const
    {
        require_listable();
        std::vector<Gap> out;
        out.reserve(component_count());
        collect_gaps(Rat(0), 1, out);
        return out;
    }

    /// Left and right endpoints of all surviving components, left to right.
    std::vector<Rat> endpoints() const
    {
        require_listable();
        std::vector<Rat> out;
        for (std::uint64_t i = 0; i < component_count(); ++i) {
            Rat a = component_left(i);
            out.push_back(a);
            out.push_back(a + ell_.back());
        }
        return out;
    }

    CantorLocation locate(const Rat& x) const
    {
        if (x < Rat(0) || x > Rat(1)) {
            throw Error(ErrorCode::DomainError, x.str() + " outside [0,1]");
        }
        CantorLocation loc;
        Rat left;
        for (unsigned j = 1; j <= n_; ++j) {
            Rat gap_lo = left + ell_[j];
            Rat gap_hi = gap_lo + sched_.removal(j);
            if (x > gap_lo && x < gap_hi) {
                loc.in_gap = true;
                loc.generation = j;
                loc.where = Interval::open(gap_lo, gap_hi);
                return loc;
            }
            bool right = x >= gap_hi;
            loc.went_right.push_back(right);
            if (right) {
                left = gap_hi;
            }
        }
        loc.where = Interval::closed(left, left + ell_.back());
        return loc;
    }

    bool in_surviving(const Rat& x) const { return !locate(x).in_gap; }

private:
    void require_listable() const
    {
        if (!listable()) {
            throw Error(ErrorCode::PreconditionUnmet, "stage " + std::to_string(n_) + " has 2^" +
                                                          std::to_string(n_) + " components; listing is capped at stage " +
                                                          std::to_string(max_listed_stage));
        }
    }

    void collect_gaps(const Rat& left, unsigned j, std::vector<Gap>& out) const
    {
        if (j > n_) {
            return;
        }
        Rat gap_lo = left + ell_[j];
        Rat gap_hi = gap_lo + sched_.removal(j);
        collect_gaps(left, j + 1, out);
        out.push_back({Interval::open(gap_lo, gap_hi), j});
        collect_gaps(gap_hi, j + 1, out);
    }

    unsigned n_;
    RemovalSchedule sched_;
    std::vector<Rat> ell_; // ell_[k] = component length after generation k
};

inline FatCantorStage svc_stage(unsigned n, const RemovalSchedule& sched = RemovalSchedule::standard())
{
    return FatCantorStage(n, sched);
}

inline Rat component_length(const FatCantorStage& s) { return s.component_length(); }

} // namespace mcomp
