#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mcomp/ess_open.hpp"
#include "mcomp/fn_spec.hpp"
#include "mcomp/piecewise.hpp"
#include "mcomp/quotient_hull.hpp"

namespace mcomp {

/// Sufficient conditions under which g∘f is measurable for every measurable g.
enum class Criterion {
    InverseAC,         // f strictly increasing with absolutely continuous inverse
    NullPreimage,      // preimages of null sets are null
    SfNull,            // the set where 0 ∈ Df(x) is null
    DerivativeNonzero, // f' ≠ 0 almost everywhere
    EssOpenZeroSet,    // f = AC + countable-image part, {f' = 0} essentially open
    BVJumpOnly,        // bounded variation, no singular part, {f' = 0} essentially open
};

constexpr std::string_view to_string(Criterion c)
{
    switch (c) {
    case Criterion::InverseAC: return "InverseAC";
    case Criterion::NullPreimage: return "NullPreimage";
    case Criterion::SfNull: return "SfNull";
    case Criterion::DerivativeNonzero: return "DerivativeNonzero";
    case Criterion::EssOpenZeroSet: return "EssOpenZeroSet";
    case Criterion::BVJumpOnly: return "BVJumpOnly";
    }
    return "Unknown";
}

/// Outcome of one criterion. `reason` names the first failed hypothesis on
/// failure and summarizes the witness on success; the optional members hold
/// whatever evidence the check produced.
struct CriterionResult {
    Criterion criterion = Criterion::DerivativeNonzero;
    bool passed = false;
    std::string reason;
    std::optional<IntervalSet> zero_set;
    std::vector<RootBracket> algebraic_zeros; // irrational isolated zeros, null
    std::optional<Rat> zero_measure;
    std::optional<EssOpenWitness> witness;
    std::optional<BvDecomposition> decomposition;
    std::optional<IntervalSet> sf_superset; // certified S_f ⊆ this set
    std::optional<SfScanReport> scan;       // heuristic evidence only
    std::vector<std::string> caveats;
};

struct CriteriaOptions {
    unsigned scan_points = 1025; // uniform grid for the heuristic S_f proxy
    std::vector<Rat> deltas = default_deltas();
    Rat zero_tol = default_zero_tol();
    unsigned identity_points = 100;
    std::uint64_t seed = 0x5eed;
};

namespace detail {

inline CriterionResult failed(Criterion c, std::string reason)
{
    CriterionResult r;
    r.criterion = c;
    r.reason = std::move(reason);
    return r;
}

inline void attach_zero_set(CriterionResult& r, const DerivativeZeros& z)
{
    r.zero_set = z.set;
    r.algebraic_zeros = z.algebraic;
    r.zero_measure = z.set.measure();
}

/// Stage and limit measure when f came from the pathological construction.
struct PathologicalOrigin {
    unsigned stage;
    RemovalSchedule schedule;
};

inline std::optional<PathologicalOrigin> pathological_origin(const PiecewiseFn& f)
{
    auto w = words(f.origin());
    if (w.size() < 2 || w[0] != "pathological") {
        return std::nullopt;
    }
    auto sched = w.size() == 4 && w[2] == "schedule" ? RemovalSchedule::parse(w[3]) : RemovalSchedule::standard();
    return PathologicalOrigin{static_cast<unsigned>(std::stoul(w[1])), sched};
}

/// Re-evaluates f = f_a + f_s + f_j at random points; empty when it holds.
inline std::string identity_defect(const PiecewiseFn& f, const BvDecomposition& d, unsigned points, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> k(0, 1L << 20);
    Rat lo = f.domain_lo(), w = f.domain_hi() - lo;
    std::vector<Rat> xs = f.breakpoints();
    for (unsigned i = 0; i < points; ++i) {
        xs.push_back(lo + w * Rat(k(rng), 1L << 20));
    }
    for (const Rat& x : xs) {
        BoundedReal gap = (f(x) - d.absolutely_continuous(x) - d.singular(x) - d.jumps(x)).enclosure();
        if (!gap.contains(Rat(0))) {
            return "decomposition identity fails at " + x.str();
        }
    }
    return {};
}

/// Shared by the two essential-openness criteria: no singular part, then a
/// witness for the exact zero set of f'.
inline CriterionResult ess_open_zero_set(Criterion c, const PiecewiseFn& f, const CriteriaOptions& opt)
{
    if (f.has_stub()) {
        throw Error(ErrorCode::SingularPartPresent, "f has a singular part (declared stub pieces)");
    }
    CriterionResult r;
    r.criterion = c;
    BvDecomposition d = bv_decompose(f);
    if (auto bad = identity_defect(f, d, opt.identity_points, opt.seed); !bad.empty()) {
        r.reason = bad;
        return r;
    }
    r.decomposition = d;
    auto z = derivative_zero_set(f);
    attach_zero_set(r, z);
    MarkedSet zs(z.set);
    EssOpenWitness w = essential_open_witness(zs);
    if (auto bad = witness_defect(zs, w); !bad.empty()) {
        r.reason = "zero-set witness rejected: " + bad;
        return r;
    }
    r.witness = w;
    if (!z.algebraic.empty()) {
        r.caveats.push_back(std::to_string(z.algebraic.size()) +
                            " irrational isolated zero(s) belong to W in addition to the listed points");
    }
    if (auto po = pathological_origin(f)) {
        Rat limit = Rat(1) - po->schedule.total_removal();
        if (limit.sign() > 0) {
            r.caveats.push_back("stage " + std::to_string(po->stage) +
                                " zero set is a finite union of intervals and has a witness, but the limit set of "
                                "measure " + limit.str() +
                                " is nowhere dense with positive measure and is not essentially open");
            r.reason = "finite-stage witness withheld: the limit construction is not essentially open";
            return r;
        }
    }
    r.passed = true;
    r.reason = "zero set " + z.set.str() + " = (U \\ V) ⊔ W with U = " + w.U.str();
    return r;
}

} // namespace detail

/// f' ≠ 0 almost everywhere: the exact zero set has measure 0.
inline CriterionResult check_derivative_nonzero(const PiecewiseFn& f)
{
    CriterionResult r;
    r.criterion = Criterion::DerivativeNonzero;
    auto z = derivative_zero_set(f);
    detail::attach_zero_set(r, z);
    r.passed = r.zero_measure->is_zero();
    r.reason = r.passed ? "derivative zero set " + (z.set.empty() ? std::string("∅") : z.set.str()) + " is null"
                        : "derivative zero set has measure " + r.zero_measure->str();
    return r;
}

/// Certified from metadata: off the zero set and the breakpoints f is
/// differentiable with f' ≠ 0, so Df(x) = {f'(x)} misses 0 there. Breakpoints
/// whose finest hull excludes 0 are dropped. With a positive-measure zero set
/// the sampled proxy is attached as heuristic evidence only.
inline CriterionResult check_sf_null(const PiecewiseFn& f, const CriteriaOptions& opt = {})
{
    CriterionResult r;
    r.criterion = Criterion::SfNull;
    auto z = derivative_zero_set(f);
    detail::attach_zero_set(r, z);
    const Rat finest = *std::min_element(opt.deltas.begin(), opt.deltas.end());
    if (!f.has_stub() && r.zero_measure->is_zero()) {
        std::vector<Rat> kept;
        for (const Rat& t : f.breakpoints()) {
            if (quotient_hull_at(f, t, finest).touches_zero(Rat(0))) {
                kept.push_back(t);
            }
        }
        r.sf_superset = set_union(z.set, IntervalSet::points(kept));
        r.passed = true;
        r.reason = "S_f ⊆ " + (r.sf_superset->empty() ? std::string("∅") : r.sf_superset->str()) + ", measure 0";
        if (!z.algebraic.empty()) {
            r.reason += " (plus " + std::to_string(z.algebraic.size()) + " irrational point(s))";
        }
        return r;
    }
    r.scan = sf_scan(f, uniform_grid(f.domain(), opt.scan_points), opt.deltas, opt.zero_tol);
    if (f.has_stub()) {
        r.reason = "S_f not certifiable on singular stubs; heuristic proxy " + r.scan->measure_proxy.str();
    } else {
        // on the interior of the zero set Df(x) = {0}
        r.reason = "S_f contains the interior of the zero set, measure " + r.zero_measure->str() +
                   "; heuristic proxy " + r.scan->measure_proxy.str();
    }
    return r;
}

/// f = f_1 + f_2 with f_1 absolutely continuous and f_2 of countable image.
/// In this class f_1 = f_a and f_2 = f_j, which needs f_s = 0.
inline CriterionResult check_ess_open_zeroset(const PiecewiseFn& f, const CriteriaOptions& opt = {})
{
    return detail::ess_open_zero_set(Criterion::EssOpenZeroSet, f, opt);
}

/// Bounded variation, f_s = 0 and an essentially open zero set.
inline CriterionResult check_bv_jump_only(const PiecewiseFn& f, const CriteriaOptions& opt = {})
{
    BoundedReal tv = total_variation(f).enclosure();
    if (!tv.finite()) {
        return detail::failed(Criterion::BVJumpOnly, "total variation not certified finite");
    }
    auto r = detail::ess_open_zero_set(Criterion::BVJumpOnly, f, opt);
    if (r.passed) {
        r.reason = "total variation " + tv.value_str(12) + ", " + std::to_string(r.decomposition->jumps.jumps().size()) +
                   " jump(s); " + r.reason;
    }
    return r;
}

/// Strictly increasing, continuous and absolutely continuous with f' ≠ 0
/// a.e.; then the inverse is absolutely continuous.
inline CriterionResult check_inverse_ac(const PiecewiseFn& f)
{
    if (f.has_stub()) {
        return detail::failed(Criterion::InverseAC, "singular stub: f is not absolutely continuous");
    }
    if (!f.has_slopes()) {
        throw Error(ErrorCode::MetadataMissing, "an actable piece carries no slope data");
    }
    CriterionResult r;
    r.criterion = Criterion::InverseAC;
    auto z = derivative_zero_set(f);
    detail::attach_zero_set(r, z);
    if (!r.zero_measure->is_zero()) {
        r.reason = "derivative zero set has measure " + r.zero_measure->str() + ", so the inverse is not AC";
        return r;
    }
    if (!jump_part(f).is_zero()) {
        r.reason = "f has jumps, so it is not absolutely continuous";
        return r;
    }
    if (!certified_increasing(f)) {
        r.reason = "f is not certified strictly increasing";
        return r;
    }
    r.passed = true;
    r.reason = "strictly increasing, continuous, zero set " + (z.set.empty() ? std::string("∅") : z.set.str()) +
               " is null";
    return r;
}

/// Preimages of null sets are null. In this class that holds exactly when
/// no piece is constant and f' ≠ 0 a.e.; a constant piece c gives the
/// counterexample N = {c}.
inline CriterionResult check_null_preimage(const PiecewiseFn& f)
{
    if (f.has_stub()) {
        return detail::failed(Criterion::NullPreimage, "singular stub: preimages of null sets not decidable");
    }
    CriterionResult r;
    r.criterion = Criterion::NullPreimage;
    auto z = derivative_zero_set(f);
    detail::attach_zero_set(r, z);
    for (const auto& p : f.pieces()) {
        if (p.kind() == PieceKind::Constant) {
            Scalar c = p.eval(p.lo());
            r.reason = "N = {" + c.str() + "} is null but its preimage contains " + p.span().str();
            return r;
        }
    }
    r.passed = r.zero_measure->is_zero();
    r.reason = r.passed ? "every piece is strictly monotone with f' ≠ 0 a.e."
                        : "derivative zero set has measure " + r.zero_measure->str();
    return r;
}

struct Verdict {
    bool guaranteed = false;
    std::optional<Criterion> criterion;
    std::vector<CriterionResult> results; // in evaluation order
    std::vector<std::string> errors;      // hypotheses that raised instead of deciding

    const CriterionResult* find(Criterion c) const
    {
        for (const auto& r : results) {
            if (r.criterion == c) {
                return &r;
            }
        }
        return nullptr;
    }
};

/// Evaluation order, cheapest first. NullPreimage is reported on request only.
inline const std::vector<Criterion>& verdict_order()
{
    static const std::vector<Criterion> order{Criterion::DerivativeNonzero, Criterion::SfNull,
                                              Criterion::EssOpenZeroSet, Criterion::BVJumpOnly, Criterion::InverseAC};
    return order;
}

inline CriterionResult run_criterion(Criterion c, const PiecewiseFn& f, const CriteriaOptions& opt)
{
    switch (c) {
    case Criterion::InverseAC: return check_inverse_ac(f);
    case Criterion::NullPreimage: return check_null_preimage(f);
    case Criterion::SfNull: return check_sf_null(f, opt);
    case Criterion::DerivativeNonzero: return check_derivative_nonzero(f);
    case Criterion::EssOpenZeroSet: return check_ess_open_zeroset(f, opt);
    case Criterion::BVJumpOnly: return check_bv_jump_only(f, opt);
    }
    throw Error(ErrorCode::DomainError, "unknown criterion");
}

/// First criterion that certifies f, or every failure. With `all`, keeps
/// going after a success and also reports NullPreimage.
inline Verdict verdict(const PiecewiseFn& f, bool all = false, const CriteriaOptions& opt = {})
{
    Verdict v;
    std::vector<Criterion> order = verdict_order();
    if (all) {
        order.push_back(Criterion::NullPreimage);
    }
    for (Criterion c : order) {
        CriterionResult r;
        try {
            r = run_criterion(c, f, opt);
        } catch (const Error& e) {
            r = detail::failed(c, e.what());
            v.errors.push_back(std::string(to_string(c)) + ": " + e.what());
        }
        bool pass = r.passed;
        v.results.push_back(std::move(r));
        if (pass && !v.guaranteed) {
            v.guaranteed = true;
            v.criterion = c;
            if (!all) {
                break;
            }
        }
    }
    return v;
}

/// Preimage of a (typically null) set: the χ_N shape behind every criterion.
/// A null N with a preimage of positive measure is the failure mode.
struct SharpnessReport {
    IntervalSet target;
    Rat target_measure;
    Preimage preimage;
    Rat preimage_measure;
    bool fat() const { return target_measure.is_zero() && preimage_measure.sign() > 0; }
};

inline SharpnessReport sharpness_demo(const PiecewiseFn& f, const IntervalSet& n)
{
    SharpnessReport rep;
    rep.target = n;
    rep.target_measure = n.measure();
    rep.preimage = preimage(f, n);
    rep.preimage_measure = rep.preimage.set.measure();
    return rep;
}

inline SharpnessReport sharpness_demo(const PiecewiseFn& f, const MarkedSet& n)
{
    return sharpness_demo(f, n.effective());
}

} // namespace mcomp
