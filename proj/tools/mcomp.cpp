#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcomp/mcomp.hpp"

using namespace mcomp;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitPrecision = 3;
constexpr int kExitNoGuarantee = 10;

const char* kGrammar = R"(Function specs (--fn):
  piecewise DOMAIN: piece; piece; ...     pieces tile DOMAIN
  BODY on INTERVAL [@p=v ...]             a single piece
  pathological N [schedule S]             stage-N smooth increasing function, N <= 20
piece := INTERVAL BODY [@p=v ...]         @p=v sets the value at the point p
BODY  := const C | const ~                ~ continues from the left neighbour
       | affine M B                       M x + B
       | power K COEF SHIFT OFF           COEF (x - SHIFT)^K + OFF
       | poly C0 C1 ...                   C0 + C1 x + ...
       | bump A B [OFF | ~]               gap bump on (A,B)
       | actable A B (OFF | ~) [noslopes] integral of the gap bump from A
       | stub LABEL V0 V1 VAR             declared singular piece (Cantor-like)
Intervals: [a,b] (a,b) [a,b) (a,b] with rationals p/q; no spaces inside.
Sets (--set): intervals joined by ∪ (or u), points as {p};
  marked sets add "minus {points}" and/or "plus {points}".
Schedules (--schedule): standard (r_k = 4^-k) or geometric:R1,Q.
Exit codes: 0 ok/guaranteed, 2 usage or input error, 3 precision unreachable,
  10 no guarantee (verdict). Default precision from MCOMP_PRECISION (bits).)";

const char* kStageCaveat =
    "finite stage: C_n is a finite union of closed intervals and trivially essentially open; the limit set "
    "C (positive measure, nowhere dense) is not essentially open";

// --- JSON encoders -----------------------------------------------------------

json enc(const BoundedReal& b, int digits)
{
    return {{"value", b.value_str(digits)}, {"err", b.err_str()}, {"lo", b.lo_str(digits)}, {"hi", b.hi_str(digits)}};
}

json enc(const Scalar& s, int digits)
{
    if (s.is_exact()) {
        return {{"value", s.exact().str()}, {"err", "0"}, {"exact", true}};
    }
    json j = enc(s.enclosure(), digits);
    j["exact"] = false;
    return j;
}

std::string set_str(const IntervalSet& s) { return s.empty() ? "∅" : s.str(); }

std::vector<std::string> rat_list(const std::vector<Rat>& xs)
{
    std::vector<std::string> out;
    for (const auto& x : xs) {
        out.push_back(x.str());
    }
    return out;
}

json enc(const QuotientHull& h)
{
    auto end = [](const BoundedReal& v, const std::optional<Rat>& e, bool lower) -> std::string {
        if (e) {
            return e->str();
        }
        if (lower ? v.lo_is_neg_inf() : v.hi_is_pos_inf()) {
            return lower ? "-inf" : "+inf";
        }
        return lower ? v.lo_str(17) : v.hi_str(17);
    };
    return {{"delta", h.delta.str()},
            {"lo", end(h.lo, h.lo_exact, true)},
            {"hi", end(h.hi, h.hi_exact, false)},
            {"lo_exact", h.lo_exact.has_value()},
            {"hi_exact", h.hi_exact.has_value()},
            {"lo_attained", h.lo_attained},
            {"hi_attained", h.hi_attained},
            {"contains_zero", h.touches_zero(Rat(0))},
            {"certified", h.certified},
            {"samples", h.samples}};
}

json enc(const EssOpenWitness& w) { return {{"U", set_str(w.U)}, {"V", set_str(w.V)}, {"W", set_str(w.W)}}; }

json enc(const SfScanReport& r)
{
    return {{"grid_points", r.grid.size()},
            {"flagged_count", r.flagged.size()},
            {"measure_proxy", r.measure_proxy.str()},
            {"measure_proxy_decimal", r.measure_proxy.decimal(12)},
            {"zero_tol", r.zero_tol.str()},
            {"finest_delta", r.finest_delta.str()},
            {"heuristic", r.heuristic}};
}

json enc(const CriterionResult& r)
{
    json j = {{"criterion", std::string(to_string(r.criterion))}, {"passed", r.passed}, {"reason", r.reason}};
    if (r.zero_set) {
        j["zero_set"] = set_str(*r.zero_set);
        j["zero_measure"] = r.zero_measure->str();
    }
    if (!r.algebraic_zeros.empty()) {
        json a = json::array();
        for (const auto& b : r.algebraic_zeros) {
            a.push_back({{"lo", b.lo.str()}, {"hi", b.hi.str()}});
        }
        j["irrational_zeros"] = a;
    }
    if (r.witness) {
        j["witness"] = enc(*r.witness);
    }
    if (r.decomposition) {
        j["decomposition"] = {{"absolutely_continuous", r.decomposition->absolutely_continuous.str()},
                              {"singular", r.decomposition->singular.str()},
                              {"jump_count", r.decomposition->jumps.jumps().size()}};
    }
    if (r.sf_superset) {
        j["sf_superset"] = set_str(*r.sf_superset);
    }
    if (r.scan) {
        j["sf_scan"] = enc(*r.scan);
    }
    if (!r.caveats.empty()) {
        j["caveats"] = r.caveats;
    }
    return j;
}

json enc(const Verdict& v)
{
    json j = {{"result", v.guaranteed ? "Guaranteed" : "NoGuarantee"}};
    j["criterion"] = v.criterion ? json(std::string(to_string(*v.criterion))) : json(nullptr);
    json rs = json::array();
    for (const auto& r : v.results) {
        rs.push_back(enc(r));
    }
    j["criteria"] = rs;
    if (!v.errors.empty()) {
        j["errors"] = v.errors;
    }
    return j;
}

json header(const std::string& command)
{
    return {{"schema", 1}, {"command", command}};
}

// --- argument helpers --------------------------------------------------------

std::vector<Rat> parse_rat_list(const std::string& s)
{
    std::vector<Rat> out;
    std::stringstream in(s);
    for (std::string tok; std::getline(in, tok, ',');) {
        out.push_back(Rat::parse(detail::trim(tok)));
    }
    return out;
}

std::vector<Rat> parse_grid(const std::string& spec, const PiecewiseFn& f, bool& cantor)
{
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "uniform" && !arg.empty()) {
        long n = std::stol(arg);
        if (n < 2) {
            throw Error(ErrorCode::ParseError, "uniform grid needs at least 2 points");
        }
        return uniform_grid(f.domain(), static_cast<unsigned>(n));
    }
    if (kind == "cantor-endpoints" && !arg.empty()) {
        cantor = true;
        return cantor_endpoint_grid(static_cast<unsigned>(std::stoul(arg)));
    }
    throw Error(ErrorCode::ParseError, "grid must be uniform:N or cantor-endpoints:STAGE, got '" + spec + "'");
}

void check_err(const BoundedReal& v, const std::optional<std::string>& err)
{
    if (!err) {
        return;
    }
    Rat e = Rat::parse(*err);
    BoundedReal radius = (v.upper_edge() - v.lower_edge()).scaled_pow2(-1);
    if (!radius.hi_at_most(e)) {
        throw Error(ErrorCode::PrecisionUnreachable,
                    "enclosure radius " + radius.hi_str(3) + " exceeds requested " + e.decimal(30) +
                        " at " + std::to_string(precision()) + " bits");
    }
}

bool is_cantor_stage_set(const IntervalSet& s, unsigned& stage)
{
    for (unsigned n = 0; n <= 12; ++n) {
        if (s.size() == (std::size_t{1} << n) && s == svc_stage(n).surviving()) {
            stage = n;
            return true;
        }
    }
    return false;
}

// --- subcommands -------------------------------------------------------------

struct Args {
    unsigned stage = 0;
    bool stage_set = false;
    std::string schedule = "standard";
    int digits = 20;
    bool list = false;
    std::string mode;
    std::optional<std::string> at, from, err, emit_plot, deltas, set, fn;
    unsigned plot_points = 256;
    std::string grid = "uniform:1025";
    std::string tol;
    std::string construction = "hull";
    std::optional<unsigned> cantor_stage;
    bool all = false, as_json = false, sharpness = false;
};

int cmd_cantor(const Args& a, std::ostream& out)
{
    FatCantorStage st(a.stage, RemovalSchedule::parse(a.schedule));
    json j = header("cantor");
    j["stage"] = a.stage;
    j["schedule"] = st.schedule().str();
    j["measure"] = st.measure().str();
    j["measure_decimal"] = st.measure().decimal(static_cast<unsigned>(a.digits));
    j["component_length"] = st.component_length().str();
    j["components"] = st.component_count();
    j["limit_measure"] = (Rat(1) - st.schedule().total_removal()).str();
    if (a.list || a.stage <= 6) {
        j["surviving"] = st.surviving().str();
        json gaps = json::array();
        for (const auto& g : st.gaps()) {
            gaps.push_back({{"interval", g.interval.str()}, {"generation", g.generation}});
        }
        j["gaps"] = gaps;
    }
    j["caveat"] = kStageCaveat;
    out << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_pathfn(const Args& a, std::ostream& out)
{
    PathologicalFn pf(FatCantorStage(a.stage, RemovalSchedule::parse(a.schedule)));
    json j = header("pathfn");
    j["mode"] = a.mode;
    j["stage"] = a.stage;
    if (a.mode == "eval") {
        if (!a.at) {
            throw Error(ErrorCode::ParseError, "pathfn eval needs --at");
        }
        Rat x = Rat::parse(*a.at);
        if (x < Rat(0) || x > Rat(1)) {
            throw Error(ErrorCode::DomainError, "--at must lie in [0,1]");
        }
        Scalar v = pf.f(x);
        check_err(v.enclosure(), a.err);
        j["at"] = x.str();
        j.update(enc(v, a.digits));
        j["h"] = enc(pf.h(x), a.digits);
    } else if (a.mode == "integrate") {
        Rat x = a.from ? Rat::parse(*a.from) : Rat(0);
        Rat y = a.at ? Rat::parse(*a.at) : Rat(1);
        if (x < Rat(0) || y > Rat(1)) {
            throw Error(ErrorCode::DomainError, "integration bounds must lie in [0,1]");
        }
        BoundedReal v = pf.increment(x, y);
        check_err(v, a.err);
        j["from"] = x.str();
        j["to"] = y.str();
        j.update(enc(v, a.digits));
    } else if (a.mode == "image-measure") {
        BoundedReal v = pf.image_measure_surviving();
        check_err(v, a.err);
        j.update(enc(v, a.digits));
        j["total"] = enc(pf.total(), a.digits);
    } else {
        throw Error(ErrorCode::ParseError, "pathfn mode must be eval, integrate or image-measure");
    }
    if (a.emit_plot) {
        std::ofstream csv(*a.emit_plot);
        if (!csv) {
            throw Error(ErrorCode::DomainError, "cannot write " + *a.emit_plot);
        }
        csv << "x,f,err\n";
        for (const Rat& x : uniform_grid(Interval::closed(Rat(0), Rat(1)), a.plot_points + 1)) {
            BoundedReal v = pf.f(x).enclosure();
            csv << x.decimal(12) << "," << v.value_str(17) << "," << v.err_str() << "\n";
        }
        j["plot"] = *a.emit_plot;
    }
    out << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_dhull(const Args& a, std::ostream& out)
{
    PiecewiseFn f = parse_fn_spec(*a.fn);
    Rat x = Rat::parse(*a.at);
    auto deltas = a.deltas ? parse_rat_list(*a.deltas) : default_deltas();
    json j = header("dhull");
    j["function"] = f.str();
    j["at"] = x.str();
    json hs = json::array();
    for (const auto& h : quotient_hull(f, x, deltas)) {
        hs.push_back(enc(h));
    }
    j["hulls"] = hs;
    out << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_sf_scan(const Args& a, std::ostream& out)
{
    PiecewiseFn f = parse_fn_spec(*a.fn);
    bool cantor = false;
    auto grid = parse_grid(a.grid, f, cantor);
    auto deltas = a.deltas ? parse_rat_list(*a.deltas) : default_deltas();
    Rat tol = a.tol.empty() ? default_zero_tol() : Rat::parse(a.tol);
    SfScanReport r = sf_scan(f, grid, deltas, tol);
    json j = header("sf-scan");
    j["function"] = f.str();
    j["grid"] = a.grid;
    j.update(enc(r));
    j["flagged"] = rat_list(r.flagged);
    if (cantor || !f.origin().empty()) {
        j["caveat"] = kStageCaveat;
    }
    out << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_essopen(const Args& a, std::ostream& out)
{
    MarkedSet x;
    std::optional<unsigned> stage = a.cantor_stage;
    if (a.cantor_stage) {
        x = MarkedSet(svc_stage(*a.cantor_stage).surviving());
    } else if (a.set) {
        x = MarkedSet::parse(*a.set);
        unsigned n = 0;
        if (x.removed_null().empty() && x.added_null().empty() && is_cantor_stage_set(x.base(), n)) {
            stage = n;
        }
    } else {
        throw Error(ErrorCode::ParseError, "essopen needs --set or --cantor-stage");
    }
    EssOpenWitness w;
    if (a.construction == "hull") {
        w = essential_open_witness(x);
    } else if (a.construction == "components") {
        w = from_countable_components(x);
    } else {
        throw Error(ErrorCode::ParseError, "--construction must be hull or components");
    }
    json j = header("essopen");
    j["set"] = x.str();
    j["effective"] = set_str(x.effective());
    j.update(enc(w));
    j["verified"] = verify_witness(x, w);
    j["discrepancy_measure"] = discrepancy_measure(x, w.U).str();
    if (stage) {
        j["caveat"] = std::string(kStageCaveat) + " (this set is stage " + std::to_string(*stage) + ")";
    }
    out << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_bv(const Args& a, std::ostream& out)
{
    PiecewiseFn f = parse_fn_spec(*a.fn);
    BvDecomposition d = bv_decompose(f);
    json j = header("bv");
    j["function"] = f.str();
    j["total_variation"] = enc(total_variation(f), a.digits);
    json jumps = json::array();
    for (const auto& jp : d.jumps.jumps()) {
        jumps.push_back({{"at", jp.at.str()}, {"left", enc(jp.left, a.digits)}, {"right", enc(jp.right, a.digits)}});
    }
    j["jumps"] = jumps;
    j["absolutely_continuous"] = d.absolutely_continuous.str();
    j["singular"] = d.singular.str();
    j["singular_zero"] = !f.has_stub();
    if (a.at) {
        json pts = json::array();
        for (const Rat& x : parse_rat_list(*a.at)) {
            json p = {{"x", x.str()}, {"f_j", enc(d.jumps(x), a.digits)}};
            try {
                p["f"] = enc(f(x), a.digits);
                p["f_a"] = enc(d.absolutely_continuous(x), a.digits);
                p["f_s"] = enc(d.singular(x), a.digits);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::StubPiece) {
                    throw;
                }
                p["note"] = "inside a singular stub";
            }
            pts.push_back(p);
        }
        j["points"] = pts;
    }
    out << j.dump(2) << "\n";
    return kExitOk;
}

void print_verdict_text(const PiecewiseFn& f, const Verdict& v, std::ostream& out)
{
    out << "function: " << f.str() << "\n";
    if (v.guaranteed) {
        out << "Guaranteed(" << to_string(*v.criterion) << ")\n";
    } else {
        out << "NoGuarantee\n";
    }
    for (const auto& r : v.results) {
        out << "  " << (r.passed ? "PASS " : "FAIL ") << to_string(r.criterion) << ": " << r.reason << "\n";
        if (r.witness) {
            out << "       witness U = " << set_str(r.witness->U) << ", V = " << set_str(r.witness->V)
                << ", W = " << set_str(r.witness->W) << "\n";
        }
        for (const auto& c : r.caveats) {
            out << "       caveat: " << c << "\n";
        }
    }
}

int cmd_verdict(const Args& a, std::ostream& out)
{
    PiecewiseFn f = parse_fn_spec(*a.fn);
    Verdict v = verdict(f, a.all);
    if (a.as_json) {
        json j = header("verdict");
        j["function"] = f.str();
        j.update(enc(v));
        out << j.dump(2) << "\n";
    } else {
        print_verdict_text(f, v, out);
    }
    return v.guaranteed ? kExitOk : kExitNoGuarantee;
}

int cmd_demo(const Args& a, std::ostream& out)
{
    if (a.sharpness) {
        PiecewiseFn f = parse_fn_spec(a.fn.value_or("piecewise [0,1]: [0,1/2) const 0; [1/2,1] const 1"));
        MarkedSet n = MarkedSet::parse(a.set.value_or("{1}"));
        SharpnessReport rep = sharpness_demo(f, n);
        json j = header("demo");
        j["demo"] = "sharpness";
        j["function"] = f.str();
        j["null_set"] = n.str();
        j["null_set_measure"] = rep.target_measure.str();
        j["preimage"] = set_str(rep.preimage.set);
        j["preimage_exact"] = rep.preimage.exact;
        j["preimage_measure"] = rep.preimage_measure.str();
        j["fat_preimage_of_null_set"] = rep.fat();
        out << j.dump(2) << "\n";
        return kExitOk;
    }
    unsigned n = a.stage_set ? a.stage : 2;
    if (n > 10) {
        throw Error(ErrorCode::DomainError, "demo stage must be at most 10");
    }
    auto sched = RemovalSchedule::parse(a.schedule);
    FatCantorStage st(n, sched);
    PathologicalFn pf(st);
    PiecewiseFn f = make_pathological(n, sched);
    SfScanReport endpoints = sf_scan(f, cantor_endpoint_grid(n, sched));
    Verdict v = verdict(f);
    json j = header("demo");
    j["demo"] = "pathological";
    j["stage"] = n;
    j["cantor_measure"] = st.measure().str();
    j["f_at_1"] = enc(pf.total(), a.digits);
    j["image_measure_surviving"] = enc(pf.image_measure_surviving(), a.digits);
    j["derivative_zero_set_measure"] = derivative_zero_set(f).set.measure().str();
    j["sf_endpoints"] = enc(endpoints);
    j["sf_endpoints_flagged"] = rat_list(endpoints.flagged);
    j["verdict"] = enc(v);
    j["caveat"] = kStageCaveat;
    out << j.dump(2) << "\n";
    return v.guaranteed ? kExitOk : kExitNoGuarantee;
}

// --- dispatch ----------------------------------------------------------------

int dispatch(std::vector<std::string> argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact measure-theoretic constructions and measurability criteria for compositions g∘f.", "mcomp"};
    app.footer(kGrammar);
    app.require_subcommand(1);
    app.set_version_flag("--version", MCOMP_VERSION);
    Args a;
    long bits = 0;
    std::string manifest_path, replay_path;
    app.add_option("--precision", bits, "working precision in bits (default: MCOMP_PRECISION or 128)");
    app.add_option("--manifest", manifest_path, "write a run manifest (JSON) to this file");
    app.add_option("--replay", replay_path, "re-run the command recorded in a manifest");

    auto* cantor = app.add_subcommand("cantor", "fat Cantor stage: surviving set, gaps, exact measure");
    cantor->add_option("--stage", a.stage, "stage n")->required();
    cantor->add_option("--schedule", a.schedule, "removal schedule");
    cantor->add_option("--digits", a.digits, "decimal digits");
    cantor->add_flag("--list", a.list, "list components and gaps (default for n <= 6)");

    auto* pathfn = app.add_subcommand("pathfn", "the stage-n smooth increasing function f = ∫h");
    pathfn->add_option("mode", a.mode, "eval | integrate | image-measure")->required();
    pathfn->add_option("--stage", a.stage, "stage n")->required();
    pathfn->add_option("--schedule", a.schedule, "removal schedule");
    pathfn->add_option("--at", a.at, "point (eval) or upper limit (integrate)");
    pathfn->add_option("--from", a.from, "lower limit for integrate (default 0)");
    pathfn->add_option("--err", a.err, "required enclosure radius; exit 3 if unreachable");
    pathfn->add_option("--digits", a.digits, "decimal digits");
    pathfn->add_option("--emit-plot", a.emit_plot, "write CSV x,f,err over a uniform grid");
    pathfn->add_option("--plot-points", a.plot_points, "grid intervals for --emit-plot");

    auto* dhull = app.add_subcommand("dhull", "certified difference-quotient hulls at a point");
    dhull->add_option("--fn", a.fn, "function spec")->required();
    dhull->add_option("--at", a.at, "point p/q")->required();
    dhull->add_option("--deltas", a.deltas, "comma-separated decreasing scales (default 2^-3..2^-20)");

    auto* sfscan = app.add_subcommand("sf-scan", "flag grid points whose hull meets [-tol, tol]");
    sfscan->add_option("--fn", a.fn, "function spec")->required();
    sfscan->add_option("--grid", a.grid, "uniform:N or cantor-endpoints:STAGE");
    sfscan->add_option("--deltas", a.deltas, "comma-separated scales");
    sfscan->add_option("--tol", a.tol, "zero tolerance (default 1/10^9)");

    auto* essopen = app.add_subcommand("essopen", "essential-openness witness (U, V, W) for a marked set");
    essopen->add_option("--set", a.set, "marked set, e.g. \"[0,1] minus {1/2} plus {3}\"");
    essopen->add_option("--cantor-stage", a.cantor_stage, "use the stage-n fat Cantor surviving set");
    essopen->add_option("--construction", a.construction, "hull (default) or components");

    auto* bv = app.add_subcommand("bv", "BV decomposition f = f_a + f_s + f_j");
    bv->add_option("--fn", a.fn, "function spec")->required();
    bv->add_option("--at", a.at, "comma-separated points to evaluate the parts at");
    bv->add_option("--digits", a.digits, "decimal digits");

    auto* verd = app.add_subcommand("verdict", "which criterion guarantees measurability of g∘f");
    verd->add_option("--fn", a.fn, "function spec")->required();
    verd->add_flag("--all", a.all, "evaluate every criterion");
    verd->add_flag("--json", a.as_json, "JSON output");

    auto* demo = app.add_subcommand("demo", "end-to-end pathological pipeline, or the null-preimage demo");
    demo->add_option("--stage", a.stage, "stage (default 2)")->each([&](const std::string&) { a.stage_set = true; });
    demo->add_option("--schedule", a.schedule, "removal schedule");
    demo->add_option("--digits", a.digits, "decimal digits");
    demo->add_flag("--sharpness", a.sharpness, "preimage of a null set under --fn (default: step function, {1})");
    demo->add_option("--fn", a.fn, "function for --sharpness");
    demo->add_option("--set", a.set, "null set for --sharpness");

    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << MCOMP_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (bits > 0) {
        set_precision(bits);
    }
    try {
        if (*cantor) return cmd_cantor(a, out);
        if (*pathfn) return cmd_pathfn(a, out);
        if (*dhull) return cmd_dhull(a, out);
        if (*sfscan) return cmd_sf_scan(a, out);
        if (*essopen) return cmd_essopen(a, out);
        if (*bv) return cmd_bv(a, out);
        if (*verd) return cmd_verdict(a, out);
        if (*demo) return cmd_demo(a, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::PrecisionUnreachable ? kExitPrecision : kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

/// Pulls `--flag VALUE` (or `--flag=VALUE`) out of args.
std::optional<std::string> take_option(std::vector<std::string>& args, const std::string& flag)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == flag && i + 1 < args.size()) {
            std::string v = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            return v;
        }
        if (args[i].rfind(flag + "=", 0) == 0) {
            std::string v = args[i].substr(flag.size() + 1);
            args.erase(args.begin() + static_cast<long>(i));
            return v;
        }
    }
    return std::nullopt;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    auto manifest = take_option(args, "--manifest");
    if (auto replay = take_option(args, "--replay")) {
        std::ifstream in(*replay);
        if (!in) {
            std::cerr << "error: cannot read manifest " << *replay << "\n";
            return kExitUsage;
        }
        try {
            json m = json::parse(in);
            args = m.at("args").get<std::vector<std::string>>();
            if (m.contains("precision_bits")) {
                set_precision(m.at("precision_bits").get<long>());
            }
        } catch (const std::exception& e) {
            std::cerr << "error: bad manifest: " << e.what() << "\n";
            return kExitUsage;
        }
    }
    auto t0 = std::chrono::steady_clock::now();
    std::ostringstream out;
    int code = dispatch(args, out, std::cerr);
    std::cout << out.str();
    if (manifest) {
        std::string sub;
        for (const auto& s : args) {
            if (!s.empty() && s[0] != '-') {
                sub = s;
                break;
            }
        }
        json m = {{"schema", 1},
                  {"subcommand", sub},
                  {"args", args},
                  {"version", MCOMP_VERSION},
                  {"precision_bits", precision()},
                  {"exit_code", code},
                  {"wall_time_seconds",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
        std::ofstream(*manifest) << m.dump(2) << "\n";
    }
    return code;
}
