#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "cli_runner.hpp"
#include "mcomp/rat.hpp"

using json = nlohmann::json;
using mcomp::Rat;
using mcomp::testing::run_cli;
using mcomp::testing::shell_quote;

namespace {

json run_json(const std::string& args, int expect_code = 0)
{
    auto r = run_cli(args);
    EXPECT_EQ(r.code, expect_code) << args << "\n" << r.out;
    return json::parse(r.out);
}

// Exact quantities travel as strings; any JSON number must be an integer.
void expect_no_floats(const json& j)
{
    if (j.is_number()) {
        EXPECT_TRUE(j.is_number_integer()) << j.dump();
    }
    if (j.is_structured()) {
        for (const auto& v : j) {
            expect_no_floats(v);
        }
    }
}

} // namespace

TEST(Cli, CantorStages)
{
    const char* expected[] = {"1", "3/4", "5/8", "9/16"};
    for (int n = 0; n <= 3; ++n) {
        json j = run_json("cantor --stage " + std::to_string(n));
        EXPECT_EQ(j["schema"], 1);
        EXPECT_EQ(j["measure"], expected[n]);
        expect_no_floats(j);
    }
    json j = run_json("cantor --stage 1");
    EXPECT_EQ(j["surviving"], "[0,3/8]∪[5/8,1]");
    EXPECT_EQ(j["gaps"][0]["interval"], "(3/8,5/8)");
    json deep = run_json("cantor --stage 30");
    EXPECT_FALSE(deep.contains("surviving"));
    EXPECT_LT((Rat::parse(deep["measure"].get<std::string>()) - Rat(1, 2)).abs(), Rat(1, 100000000));
}

TEST(Cli, CantorCustomSchedule)
{
    json j = run_json("cantor --stage 1 --schedule geometric:1/3,1/9");
    EXPECT_EQ(j["measure"], "2/3");
    EXPECT_EQ(run_cli("cantor --stage 1 --schedule geometric:3/4,1/2").code, 2);
}

TEST(Cli, VerdictExitCodes)
{
    auto r = run_cli("verdict --fn " + shell_quote("const 5 on [0,1]"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("Guaranteed(EssOpenZeroSet)"), std::string::npos);

    json j = run_json("verdict --json --fn " + shell_quote("pathological 3"), 10);
    EXPECT_EQ(j["result"], "NoGuarantee");
    EXPECT_EQ(j["criteria"][0]["zero_measure"], "9/16");
    expect_no_floats(j);

    j = run_json("verdict --json --all --fn " + shell_quote("power 3 1 0 0 on [-1,1]"));
    EXPECT_EQ(j["criterion"], "DerivativeNonzero");
    EXPECT_EQ(j["criteria"].size(), 6u);

    EXPECT_EQ(run_cli("verdict --fn " + shell_quote("wobble on [0,1]")).code, 2);
    EXPECT_EQ(run_cli("verdict").code, 2);
    EXPECT_EQ(run_cli("frobnicate").code, 2);
}

TEST(Cli, HelpDocumentsGrammar)
{
    auto r = run_cli("--help");
    EXPECT_EQ(r.code, 0);
    for (const char* word : {"piecewise", "actable", "stub", "pathological", "MCOMP_PRECISION", "sf-scan", "essopen"}) {
        EXPECT_NE(r.out.find(word), std::string::npos) << word;
    }
}

TEST(Cli, PathfnModes)
{
    json j = run_json("pathfn eval --stage 1 --at 1/2");
    EXPECT_EQ(j["h"]["value"].get<std::string>().substr(0, 8), "2.299246");
    j = run_json("pathfn eval --stage 1 --at 0");
    EXPECT_EQ(j["value"], "0");
    EXPECT_EQ(j["exact"], true);
    j = run_json("pathfn integrate --stage 2 --from 3/8 --at 5/8");
    EXPECT_EQ(j["value"].get<std::string>().substr(0, 6), "3.4687");
    j = run_json("pathfn image-measure --stage 1");
    EXPECT_EQ(j["value"].get<std::string>().substr(0, 4), "4.23");
    EXPECT_EQ(run_cli("pathfn eval --stage 1 --at 1 --err 1e-200").code, 3);
    EXPECT_EQ(run_cli("pathfn eval --stage 1 --at 2").code, 2);
    EXPECT_EQ(run_cli("pathfn sideways --stage 1").code, 2);
}

TEST(Cli, EmitPlot)
{
    std::string path = ::testing::TempDir() + "mcomp_plot.csv";
    run_json("pathfn eval --stage 1 --at 1/2 --plot-points 16 --emit-plot " + path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,f,err");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 17);
}

TEST(Cli, PrecisionFromEnvironment)
{
    // quadrature caps accuracy near 1e-21; below 64 bits rounding dominates
    auto lo = run_cli("pathfn eval --stage 1 --at 1 --err 1e-18", "MCOMP_PRECISION=53");
    auto hi = run_cli("pathfn eval --stage 1 --at 1 --err 1e-18", "MCOMP_PRECISION=128");
    EXPECT_EQ(lo.code, 3);
    EXPECT_EQ(hi.code, 0);
}

TEST(Cli, DhullAndScan)
{
    json j = run_json("dhull --fn " + shell_quote("piecewise [-1,1]: [-1,0) affine -1 0; [0,1] affine 1 0") +
                      " --at 0 --deltas 1/2,1/4");
    ASSERT_EQ(j["hulls"].size(), 2u);
    EXPECT_EQ(j["hulls"][0]["lo"], "-1");
    EXPECT_EQ(j["hulls"][0]["hi"], "1");
    EXPECT_EQ(j["hulls"][0]["contains_zero"], true);
    expect_no_floats(j);

    j = run_json("sf-scan --fn " + shell_quote("pathological 2") + " --grid cantor-endpoints:2");
    EXPECT_EQ(j["grid_points"], 8);
    EXPECT_EQ(j["heuristic"], true);
    EXPECT_TRUE(j.contains("caveat"));
    EXPECT_EQ(run_cli("sf-scan --fn " + shell_quote("const 1 on [0,1]") + " --grid hexagonal:3").code, 2);
}

TEST(Cli, EssOpenWitness)
{
    json j = run_json("essopen --set " + shell_quote("(0,1) minus {1/2}"));
    EXPECT_EQ(j["U"], "(0,1)");
    EXPECT_EQ(j["V"], "[1/2,1/2]");
    EXPECT_EQ(j["W"], "∅");
    EXPECT_EQ(j["verified"], true);
    EXPECT_EQ(j["discrepancy_measure"], "0");

    j = run_json("essopen --construction components --set " + shell_quote("[0,1] u {2}"));
    EXPECT_EQ(j["U"], "(0,1)");
    EXPECT_EQ(j["verified"], true);

    j = run_json("essopen --cantor-stage 2");
    EXPECT_TRUE(j.contains("caveat"));
    j = run_json("essopen --set " + shell_quote("[0,3/8] u [5/8,1]"));
    EXPECT_TRUE(j.contains("caveat"));
}

TEST(Cli, BvDecomposition)
{
    json j = run_json("bv --fn " + shell_quote("piecewise [0,1]: [0,1/2) const 0; [1/2,1] const 1") + " --at 1/4,3/4");
    EXPECT_EQ(j["total_variation"]["value"], "1");
    ASSERT_EQ(j["jumps"].size(), 1u);
    EXPECT_EQ(j["jumps"][0]["at"], "1/2");
    EXPECT_EQ(j["jumps"][0]["left"]["value"], "1");
    EXPECT_EQ(j["points"][1]["f_j"]["value"], "1");
    EXPECT_EQ(j["points"][1]["f_a"]["value"], "0");
}

TEST(Cli, Demo)
{
    json j = run_json("demo --stage 2", 10);
    EXPECT_EQ(j["cantor_measure"], "5/8");
    EXPECT_EQ(j["verdict"]["result"], "NoGuarantee");
    EXPECT_TRUE(j.contains("f_at_1"));
    EXPECT_TRUE(j.contains("image_measure_surviving"));
    EXPECT_TRUE(j.contains("sf_endpoints"));

    j = run_json("demo --sharpness");
    EXPECT_EQ(j["null_set_measure"], "0");
    EXPECT_EQ(j["preimage_measure"], "1/2");
    EXPECT_EQ(j["fat_preimage_of_null_set"], true);
}

TEST(Cli, ManifestReplayIsByteIdentical)
{
    std::string m = ::testing::TempDir() + "mcomp_manifest.json";
    std::string args = "verdict --json --all --fn " + shell_quote("piecewise [0,1]: [0,1/2) const 0; [1/2,1] const 1");
    auto first = run_cli("--manifest " + m + " " + args);
    std::ifstream in(m);
    json man = json::parse(in);
    EXPECT_EQ(man["subcommand"], "verdict");
    EXPECT_TRUE(man.contains("version"));
    EXPECT_TRUE(man.contains("precision_bits"));
    EXPECT_TRUE(man.contains("wall_time_seconds"));
    auto again = run_cli("--replay " + m);
    EXPECT_EQ(again.code, first.code);
    EXPECT_EQ(again.out, first.out);
}
