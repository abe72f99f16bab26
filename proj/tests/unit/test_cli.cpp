#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "hypsing_cli.hpp"

using namespace hypsing;
using cli::Json;

namespace {

Json report(const cli::Outcome& o) { return Json::parse(o.text); }

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs the built tool and returns its exit status.
int run_tool(const std::string& args)
{
    const std::string cmd = std::string(HYPSING_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string job(const char* name) { return std::string(HYPSING_JOBS_DIR) + "/" + name; }

} // namespace

TEST(Cli, NormalizeSquareRootGerm)
{
    const auto o = cli::run("normalize", R"({"mode":"germ","moebius":[1,0,0,1],"branch":{"power":"1/2"},"model":"disk"})");
    ASSERT_EQ(o.exit_code, cli::kOk) << o.text;
    const Json r = report(o);
    EXPECT_EQ(r["classification"]["kind"], "Conical");
    EXPECT_EQ(r["classification"]["alpha"], "1/2");
    EXPECT_EQ(r["monodromy"]["class"], "elliptic");
    EXPECT_LT(r["normal_form"]["residual"].get<double>(), 1e-12);
}

TEST(Cli, InconsistentGermExitsFour)
{
    const auto o = cli::run("classify", slurp(job("germ_hyperbolic.json")));
    EXPECT_EQ(o.exit_code, cli::kInconsistent) << o.text;
    EXPECT_EQ(report(o)["classification"]["reason"], "HyperbolicMonodromyConical");

    const auto w = cli::run("normalize", R"({"moebius":[[0,1],0,0,1],"branch":"log","model":"halfplane"})");
    EXPECT_EQ(w.exit_code, cli::kInconsistent) << w.text;
}

TEST(Cli, ObstructedSchwarzianHasWitness)
{
    const auto o = cli::run("analyze", R"({"mode":"schwarzian","theta":"2","d":[2,0]})");
    EXPECT_EQ(o.exit_code, cli::kInconsistent) << o.text;
    const Json r = report(o);
    EXPECT_EQ(r["verdict"]["kind"], "NeverDiskValued");
    EXPECT_EQ(r["solution_case"], "LogSolution");
    EXPECT_GT(r["witness"]["abs_F"].get<double>(), 1.0);
}

TEST(Cli, ConeSchwarzian)
{
    const auto o = cli::run("analyze", slurp(job("schwarzian_cone.json")));
    ASSERT_EQ(o.exit_code, cli::kOk) << o.text;
    const Json r = report(o);
    EXPECT_EQ(r["verdict"]["kind"], "ConeCandidate");
    EXPECT_EQ(r["indicial"]["s1"], "1/4");
    EXPECT_EQ(r["indicial"]["s2"], "3/4");
    EXPECT_LT(r["ode_residual"].get<double>(), 1e-10);
}

TEST(Cli, GaussBonnet)
{
    const auto o = cli::run("admissible", R"({"genus":0,"thetas":["1/2","1/2","1/2"]})");
    ASSERT_EQ(o.exit_code, cli::kOk);
    const Json r = report(o);
    EXPECT_EQ(r["sum"], "1/2");
    EXPECT_EQ(r["admissible"], false);
    EXPECT_EQ(report(cli::run("admissible", R"({"genus":1,"thetas":[0]})"))["admissible"], true);
}

TEST(Cli, GridCsv)
{
    const auto o = cli::run("grid", R"({"kind":"cusp","re":[-0.5,0.5],"im":[0.0,0.0],"n":[3,1]})");
    ASSERT_EQ(o.exit_code, cli::kOk);
    std::istringstream in(o.text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "re,im,density,curvature");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (rows == 2) {
            // the origin is outside the punctured disk
            EXPECT_NE(line.find("nan"), std::string::npos);
        }
    }
    EXPECT_EQ(rows, 3);
}

TEST(Cli, ParseErrors)
{
    EXPECT_EQ(cli::run("classify", "{not json").exit_code, cli::kParseError);
    EXPECT_EQ(cli::run("classify", R"({"moebius":[1,0,0],"branch":"log","model":"disk"})").exit_code, cli::kParseError);
    EXPECT_EQ(cli::run("classify", R"({"moebius":[1,0,0,1],"branch":"log","model":"sphere"})").exit_code, cli::kParseError);
    EXPECT_EQ(cli::run("analyze", R"({"mode":"germ","theta":"1/2"})").exit_code, cli::kParseError);
    EXPECT_EQ(cli::run("frobnicate", "{}").exit_code, cli::kParseError);
    cli::Options tiny;
    tiny.order = 2;
    EXPECT_EQ(cli::run("analyze", R"({"theta":"1/2"})", tiny).exit_code, cli::kParseError);
}

TEST(Cli, InvariantViolationExitsThree)
{
    const auto o = cli::run("analyze", R"({"theta":1})");
    EXPECT_EQ(o.exit_code, cli::kInvariantViolation) << o.text;
    EXPECT_EQ(report(o)["status"], "error");
}

TEST(Cli, DeterministicOutput)
{
    for (const char* name : {"germ_cone_half.json", "germ_cusp.json", "schwarzian_obstructed.json", "grid_conical.json"}) {
        const std::string text = slurp(job(name));
        const std::string cmd = std::string(name).starts_with("germ") ? "normalize"
                                : std::string(name).starts_with("grid") ? "grid"
                                                                         : "analyze";
        EXPECT_EQ(cli::run(cmd, text).text, cli::run(cmd, text).text) << name;
    }
}

TEST(Cli, NormalCoordinateRoundTrip)
{
    const std::string base = R"({"moebius":[[1.2,0.3],[0.4,-0.5],[0.4,0.5],[1.2,-0.3]],"branch":{"power":"5/2"},"model":"disk")";
    const Json first = report(cli::run("normalize", base + "}"));
    const Json coord = first["normal_form"]["coord"];
    const auto again = cli::run("classify", base + R"(,"check_coord":)" + coord.dump() + "}");
    ASSERT_EQ(again.exit_code, cli::kOk) << again.text;
    EXPECT_LT(report(again)["check_coord"]["residual"].get<double>(), 1e-10);
}

TEST(CliBinary, SampleJobs)
{
    EXPECT_EQ(run_tool("normalize " + job("germ_cone_half.json")), 0);
    EXPECT_EQ(run_tool("normalize " + job("germ_cusp.json")), 0);
    EXPECT_EQ(run_tool("classify " + job("germ_hyperbolic.json")), 4);
    EXPECT_EQ(run_tool("analyze " + job("schwarzian_obstructed.json")), 4);
    EXPECT_EQ(run_tool("analyze " + job("schwarzian_cone.json")), 0);
    EXPECT_EQ(run_tool("grid " + job("grid_conical.json")), 0);
    EXPECT_EQ(run_tool("admissible " + job("gauss_bonnet.json")), 0);
    EXPECT_EQ(run_tool("analyze /nonexistent.json"), 2);
    EXPECT_EQ(run_tool("bogus"), 2);
}

TEST(CliBinary, OutFileMatchesInProcessReport)
{
    const auto dir = std::filesystem::temp_directory_path() / "hypsing_cli_test";
    std::filesystem::create_directories(dir);
    const auto out = dir / "report.json";
    ASSERT_EQ(run_tool("--order 24 --out " + out.string() + " normalize " + job("germ_cusp.json")), 0);
    cli::Options opt;
    opt.order = 24;
    EXPECT_EQ(slurp(out), cli::run("normalize", slurp(job("germ_cusp.json")), opt).text);
    std::filesystem::remove_all(dir);
}
