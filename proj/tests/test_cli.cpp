#include "support.hpp"

#include "minsess/report.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace minsess {
namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult cli(const std::string& args, const std::string& env = "") {
    CliResult r;
    std::string cmd = env + " " + std::string(MINSESS_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fixture(const std::string& f) { return testing::corpus_path(f); }

std::string temp_file(const std::string& name, const std::string& text) {
    auto path = std::filesystem::temp_directory_path() / ("minsess_" + name);
    std::ofstream(path) << text;
    return path.string();
}

TEST(Cli, CheckWellTyped) {
    CliResult r = cli("check " + fixture("relay.ho"));
    EXPECT_EQ(r.code, 0);
}

TEST(Cli, CheckIllTyped) {
    std::string f = temp_file("ill.ho", "new (s: !(int);end) (s!<true>.0 | ~s?(x).0)\n");
    EXPECT_EQ(cli("check " + f).code, 66);
}

TEST(Cli, CheckUnbalanced) {
    std::string f = temp_file("unbalanced.ho", "free a : !(int);end\nfree ~a : !(int);end\na!<1>.0 | ~a!<2>.0\n");
    EXPECT_EQ(cli("check " + f).code, 1);
}

TEST(Cli, ParseErrorExit) {
    std::string f = temp_file("bad.ho", "a!<1>.\n");
    EXPECT_EQ(cli("check " + f).code, 65);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli("").code, 64);
    EXPECT_EQ(cli("frobnicate x").code, 64);
    EXPECT_EQ(cli("check " + fixture("relay.ho") + " --opt fancy").code, 64);
}

TEST(Cli, DecomposeJson) {
    CliResult r = cli("decompose " + fixture("decomp_proc_types.ho") + " --format json");
    ASSERT_EQ(r.code, 0);
    auto rep = nlohmann::json::parse(r.out).get<DecomposeReport>();
    EXPECT_TRUE(rep.ok);
    EXPECT_EQ(rep.degree, 10);
    EXPECT_TRUE(rep.non_minimal.empty());
    EXPECT_NO_THROW(parse_proc(rep.term));
}

TEST(Cli, ChoiceNeedsExtension) {
    EXPECT_EQ(cli("decompose " + fixture("math_server.ho")).code, 1);
    EXPECT_EQ(cli("decompose " + fixture("math_server.ho") + " --ext choice").code, 0);
}

TEST(Cli, EquivStatuses) {
    EXPECT_EQ(cli("equiv " + fixture("relay.ho")).code, 0);
    CliResult r = cli("equiv " + fixture("math_server.ho") + " --ext choice --depth 5 --tau-budget 16 --format json");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out).get<EquivReport>().status, "match");
}

TEST(Cli, RunDecomposed) {
    CliResult r = cli("run " + fixture("math_server.ho") + " --decomposed --format json");
    ASSERT_EQ(r.code, 0);
    auto rep = nlohmann::json::parse(r.out).get<RunReport>();
    EXPECT_TRUE(rep.stopped);
    bool seen = false;
    for (auto& s : rep.steps) seen |= s.label == "tau u@4!<42>";
    EXPECT_TRUE(seen);
}

TEST(Cli, RunRespectsStepLimit) {
    CliResult r = cli("run " + fixture("rec_server.ho") + " --max-steps 3 --format json");
    ASSERT_EQ(r.code, 0);
    EXPECT_LE(nlohmann::json::parse(r.out).get<RunReport>().steps.size(), 3u);
}

TEST(Cli, CorpusPassesWithAnySeed) {
    std::string args = "corpus " + std::string(MINSESS_CORPUS_DIR) + " --ext choice --format json";
    for (const char* seed : {"1", "42"}) {
        std::string env = std::string("MINSESS_SEED=") + seed;
        CliResult r = cli(args, env);
        ASSERT_EQ(r.code, 0) << r.out;
        auto rep = nlohmann::json::parse(r.out).get<CorpusReport>();
        EXPECT_EQ(rep.seed, seed);
        EXPECT_EQ(rep.passed, rep.total);
        EXPECT_EQ(rep.total, static_cast<int>(testing::corpus_files().size()));
        // The same seed gives the same order.
        EXPECT_EQ(cli(args, env).out, r.out);
    }
}

TEST(Reports, JsonRoundTrip) {
    Program prog = testing::load_fixture("relay.ho");
    DecompOutcome d = decompose_program(prog, Optimization::Duo);
    auto check = make_check_report("relay.ho", check_program(prog));
    auto dec = make_decompose_report("relay.ho", Optimization::Duo, d);
    auto eq = make_equiv_report("relay.ho", Optimization::Duo, 4, 12, testing::equiv(prog, d));
    auto run = make_run_report("relay.ho", d.term, run_trace(d.term, 10), true);
    EXPECT_EQ(nlohmann::json(check).get<CheckReport>(), check);
    EXPECT_EQ(nlohmann::json(dec).get<DecomposeReport>(), dec);
    EXPECT_EQ(nlohmann::json(eq).get<EquivReport>(), eq);
    EXPECT_EQ(nlohmann::json(run).get<RunReport>(), run);
    EXPECT_NE(render_text(dec).find("static correctness: ok"), std::string::npos);
}

} // namespace
} // namespace minsess
