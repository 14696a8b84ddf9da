#include <qcert/run.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qcert;

namespace {

RunConfig config(const std::string& text) { return parse_config_text(text); }

// Structural comparison with a relative tolerance on numbers.
void expect_json_close(const nlohmann::json& got, const nlohmann::json& want, const std::string& path) {
    if (want.is_number() && got.is_number()) {
        const double a = got.get<double>(), b = want.get<double>();
        EXPECT_NEAR(a, b, 1e-12 * (1.0 + std::abs(b))) << path;
        return;
    }
    ASSERT_EQ(got.type(), want.type()) << path;
    if (want.is_object()) {
        ASSERT_EQ(got.size(), want.size()) << path;
        for (const auto& [k, v] : want.items()) {
            ASSERT_TRUE(got.contains(k)) << path << "." << k;
            expect_json_close(got[k], v, path + "." + k);
        }
    } else if (want.is_array()) {
        ASSERT_EQ(got.size(), want.size()) << path;
        for (std::size_t i = 0; i < want.size(); ++i)
            expect_json_close(got[i], want[i], path + "[" + std::to_string(i) + "]");
    } else {
        EXPECT_EQ(got, want) << path;
    }
}

void check_golden(const std::string& name, const RunConfig& c) {
    const RunResult r = run(c);
    const std::filesystem::path file = std::filesystem::path(QCERT_GOLDEN_DIR) / (name + ".json");
    if (std::getenv("QCERT_UPDATE_GOLDEN") != nullptr) {
        std::filesystem::create_directories(file.parent_path());
        std::ofstream(file) << r.report.dump(2) << "\n";
    }
    std::ifstream in(file);
    ASSERT_TRUE(in) << "missing golden file " << file;
    expect_json_close(r.report, nlohmann::json::parse(in), name);
}

int cli(const std::string& args) {
    const std::string cmd = std::string(QCERT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, RoundTrip) {
    RunConfig c;
    c.mode = "theorem1";
    c.function = "x1^2 + x2";
    c.g = {"2*x1", "1"};
    c.lambda = "1";
    c.domain = "x1:-1:1,x2:0.5:2";
    c.grid = 11;
    c.random_points = 7;
    c.seed = 123456789012345ULL;
    c.tol = 1.0 / 3.0;
    c.x_star = {0.1, -0.2};
    c.start = {0.0, 0.3};
    c.x1_range = {0.0, 0.4};
    c.matrix = "1,0;0,1";
    c.border = {1.0, 0.0};
    c.format = "json";
    EXPECT_EQ(parse_config_text(to_config_text(c)), c);
    EXPECT_EQ(parse_config_text(to_config_text(RunConfig{})), RunConfig{});
}

TEST(Config, CommentsAndErrors) {
    const RunConfig c = config("# comment\n\nmode = oracle\n  trials = 50  \n");
    EXPECT_EQ(c.mode, "oracle");
    EXPECT_EQ(c.trials, 50u);
    EXPECT_THROW(config("colour = red"), Error);
    EXPECT_THROW(config("trials = -3"), Error);
    EXPECT_THROW(config("tol = abc"), Error);
    EXPECT_THROW(config("just text"), Error);
}

TEST(Config, DomainParsing) {
    const BoxDomain b = parse_domain("x1:-0.5:0.5,x2:0:2");
    EXPECT_EQ(b.lower(), (Vector{-0.5, 0.0}));
    EXPECT_EQ(b.upper(), (Vector{0.5, 2.0}));
    EXPECT_EQ(parse_domain(format_domain(b)).upper(), b.upper());
    EXPECT_THROW(parse_domain("x2:0:1"), Error);
    EXPECT_THROW(parse_domain("x1:1:0"), Error);
    EXPECT_THROW(parse_domain("x1:0"), Error);
}

TEST(Run, ExitCodes) {
    EXPECT_EQ(run(config("mode = theorem1\nfunction = debreu_f")).exit_code, 0);
    EXPECT_EQ(run(config("mode = theorem1\nfunction = convex_sq")).exit_code, 1);
    EXPECT_EQ(run(config("mode = theorem2\nfunction = katzner")).exit_code, 2);
    EXPECT_EQ(run(config("mode = theorem1\nfunction = x1^4\ndomain = x1:-1:1,x2:-1:1")).exit_code, 3);
    EXPECT_EQ(run(config("mode = oracle\nfunction = x1^4\ndomain = x1:-1:1,x2:-1:1\ntrials = 10000\nseed = 7")).exit_code,
              1);
    EXPECT_EQ(run(config("mode = oracle\nfunction = x1 + * x2\ndomain = x1:-1:1,x2:-1:1")).exit_code, 4);
    EXPECT_EQ(run(config("mode = bogus\nfunction = katzner")).exit_code, 4);
    EXPECT_EQ(run(config("mode = oracle\nfunction = x1^2")).exit_code, 4);  // no domain
    EXPECT_EQ(run(config("mode = property_n\nmatrix = 1,0;0,1\nborder = 1,0")).exit_code, 1);
    EXPECT_EQ(run(config("mode = property_n\nmatrix = -1,0;0,-1\nborder = 1,1")).exit_code, 0);
}

TEST(Run, ExpressionFieldUsesDifferences) {
    const RunResult r =
        run(config("mode = theorem1\nfunction = -(x1^2 + x2^2) + 3*x1 + 3*x2\ndomain = x1:-1:1,x2:-1:1\nformat = json"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_TRUE(r.report["metadata"]["fd_used"]["grad"].get<bool>());
    EXPECT_TRUE(r.report["metadata"]["fd_used"]["dg"].get<bool>());
}

TEST(Run, ExplicitPairValidatedFirst) {
    // g = Df / 2 with lambda = 2 is a valid decomposition of x1 + x2^2
    const RunResult ok = run(config(
        "mode = theorem1\nfunction = x1 + x2^2\ng = 0.5; x2\nlambda = 2\ndomain = x1:-1:1,x2:-1:1\nformat = json"));
    EXPECT_EQ(ok.report["mode"], "theorem1");
    EXPECT_EQ(ok.report["metadata"]["pair_validation"]["verdict"], "certified");
    // a wrong lambda is reported as a failed validation
    const RunResult bad = run(config(
        "mode = theorem1\nfunction = x1 + x2^2\ng = 0.5; x2\nlambda = 3\ndomain = x1:-1:1,x2:-1:1\nformat = json"));
    EXPECT_EQ(bad.exit_code, 1);
    EXPECT_EQ(bad.report["mode"], "validate_pair");
    RunConfig scratch;
    EXPECT_THROW(set_config_value(scratch, "lambda_typo", "1"), Error);
    EXPECT_EQ(run(config("mode = theorem1\nfunction = katzner\nlambda = 2")).exit_code, 4);
}

TEST(Run, JsonSchema) {
    const RunResult r = run(config("mode = theorem1\nfunction = convex_sq\ngrid = 3\nformat = json"));
    const auto& j = r.report;
    for (const char* key : {"mode", "verdict", "tolerances", "grid", "margins", "witnesses", "metadata"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["verdict"], "refuted");
    EXPECT_EQ(j["margins"].size(), 9u);
    for (const char* key : {"x", "max_kernel_eig"}) EXPECT_TRUE(j["margins"][0].contains(key));
    ASSERT_EQ(j["witnesses"].size(), 1u);
    for (const char* key : {"x", "y", "t", "lhs", "rhs", "gap"}) EXPECT_TRUE(j["witnesses"][0].contains(key));
    for (const char* key : {"fd_used", "generator", "version"}) EXPECT_TRUE(j["metadata"].contains(key));
    EXPECT_EQ(j["metadata"]["generator"], "splitmix64-counter");
    EXPECT_EQ(nlohmann::json::parse(r.output), j);
}

TEST(Run, TraceWritesCsv) {
    const RunResult r = run(config("mode = trace\nfunction = debreu_f\nlevel = 0.5\nx1_range = 0,0.4"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.output.rfind("x1,x2,f\n", 0), 0u);
    EXPECT_EQ(std::count(r.output.begin(), r.output.end(), '\n'), 402);
}

TEST(Run, WritesReportAtomically) {
    const auto dir = std::filesystem::temp_directory_path() / "qcert_run_test";
    std::filesystem::create_directories(dir);
    const auto out = dir / "report.json";
    std::filesystem::remove(out);
    RunConfig c = config("mode = oracle\nfunction = linear\ntrials = 100\nformat = json");
    c.out = out.string();
    const RunResult r = run(c);
    EXPECT_EQ(r.exit_code, 0);
    std::ifstream in(out);
    ASSERT_TRUE(in);
    EXPECT_EQ(nlohmann::json::parse(in)["verdict"], "no_violation");
    EXPECT_FALSE(std::filesystem::exists(dir / "report.json.tmp"));
}

TEST(Golden, CorpusReports) {
    check_golden("debreu_theorem1", config("mode = theorem1\nfunction = debreu_f\ngrid = 5\nformat = json"));
    check_golden("katzner_theorem2", config("mode = theorem2\nfunction = katzner\ngrid = 5\nformat = json"));
    check_golden("quartic_oracle", config("mode = oracle\nfunction = quartic_x1\ntrials = 1000\nformat = json"));
}

TEST(Cli, ExitCodesFromBinary) {
    EXPECT_EQ(cli("theorem1 --function debreu_f"), 0);
    EXPECT_EQ(cli("oracle --function x1^4 --domain x1:-1:1,x2:-1:1 --trials 10000 --seed 7"), 1);
    EXPECT_EQ(cli("theorem2 --function katzner"), 2);
    EXPECT_EQ(cli("theorem1 --function x1^4 --domain x1:-1:1,x2:-1:1"), 3);
    EXPECT_EQ(cli("theorem1 --function katzner --grid abc"), 4);
    EXPECT_EQ(cli("--no-such-flag"), 4);
    EXPECT_EQ(cli(""), 4);
    EXPECT_EQ(cli("--list-corpus"), 0);
}

TEST(Cli, ConfigFileWithOverride) {
    const auto path = std::filesystem::temp_directory_path() / "qcert_cli_test.conf";
    std::ofstream(path) << "mode = theorem1\nfunction = convex_sq\n";
    EXPECT_EQ(cli("--config " + path.string()), 1);
    EXPECT_EQ(cli("--config " + path.string() + " --function debreu_f"), 0);
    EXPECT_EQ(cli("--config /nonexistent/file.conf"), 4);
}
