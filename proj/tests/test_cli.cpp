/*
   Copyright 2026 The lagprod Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"

#include "lagprod/cli.hpp"

using namespace lagprod;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("lagprod_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config file parsing", "[cli][config]") {
    const auto kv = parse_config("# comment\n\n  n = 12\nbeta=2.5  \nout = some dir\n");
    REQUIRE(kv.size() == 3);
    CHECK(kv[0] == std::pair<std::string, std::string>{"n", "12"});
    CHECK(kv[1] == std::pair<std::string, std::string>{"beta", "2.5"});
    CHECK(kv[2] == std::pair<std::string, std::string>{"out", "some dir"});

    auto expect_error = [](const std::string& text, std::size_t line) {
        try {
            parse_config(text, "c.cfg");
            FAIL("no ParseError for: " << text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
            CHECK(e.file() == "c.cfg");
        }
    };
    expect_error("n = 3\nbogus = 1\n", 2);
    expect_error("n = 3\nn = 4\n", 2);
    expect_error("just text\n", 1);
    expect_error("= 4\n", 1);
    expect_error("n =\n", 1);
}

TEST_CASE("constants command", "[cli]") {
    const auto r = cli({"constants", "--n", "256", "--p", "256", "--q", "256", "--beta", "1"});
    REQUIRE(r.code == kExitOk);
    const auto j = Json::parse(r.out);
    CHECK(j["C_n"].get<double>() == Catch::Approx(2.0));
    CHECK(j["beta0"].get<double>() == Catch::Approx(2.0));
}

TEST_CASE("usage errors exit with code 2", "[cli]") {
    CHECK(cli({}).code == kExitConfigError);
    CHECK(cli({"frobnicate"}).code == kExitConfigError);
    CHECK(cli({"constants", "--bogus", "1"}).code == kExitConfigError);
    CHECK(cli({"constants", "--n", "abc"}).code == kExitConfigError);
    CHECK(cli({"constants", "--n", "5", "--p", "4", "--q", "6"}).code == kExitConfigError);
    const auto dir = scratch("usage");
    const auto r = cli({"sample-product", "--n", "8", "--p", "4", "--q", "9", "--out", dir.string()});
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("n <= p <= q") != std::string::npos);
    CHECK(cli({"sample-tw", "--mesh", "0.5", "--out", dir.string()}).code == kExitConfigError);
    CHECK(cli({"sample-single", "--workers", "0", "--out", dir.string()}).code == kExitConfigError);
    CHECK(cli({"constants", "--config"}).code == kExitConfigError);
    CHECK(cli({"constants", "--help"}).code == kExitOk);
}

TEST_CASE("config file values and flag precedence", "[cli]") {
    const auto dir = scratch("config");
    const auto cfg = dir / "run.cfg";
    write_text_file(cfg, "n = 5\np = 7\nq = 9\nbeta = 3\nreps = 21\nseed = 4\n");
    auto r = cli({"--config", cfg.string(), "constants"});
    REQUIRE(r.code == kExitOk);
    auto j = Json::parse(r.out);
    CHECK(j["n"] == 5);
    CHECK(j["q"] == 9);
    CHECK(j["beta"].get<double>() == 3.0);

    r = cli({"constants", "--config", cfg.string(), "--q", "11"});
    REQUIRE(r.code == kExitOk);
    j = Json::parse(r.out);
    CHECK(j["q"] == 11);
    CHECK(j["p"] == 7);

    r = cli({"sample-single", "--config=" + cfg.string(), "--out", (dir / "s").string()});
    REQUIRE(r.code == kExitOk);
    j = Json::parse(r.out);
    CHECK(j["config"]["reps"] == 21);
    CHECK(j["config"]["seed"] == 4);
    CHECK(fs::exists(dir / "s" / "single_samples.csv"));

    write_text_file(dir / "bad.cfg", "n = 5\nwidth = 3\n");
    r = cli({"constants", "--config", (dir / "bad.cfg").string()});
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("bad.cfg:2") != std::string::npos);
    CHECK(cli({"constants", "--config", (dir / "missing.cfg").string()}).code == kExitConfigError);
}

TEST_CASE("compare exit codes", "[cli]") {
    const auto dir = scratch("compare");
    REQUIRE(cli({"sample-tw", "--beta", "2", "--reps", "300", "--seed", "1", "--out", (dir / "a").string()}).code == 0);
    REQUIRE(cli({"sample-tw", "--beta", "2", "--reps", "300", "--seed", "2", "--out", (dir / "b").string()}).code == 0);
    REQUIRE(cli({"sample-single", "--n", "20", "--p", "40", "--beta", "2", "--reps", "300", "--out", (dir / "c").string()}).code == 0);
    const auto a = (dir / "a" / "tw-reference_samples.csv").string();
    const auto b = (dir / "b" / "tw-reference_samples.csv").string();
    const auto c = (dir / "c" / "single_samples.csv").string();

    auto r = cli({"compare", a, a, "--assert"});
    REQUIRE(r.code == kExitOk);
    CHECK(Json::parse(r.out)["D"] == 0.0);

    // A shifted law breaches a tight threshold.
    r = cli({"compare", a, c, "--threshold", "0.01"});
    CHECK(r.code == kExitOk);
    CHECK(Json::parse(r.out)["within_threshold"] == false);
    CHECK(cli({"compare", a, c, "--threshold", "0.01", "--assert"}).code == kExitThresholdBreach);
    CHECK(cli({"compare", a, b, "--threshold", "1", "--assert", "--out", dir.string()}).code == kExitOk);
    CHECK(fs::exists(dir / "compare_report.json"));

    write_text_file(dir / "broken.csv", "# label=x\nreplicate,value\n0,zz\n");
    r = cli({"compare", a, (dir / "broken.csv").string()});
    CHECK(r.code == kExitFailure);
    CHECK(r.err.find("broken.csv:3") != std::string::npos);
}

TEST_CASE("diagnose-potential writes its CSV", "[cli]") {
    const auto dir = scratch("potential");
    const auto r = cli({"diagnose-potential", "--n", "40", "--p", "50", "--beta", "2", "--reps", "20", "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    const auto text = read_text_file(dir / "potential_path.csv");
    CHECK(text.find("k,x,mean,stderr,reference\n0,0,0,0,0\n") != std::string::npos);
    const auto j = Json::parse(r.out);
    CHECK(j["crc32"] == file_crc32(dir / "potential_path.csv"));
}
