#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdrvqa/config.hpp"
#include "hdrvqa/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace hdrvqa;
namespace fs = std::filesystem;

namespace {

std::string run_capture(const std::string &cmd, int *exit_code) {
    std::string full = cmd + " 2>&1";
    FILE *pipe = popen(full.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (size_t got = fread(buf, 1, sizeof(buf), pipe))
        out.append(buf, got);
    int status = pclose(pipe);
    *exit_code = WEXITSTATUS(status);
    return out;
}

} // namespace

TEST_CASE("schema defaults match the chosen operating point") {
    RunConfig cfg;
    CHECK(cfg.get("nl.delta") == "4");
    CHECK(cfg.get("nl.window") == "17");
    CHECK(cfg.get("chips.t") == "5");
    CHECK(cfg.get("chips.size") == "5");
    CHECK(cfg.get("svr.eps") == "0.1");
    CHECK(cfg.get("gamut") == "bt2020");
    FeatureConfig f = cfg.feature_config();
    CHECK(f.nl.delta == 4.0);
    CHECK(f.nl.window == 17);
    CHECK(f.chips.temporal_extent == 5);
    CHECK(cfg.svr_c_is_auto());
}

TEST_CASE("precedence: file < env < flag") {
    fs::path tmp = fs::temp_directory_path() / "hdrvqa_cfg_test.cfg";
    std::ofstream(tmp) << "nl.delta = 2\nnl.window = 9\n";

    RunConfig cfg;
    cfg.apply_file(tmp.string());
    CHECK(cfg.get("nl.delta") == "2");
    CHECK(cfg.get("nl.window") == "9");

    setenv("HDRVQA_NL_DELTA", "3", 1);
    cfg.apply_env();
    unsetenv("HDRVQA_NL_DELTA");
    CHECK(cfg.get("nl.delta") == "3");
    CHECK(cfg.get("nl.window") == "9"); // env untouched

    cfg.set("nl.delta", "5");
    CHECK(cfg.get("nl.delta") == "5");

    CHECK_THROWS_AS(cfg.set("not.a.knob", "1"), DataError);
    fs::remove(tmp);
}

TEST_CASE("taps parsing validates and normalizes") {
    auto taps = parse_taps("-1,-2,0,2,1");
    double norm = 0.0, sum = 0.0;
    for (double t : taps) {
        norm += t * t;
        sum += t;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sum == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(parse_taps("1,2,3"), DataError);
}

TEST_CASE("config validation catches bad knob values") {
    RunConfig cfg;
    cfg.set("nl.window", "4");
    CHECK_THROWS_AS(cfg.feature_config(), DataError);
    cfg.set("nl.window", "0"); // global mode is allowed
    CHECK(cfg.feature_config().nl.window == 0);
    cfg.set("nl.delta", "-1");
    CHECK_THROWS_AS(cfg.feature_config(), DataError);
    cfg.set("nl.delta", "4");
    cfg.set("chips.kurtosis", "sometimes");
    CHECK_THROWS_AS(cfg.feature_config(), DataError);
}

TEST_CASE("open params come from the merged configuration") {
    RunConfig cfg;
    CHECK_FALSE(cfg.open_params().width.has_value());
    CHECK_FALSE(cfg.open_params().range.has_value()); // auto
    cfg.set("width", "640");
    cfg.set("height", "480");
    cfg.set("range", "full");
    cfg.set("gamut", "bt709");
    OpenParams p = cfg.open_params();
    CHECK(p.width == 640);
    CHECK(p.height == 480);
    CHECK(p.range == SampleRange::Full);
    CHECK(p.gamut == Gamut::Bt709);
}

#ifdef HDRVQA_CLI_PATH

TEST_CASE("help output enumerates every schema knob") {
    int code = 0;
    std::string help = run_capture(std::string(HDRVQA_CLI_PATH) + " extract --help", &code);
    CHECK(code == 0);
    for (const KnobSpec &k : config_schema()) {
        INFO("knob ", k.key);
        CHECK(help.find("--" + k.key) != std::string::npos);
    }
}

TEST_CASE("usage errors exit with code 2") {
    int code = 0;
    run_capture(std::string(HDRVQA_CLI_PATH) + " extract --no-such-flag", &code);
    CHECK(code == 2);
    run_capture(std::string(HDRVQA_CLI_PATH), &code);
    CHECK(code == 2); // missing subcommand
}

TEST_CASE("data errors exit with code 3") {
    int code = 0;
    run_capture(std::string(HDRVQA_CLI_PATH) +
                    " extract --input /nonexistent/v.y4m --out /tmp/x.csv",
                &code);
    CHECK(code == 3);
    run_capture(std::string(HDRVQA_CLI_PATH) +
                    " train --features /nonexistent.csv --scores /nonexistent.csv "
                    "--out /tmp/m.bin",
                &code);
    CHECK(code == 3);
}

#endif
