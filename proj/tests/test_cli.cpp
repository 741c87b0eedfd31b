#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dumbbell/config.hpp"
#include "dumbbell/report.hpp"

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <filesystem>
#include <fstream>

using namespace dumbbell;

TEST_CASE("tier presets validate and round-trip through JSON")
{
    for (const char* tier : {"tiny", "default", "fine"}) {
        auto cfg = ExperimentConfig::tier_preset(tier);
        CHECK_NOTHROW(cfg.validate());
        const std::string js = cfg.to_json_string();
        const std::string path = std::string("cfg_") + tier + ".json";
        {
            std::ofstream out(path);
            out << js;
        }
        const auto back = ExperimentConfig::from_json_file(path);
        CHECK(back.eps_ladder == cfg.eps_ladder);
        CHECK(back.dumbbell.n_alpha == cfg.dumbbell.n_alpha);
        CHECK(back.quad_order == cfg.quad_order);
        std::filesystem::remove(path);
    }
    CHECK_THROWS(ExperimentConfig::tier_preset("nope"));
}

TEST_CASE("invalid configurations are rejected before any solve")
{
    auto cfg = ExperimentConfig::tier_preset("tiny");
    cfg.eps_ladder = {0.1, 0.2};  // not decreasing
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ExperimentConfig::tier_preset("tiny");
    cfg.eps_ladder = {};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ExperimentConfig::tier_preset("tiny");
    cfg.weight.bumps[0].center = 2.0;  // inside B_3^+
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ExperimentConfig::tier_preset("tiny");
    cfg.k_tilde = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("cross-section task writes deterministic CSV output")
{
    auto cfg = ExperimentConfig::tier_preset("tiny");
    cfg.cross_section_resolution = 200;
    const auto t0 = std::chrono::steady_clock::now();

    const auto run_once = [&](const std::string& dir) {
        LabSession lab(cfg);
        const int code = run_task("cross-section", lab, dir);
        CHECK(code == 0);
        std::ifstream in(dir + "/cross_section.csv", std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const std::string a = run_once("cli_out_a");
    const std::string b = run_once("cli_out_b");
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 5.0);
    CHECK(!a.empty());
    CHECK(a == b);  // byte-identical rerun
    CHECK(a.find("N,resolution,lambda1") == 0);
    CHECK(std::filesystem::exists("cli_out_a/summary.txt"));
    CHECK(std::filesystem::exists("cli_out_a/summary.json"));
    std::filesystem::remove_all("cli_out_a");
    std::filesystem::remove_all("cli_out_b");
}

TEST_CASE("unknown task is rejected")
{
    auto cfg = ExperimentConfig::tier_preset("tiny");
    cfg.cross_section_resolution = 200;
    LabSession lab(cfg);
    CHECK_THROWS_AS(run_task("everything", lab, "cli_out_x"), std::invalid_argument);
    std::filesystem::remove_all("cli_out_x");
}

namespace {

// numeric comparison of a CSV against its committed golden twin
void compare_golden(const std::string& got_path, const std::string& golden_path, double tol)
{
    std::ifstream got(got_path), golden(golden_path);
    REQUIRE(got.good());
    REQUIRE(golden.good());
    std::string a, b;
    while (std::getline(golden, b)) {
        REQUIRE(std::getline(got, a));
        std::stringstream sa(a), sb(b);
        std::string fa, fb;
        while (std::getline(sb, fb, ',')) {
            REQUIRE(std::getline(sa, fa, ','));
            char* end_a = nullptr;
            char* end_b = nullptr;
            const double va = std::strtod(fa.c_str(), &end_a);
            const double vb = std::strtod(fb.c_str(), &end_b);
            if (end_b == fb.c_str() || *end_b != 0) CHECK(fa == fb);  // text field
            else CHECK(std::abs(va - vb) <= tol * std::max(1.0, std::abs(vb)));
        }
    }
}

} // namespace

TEST_CASE("tiny-tier outputs match the committed golden files")
{
    auto cfg = ExperimentConfig::tier_preset("tiny");
    LabSession lab(cfg);
    const std::string golden = std::string(DUMBBELL_SOURCE_DIR) + "/tests/golden";
    run_task("cross-section", lab, "golden_out");
    compare_golden("golden_out/cross_section.csv", golden + "/cross_section_tiny.csv", 1e-6);
    run_task("profiles", lab, "golden_out");
    compare_golden("golden_out/profile_checks.csv", golden + "/profile_checks_tiny.csv", 1e-6);
    std::filesystem::remove_all("golden_out");
}
