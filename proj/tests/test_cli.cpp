#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "hsiband/png_io.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using hsiband::cli::run_cli;
using namespace testutil;

namespace {

int run(std::vector<std::string> args) { return run_cli(args); }

bool exists(const fs::path& dir, const char* name) { return fs::exists(dir / name); }

}  // namespace

TEST_CASE("cli: synth -> select -> composite -> evaluate round trip") {
    TempDir td("cli_pipe");
    fs::path s = td.file("scene"), sel = td.file("sel"), c = td.file("comp"), e = td.file("eval");

    REQUIRE(run({"synth", "--out", s.string()}) == 0);
    for (const char* f : {"scene.hdr", "scene.raw", "patches.csv", "render.png", "run_config.json"})
        CHECK(exists(s, f));

    REQUIRE(run({"select", "--cube", (s / "scene.hdr").string(), "--patches",
                 (s / "patches.csv").string(), "--out", sel.string()}) == 0);
    for (const char* f : {"selection.json", "band_scores.csv", "correlation.csv",
                          "csnr_table.csv", "csnr_profile.csv", "run_config.json"})
        CHECK(exists(sel, f));

    REQUIRE(run({"composite", "--cube", (s / "scene.hdr").string(), "--selection",
                 (sel / "selection.json").string(), "--out", c.string()}) == 0);
    CHECK(exists(c, "composite.png"));
    CHECK(exists(c, "composite_provenance.json"));

    REQUIRE(run({"evaluate", "--rgb", (s / "render.png").string(), "--composite",
                 (c / "composite.png").string(), "--patches", (s / "patches.csv").string(),
                 "--out", e.string()}) == 0);
    CHECK(exists(e, "report.csv"));
    CHECK(exists(e, "report.json"));

    // composite dimensions match the generated scene
    hsiband::Rgb8Image img = hsiband::read_png(c / "composite.png");
    CHECK(img.width == 96);
    CHECK(img.height == 96);
}

TEST_CASE("cli: reruns with the same seed are byte-identical") {
    TempDir td("cli_rerun");
    fs::path a = td.file("a"), b = td.file("b");
    REQUIRE(run({"synth", "--out", a.string(), "--seed", "9"}) == 0);
    REQUIRE(run({"synth", "--out", b.string(), "--seed", "9"}) == 0);
    for (const char* f : {"scene.raw", "render.png", "patches.csv"})
        CHECK(same_bytes(a / f, b / f));

    fs::path cdir = td.file("c");
    REQUIRE(run({"synth", "--out", cdir.string(), "--seed", "10"}) == 0);
    CHECK_FALSE(same_bytes(a / "scene.raw", cdir / "scene.raw"));
}

TEST_CASE("cli: run_config.json can be fed back as --config") {
    TempDir td("cli_config");
    fs::path a = td.file("a"), b = td.file("b");
    REQUIRE(run({"synth", "--out", a.string(), "--seed", "5"}) == 0);
    REQUIRE(run({"synth", "--config", (a / "run_config.json").string(), "--out", b.string()}) == 0);
    CHECK(same_bytes(a / "scene.raw", b / "scene.raw"));
}

TEST_CASE("cli: evaluate accepts a pre-computed records CSV") {
    TempDir td("cli_records");
    fs::path out = td.file("out");
    REQUIRE(run({"evaluate", "--records", (kDataDir / "table2_vru.csv").string(), "--out",
                 out.string()}) == 0);
    CHECK(exists(out, "report.csv"));
    CHECK(exists(out, "report.json"));
}

TEST_CASE("cli: evaluate without inputs is a usage error") {
    TempDir td("cli_eval_usage");
    CHECK(run({"evaluate", "--out", td.file("x").string()}) == 2);
}

TEST_CASE("cli: a broken input path maps to exit 2") {
    TempDir td("cli_badpath");
    CHECK(run({"select", "--cube", td.file("nope.hdr").string(), "--patches",
               td.file("nope.csv").string(), "--out", td.file("o").string()}) == 2);
}

TEST_CASE("cli: composite refuses a selection without exactly 3 channels") {
    TempDir td("cli_sel2");
    fs::path s = td.file("scene");
    REQUIRE(run({"synth", "--out", s.string()}) == 0);
    auto seljson = td.file("sel2.json");
    write_text(seljson, R"({"channels": [3, 60], "wavelengths_nm": [461.8, 686.2]})");
    CHECK(run({"composite", "--cube", (s / "scene.hdr").string(), "--selection",
               seljson.string(), "--out", td.file("c2").string()}) == 2);
}

TEST_CASE("cli: heatmap renders a rectangular CSV") {
    TempDir td("cli_heat");
    auto csv = td.file("m.csv");
    write_text(csv, "0,0.5,1\n1,0.5,0\n");
    fs::path out = td.file("h");
    REQUIRE(run({"heatmap", "--input", csv.string(), "--out", out.string()}) == 0);
    hsiband::Rgb8Image img = hsiband::read_png(out / "heatmap.png");
    CHECK(img.width == 3);
    CHECK(img.height == 2);
    // grayscale: R == G == B, min -> 0, max -> 255
    CHECK(img.pixels[img.index(0, 0)] == 0);
    CHECK(img.pixels[img.index(2, 0)] == 255);
    CHECK(img.pixels[img.index(1, 0)] == img.pixels[img.index(1, 0) + 1]);
    CHECK(img.pixels[img.index(1, 0)] == img.pixels[img.index(1, 0) + 2]);
}

TEST_CASE("cli: a constant heatmap maps to mid-gray") {
    TempDir td("cli_heat_const");
    auto csv = td.file("m.csv");
    write_text(csv, "2,2\n2,2\n");
    fs::path out = td.file("h");
    REQUIRE(run({"heatmap", "--input", csv.string(), "--out", out.string()}) == 0);
    hsiband::Rgb8Image img = hsiband::read_png(out / "heatmap.png");
    for (auto px : img.pixels) CHECK(px == 128);
}

TEST_CASE("cli: ragged heatmap input is rejected") {
    TempDir td("cli_ragged");
    auto csv = td.file("m.csv");
    write_text(csv, "1,2,3\n4,5\n");
    CHECK(run({"heatmap", "--input", csv.string(), "--out", td.file("h").string()}) == 2);
}

TEST_CASE("cli: argument errors and help") {
    CHECK(run({"no-such-command"}) == 2);
    CHECK(run({}) == 2);
    CHECK(run({"--help"}) == 0);
    CHECK(run({"synth", "--help"}) == 0);
}
