#include <doctest.h>

#include <cmath>

#include "hsiband/envi_io.hpp"
#include "hsiband/error.hpp"
#include "hsiband/rng.hpp"
#include "test_util.hpp"

using namespace hsiband;

namespace {

SpectralCube sample_cube(int rows, int cols, int bands, std::uint64_t seed) {
    SpectralCube cube;
    cube.rows = rows;
    cube.cols = cols;
    cube.axis = WavelengthAxis::uniform(450.0, 950.0, bands);
    cube.data.resize(static_cast<std::size_t>(bands) * rows * cols);
    rng::Stream s(seed);
    for (auto& v : cube.data) v = static_cast<float>(s.next_unit());
    return cube;
}

}  // namespace

TEST_CASE("cube save/load round-trips bit-exactly") {
    testutil::TempDir tmp("envi_roundtrip");
    SpectralCube cube = sample_cube(5, 7, 4, 99);
    save_cube(cube, tmp.file("c.hdr"));

    SpectralCube back = load_cube(tmp.file("c.hdr"));
    CHECK(back.rows == 5);
    CHECK(back.cols == 7);
    CHECK(back.bands() == 4);
    CHECK(back.data == cube.data);
    CHECK(back.axis.wavelengths_nm == cube.axis.wavelengths_nm);
    CHECK_FALSE(back.range_fallback);
    CHECK_FALSE(back.values_clamped);
}

TEST_CASE("missing value_range falls back to observed min/max") {
    testutil::TempDir tmp("envi_fallback");
    // 1x1x2 payload holding 2.0 and 6.0
    float payload[2] = {2.0f, 6.0f};
    std::ofstream raw(tmp.file("c.raw"), std::ios::binary);
    raw.write(reinterpret_cast<const char*>(payload), sizeof payload);
    raw.close();
    testutil::write_text(tmp.file("c.hdr"),
                         "samples = 1\nlines = 1\nbands = 2\ninterleave = bsq\n"
                         "data_type = 4\nbyte_order = 0\nwavelength = { 500, 600 }\n");

    SpectralCube cube = load_cube(tmp.file("c.hdr"));
    CHECK(cube.range_fallback);
    CHECK(cube.value_min == 2.0);
    CHECK(cube.value_max == 6.0);
    CHECK(cube.at(0, 0, 0) == doctest::Approx(0.0));
    CHECK(cube.at(1, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("constant payload without value_range maps to zero") {
    testutil::TempDir tmp("envi_const");
    float payload[2] = {3.0f, 3.0f};
    std::ofstream raw(tmp.file("c.raw"), std::ios::binary);
    raw.write(reinterpret_cast<const char*>(payload), sizeof payload);
    raw.close();
    testutil::write_text(tmp.file("c.hdr"),
                         "samples = 2\nlines = 1\nbands = 1\ninterleave = bsq\n"
                         "data_type = 4\nbyte_order = 0\nwavelength = { 500 }\n");
    SpectralCube cube = load_cube(tmp.file("c.hdr"));
    CHECK(cube.range_fallback);
    CHECK(cube.at(0, 0, 0) == 0.0f);
    CHECK(cube.at(0, 0, 1) == 0.0f);
}

TEST_CASE("declared value_range clamps out-of-range values and flags it") {
    testutil::TempDir tmp("envi_clamp");
    float payload[2] = {-1.0f, 5.0f};
    std::ofstream raw(tmp.file("c.raw"), std::ios::binary);
    raw.write(reinterpret_cast<const char*>(payload), sizeof payload);
    raw.close();
    testutil::write_text(tmp.file("c.hdr"),
                         "samples = 2\nlines = 1\nbands = 1\ninterleave = bsq\n"
                         "data_type = 4\nbyte_order = 0\nwavelength = { 500 }\n"
                         "value_range = { 0, 4 }\n");
    SpectralCube cube = load_cube(tmp.file("c.hdr"));
    CHECK(cube.values_clamped);
    CHECK(cube.at(0, 0, 0) == 0.0f);
    CHECK(cube.at(0, 0, 1) == 1.0f);
}

TEST_CASE("payload size mismatches are rejected") {
    testutil::TempDir tmp("envi_trunc");
    float payload[3] = {0.1f, 0.2f, 0.3f};

    std::ofstream raw(tmp.file("c.raw"), std::ios::binary);
    raw.write(reinterpret_cast<const char*>(payload), sizeof(float) * 3);
    raw.close();
    testutil::write_text(tmp.file("c.hdr"),
                         "samples = 2\nlines = 2\nbands = 1\ninterleave = bsq\n"
                         "data_type = 4\nbyte_order = 0\nwavelength = { 500 }\n"
                         "value_range = { 0, 1 }\n");
    CHECK_THROWS_AS(load_cube(tmp.file("c.hdr")), ValidationError);  // truncated

    testutil::write_text(tmp.file("d.hdr"),
                         "samples = 2\nlines = 1\nbands = 1\ninterleave = bsq\n"
                         "data_type = 4\nbyte_order = 0\nwavelength = { 500 }\n"
                         "value_range = { 0, 1 }\n"
                         "raw_file = c.raw\n");
    CHECK_THROWS_AS(load_cube(tmp.file("d.hdr")), ValidationError);  // oversized
}

TEST_CASE("unsupported header keys are rejected") {
    testutil::TempDir tmp("envi_badkeys");
    float payload[1] = {0.5f};
    std::ofstream raw(tmp.file("c.raw"), std::ios::binary);
    raw.write(reinterpret_cast<const char*>(payload), sizeof payload);
    raw.close();

    auto hdr = [&](const std::string& body) {
        testutil::write_text(tmp.file("c.hdr"), body);
        return tmp.file("c.hdr");
    };
    const std::string base =
        "samples = 1\nlines = 1\nbands = 1\ndata_type = 4\nbyte_order = 0\n"
        "wavelength = { 500 }\nvalue_range = { 0, 1 }\n";

    CHECK_THROWS_AS(load_cube(hdr(base + "interleave = bip\n")), ValidationError);
    CHECK_THROWS_AS(load_cube(hdr("samples = 1\nlines = 1\nbands = 1\ninterleave = bsq\n"
                                  "data_type = 5\nbyte_order = 0\nwavelength = { 500 }\n")),
                    ValidationError);
    CHECK_THROWS_AS(load_cube(hdr("samples = 1\nlines = 1\nbands = 1\ninterleave = bsq\n"
                                  "data_type = 4\nbyte_order = 1\nwavelength = { 500 }\n")),
                    ValidationError);
    // wavelength count mismatch
    CHECK_THROWS_AS(load_cube(hdr("samples = 1\nlines = 1\nbands = 1\ninterleave = bsq\n"
                                  "data_type = 4\nbyte_order = 0\nwavelength = { 500, 600 }\n")),
                    ValidationError);
    // duplicate key
    CHECK_THROWS_AS(load_cube(hdr(base + "interleave = bsq\nsamples = 1\n")), ValidationError);
    // missing required key
    CHECK_THROWS_AS(load_cube(hdr("samples = 1\nlines = 1\ninterleave = bsq\n"
                                  "data_type = 4\nbyte_order = 0\nwavelength = { 500 }\n")),
                    ValidationError);
}

TEST_CASE("multi-line brace lists and comments parse") {
    testutil::TempDir tmp("envi_braces");
    float payload[2] = {0.1f, 0.9f};
    std::ofstream raw(tmp.file("c.raw"), std::ios::binary);
    raw.write(reinterpret_cast<const char*>(payload), sizeof payload);
    raw.close();
    testutil::write_text(tmp.file("c.hdr"),
                         "ENVI\n; a comment line\nsamples = 1\nlines = 1\nbands = 2\n"
                         "interleave = bsq\ndata_type = 4\nbyte_order = 0\n"
                         "wavelength = { 500,\n  600 }\nvalue_range = { 0, 1 }\n");
    SpectralCube cube = load_cube(tmp.file("c.hdr"));
    CHECK(cube.bands() == 2);
    CHECK(cube.axis[1] == 600.0);
}

TEST_CASE("missing files raise usage-class errors naming the path") {
    testutil::TempDir tmp("envi_missing");
    try {
        load_cube(tmp.file("nope.hdr"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("nope.hdr") != std::string::npos);
    }
    try {
        load_patchset(tmp.file("nope.csv"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("nope.csv") != std::string::npos);
    }
}

TEST_CASE("patchset load assigns class ids in first-appearance order") {
    testutil::TempDir tmp("patch_ok");
    auto p = tmp.file("p.csv");
    testutil::write_text(p,
                         "label,class,x,y,w,h\n"
                         "background,background,0,0,4,4\n"
                         "ped1,pedestrian,4,0,3,3\n"
                         "ped2,pedestrian,0,4,3,3\n"
                         "car1,vehicle,4,4,2,2\n");
    PatchSet ps = load_patchset(p);
    REQUIRE(ps.patches.size() == 4);
    CHECK(ps.class_names == std::vector<std::string>{"background", "pedestrian", "vehicle"});
    CHECK(ps.patches[0].class_id == 0);
    CHECK(ps.patches[2].class_id == 1);
    CHECK(ps.patches[3].class_id == 2);
    CHECK(ps.find("ped2") != nullptr);
    CHECK(ps.find("ghost") == nullptr);
    CHECK(ps.of_class(1).size() == 2);
}

TEST_CASE("patchset save/load round-trips") {
    testutil::TempDir tmp("patch_rt");
    PatchSet ps;
    ps.patches.push_back({"background", 0, 0, 0, 4, 4});
    ps.patches.push_back({"target", 1, 4, 4, 2, 3});
    ps.class_names = {"background", "cloth"};
    save_patchset(ps, tmp.file("p.csv"));
    PatchSet back = load_patchset(tmp.file("p.csv"));
    REQUIRE(back.patches.size() == 2);
    CHECK(back.patches[1].label == "target");
    CHECK(back.patches[1].width == 2);
    CHECK(back.patches[1].height == 3);
    CHECK(back.class_names == ps.class_names);
}

TEST_CASE("malformed patch files are rejected") {
    testutil::TempDir tmp("patch_bad");
    auto p = tmp.file("p.csv");

    testutil::write_text(p, "label,class,x,y,w,h\n");
    CHECK_THROWS_AS(load_patchset(p), ValidationError);  // no records

    testutil::write_text(p, "label,klass,x,y,w,h\na,b,0,0,1,1\n");
    CHECK_THROWS_AS(load_patchset(p), ValidationError);  // wrong header

    testutil::write_text(p, "label,class,x,y,w,h\na,b,0,0,one,1\n");
    CHECK_THROWS_AS(load_patchset(p), ValidationError);  // non-integer geometry

    testutil::write_text(p, "label,class,x,y,w,h\na,b,0,0,0,1\n");
    CHECK_THROWS_AS(load_patchset(p), ValidationError);  // zero-size patch

    testutil::write_text(p, "label,class,x,y,w,h\na,b,0,0,1,1\na,b,2,2,1,1\n");
    CHECK_THROWS_AS(load_patchset(p), ValidationError);  // duplicate label
}
