#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "hsiband/error.hpp"
#include "hsiband/evalmetrics.hpp"
#include "test_util.hpp"

using namespace hsiband;
using testutil::kDataDir;

TEST_CASE("patch_stats: hand-worked mean and covariance") {
    Eigen::MatrixXd s(2, 3);
    s << 1, 2, 3, 3, 2, 1;
    PatchStats st = patch_stats(s);
    CHECK(st.n == 2);
    CHECK(st.mean.isApprox(Eigen::Vector3d(2, 2, 2)));
    Eigen::Matrix3d expect;
    expect << 2, 0, -2, 0, 0, 0, -2, 0, 2;
    CHECK((st.covariance - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("euclidean distance: 3-4-5 and the RMS identity") {
    CHECK(euclidean_d2({0, 0, 0}, {3, 4, 0}) == doctest::Approx(5.0));
    // distance between means = sqrt(3) * RMS of the per-channel deltas
    Eigen::Vector3d a(0.2, 0.4, 0.9), b(0.7, 0.1, 0.5);
    double rms = std::sqrt(((a - b).array().square().sum()) / 3.0);
    CHECK(euclidean_d2(a, b) == doctest::Approx(std::sqrt(3.0) * rms).epsilon(1e-12));
}

TEST_CASE("spectral angle: known angles, scale invariance, zero rejection") {
    CHECK(sam_angle({1, 0, 0}, {1, 1, 0}) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
    CHECK(sam_angle({1, 0, 0}, {0, 1, 0}) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    CHECK(sam_angle({1, 2, 3}, {2, 4, 6}) == doctest::Approx(0.0).epsilon(1e-9));
    // both are zero up to acos conditioning near cos = 1
    CHECK(std::abs(sam_angle({1, 2, 3}, {10, 20, 30}) - sam_angle({0.1, 0.2, 0.3}, {1, 2, 3})) <
          1e-7);
    CHECK_THROWS_AS(sam_angle({0, 0, 0}, {1, 0, 0}), ValidationError);
}

namespace {

PatchStats stats_of(const Eigen::MatrixXd& m) { return patch_stats(m); }

Eigen::MatrixXd gaussian_cloud(int n, const Eigen::Vector3d& mu, double sigma, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, sigma);
    Eigen::MatrixXd m(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = mu[j] + nd(gen);
    return m;
}

}  // namespace

TEST_CASE("hotelling: identical constant groups give T2 = 0, p = 1") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(6, 3, 0.5);
    auto [t2, p] = hotelling_t2(stats_of(a), stats_of(a));
    CHECK(t2 == 0.0);
    CHECK(p == 1.0);
}

TEST_CASE("hotelling: a 5-sigma separation at n=100 is decisive") {
    Eigen::MatrixXd a = gaussian_cloud(100, {0, 0, 0}, 1.0, 11);
    Eigen::MatrixXd b = gaussian_cloud(100, {5, 5, 5}, 1.0, 12);
    auto [t2, p] = hotelling_t2(stats_of(a), stats_of(b));
    CHECK(t2 > 100.0);
    CHECK(p < 1e-3);
}

TEST_CASE("hotelling: rank-deficient data falls back to the effective dimension") {
    // Both groups live on a single coordinate; with m = 1/(2*sqrt(2)) the
    // one-dimensional statistic is exactly 1/4 and the F(1,2) tail is 2/3.
    const double m = 1.0 / (2.0 * std::sqrt(2.0));
    Eigen::MatrixXd a(2, 3), b(2, 3);
    a << 0, 7, 7, 1, 7, 7;
    b << m, 7, 7, m + 1, 7, 7;
    auto [t2, p] = hotelling_t2(stats_of(a), stats_of(b));
    CHECK(t2 == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(p == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("hotelling is invariant to affine changes of basis") {
    Eigen::MatrixXd a = gaussian_cloud(40, {0.1, 0.2, 0.3}, 0.5, 3);
    Eigen::MatrixXd b = gaussian_cloud(40, {0.4, 0.1, 0.6}, 0.5, 4);
    auto [t2, p] = hotelling_t2(stats_of(a), stats_of(b));

    Eigen::Matrix3d A;
    A << 2, 1, 0, 0, 3, 1, 1, 0, 2;  // invertible
    Eigen::Vector3d shift(5, -2, 1);
    Eigen::MatrixXd a2 = (a * A.transpose()).rowwise() + shift.transpose();
    Eigen::MatrixXd b2 = (b * A.transpose()).rowwise() + shift.transpose();
    auto [t2x, px] = hotelling_t2(stats_of(a2), stats_of(b2));
    CHECK(t2x == doctest::Approx(t2).epsilon(1e-6));
    CHECK(px == doctest::Approx(p).epsilon(1e-6));
}

TEST_CASE("sRGB to Lab hits the reference anchors") {
    LabColor white = srgb_to_lab(255, 255, 255);
    CHECK(white.L == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(std::abs(white.a) < 0.01);
    CHECK(std::abs(white.b) < 0.01);

    LabColor black = srgb_to_lab(0, 0, 0);
    CHECK(black.L == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(black.a) < 1e-9);
    CHECK(std::abs(black.b) < 1e-9);

    LabColor gray = srgb_to_lab(128, 128, 128);
    CHECK(gray.L == doctest::Approx(53.585).epsilon(0.0002));
    CHECK(std::abs(gray.a) < 1e-9);  // grays are exactly neutral by construction
    CHECK(std::abs(gray.b) < 1e-9);

    CHECK(delta_e(white, black) == doctest::Approx(100.0).epsilon(1e-4));
}

TEST_CASE("evaluate_pairs builds one record per foreground patch") {
    // 8x4 image: background block dark, two foreground blocks with distinct colors
    Rgb8Image img;
    img.width = 8;
    img.height = 4;
    img.pixels.assign(static_cast<size_t>(8) * 4 * 3, 10);
    auto paint = [&](int x0, int w, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        for (int y = 0; y < 4; ++y)
            for (int x = x0; x < x0 + w; ++x) {
                size_t i = img.index(x, y);
                img.pixels[i] = r;
                img.pixels[i + 1] = g;
                img.pixels[i + 2] = b;
            }
    };
    paint(3, 2, 200, 40, 40);
    paint(6, 2, 40, 200, 40);

    PatchSet ps;
    ps.class_names = {"background", "vru"};
    ps.patches.push_back({"background", 0, 0, 0, 3, 4});
    ps.patches.push_back({"clothA", 1, 3, 0, 2, 4});
    ps.patches.push_back({"clothB", 1, 6, 0, 2, 4});

    auto recs = evaluate_pairs(img, ps, "background", "RGB");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].pair_id == "clothA");
    CHECK(recs[1].pair_id == "clothB");
    CHECK(recs[0].modality == "RGB");
    // constant patches: the mean distance is the raw pixel distance
    double expect_d2 = std::sqrt(190.0 * 190.0 + 30.0 * 30.0 + 30.0 * 30.0);
    CHECK(recs[0].d2 == doctest::Approx(expect_d2).epsilon(1e-9));
    CHECK(recs[0].delta_e > 0.0);
    CHECK(recs[0].p_value >= 0.0);
    CHECK(recs[0].p_value <= 1.0);

    CHECK_THROWS_AS(evaluate_pairs(img, ps, "no-such-label", "RGB"), ValidationError);
}

TEST_CASE("aggregate_report reproduces the reference table") {
    std::ifstream in((kDataDir / "table2_vru.csv"));
    REQUIRE(in.good());
    auto [rgb, comp] = read_records_csv(in);
    REQUIRE(rgb.size() == 19);
    REQUIRE(comp.size() == 19);

    MetricReport rep = aggregate_report(rgb, comp);
    CHECK(rep.avg_rgb[kD2] == doctest::Approx(40.77).epsilon(1e-9));
    CHECK(rep.avg_composite[kD2] == doctest::Approx(69.40789473684211).epsilon(1e-9));
    CHECK(rep.avg_rgb[kSam] == doctest::Approx(0.06473684210526316).epsilon(1e-9));
    CHECK(rep.avg_composite[kSam] == doctest::Approx(0.4068421052631579).epsilon(1e-9));
    CHECK(rep.avg_rgb[kT2] == doctest::Approx(81.03631578947368).epsilon(1e-9));
    CHECK(rep.avg_composite[kT2] == doctest::Approx(1059.01).epsilon(1e-9));
    CHECK(rep.avg_rgb[kDeltaE] == doctest::Approx(12.37).epsilon(1e-9));
    CHECK(rep.avg_composite[kDeltaE] == doctest::Approx(42.87631578947368).epsilon(1e-9));

    CHECK(rep.improvement_pct[kD2] == doctest::Approx(70.2426).epsilon(1e-4));
    CHECK(rep.improvement_pct[kSam] == doctest::Approx(528.4553).epsilon(1e-4));
    CHECK(rep.improvement_pct[kT2] == doctest::Approx(1206.8338).epsilon(1e-4));
    CHECK(rep.improvement_pct[kDeltaE] == doctest::Approx(246.6153).epsilon(1e-4));

    // spot-check the winner flags: a-cloth2 loses on d2, wins on t2
    REQUIRE(rep.composite_wins.size() == 19);
    CHECK_FALSE(rep.composite_wins[1][kD2]);
    CHECK(rep.composite_wins[1][kT2]);
    CHECK(rep.composite_wins[0][kD2]);
}

TEST_CASE("identical record lists aggregate to zero improvement") {
    PairMetricRecord r;
    r.pair_id = "p";
    r.d2 = 3.0;
    r.sam_rad = 0.2;
    r.t2 = 9.0;
    r.p_value = 0.1;
    r.delta_e = 4.0;
    r.modality = "RGB";
    PairMetricRecord c = r;
    c.modality = "composite";
    MetricReport rep = aggregate_report({r}, {c});
    for (int m = 0; m < 4; ++m) CHECK(rep.improvement_pct[static_cast<size_t>(m)] == doctest::Approx(0.0));
}

TEST_CASE("aggregate_report rejects mismatched pair ids") {
    PairMetricRecord r;
    r.pair_id = "a";
    PairMetricRecord c;
    c.pair_id = "b";
    CHECK_THROWS_AS(aggregate_report({r}, {c}), ValidationError);
    CHECK_THROWS_AS(aggregate_report({r}, {}), ValidationError);
}

TEST_CASE("report CSV round-trips the per-pair records") {
    std::ifstream in((kDataDir / "table2_vru.csv"));
    auto [rgb, comp] = read_records_csv(in);
    MetricReport rep = aggregate_report(rgb, comp);

    std::ostringstream out;
    write_report_csv(rep, out);
    std::istringstream back(out.str());
    auto [rgb2, comp2] = read_records_csv(back);
    REQUIRE(rgb2.size() == rgb.size());
    for (size_t i = 0; i < rgb.size(); ++i) {
        CHECK(rgb2[i].pair_id == rgb[i].pair_id);
        CHECK(rgb2[i].d2 == doctest::Approx(rgb[i].d2).epsilon(1e-12));
        CHECK(comp2[i].t2 == doctest::Approx(comp[i].t2).epsilon(1e-12));
        CHECK(comp2[i].delta_e == doctest::Approx(comp[i].delta_e).epsilon(1e-12));
    }
    // the summary rows are present and labeled
    CHECK(out.str().find("average,") != std::string::npos);
    CHECK(out.str().find("improvement_pct,") != std::string::npos);
}

TEST_CASE("report JSON exposes the expected keys") {
    PairMetricRecord r;
    r.pair_id = "x";
    r.d2 = 1;
    r.modality = "RGB";
    PairMetricRecord c = r;
    c.modality = "composite";
    c.d2 = 2;
    MetricReport rep = aggregate_report({r}, {c});
    std::ostringstream out;
    write_report_json(rep, out);
    const std::string j = out.str();
    for (const char* key : {"\"records_rgb\"", "\"records_composite\"", "\"averages\"",
                            "\"improvement_pct\"", "\"composite_wins\"", "\"d2\"", "\"sam\"",
                            "\"t2\"", "\"de\"", "\"p_value\""})
        CHECK(j.find(key) != std::string::npos);
}
