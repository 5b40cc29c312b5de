#include "hsiband/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <nlohmann/json.hpp>

#include "hsiband/csv.hpp"
#include "hsiband/error.hpp"

namespace hsiband {

PatchStats patch_stats(const Eigen::MatrixXd& samples) {
    if (samples.cols() != 3) throw ValidationError("patch_stats: samples must be n x 3");
    if (samples.rows() < 2) throw ValidationError("patch_stats: need at least 2 samples");
    PatchStats st;
    st.n = static_cast<int>(samples.rows());
    st.mean = samples.colwise().mean();
    Eigen::MatrixXd centered = samples.rowwise() - st.mean.transpose();
    st.covariance = (centered.transpose() * centered) / static_cast<double>(st.n - 1);
    return st;
}

double euclidean_d2(const Eigen::Vector3d& mu_a, const Eigen::Vector3d& mu_b) {
    return (mu_a - mu_b).norm();
}

double sam_angle(const Eigen::Vector3d& mu_a, const Eigen::Vector3d& mu_b) {
    const double na = mu_a.norm(), nb = mu_b.norm();
    if (na < 1e-12 || nb < 1e-12)
        throw ValidationError("sam_angle: zero-magnitude mean vector");
    const double c = std::clamp(mu_a.dot(mu_b) / (na * nb), -1.0, 1.0);
    return std::acos(c);
}

std::pair<double, double> hotelling_t2(const PatchStats& a, const PatchStats& b) {
    if (a.n < 2 || b.n < 2) throw ValidationError("hotelling_t2: each group needs >= 2 samples");
    const int n = a.n + b.n;

    Eigen::Matrix3d pooled = (static_cast<double>(a.n - 1) * a.covariance +
                              static_cast<double>(b.n - 1) * b.covariance) /
                             static_cast<double>(n - 2);
    const Eigen::Vector3d delta = a.mean - b.mean;

    // Effective dimension: rank of the pooled covariance. Full-rank data uses
    // the textbook d=3 transform; degenerate data is treated at its true
    // dimensionality instead of wasting degrees of freedom on empty axes.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(pooled);
    const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
    int d_eff = 0;
    for (int i = 0; i < 3; ++i)
        if (es.eigenvalues()(i) > lmax * 1e-9 && es.eigenvalues()(i) > 0.0) ++d_eff;

    double t2;
    if (d_eff == 0) {
        if (delta.norm() < 1e-12) return {0.0, 1.0};
        // Two distinct constant groups: no spread to scale by; floor it.
        t2 = static_cast<double>(a.n) * b.n / n * delta.squaredNorm() / 1e-12;
        d_eff = 1;
    } else {
        const double eps = 1e-9 * pooled.trace() / 3.0;
        Eigen::Matrix3d reg = pooled + eps * Eigen::Matrix3d::Identity();
        t2 = static_cast<double>(a.n) * b.n / n * delta.dot(reg.ldlt().solve(delta));
        t2 = std::max(t2, 0.0);
    }

    const int df2 = n - d_eff - 1;
    if (df2 < 1)
        throw ValidationError("hotelling_t2: too few samples for dimension " +
                              std::to_string(d_eff));
    const double f = t2 * static_cast<double>(df2) /
                     (static_cast<double>(d_eff) * static_cast<double>(n - 2));
    if (!std::isfinite(t2) || !std::isfinite(f)) throw Error("hotelling_t2: non-finite result");

    boost::math::fisher_f dist(static_cast<double>(d_eff), static_cast<double>(df2));
    double p = boost::math::cdf(boost::math::complement(dist, f));
    p = std::clamp(p, std::numeric_limits<double>::min(), 1.0);
    return {t2, p};
}

namespace {

double srgb_linearize(double c8) {
    const double c = c8 / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double d = 6.0 / 29.0;
    return t > d * d * d ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
}

}  // namespace

LabColor srgb_to_lab(double r, double g, double b) {
    const double rl = srgb_linearize(r);
    const double gl = srgb_linearize(g);
    const double bl = srgb_linearize(b);

    // D65 matrix; the white point is taken as the exact row sums so that
    // (255,255,255) lands on L=100, a=b=0 identically.
    const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
    constexpr double xn = 0.4124564 + 0.3575761 + 0.1804375;
    constexpr double yn = 0.2126729 + 0.7151522 + 0.0721750;
    constexpr double zn = 0.0193339 + 0.1191920 + 0.9503041;

    const double fx = lab_f(x / xn), fy = lab_f(y / yn), fz = lab_f(z / zn);
    LabColor lab;
    lab.L = 116.0 * fy - 16.0;
    lab.a = 500.0 * (fx - fy);
    lab.b = 200.0 * (fy - fz);
    return lab;
}

double delta_e(const LabColor& a, const LabColor& b) {
    const double dl = a.L - b.L, da = a.a - b.a, db = a.b - b.b;
    return std::sqrt(dl * dl + da * da + db * db);
}

namespace {

Eigen::MatrixXd patch_pixels(const Rgb8Image& image, const LabeledPatch& p) {
    if (!p.inside(image.height, image.width))
        throw ValidationError("evaluate_pairs: patch '" + p.label + "' outside image extent");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(p.area()), 3);
    Eigen::Index row = 0;
    for (int y = p.y; y < p.y + p.height; ++y)
        for (int x = p.x; x < p.x + p.width; ++x, ++row)
            for (int ch = 0; ch < 3; ++ch)
                out(row, ch) = image.pixels[image.index(x, y) + static_cast<size_t>(ch)];
    return out;
}

}  // namespace

std::vector<PairMetricRecord> evaluate_pairs(const Rgb8Image& image, const PatchSet& patches,
                                             const std::string& background_label,
                                             const std::string& modality) {
    patches.validate();
    const LabeledPatch* bg = patches.find(background_label);
    if (!bg)
        throw ValidationError("evaluate_pairs: background patch '" + background_label +
                              "' not found");
    const PatchStats bg_stats = patch_stats(patch_pixels(image, *bg));
    const LabColor bg_lab = srgb_to_lab(bg_stats.mean(0), bg_stats.mean(1), bg_stats.mean(2));

    std::vector<PairMetricRecord> out;
    for (const auto& p : patches.patches) {
        if (p.label == background_label) continue;
        const PatchStats fg = patch_stats(patch_pixels(image, p));
        PairMetricRecord rec;
        rec.pair_id = p.label;
        rec.modality = modality;
        rec.d2 = euclidean_d2(fg.mean, bg_stats.mean);
        rec.sam_rad = (fg.mean.norm() < 1e-12 || bg_stats.mean.norm() < 1e-12)
                          ? 0.0
                          : sam_angle(fg.mean, bg_stats.mean);
        std::tie(rec.t2, rec.p_value) = hotelling_t2(fg, bg_stats);
        rec.delta_e = delta_e(srgb_to_lab(fg.mean(0), fg.mean(1), fg.mean(2)), bg_lab);
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

std::array<double, 4> metric_values(const PairMetricRecord& r) {
    return {r.d2, r.sam_rad, r.t2, r.delta_e};
}

}  // namespace

MetricReport aggregate_report(const std::vector<PairMetricRecord>& records_rgb,
                              const std::vector<PairMetricRecord>& records_composite) {
    if (records_rgb.size() != records_composite.size() || records_rgb.empty())
        throw ValidationError("aggregate_report: record lists differ in size or are empty");
    for (size_t i = 0; i < records_rgb.size(); ++i)
        if (records_rgb[i].pair_id != records_composite[i].pair_id)
            throw ValidationError("aggregate_report: pair-id mismatch at row " +
                                  std::to_string(i) + " ('" + records_rgb[i].pair_id +
                                  "' vs '" + records_composite[i].pair_id + "')");

    MetricReport rep;
    rep.rgb = records_rgb;
    rep.composite = records_composite;
    const double inv_n = 1.0 / static_cast<double>(records_rgb.size());
    for (size_t i = 0; i < records_rgb.size(); ++i) {
        const auto vr = metric_values(records_rgb[i]);
        const auto vc = metric_values(records_composite[i]);
        std::array<bool, 4> wins{};
        for (int m = 0; m < 4; ++m) {
            rep.avg_rgb[static_cast<size_t>(m)] += vr[static_cast<size_t>(m)] * inv_n;
            rep.avg_composite[static_cast<size_t>(m)] += vc[static_cast<size_t>(m)] * inv_n;
            wins[static_cast<size_t>(m)] =
                vc[static_cast<size_t>(m)] > vr[static_cast<size_t>(m)];
        }
        rep.composite_wins.push_back(wins);
    }
    for (int m = 0; m < 4; ++m) {
        const double r = rep.avg_rgb[static_cast<size_t>(m)];
        const double c = rep.avg_composite[static_cast<size_t>(m)];
        rep.improvement_pct[static_cast<size_t>(m)] = r != 0.0 ? 100.0 * (c - r) / r : 0.0;
    }
    return rep;
}

void write_report_csv(const MetricReport& report, std::ostream& out) {
    out << "pair,d2_rgb,d2_hsi,sam_rgb,sam_hsi,t2_rgb,t2_hsi,de_rgb,de_hsi\n";
    for (size_t i = 0; i < report.rgb.size(); ++i) {
        const auto vr = metric_values(report.rgb[i]);
        const auto vc = metric_values(report.composite[i]);
        out << report.rgb[i].pair_id;
        for (int m = 0; m < 4; ++m)
            out << ',' << format_double(vr[static_cast<size_t>(m)]) << ','
                << format_double(vc[static_cast<size_t>(m)]);
        out << '\n';
    }
    out << "average";
    for (int m = 0; m < 4; ++m)
        out << ',' << format_double(report.avg_rgb[static_cast<size_t>(m)]) << ','
            << format_double(report.avg_composite[static_cast<size_t>(m)]);
    out << '\n';
    out << "improvement_pct";
    for (int m = 0; m < 4; ++m)
        out << ",," << format_double(report.improvement_pct[static_cast<size_t>(m)]);
    out << '\n';
}

void write_report_json(const MetricReport& report, std::ostream& out) {
    nlohmann::ordered_json doc;
    auto records = [](const std::vector<PairMetricRecord>& rs) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : rs)
            arr.push_back({{"pair", r.pair_id},
                           {"d2", r.d2},
                           {"sam_rad", r.sam_rad},
                           {"t2", r.t2},
                           {"p_value", r.p_value},
                           {"delta_e", r.delta_e},
                           {"modality", r.modality}});
        return arr;
    };
    doc["records_rgb"] = records(report.rgb);
    doc["records_composite"] = records(report.composite);
    for (int m = 0; m < 4; ++m) {
        const auto name = kMetricNames[static_cast<size_t>(m)];
        doc["averages"]["rgb"][name] = report.avg_rgb[static_cast<size_t>(m)];
        doc["averages"]["composite"][name] = report.avg_composite[static_cast<size_t>(m)];
        doc["improvement_pct"][name] = report.improvement_pct[static_cast<size_t>(m)];
    }
    doc["composite_wins"] = nlohmann::ordered_json::array();
    for (const auto& w : report.composite_wins)
        doc["composite_wins"].push_back({{"d2", w[0]}, {"sam", w[1]}, {"t2", w[2]}, {"de", w[3]}});
    out << doc.dump(2) << '\n';
}

std::pair<std::vector<PairMetricRecord>, std::vector<PairMetricRecord>> read_records_csv(
    std::istream& in) {
    auto rows = read_rows(in);
    if (rows.empty()) throw ValidationError("records csv: empty file");
    const std::vector<std::string> want = {"pair",   "d2_rgb",  "d2_hsi", "sam_rgb", "sam_hsi",
                                           "t2_rgb", "t2_hsi", "de_rgb", "de_hsi"};
    if (rows[0] != want)
        throw ValidationError("records csv: unexpected header (want pair,d2_rgb,...,de_hsi)");

    std::vector<PairMetricRecord> rgb, composite;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.empty()) continue;
        if (r[0] == "average" || r[0] == "improvement_pct") continue;
        if (r.size() != 9)
            throw ValidationError("records csv: row " + std::to_string(i + 1) +
                                  " has " + std::to_string(r.size()) + " fields, want 9");
        auto num = [&](size_t col) {
            try {
                size_t pos = 0;
                double v = std::stod(r[col], &pos);
                if (pos != r[col].size()) throw std::invalid_argument("trailing");
                return v;
            } catch (const std::exception&) {
                throw ValidationError("records csv: bad number '" + r[col] + "' in row " +
                                      std::to_string(i + 1));
            }
        };
        PairMetricRecord a, b;
        a.pair_id = b.pair_id = r[0];
        a.modality = "RGB";
        b.modality = "composite";
        a.d2 = num(1);
        b.d2 = num(2);
        a.sam_rad = num(3);
        b.sam_rad = num(4);
        a.t2 = num(5);
        b.t2 = num(6);
        a.delta_e = num(7);
        b.delta_e = num(8);
        rgb.push_back(std::move(a));
        composite.push_back(std::move(b));
    }
    if (rgb.empty()) throw ValidationError("records csv: no data rows");
    return {std::move(rgb), std::move(composite)};
}

}  // namespace hsiband
