#ifndef HSIBAND_EVALMETRICS_HPP
#define HSIBAND_EVALMETRICS_HPP

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hsiband/cube.hpp"
#include "hsiband/png_io.hpp"

// Patch-pair separability metrics on 3-channel images: Euclidean distance
// and spectral angle between patch means, a two-sample Hotelling T² with an
// exact F-based p-value, and CIE76 ΔE between patch-mean colors. Aggregation
// mirrors the usual report layout (per-pair rows, averages, improvement %).

namespace hsiband {

struct PatchStats {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
    int n = 0;
};

struct LabColor {
    double L = 0.0, a = 0.0, b = 0.0;
};

struct PairMetricRecord {
    std::string pair_id;     // foreground patch label
    double d2 = 0.0;         // Euclidean distance of the mean vectors
    double sam_rad = 0.0;    // spectral angle, radians (0 when a mean vanishes)
    double t2 = 0.0;         // Hotelling T²
    double p_value = 1.0;
    double delta_e = 0.0;    // CIE76 on patch-mean colors
    std::string modality;    // "RGB" | "composite"
};

enum Metric : int { kD2 = 0, kSam = 1, kT2 = 2, kDeltaE = 3 };
inline constexpr std::array<const char*, 4> kMetricNames{"d2", "sam", "t2", "de"};

struct MetricReport {
    std::vector<PairMetricRecord> rgb;
    std::vector<PairMetricRecord> composite;
    std::array<double, 4> avg_rgb{};
    std::array<double, 4> avg_composite{};
    std::array<double, 4> improvement_pct{};          // from unrounded averages
    std::vector<std::array<bool, 4>> composite_wins;  // per pair, per metric
};

/// Mean and sample covariance (n−1) of an n×3 sample matrix.
PatchStats patch_stats(const Eigen::MatrixXd& samples);

double euclidean_d2(const Eigen::Vector3d& mu_a, const Eigen::Vector3d& mu_b);

/// Angle between the mean vectors; invariant to positive scaling. Throws on
/// zero-magnitude input.
double sam_angle(const Eigen::Vector3d& mu_a, const Eigen::Vector3d& mu_b);

/// Two-sample T² with pooled (n−2 divisor) covariance, regularized by
/// (1e−9·trace/3)·I. The p-value uses the exact F transform with the
/// pooled covariance's numerical rank as the effective dimension, so
/// degenerate (lower-dimensional) data still gets a calibrated p.
std::pair<double, double> hotelling_t2(const PatchStats& a, const PatchStats& b);

/// Components in [0,255] (fractional values allowed — patch means).
/// Standard sRGB decoding → XYZ (D65) → CIELAB.
LabColor srgb_to_lab(double r, double g, double b);

/// CIE76.
double delta_e(const LabColor& a, const LabColor& b);

/// One record per foreground patch (every patch whose label differs from
/// background_label) against the designated background patch.
std::vector<PairMetricRecord> evaluate_pairs(const Rgb8Image& image, const PatchSet& patches,
                                             const std::string& background_label,
                                             const std::string& modality);

/// Per-metric averages for both modalities, improvement percentages from the
/// unrounded averages, per-pair winner flags. Pair ids must match pairwise.
MetricReport aggregate_report(const std::vector<PairMetricRecord>& records_rgb,
                              const std::vector<PairMetricRecord>& records_composite);

/// CSV layout `pair,d2_rgb,d2_hsi,sam_rgb,sam_hsi,t2_rgb,t2_hsi,de_rgb,de_hsi`
/// plus `average` and `improvement_pct` rows.
void write_report_csv(const MetricReport& report, std::ostream& out);

void write_report_json(const MetricReport& report, std::ostream& out);

/// Reads the per-pair rows of the same CSV layout back into (rgb, composite)
/// record lists; `average`/`improvement_pct` rows, if present, are ignored.
std::pair<std::vector<PairMetricRecord>, std::vector<PairMetricRecord>> read_records_csv(
    std::istream& in);

}  // namespace hsiband

#endif
