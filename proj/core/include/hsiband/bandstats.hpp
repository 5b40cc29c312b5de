#ifndef HSIBAND_BANDSTATS_HPP
#define HSIBAND_BANDSTATS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hsiband/cube.hpp"

// Inter-band correlation structure and contrast-to-noise scoring of material
// pairs. Contrast-to-noise (CSNR) of a pair under repeated sub-sampling is
// mean contrast over contrast spread; bands that keep a pair reliably apart
// score high.

namespace hsiband {

/// Spread below this is treated as zero (dead band / exact-tie guards).
inline constexpr double kSpreadEps = 1e-12;
/// CSNR value reported when contrasts are consistent but have no spread.
inline constexpr double kCsnrCap = 1e6;

struct CorrelationMatrix {
    Eigen::MatrixXd values;              // n_bands × n_bands
    std::vector<int> zero_variance_bands;  // flagged, their rows forced to 0/1

    int n_bands() const { return static_cast<int>(values.rows()); }
    void validate() const;  // symmetry, unit diagonal, [−1,1]
    /// Max |corr| of `channel` against a set of others (diagonal skipped).
    double max_abs_against(int channel, const std::vector<int>& others) const;
    void write_csv(std::ostream& out) const;
};

struct ContrastSampleSet {
    std::pair<std::string, std::string> pair_id;  // foreground label, background label
    std::vector<double> contrasts;                // one per draw, each in [−1,1]
};

struct CsnrTable {
    Eigen::MatrixXd values;  // n_bands × n_pairs
    std::vector<std::pair<std::string, std::string>> pairs;

    int n_bands() const { return static_cast<int>(values.rows()); }
    int n_pairs() const { return static_cast<int>(values.cols()); }
    void write_csv(std::ostream& out) const;
};

struct CsnrProfile {
    std::vector<double> p_hi;  // per channel, fraction of pairs at/above tau
    double tau = 0.0;

    void write_csv(std::ostream& out, const WavelengthAxis& axis) const;
};

/// Pearson correlation over per-pixel samples (rows = pixels, cols = bands),
/// sample covariance with n−1. A band with (near-)zero variance is flagged
/// and reported as 0 against everything else, 1 against itself.
CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& samples);

/// Signed Michelson contrast (fg − bg)/(fg + bg); 0 when the denominator
/// vanishes.
double michelson_contrast(double mean_fg, double mean_bg);

/// |mean| / sample sd of the contrasts. Zero spread yields the cap sentinel,
/// unless the mean is also zero (identical materials) — then 0.
double csnr(const ContrastSampleSet& contrasts);

/// CSNR of every band against every (foreground patch, background class)
/// pair. Each of `draws` sub-samples takes a random half of the foreground
/// patch's pixels and of the pooled background pixels; the same pixel subset
/// is reused across bands so the table is internally consistent. Seeded and
/// reproducible.
CsnrTable csnr_table(const SpectralCube& cube, const PatchSet& patches, int draws,
                     std::uint64_t seed, int background_class = 0);

/// tau = the given global percentile of all table entries; p_hi(band) is the
/// fraction of that band's pairs scoring at least tau.
CsnrProfile csnr_high_probability(const CsnrTable& table, double pct);

}  // namespace hsiband

#endif
