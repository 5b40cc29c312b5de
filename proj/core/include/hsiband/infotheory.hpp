#ifndef HSIBAND_INFOTHEORY_HPP
#define HSIBAND_INFOTHEORY_HPP

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "hsiband/cube.hpp"

// Discrete plug-in information estimates over quantile-binned band data,
// and the greedy joint-MI band ranking built on top of them. All scores are
// in nats.

namespace hsiband {

struct DiscretizedBand {
    std::vector<int> bins;  // one bin index per sample, each in [0, bin_count)
    int bin_count = 0;

    void validate() const;
};

struct ClassVector {
    std::vector<int> labels;  // aligned with the sample pixels
    int n_classes = 0;

    void validate() const;
};

struct BandScore {
    int channel = 0;
    double relevance_mi = 0.0;            // I(band; C)
    std::optional<int> jmim_rank;         // 0-based pick order, if selected
};

struct BandScoreTable {
    std::vector<BandScore> scores;  // one per channel, channel-ordered

    /// CSV with header `channel,wavelength_nm,relevance_mi,jmim_rank`;
    /// jmim_rank is empty for unselected channels.
    void write_csv(std::ostream& out, const WavelengthAxis& axis) const;
};

/// Equal-frequency (quantile) binning of values in [0, 1]. A sample whose
/// sorted rank is r lands in bin floor(r·B/n); equal values all take the bin
/// of their lowest rank, so a constant input collapses into bin 0.
DiscretizedBand quantize_band(const std::vector<double>& values, int bin_count);

/// Plug-in I(X; C) over the joint histogram, clamped up to 0 against
/// round-off.
double mutual_information(const DiscretizedBand& x, const ClassVector& c);

/// I((X,Y); C) over the product alphabet. `max_joint_states` bounds
/// B_x·B_y to keep the histogram dense and honest at small n.
double joint_pair_mi(const DiscretizedBand& x, const DiscretizedBand& y, const ClassVector& c,
                     std::size_t max_joint_states = 1u << 16);

struct JmimResult {
    std::vector<int> order;           // selected channels, pick order
    std::vector<double> pick_scores;  // pick 0: marginal MI; later picks: min joint MI
    BandScoreTable table;
    std::vector<std::string> log;     // one line per pick, tie-breaks noted
};

/// Greedy selection: the first pick maximizes I(f;C); every later pick
/// maximizes the minimum I((f, s); C) over the already-selected set. Ties go
/// to the lowest channel index.
JmimResult jmim_rank(const std::vector<DiscretizedBand>& bands, const ClassVector& c, int k);

}  // namespace hsiband

#endif
