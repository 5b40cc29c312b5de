#ifndef HSIBAND_SELECTOR_HPP
#define HSIBAND_SELECTOR_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsiband/bandstats.hpp"
#include "hsiband/cube.hpp"
#include "hsiband/infotheory.hpp"

// Final band selection: pool high-potential channels from three independent
// signals (joint-MI ranking, high-CSNR probability, low correlation), then
// greedily pick a set that is informative, reliable, and decorrelated, and
// finally swap out spectrally adjacent correlated picks. Every accept /
// reject / replace is logged so the selection is auditable.

namespace hsiband {

struct SelectionConfig {
    int k_candidates = 5;
    int n_select = 3;
    double corr_threshold = 0.3;   // max tolerated pairwise |corr|
    double csnr_percentile = 75.0;
    int adjacency_window = 7;      // channels; closer than this counts as adjacent
    int search_radius = 10;        // replacement scan width, channels

    void validate(int n_bands) const;
};

struct DecisionRecord {
    int channel = -1;    // -1 for stage-level events
    std::string action;  // considered|accepted|rejected|replaced|relaxed|stable|warning|ranked
    std::string reason;
    std::vector<std::pair<std::string, double>> metrics;
};

struct Candidate {
    int channel = 0;
    double relevance_mi = 0.0;
    std::optional<int> jmim_rank;
    double p_hi = 0.0;
    double max_abs_corr = 0.0;  // vs the other pool members
    bool from_jmim = false, from_csnr = false, from_lowcorr = false;
};

struct SelectionResult {
    std::vector<int> channels;           // canonical form: sorted ascending
    std::vector<double> wavelengths_nm;  // matched to channels
    std::vector<DecisionRecord> log;
};

/// Union of (a) the top k_candidates by JMIM, (b) channels whose p_hi meets
/// the percentile cut (csnr_percentile/100), (c) channels whose max |corr|
/// against the (a)∪(b) members stays within corr_threshold. Sorted by
/// channel.
std::vector<Candidate> candidate_pool(const BandScoreTable& scores,
                                      const CorrelationMatrix& corr,
                                      const CsnrProfile& profile,
                                      const SelectionConfig& cfg);

struct ProvisionalSelection {
    std::vector<int> channels;  // accept order
    std::vector<DecisionRecord> log;
    int relaxations = 0;
    double effective_corr_threshold = 0.0;  // after any ladder steps
};

/// Greedy pass over the pool in descending relevance: accept a channel iff
/// |corr| vs every accepted channel ≤ corr_threshold and p_hi is at least
/// the pool median. If the pool runs out early the criteria are relaxed in a
/// fixed, logged order: drop the p_hi clause, then raise the correlation
/// threshold in +0.1 steps.
ProvisionalSelection informed_select(const std::vector<Candidate>& pool,
                                     const CorrelationMatrix& corr,
                                     const SelectionConfig& cfg);

/// Resolve spectrally adjacent, correlated picks: keep the higher-relevance
/// member, replace the other with the best qualifying pool member within
/// search_radius of the kept channel (lowest max-|corr| vs the remaining
/// set, then highest p_hi, then lowest channel). Never fails: if no
/// replacement qualifies the provisional set is returned with a warning in
/// the log. Wavelengths are left empty; select_bands fills them.
SelectionResult diversity_refine(const std::vector<int>& provisional,
                                 const CorrelationMatrix& corr,
                                 const std::vector<Candidate>& pool,
                                 const SelectionConfig& cfg);

struct SelectOptions {
    int bins = 32;
    int draws = 50;
    std::uint64_t seed = 42;
    int background_class = 0;  // class id treated as background for CSNR pairs
};

struct SelectionOutcome {
    SelectionResult result;
    BandScoreTable scores;
    CorrelationMatrix corr;
    CsnrTable csnr;
    CsnrProfile profile;
};

/// Full pipeline over a labeled cube: quantize the labeled pixels, rank by
/// joint MI, measure correlation and CSNR, pool candidates, select, refine.
/// Deterministic for a fixed seed and config.
SelectionOutcome select_bands(const SpectralCube& cube, const PatchSet& patches,
                              const SelectionConfig& cfg, const SelectOptions& opts = {});

/// Serialized form: {channels, wavelengths_nm, config, log}.
void write_selection_json(const SelectionResult& result, const SelectionConfig& cfg,
                          const SelectOptions& opts, std::ostream& out);

/// Reads back at least the channels/wavelengths of a selection document.
SelectionResult read_selection_json(std::istream& in);

}  // namespace hsiband

#endif
