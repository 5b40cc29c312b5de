#include "hsiband/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hsiband/csv.hpp"
#include "hsiband/error.hpp"

namespace hsiband {

void DiscretizedBand::validate() const {
    if (bin_count < 2) throw ValidationError("discretized band: bin_count must be >= 2");
    for (int b : bins)
        if (b < 0 || b >= bin_count)
            throw ValidationError("discretized band: bin index out of range");
}

void ClassVector::validate() const {
    if (n_classes < 1) throw ValidationError("class vector: n_classes must be >= 1");
    for (int l : labels)
        if (l < 0 || l >= n_classes) throw ValidationError("class vector: label out of range");
}

DiscretizedBand quantize_band(const std::vector<double>& values, int bin_count) {
    if (values.empty()) throw ValidationError("quantize_band: empty input");
    if (bin_count < 2) throw ValidationError("quantize_band: bin_count must be >= 2");
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("quantize_band: non-finite value");

    const size_t n = values.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });

    DiscretizedBand out;
    out.bin_count = bin_count;
    out.bins.resize(n);
    // Equal values share the bin of the first rank in their run, so the map
    // from value to bin is well-defined.
    size_t run_start = 0;
    for (size_t r = 0; r < n; ++r) {
        if (r > 0 && values[idx[r]] != values[idx[r - 1]]) run_start = r;
        out.bins[idx[r]] =
            static_cast<int>(run_start * static_cast<size_t>(bin_count) / n);
    }
    return out;
}

namespace {

// Plug-in MI between a generic discrete variable (x_states states, given per
// sample by `xs`) and the class labels.
double plugin_mi(const std::vector<int>& xs, size_t x_states, const ClassVector& c) {
    const size_t n = xs.size();
    if (n == 0) throw ValidationError("mutual information: empty input");
    const size_t nc = static_cast<size_t>(c.n_classes);
    std::vector<double> joint(x_states * nc, 0.0);
    std::vector<double> px(x_states, 0.0), pc(nc, 0.0);
    for (size_t i = 0; i < n; ++i) {
        joint[static_cast<size_t>(xs[i]) * nc + static_cast<size_t>(c.labels[i])] += 1.0;
        px[static_cast<size_t>(xs[i])] += 1.0;
        pc[static_cast<size_t>(c.labels[i])] += 1.0;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    double mi = 0.0;
    for (size_t x = 0; x < x_states; ++x) {
        if (px[x] == 0.0) continue;
        for (size_t cc = 0; cc < nc; ++cc) {
            const double j = joint[x * nc + cc];
            if (j == 0.0) continue;
            mi += j * inv_n * std::log(j * static_cast<double>(n) / (px[x] * pc[cc]));
        }
    }
    return std::max(mi, 0.0);
}

}  // namespace

double mutual_information(const DiscretizedBand& x, const ClassVector& c) {
    x.validate();
    c.validate();
    if (x.bins.size() != c.labels.size())
        throw ValidationError("mutual information: length mismatch");
    return plugin_mi(x.bins, static_cast<size_t>(x.bin_count), c);
}

double joint_pair_mi(const DiscretizedBand& x, const DiscretizedBand& y, const ClassVector& c,
                     std::size_t max_joint_states) {
    x.validate();
    y.validate();
    c.validate();
    if (x.bins.size() != y.bins.size() || x.bins.size() != c.labels.size())
        throw ValidationError("joint_pair_mi: length mismatch");
    const size_t states =
        static_cast<size_t>(x.bin_count) * static_cast<size_t>(y.bin_count);
    if (states > max_joint_states)
        throw ValidationError("joint_pair_mi: joint-state count " + std::to_string(states) +
                              " exceeds cap " + std::to_string(max_joint_states));
    std::vector<int> joint(x.bins.size());
    for (size_t i = 0; i < joint.size(); ++i)
        joint[i] = x.bins[i] * y.bin_count + y.bins[i];
    return plugin_mi(joint, states, c);
}

void BandScoreTable::write_csv(std::ostream& out, const WavelengthAxis& axis) const {
    out << "channel,wavelength_nm,relevance_mi,jmim_rank\n";
    for (const auto& s : scores) {
        out << s.channel << ',' << format_double(axis.wavelengths_nm.at(s.channel)) << ','
            << format_double(s.relevance_mi) << ',';
        if (s.jmim_rank) out << *s.jmim_rank;
        out << '\n';
    }
}

JmimResult jmim_rank(const std::vector<DiscretizedBand>& bands, const ClassVector& c, int k) {
    if (bands.empty()) throw ValidationError("jmim_rank: no bands");
    if (k < 1 || k > static_cast<int>(bands.size()))
        throw ValidationError("jmim_rank: k out of range");
    c.validate();
    if (c.n_classes < 2) throw ValidationError("jmim_rank: need at least two classes");

    const int n = static_cast<int>(bands.size());
    JmimResult res;
    res.table.scores.resize(n);
    for (int i = 0; i < n; ++i) {
        res.table.scores[i].channel = i;
        res.table.scores[i].relevance_mi = mutual_information(bands[i], c);
    }

    std::vector<bool> taken(n, false);
    for (int pick = 0; pick < k; ++pick) {
        int best = -1;
        double best_score = -1.0;
        bool tie = false;
        for (int i = 0; i < n; ++i) {
            if (taken[i]) continue;
            double score;
            if (pick == 0) {
                score = res.table.scores[i].relevance_mi;
            } else {
                score = std::numeric_limits<double>::infinity();
                for (int s : res.order)
                    score = std::min(score, joint_pair_mi(bands[i], bands[s], c));
            }
            if (best < 0 || score > best_score) {
                best = i;
                best_score = score;
                tie = false;
            } else if (score == best_score) {
                tie = true;  // earlier index already held; log the break
            }
        }
        taken[best] = true;
        res.order.push_back(best);
        res.pick_scores.push_back(best_score);
        res.table.scores[best].jmim_rank = pick;
        std::ostringstream line;
        line << "pick " << pick << ": channel " << best << " score "
             << format_double(best_score)
             << (pick == 0 ? " (marginal)" : " (min joint)");
        if (tie) line << " [tie broken by lowest channel]";
        res.log.push_back(line.str());
    }
    return res;
}

}  // namespace hsiband
