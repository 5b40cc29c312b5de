#include "hsiband/bandstats.hpp"

#include <algorithm>
#include <cmath>

#include "hsiband/csv.hpp"
#include "hsiband/error.hpp"
#include "hsiband/rng.hpp"
#include "hsiband/stats.hpp"

namespace hsiband {

void CorrelationMatrix::validate() const {
    const int n = n_bands();
    if (n <= 0 || values.cols() != n) throw Error("correlation matrix: not square");
    for (int i = 0; i < n; ++i) {
        if (std::abs(values(i, i) - 1.0) > 1e-12)
            throw Error("correlation matrix: diagonal drift");
        for (int j = 0; j < n; ++j) {
            if (std::abs(values(i, j) - values(j, i)) > 1e-12)
                throw Error("correlation matrix: asymmetry");
            if (values(i, j) < -1.0 || values(i, j) > 1.0)
                throw Error("correlation matrix: entry outside [-1,1]");
        }
    }
}

double CorrelationMatrix::max_abs_against(int channel, const std::vector<int>& others) const {
    double m = 0.0;
    for (int o : others) {
        if (o == channel) continue;
        m = std::max(m, std::abs(values(channel, o)));
    }
    return m;
}

void CorrelationMatrix::write_csv(std::ostream& out) const {
    const int n = n_bands();
    out << "channel";
    for (int j = 0; j < n; ++j) out << ",ch_" << j;
    out << '\n';
    for (int i = 0; i < n; ++i) {
        out << "ch_" << i;
        for (int j = 0; j < n; ++j) out << ',' << format_double(values(i, j));
        out << '\n';
    }
}

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& samples) {
    const auto n = samples.rows();
    const auto d = samples.cols();
    if (n < 2) throw ValidationError("correlation_matrix: need at least 2 pixels");
    if (d < 1) throw ValidationError("correlation_matrix: no bands");

    Eigen::MatrixXd centered = samples.rowwise() - samples.colwise().mean();
    Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(n - 1);

    CorrelationMatrix out;
    out.values.resize(d, d);
    std::vector<double> sd(static_cast<size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        sd[static_cast<size_t>(i)] = std::sqrt(std::max(cov(i, i), 0.0));
        if (sd[static_cast<size_t>(i)] < kSpreadEps)
            out.zero_variance_bands.push_back(static_cast<int>(i));
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double r;
            if (i == j) {
                r = 1.0;
            } else if (sd[static_cast<size_t>(i)] < kSpreadEps ||
                       sd[static_cast<size_t>(j)] < kSpreadEps) {
                r = 0.0;
            } else {
                r = cov(i, j) / (sd[static_cast<size_t>(i)] * sd[static_cast<size_t>(j)]);
                r = std::clamp(r, -1.0, 1.0);
            }
            out.values(i, j) = r;
            out.values(j, i) = r;
        }
    }
    out.validate();
    return out;
}

double michelson_contrast(double mean_fg, double mean_bg) {
    const double denom = mean_fg + mean_bg;
    if (std::abs(denom) < kSpreadEps) return 0.0;
    return (mean_fg - mean_bg) / denom;
}

double csnr(const ContrastSampleSet& contrasts) {
    if (contrasts.contrasts.size() < 2)
        throw ValidationError("csnr: need at least 2 contrast samples");
    const double m = mean_of(contrasts.contrasts);
    const double sd = sample_sd(contrasts.contrasts);
    if (sd < kSpreadEps) return std::abs(m) < kSpreadEps ? 0.0 : kCsnrCap;
    return std::abs(m) / sd;
}

namespace {

// Linear per-plane offsets (r*cols + c) of every pixel inside a rect.
std::vector<size_t> rect_offsets(const LabeledPatch& p, int cols) {
    std::vector<size_t> out;
    out.reserve(p.area());
    for (int y = p.y; y < p.y + p.height; ++y)
        for (int x = p.x; x < p.x + p.width; ++x)
            out.push_back(static_cast<size_t>(y) * cols + x);
    return out;
}

// First floor(n/2) entries of a seeded partial shuffle.
std::vector<size_t> half_subset(const std::vector<size_t>& all, rng::Stream& rs) {
    std::vector<size_t> pool = all;
    const size_t m = pool.size() / 2;
    for (size_t i = 0; i < m; ++i) {
        const size_t j = i + static_cast<size_t>(rs.next_below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return pool;
}

}  // namespace

CsnrTable csnr_table(const SpectralCube& cube, const PatchSet& patches, int draws,
                     std::uint64_t seed, int background_class) {
    cube.validate();
    patches.validate();
    if (draws < 2) throw ValidationError("csnr_table: draws must be >= 2");
    if (background_class < 0 || background_class >= patches.n_classes())
        throw ValidationError("csnr_table: background class out of range");

    std::vector<size_t> bg_pixels;
    for (const auto& p : patches.patches) {
        if (p.class_id != background_class) continue;
        if (!p.inside(cube.rows, cube.cols))
            throw ValidationError("csnr_table: patch '" + p.label + "' outside cube extent");
        auto offs = rect_offsets(p, cube.cols);
        bg_pixels.insert(bg_pixels.end(), offs.begin(), offs.end());
    }
    if (bg_pixels.size() < 2)
        throw ValidationError("csnr_table: background class needs >= 2 pixels");

    CsnrTable table;
    for (const auto& p : patches.patches) {
        if (p.class_id == background_class) continue;
        table.pairs.emplace_back(p.label, patches.class_names.at(background_class));
    }
    if (table.pairs.empty())
        throw ValidationError("csnr_table: no foreground/background pairs");

    const int n_bands = cube.bands();
    const size_t plane = cube.plane_size();
    table.values.resize(n_bands, static_cast<Eigen::Index>(table.pairs.size()));

    int pair_idx = 0;
    for (const auto& p : patches.patches) {
        if (p.class_id == background_class) continue;
        if (!p.inside(cube.rows, cube.cols))
            throw ValidationError("csnr_table: patch '" + p.label + "' outside cube extent");
        const auto fg_pixels = rect_offsets(p, cube.cols);
        if (fg_pixels.size() < 2)
            throw ValidationError("csnr_table: patch '" + p.label + "' needs >= 2 pixels");

        // contrasts[b][d]: band-major so each band hands csnr() one set
        std::vector<ContrastSampleSet> sets(static_cast<size_t>(n_bands));
        for (auto& s : sets) {
            s.pair_id = table.pairs[static_cast<size_t>(pair_idx)];
            s.contrasts.resize(static_cast<size_t>(draws));
        }
        for (int d = 0; d < draws; ++d) {
            // One subset per (pair, draw), shared by every band.
            rng::Stream rs(seed, rng::mix(static_cast<std::uint64_t>(pair_idx),
                                          static_cast<std::uint64_t>(d)));
            const auto fg_sub = half_subset(fg_pixels, rs);
            const auto bg_sub = half_subset(bg_pixels, rs);
            for (int b = 0; b < n_bands; ++b) {
                const float* base = cube.data.data() + static_cast<size_t>(b) * plane;
                double fg_sum = 0.0, bg_sum = 0.0;
                for (size_t off : fg_sub) fg_sum += base[off];
                for (size_t off : bg_sub) bg_sum += base[off];
                sets[static_cast<size_t>(b)].contrasts[static_cast<size_t>(d)] =
                    michelson_contrast(fg_sum / static_cast<double>(fg_sub.size()),
                                       bg_sum / static_cast<double>(bg_sub.size()));
            }
        }
        for (int b = 0; b < n_bands; ++b)
            table.values(b, pair_idx) = csnr(sets[static_cast<size_t>(b)]);
        ++pair_idx;
    }
    return table;
}

void CsnrTable::write_csv(std::ostream& out) const {
    out << "channel";
    for (const auto& p : pairs) out << ',' << p.first << '|' << p.second;
    out << '\n';
    for (int b = 0; b < n_bands(); ++b) {
        out << "ch_" << b;
        for (int j = 0; j < n_pairs(); ++j) out << ',' << format_double(values(b, j));
        out << '\n';
    }
}

CsnrProfile csnr_high_probability(const CsnrTable& table, double pct) {
    if (table.values.size() == 0) throw ValidationError("csnr_high_probability: empty table");
    if (pct <= 0.0 || pct >= 100.0)
        throw ValidationError("csnr_high_probability: percentile must be in (0,100)");

    std::vector<double> all;
    all.reserve(static_cast<size_t>(table.values.size()));
    for (int b = 0; b < table.n_bands(); ++b)
        for (int j = 0; j < table.n_pairs(); ++j) all.push_back(table.values(b, j));

    CsnrProfile prof;
    prof.tau = percentile(all, pct);
    prof.p_hi.resize(static_cast<size_t>(table.n_bands()));
    for (int b = 0; b < table.n_bands(); ++b) {
        int hi = 0;
        for (int j = 0; j < table.n_pairs(); ++j)
            if (table.values(b, j) >= prof.tau) ++hi;
        prof.p_hi[static_cast<size_t>(b)] =
            static_cast<double>(hi) / static_cast<double>(table.n_pairs());
    }
    return prof;
}

void CsnrProfile::write_csv(std::ostream& out, const WavelengthAxis& axis) const {
    out << "channel,wavelength_nm,p_hi\n";
    for (size_t b = 0; b < p_hi.size(); ++b)
        out << b << ',' << format_double(axis.wavelengths_nm.at(b)) << ','
            << format_double(p_hi[b]) << '\n';
}

}  // namespace hsiband
