#include "hsiband/composite.hpp"

#include <algorithm>
#include <cmath>

#include "hsiband/error.hpp"
#include "hsiband/stats.hpp"

namespace hsiband {

void ChannelMapping::validate(int n_bands) const {
    if (half_width < 0) throw ValidationError("channel mapping: half_width must be >= 0");
    const std::array<int, 3> centers{red_center, green_center, blue_center};
    for (int c : centers)
        if (c < 0 || c >= n_bands)
            throw ValidationError("channel mapping: center " + std::to_string(c) +
                                  " outside [0," + std::to_string(n_bands) + ")");
    if (centers[0] == centers[1] || centers[0] == centers[2] || centers[1] == centers[2])
        throw ValidationError("channel mapping: centers must be distinct");
}

ChannelMapping mapping_from_selection(const std::vector<int>& channels,
                                      const WavelengthAxis& axis, int half_width) {
    if (channels.size() != 3)
        throw ValidationError("mapping requires 3 channels, got " +
                              std::to_string(channels.size()));
    std::vector<int> by_wavelength = channels;
    std::sort(by_wavelength.begin(), by_wavelength.end(), [&](int a, int b) {
        return axis.wavelengths_nm.at(static_cast<size_t>(a)) <
               axis.wavelengths_nm.at(static_cast<size_t>(b));
    });
    ChannelMapping m;
    m.green_center = by_wavelength[0];
    m.red_center = by_wavelength[1];
    m.blue_center = by_wavelength[2];
    m.half_width = half_width;
    return m;
}

Plane integrate_channel(const SpectralCube& cube, int center, int half_width,
                        bool* window_clamped) {
    if (center < 0 || center >= cube.bands())
        throw ValidationError("integrate_channel: center out of range");
    if (half_width < 0) throw ValidationError("integrate_channel: negative half_width");

    const int lo = std::max(0, center - half_width);
    const int hi = std::min(cube.bands() - 1, center + half_width);
    if (window_clamped && (lo != center - half_width || hi != center + half_width))
        *window_clamped = true;

    Plane out = Plane::Zero(cube.rows, cube.cols);
    const size_t plane = cube.plane_size();
    for (int b = lo; b <= hi; ++b) {
        const float* base = cube.data.data() + static_cast<size_t>(b) * plane;
        for (int r = 0; r < cube.rows; ++r)
            for (int c = 0; c < cube.cols; ++c)
                out(r, c) += base[static_cast<size_t>(r) * cube.cols + c];
    }
    out /= static_cast<double>(hi - lo + 1);
    return out;
}

WhiteBalanceResult gray_world_white_balance(const std::array<Plane, 3>& planes) {
    for (int i = 1; i < 3; ++i)
        if (planes[static_cast<size_t>(i)].rows() != planes[0].rows() ||
            planes[static_cast<size_t>(i)].cols() != planes[0].cols())
            throw ValidationError("white balance: plane shapes differ");

    std::array<double, 3> means{};
    double target = 0.0;
    int live = 0;
    for (size_t i = 0; i < 3; ++i) {
        means[i] = planes[i].mean();
        if (std::abs(means[i]) >= 1e-12) {
            target += means[i];
            ++live;
        }
    }
    WhiteBalanceResult out;
    out.scales = {1.0, 1.0, 1.0};
    if (live == 0) {
        out.planes = planes;
        out.zero_mean_plane = true;
        return out;
    }
    target /= static_cast<double>(live);
    for (size_t i = 0; i < 3; ++i) {
        if (std::abs(means[i]) < 1e-12) {
            out.zero_mean_plane = true;
            out.planes[i] = planes[i];
        } else {
            out.scales[i] = target / means[i];
            out.planes[i] = planes[i] * out.scales[i];
        }
    }
    return out;
}

namespace {

std::pair<double, double> percentile_range(const std::vector<double>& values) {
    return {percentile(values, 0.1), percentile(values, 99.9)};
}

Plane normalize_and_gamma(const Plane& plane, double lo, double hi, bool* degenerate) {
    Plane out(plane.rows(), plane.cols());
    if (hi - lo < 1e-12) {
        if (degenerate) *degenerate = true;
        out.setZero();
        return out;
    }
    const double inv = 1.0 / (hi - lo);
    const double g = 1.0 / 2.2;
    for (Eigen::Index r = 0; r < plane.rows(); ++r)
        for (Eigen::Index c = 0; c < plane.cols(); ++c) {
            double v = (plane(r, c) - lo) * inv;
            v = std::clamp(v, 0.0, 1.0);
            out(r, c) = std::pow(v, g);
        }
    return out;
}

}  // namespace

Plane gamma_encode(const Plane& plane, bool* degenerate) {
    std::vector<double> values(plane.data(), plane.data() + plane.size());
    const auto [lo, hi] = percentile_range(values);
    return normalize_and_gamma(plane, lo, hi, degenerate);
}

std::uint8_t quantize8(double v) {
    const double scaled = std::floor(v * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

CompositeImage reconstruct_composite(const SpectralCube& cube, const ChannelMapping& mapping) {
    cube.validate();
    mapping.validate(cube.bands());

    CompositeImage out;
    out.provenance.mapping = mapping;

    std::array<Plane, 3> planes;  // R, G, B
    const std::array<int, 3> centers{mapping.red_center, mapping.green_center,
                                     mapping.blue_center};
    for (size_t i = 0; i < 3; ++i)
        planes[i] = integrate_channel(cube, centers[i], mapping.half_width,
                                      &out.provenance.window_clamped);

    WhiteBalanceResult wb = gray_world_white_balance(planes);
    out.provenance.wb_scales = wb.scales;
    out.provenance.zero_mean_plane = wb.zero_mean_plane;

    // One normalization range across all three balanced planes; per-plane
    // ranges would cancel the balance straight back out.
    std::vector<double> pooled;
    pooled.reserve(static_cast<size_t>(3 * wb.planes[0].size()));
    for (const auto& p : wb.planes)
        pooled.insert(pooled.end(), p.data(), p.data() + p.size());
    const auto [lo, hi] = percentile_range(pooled);
    out.provenance.norm_lo = lo;
    out.provenance.norm_hi = hi;

    std::array<Plane, 3> encoded;
    for (size_t i = 0; i < 3; ++i)
        encoded[i] = normalize_and_gamma(wb.planes[i], lo, hi, &out.provenance.degenerate_range);

    out.image.width = cube.cols;
    out.image.height = cube.rows;
    out.image.pixels.resize(static_cast<size_t>(cube.rows) * cube.cols * 3);
    for (int r = 0; r < cube.rows; ++r)
        for (int c = 0; c < cube.cols; ++c) {
            const size_t at = out.image.index(c, r);
            for (size_t i = 0; i < 3; ++i)
                out.image.pixels[at + i] = quantize8(encoded[i](r, c));
        }
    return out;
}

}  // namespace hsiband
