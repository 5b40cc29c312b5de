#ifndef HSIBAND_COMPOSITE_HPP
#define HSIBAND_COMPOSITE_HPP

#include <Eigen/Dense>
#include <array>

#include "hsiband/cube.hpp"
#include "hsiband/png_io.hpp"

// Pseudo-color reconstruction: integrate a spectral window around each of
// three selected channels, gray-world balance the planes, normalize and
// gamma-encode, and quantize to 8-bit RGB. The pipeline is fixed-order and
// bit-deterministic.

namespace hsiband {

using Plane = Eigen::ArrayXXd;  // rows × cols

struct ChannelMapping {
    int red_center = 0;
    int green_center = 0;
    int blue_center = 0;
    int half_width = 7;

    void validate(int n_bands) const;  // distinct centers, in range, half_width >= 0
};

/// Display convention for a 3-channel selection: the lowest wavelength
/// drives green, the middle drives red, the highest (typically NIR) drives
/// blue — false color that keeps a NIR-discriminative band visible.
ChannelMapping mapping_from_selection(const std::vector<int>& channels,
                                      const WavelengthAxis& axis, int half_width);

struct CompositeProvenance {
    ChannelMapping mapping;
    std::array<double, 3> wb_scales{1.0, 1.0, 1.0};
    double percentile_lo = 0.1;
    double percentile_hi = 99.9;
    double gamma = 1.0 / 2.2;
    double norm_lo = 0.0;  // pooled normalization anchors over the 3 planes
    double norm_hi = 1.0;
    bool window_clamped = false;
    bool zero_mean_plane = false;
    bool degenerate_range = false;
};

struct CompositeImage {
    Rgb8Image image;
    CompositeProvenance provenance;
};

/// Mean over channels [center−h, center+h], clamped to the channel range.
/// Sets *window_clamped when the window was truncated at an edge.
Plane integrate_channel(const SpectralCube& cube, int center, int half_width,
                        bool* window_clamped = nullptr);

struct WhiteBalanceResult {
    std::array<Plane, 3> planes;
    std::array<double, 3> scales;
    bool zero_mean_plane = false;
};

/// Gray-world: every plane is scaled to the mean of the plane means.
/// A zero-mean plane is passed through unscaled (flagged) and excluded from
/// the target mean, so the remaining planes balance among themselves.
WhiteBalanceResult gray_world_white_balance(const std::array<Plane, 3>& planes);

/// Percentile-normalize (0.1th → 0, 99.9th → 1, clipped) then encode with
/// gamma 1/2.2. A constant plane maps to all zeros (flagged via the
/// *degenerate out-param when given).
Plane gamma_encode(const Plane& plane, bool* degenerate = nullptr);

/// Round-half-up quantization of a [0,1] value to [0,255].
std::uint8_t quantize8(double v);

/// integrate → white balance → pooled normalize + gamma → quantize.
/// The normalization anchors are percentiles of the three balanced planes
/// pooled together, so the white-balance ratios survive into the output.
CompositeImage reconstruct_composite(const SpectralCube& cube, const ChannelMapping& mapping);

}  // namespace hsiband

#endif
