#ifndef HSIBAND_SYNTHGEN_HPP
#define HSIBAND_SYNTHGEN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsiband/cube.hpp"
#include "hsiband/png_io.hpp"

// Synthetic scenes with constructed metamer pairs: materials that an IR-cut
// RGB camera cannot tell apart but that differ strongly in the NIR. Because
// the sensor model has exactly zero response beyond 750 nm, adding a bump in
// that region changes the RGB projection by nothing at all — the pair is
// metameric by construction, not approximation.

namespace hsiband {

struct SensorModel {
    Eigen::MatrixXd response;  // 3 × n_bands; rows R, G, B; each row sums to 1
    WavelengthAxis axis;

    int n_bands() const { return static_cast<int>(response.cols()); }
    void validate() const;  // nonnegative, positive row sums, rank 3
};

/// Gaussian sensitivities centered 600/540/460 nm (sigma 55/50/40 nm) on the
/// given axis, zeroed beyond 750 nm (IR-cut), rows normalized to unit sum.
/// The axis must span at least 450–700 nm.
SensorModel build_sensor_model(const WavelengthAxis& axis);

struct NirBump {
    int center = 0;          // channel index
    double width = 1.0;      // sigma in channels; support truncated at 3 sigma
    double amplitude = 0.0;  // reflectance added at the center
};

struct MetamerPair {
    Eigen::VectorXd spectrum_a;  // base
    Eigen::VectorXd spectrum_b;  // base + NIR bump
};

/// b = base + bump. The bump's support must lie entirely where the sensor
/// response is zero (else the RGB match would be approximate — error), and
/// base + bump must stay inside [0,1] (clipping would break metamerism —
/// error). Postconditions asserted: ‖response·(a−b)‖∞ ≤ 1e−9 and NIR
/// separation max|a−b| ≥ min_separation.
MetamerPair make_metamer_pair(const SensorModel& sensor, const Eigen::VectorXd& base,
                              const NirBump& bump, double min_separation = 0.2);

struct PlacedPatch {
    std::string label;
    std::string class_name;
    int x = 0, y = 0, width = 0, height = 0;
    Eigen::VectorXd spectrum;
};

struct SceneSpec {
    int rows = 0, cols = 0;
    WavelengthAxis axis;
    Eigen::VectorXd background;
    std::vector<PlacedPatch> patches;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Channel the default scene's metamer bump is planted on.
inline constexpr int kDefaultBumpChannel = 114;
inline constexpr double kDefaultBumpAmplitude = 0.3;
/// Sub-channel sigma: the 3-sigma support covers only the center channel, so
/// exactly one band separates the planted pair.
inline constexpr double kDefaultBumpWidth = 0.3;

/// 96×96, 128 channels over 450–950 nm, flat 0.4 background, one 10×10
/// metamer patch, noise sigma 0.005, seed 42.
SceneSpec default_scene_spec();

/// JSON scene description; spectra may be explicit arrays, {"flat": v}, or
/// {"metamer_of_background": {center, width, amplitude}}.
SceneSpec load_scene_spec(const std::filesystem::path& path);

struct GeneratedScene {
    SpectralCube cube;
    PatchSet patches;  // auto background patch first, then the placed ones
    Rgb8Image render;  // sensor projection of the noisy cube, gamma 1/2.2
};

/// Deterministic for a fixed seed: noise is drawn position-keyed, so the
/// result does not depend on pixel evaluation order.
GeneratedScene generate_scene(const SceneSpec& spec, const SensorModel& sensor);

}  // namespace hsiband

#endif
