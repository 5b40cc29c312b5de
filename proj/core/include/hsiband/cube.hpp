#ifndef HSIBAND_CUBE_HPP
#define HSIBAND_CUBE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace hsiband {

/// Wavelength of each spectral channel, in nanometers. Strictly increasing,
/// finite, positive. Channel index k refers to wavelengths_nm[k].
struct WavelengthAxis {
  std::vector<double> wavelengths_nm;

  std::size_t size() const { return wavelengths_nm.size(); }
  double operator[](std::size_t k) const { return wavelengths_nm[k]; }

  /// Throws ValidationError if the invariants do not hold.
  void validate() const;

  /// Evenly spaced axis over [first_nm, last_nm] with `bands` channels.
  static WavelengthAxis uniform(double first_nm, double last_nm, int bands);
};

/// Nearest channel to lambda_nm; ties go to the lower index. lambda_nm must
/// fall within [first, last] extended by half the mean channel spacing.
int wavelength_to_channel(const WavelengthAxis& axis, double lambda_nm);

/// Reflectance volume in band-sequential layout: data[(b*rows + r)*cols + c].
/// Values are normalized to [0, 1] at load time.
struct SpectralCube {
  std::vector<float> data;
  WavelengthAxis axis;
  int rows = 0;
  int cols = 0;
  double value_min = 0.0;  // declared radiometric scale the data was loaded with
  double value_max = 1.0;
  bool range_fallback = false;  // no declared range; observed min/max was used
  bool values_clamped = false;  // normalization had to clamp out-of-range samples

  int bands() const { return static_cast<int>(axis.size()); }
  std::size_t plane_size() const { return static_cast<std::size_t>(rows) * cols; }

  float at(int band, int row, int col) const {
    return data[(static_cast<std::size_t>(band) * rows + row) * cols + col];
  }
  float& at(int band, int row, int col) {
    return data[(static_cast<std::size_t>(band) * rows + row) * cols + col];
  }

  const float* plane(int band) const { return data.data() + static_cast<std::size_t>(band) * plane_size(); }

  void validate() const;
};

/// Rectangular region of uniform material with a class label.
struct LabeledPatch {
  std::string label;
  int class_id = 0;
  int x = 0;  // left column
  int y = 0;  // top row
  int width = 0;
  int height = 0;

  long area() const { return static_cast<long>(width) * height; }
  bool inside(int rows, int cols) const {
    return x >= 0 && y >= 0 && width >= 1 && height >= 1 && x + width <= cols && y + height <= rows;
  }
};

struct PatchSet {
  std::vector<LabeledPatch> patches;
  std::vector<std::string> class_names;  // indexed by class_id

  int n_classes() const { return static_cast<int>(class_names.size()); }
  const LabeledPatch* find(const std::string& label) const;
  std::vector<const LabeledPatch*> of_class(int class_id) const;
  void validate() const;
};

/// Pixel spectra of one patch, row-major over the rect (top-left to
/// bottom-right), one row per pixel, one column per band.
Eigen::MatrixXd extract_patch_samples(const SpectralCube& cube, const LabeledPatch& patch);

/// Pixel spectra of every patch of one class, patches in set order.
Eigen::MatrixXd extract_class_samples(const SpectralCube& cube, const PatchSet& patches, int class_id);

}  // namespace hsiband

#endif
