#include "hsiband/cube.hpp"

#include <cmath>

#include "hsiband/error.hpp"

namespace hsiband {

void WavelengthAxis::validate() const {
  if (wavelengths_nm.empty()) throw ValidationError("wavelength axis is empty");
  for (std::size_t i = 0; i < wavelengths_nm.size(); ++i) {
    double w = wavelengths_nm[i];
    if (!std::isfinite(w) || w <= 0.0)
      throw ValidationError("wavelength axis entry " + std::to_string(i) + " is not finite and positive");
    if (i > 0 && wavelengths_nm[i - 1] >= w)
      throw ValidationError("wavelength axis is not strictly increasing at index " + std::to_string(i));
  }
}

WavelengthAxis WavelengthAxis::uniform(double first_nm, double last_nm, int bands) {
  WavelengthAxis axis;
  axis.wavelengths_nm.resize(bands);
  for (int k = 0; k < bands; ++k)
    axis.wavelengths_nm[k] = first_nm + (last_nm - first_nm) * k / double(bands - 1);
  axis.validate();
  return axis;
}

int wavelength_to_channel(const WavelengthAxis& axis, double lambda_nm) {
  const auto& w = axis.wavelengths_nm;
  if (w.empty()) throw ValidationError("wavelength axis is empty");
  double spacing = w.size() > 1 ? (w.back() - w.front()) / double(w.size() - 1) : 0.0;
  if (lambda_nm < w.front() - spacing / 2.0 || lambda_nm > w.back() + spacing / 2.0)
    throw ValidationError("wavelength " + std::to_string(lambda_nm) + " nm is outside the axis range");
  int best = 0;
  double best_dist = std::abs(w[0] - lambda_nm);
  for (std::size_t k = 1; k < w.size(); ++k) {
    double d = std::abs(w[k] - lambda_nm);
    if (d < best_dist) {  // strict: ties keep the lower index
      best = static_cast<int>(k);
      best_dist = d;
    }
  }
  return best;
}

void SpectralCube::validate() const {
  axis.validate();
  if (rows < 1 || cols < 1) throw ValidationError("cube spatial dimensions must be >= 1");
  if (data.size() != static_cast<std::size_t>(bands()) * plane_size())
    throw ValidationError("cube payload size does not match bands x rows x cols");
  for (float v : data)
    if (!std::isfinite(v)) throw ValidationError("cube contains NaN or Inf values");
}

const LabeledPatch* PatchSet::find(const std::string& label) const {
  for (const auto& p : patches)
    if (p.label == label) return &p;
  return nullptr;
}

std::vector<const LabeledPatch*> PatchSet::of_class(int class_id) const {
  std::vector<const LabeledPatch*> out;
  for (const auto& p : patches)
    if (p.class_id == class_id) out.push_back(&p);
  return out;
}

void PatchSet::validate() const {
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    if (p.width < 1 || p.height < 1)
      throw ValidationError("patch '" + p.label + "' has empty extent");
    if (p.class_id < 0 || p.class_id >= n_classes())
      throw ValidationError("patch '" + p.label + "' has an unknown class id");
    for (std::size_t j = i + 1; j < patches.size(); ++j)
      if (patches[j].label == p.label)
        throw ValidationError("duplicate label '" + p.label + "' in patch set");
  }
}

Eigen::MatrixXd extract_patch_samples(const SpectralCube& cube, const LabeledPatch& patch) {
  if (!patch.inside(cube.rows, cube.cols))
    throw ValidationError("patch '" + patch.label + "' lies outside the cube extent");
  const int n_bands = cube.bands();
  Eigen::MatrixXd samples(patch.area(), n_bands);
  long row_out = 0;
  for (int r = patch.y; r < patch.y + patch.height; ++r) {
    for (int c = patch.x; c < patch.x + patch.width; ++c, ++row_out) {
      for (int b = 0; b < n_bands; ++b) samples(row_out, b) = cube.at(b, r, c);
    }
  }
  return samples;
}

Eigen::MatrixXd extract_class_samples(const SpectralCube& cube, const PatchSet& patches, int class_id) {
  long total = 0;
  for (const auto& p : patches.patches)
    if (p.class_id == class_id) total += p.area();
  if (total == 0)
    throw ValidationError("no patches of class id " + std::to_string(class_id));
  Eigen::MatrixXd samples(total, cube.bands());
  long at = 0;
  for (const auto& p : patches.patches) {
    if (p.class_id != class_id) continue;
    samples.middleRows(at, p.area()) = extract_patch_samples(cube, p);
    at += p.area();
  }
  return samples;
}

}  // namespace hsiband
