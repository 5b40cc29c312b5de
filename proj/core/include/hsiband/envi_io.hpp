#ifndef HSIBAND_ENVI_IO_HPP
#define HSIBAND_ENVI_IO_HPP

#include <filesystem>

#include "hsiband/cube.hpp"

// Two-file ENVI-style cube storage: a `key = value` text header next to a
// raw little-endian float32 payload. Only band-sequential (bsq) interleave
// is supported.
//
// Required header keys:
//   samples    columns
//   lines      rows
//   bands      channel count
//   interleave must be "bsq"
//   data_type  must be 4 (IEEE float32)
//   byte_order must be 0 (little-endian)
//   wavelength = { comma-separated nm values }, one per band
// Optional:
//   value_range = { min, max }  declared radiometric scale; when absent the
//                               observed min/max is used and a fallback flag
//                               is set on the cube
//   raw_file   payload filename relative to the header (default: header
//              name with a .raw extension)

namespace hsiband {

/// Load and validate a cube; values are rescaled to [0, 1].
SpectralCube load_cube(const std::filesystem::path& header_path);

/// Write the header/payload pair for `cube`. The payload keeps the in-memory
/// values bit-exactly and declares value_range {0, 1}, so load_cube
/// round-trips exactly.
void save_cube(const SpectralCube& cube, const std::filesystem::path& header_path);

/// Patch file: UTF-8 CSV with header `label,class,x,y,w,h`. Class ids are
/// assigned in first-appearance order of class names.
PatchSet load_patchset(const std::filesystem::path& path);

void save_patchset(const PatchSet& patches, const std::filesystem::path& path);

}  // namespace hsiband

#endif
