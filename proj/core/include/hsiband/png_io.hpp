#ifndef HSIBAND_PNG_IO_HPP
#define HSIBAND_PNG_IO_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

namespace hsiband {

struct Rgb8Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // interleaved RGB, row-major

    size_t index(int x, int y) const { return (static_cast<size_t>(y) * width + x) * 3; }
};

// Writers pin the zlib level and filter strategy so identical pixels always
// produce identical bytes.
void write_png(const Rgb8Image& img, const std::filesystem::path& path);

Rgb8Image read_png(const std::filesystem::path& path);

}  // namespace hsiband

#endif
