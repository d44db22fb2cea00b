#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace authpipe {

// Interleaved 8-bit RGB raster.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3

  std::uint8_t at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t& at(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
};

Image8 make_image(int width, int height, std::uint8_t r, std::uint8_t g,
                  std::uint8_t b);

// Decodes PNG or JPEG (sniffed from magic bytes) to RGB. Grayscale is
// replicated across channels, alpha is dropped, 16-bit depth reduced to 8.
Image8 load_image_rgb(const std::filesystem::path& file);

void save_png_rgb(const std::filesystem::path& file, const Image8& img);

}  // namespace authpipe
