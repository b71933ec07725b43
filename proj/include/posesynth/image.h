#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "posesynth/pointcloud.h"

namespace posesynth {

// 8-bit RGB, row-major, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, Color fill = {0, 0, 0});

  std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  void Set(int x, int y, const Color& c) {
    std::uint8_t* p = at(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }
  Color Get(int x, int y) const {
    const std::uint8_t* p = at(x, y);
    return {p[0], p[1], p[2]};
  }

  friend bool operator==(const Image&, const Image&) = default;
};

// PNG output: 8-bit RGB, no alpha, no ancillary chunks, so identical images
// produce identical files.
void WritePng(const Image& img, const std::filesystem::path& path);

// Reads PNG or JPEG (chosen by file signature), converting to 8-bit RGB.
// Throws IoError on unreadable or undecodable files.
Image ReadImage(const std::filesystem::path& path);

}  // namespace posesynth
