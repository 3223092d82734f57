#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "saf/vec3.hpp"

namespace saf {

// Row-major RGB image, components in [0, 1].
struct Image {
  int width = 0, height = 0;
  std::vector<Vec3> pixels;

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h) {}

  Vec3& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  const Vec3& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

// Binary 8-bit PPM (P6). Quantization: round(clamp(c) * 255).
void write_ppm(const Image& image, std::ostream& out);
void write_ppm_file(const Image& image, const std::string& path);
std::vector<unsigned char> encode_ppm(const Image& image);

}  // namespace saf
