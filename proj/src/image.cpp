#include "saf/image.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace saf {

static unsigned char to_byte(double c) {
  const double clamped = c < 0.0 ? 0.0 : (c > 1.0 ? 1.0 : c);
  return static_cast<unsigned char>(std::lround(clamped * 255.0));
}

std::vector<unsigned char> encode_ppm(const Image& image) {
  std::ostringstream header;
  header << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  const std::string head = header.str();
  std::vector<unsigned char> bytes(head.begin(), head.end());
  bytes.reserve(bytes.size() + image.pixels.size() * 3);
  for (const Vec3& p : image.pixels) {
    bytes.push_back(to_byte(p.x));
    bytes.push_back(to_byte(p.y));
    bytes.push_back(to_byte(p.z));
  }
  return bytes;
}

void write_ppm(const Image& image, std::ostream& out) {
  const auto bytes = encode_ppm(image);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_ppm_file(const Image& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_ppm(image, out);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace saf
