#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "saf/bvh.hpp"

namespace saf {

// Deterministic uniform double in [0, 1).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Vec3 uniform_unit_vector(std::mt19937_64& rng) {
  // Marsaglia rejection from the cube.
  for (;;) {
    const Vec3 v{2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0,
                 2.0 * uniform01(rng) - 1.0};
    const double n2 = norm_sq(v);
    if (n2 > 1e-12 && n2 <= 1.0) return v / std::sqrt(n2);
  }
}

// Uniform barycentric coordinates on the unit simplex.
inline std::array<double, 3> uniform_bary(std::mt19937_64& rng) {
  double u = uniform01(rng), v = uniform01(rng);
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return {1.0 - u - v, u, v};
}

// Area-weighted uniform sampling of the mesh surface.
class SurfaceSampler {
 public:
  explicit SurfaceSampler(const TriMesh& mesh);
  SurfacePoint sample(std::mt19937_64& rng) const;

 private:
  const TriMesh& mesh_;
  std::vector<double> cumulative_area_;
};

// Points x with signed height in [h_min, h_max]: rejection sampling from the
// mesh box padded by max(|h_min|, h_max), keeping points whose unsigned
// distance and side match the band. h_min may be negative (inside shell).
std::vector<Vec3> sample_shell(const TriMesh& mesh, const Bvh& bvh, double h_min, double h_max,
                               int count, std::uint64_t seed);

// Uniform sampling of the offset surface at exact distance `height`:
// candidates come from the face / convex-edge wedge / vertex cone
// decomposition weighted by their offset areas, then every candidate is
// verified globally (|distance - height| small and outside), which also
// discards pieces shadowed by other geometry on non-convex meshes.
std::vector<Vec3> sample_offset_surface(const TriMesh& mesh, const Bvh& bvh, double height,
                                        int count, std::uint64_t seed);

}  // namespace saf
