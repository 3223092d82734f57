#pragma once

#include <memory>
#include <span>
#include <vector>

#include "saf/image.hpp"
#include "saf/surfcoord.hpp"

namespace saf {

// Emission/absorption sample: color in [0,1]^3, non-negative finite density
// per meter.
struct RadianceSample {
  Vec3 color{0, 0, 0};
  double density = 0.0;
};

// Everything a field evaluation may depend on.
struct FieldQuery {
  SurfCoord coord;
  std::array<double, 6> view{};  // world direction + local-frame direction
  int face = -1;                 // posed/canonical face of the projection
  bool fallback = false;
};

// A radiance field over surface-aligned coordinates. Implementations must be
// deterministic and safe for concurrent evaluation.
class Field {
 public:
  virtual ~Field() = default;
  virtual RadianceSample eval(const FieldQuery& q) const = 0;
};

RadianceSample eval_field(const Field& field, const FieldQuery& q);

// Uniform color inside the shell |h| <= thickness, empty space elsewhere.
class ConstantField : public Field {
 public:
  ConstantField(const Vec3& color, double density, double thickness);
  RadianceSample eval(const FieldQuery& q) const override;

 private:
  Vec3 color_;
  double density_, thickness_;
};

// Checkerboard over canonical coordinates: parity of the summed per-axis
// cell indices floor(s_c / period) picks one of two colors. Same shell
// density profile as ConstantField.
class CheckerShellField : public Field {
 public:
  CheckerShellField(double period, double thickness, double density,
                    const Vec3& color_even = {0.92, 0.92, 0.92},
                    const Vec3& color_odd = {0.08, 0.08, 0.08});
  RadianceSample eval(const FieldQuery& q) const override;

  static int parity(const Vec3& canonical_pos, double period);

 private:
  double period_, thickness_, density_;
  Vec3 color_even_, color_odd_;
};

// Diagnostic field: gray value encodes the height linearly over
// [-half_range, half_range].
class HeightRampField : public Field {
 public:
  HeightRampField(double half_range, double density);
  RadianceSample eval(const FieldQuery& q) const override;

 private:
  double half_range_, density_;
};

// Per-face category labels on the shared topology, one small integer per face.
struct CategoryMap {
  std::vector<int> labels;
};

// Routes each query to the sub-field of its face's category. Label validity
// is checked at construction; an unlabeled face count is a configuration
// error, not a query-time one.
class CompositeField : public Field {
 public:
  CompositeField(std::vector<std::shared_ptr<const Field>> fields, CategoryMap categories);
  RadianceSample eval(const FieldQuery& q) const override;

  int face_count() const { return static_cast<int>(categories_.labels.size()); }

 private:
  std::vector<std::shared_ptr<const Field>> fields_;
  CategoryMap categories_;
};

struct RaySample {
  RadianceSample radiance;
  double delta = 0.0;  // segment length, > 0
};

struct RayResult {
  Vec3 color{0, 0, 0};
  double opacity = 0.0;        // sum of sample weights
  double transmittance = 1.0;  // residual T after the last sample
};

// Emission/absorption quadrature: w_i = T_i (1 - exp(-sigma_i delta_i)),
// pixel = sum w_i c_i + T_final * background. opacity + transmittance == 1
// up to rounding.
RayResult composite_ray(std::span<const RaySample> samples, const Vec3& background);

// Pinhole camera, x right / y down / z forward, world_from_camera pose.
struct Camera {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;
  Mat3 rotation = Mat3::identity();  // camera-to-world
  Vec3 position;

  // Unit world-space direction through the pixel center.
  Vec3 pixel_direction(double px, double py) const {
    return normalized(rotation * Vec3{(px + 0.5 - cx) / fx, (py + 0.5 - cy) / fy, 1.0});
  }
};

Camera look_at_camera(const Vec3& eye, const Vec3& target, const Vec3& up, double focal,
                      int width, int height);

struct RenderConfig {
  int samples_per_ray = 64;
  double h0 = 0.2;  // height cutoff in meters: |h| > h0 skips field evaluation
  double near_plane = -1.0, far_plane = -1.0;  // < 0: auto from padded mesh bounds
  Vec3 background{0, 0, 0};
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
};

struct RenderResult {
  Image image;
  std::vector<double> opacity;    // per pixel, row-major
  long long fallback_count = 0;   // flagged projections among evaluated samples
  double mean_opacity = 0.0;
  double energy_max_err = 0.0;    // max |opacity + transmittance - 1| over pixels
};

// Volume renderer over the posed mesh: per pixel, rays are clipped against
// the mesh bounds padded by h0, sampled with per-pixel-seeded stratified
// points, projected to surface-aligned coordinates, and composited.
// Rows render in parallel; the result is independent of the thread count.
RenderResult render(const MeshPair& pair, const Bvh& posed_bvh, const Field& field,
                    const Camera& camera, const RenderConfig& config);

}  // namespace saf
