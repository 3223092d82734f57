#include "saf/renderfield.hpp"

#include <cmath>
#include <stdexcept>

#include "saf/parallel.hpp"

namespace saf {

namespace {

Vec3 clamp01(const Vec3& c) {
  auto cl = [](double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); };
  return {cl(c.x), cl(c.y), cl(c.z)};
}

double checked_density(double d, const char* who) {
  if (!std::isfinite(d) || d < 0.0)
    throw std::invalid_argument(std::string(who) + ": density must be finite and >= 0");
  return d;
}

// splitmix64; mixes the render seed with pixel coordinates so sample jitter
// is independent of traversal and thread order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t px, std::uint64_t py) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (px + 1) + 0xbf58476d1ce4e5b9ULL * (py + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct PixelRng {
  std::uint64_t state;
  double next01() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
};

}  // namespace

RadianceSample eval_field(const Field& field, const FieldQuery& q) { return field.eval(q); }

ConstantField::ConstantField(const Vec3& color, double density, double thickness)
    : color_(clamp01(color)),
      density_(checked_density(density, "ConstantField")),
      thickness_(thickness) {
  if (thickness <= 0.0) throw std::invalid_argument("ConstantField: thickness must be > 0");
}

RadianceSample ConstantField::eval(const FieldQuery& q) const {
  if (std::abs(q.coord.height) > thickness_) return {color_, 0.0};
  return {color_, density_};
}

CheckerShellField::CheckerShellField(double period, double thickness, double density,
                                     const Vec3& color_even, const Vec3& color_odd)
    : period_(period),
      thickness_(thickness),
      density_(checked_density(density, "CheckerShellField")),
      color_even_(clamp01(color_even)),
      color_odd_(clamp01(color_odd)) {
  if (period <= 0.0) throw std::invalid_argument("CheckerShellField: period must be > 0");
  if (thickness <= 0.0) throw std::invalid_argument("CheckerShellField: thickness must be > 0");
}

int CheckerShellField::parity(const Vec3& canonical_pos, double period) {
  long long sum = 0;
  for (int i = 0; i < 3; ++i)
    sum += static_cast<long long>(std::floor(canonical_pos[i] / period));
  return static_cast<int>(((sum % 2) + 2) % 2);
}

RadianceSample CheckerShellField::eval(const FieldQuery& q) const {
  const Vec3& color = parity(q.coord.canonical_pos, period_) == 0 ? color_even_ : color_odd_;
  if (std::abs(q.coord.height) > thickness_) return {color, 0.0};
  return {color, density_};
}

HeightRampField::HeightRampField(double half_range, double density)
    : half_range_(half_range), density_(checked_density(density, "HeightRampField")) {
  if (half_range <= 0.0) throw std::invalid_argument("HeightRampField: half_range must be > 0");
}

RadianceSample HeightRampField::eval(const FieldQuery& q) const {
  const double h = q.coord.height;
  if (std::abs(h) > half_range_) return {{0, 0, 0}, 0.0};
  const double v = (h + half_range_) / (2.0 * half_range_);
  return {{v, v, v}, density_};
}

CompositeField::CompositeField(std::vector<std::shared_ptr<const Field>> fields,
                               CategoryMap categories)
    : fields_(std::move(fields)), categories_(std::move(categories)) {
  if (fields_.empty()) throw std::invalid_argument("CompositeField: no sub-fields");
  for (const auto& f : fields_)
    if (!f) throw std::invalid_argument("CompositeField: null sub-field");
  for (const int label : categories_.labels)
    if (label < 0 || label >= static_cast<int>(fields_.size()))
      throw std::invalid_argument("CompositeField: label " + std::to_string(label) +
                                  " has no sub-field");
}

RadianceSample CompositeField::eval(const FieldQuery& q) const {
  if (q.face < 0 || q.face >= static_cast<int>(categories_.labels.size()))
    throw std::invalid_argument("CompositeField: query face " + std::to_string(q.face) +
                                " is unlabeled");
  return fields_[categories_.labels[q.face]]->eval(q);
}

RayResult composite_ray(std::span<const RaySample> samples, const Vec3& background) {
  RayResult out;
  double transmittance = 1.0;
  for (const RaySample& s : samples) {
    const double sigma = s.radiance.density > 0.0 ? s.radiance.density : 0.0;
    const double next = transmittance * std::exp(-sigma * s.delta);
    const double w = transmittance - next;  // telescopes: sum(w) + T_final == 1
    out.color += w * s.radiance.color;
    out.opacity += w;
    transmittance = next;
  }
  out.color += transmittance * background;
  out.transmittance = transmittance;
  return out;
}

Camera look_at_camera(const Vec3& eye, const Vec3& target, const Vec3& up, double focal,
                      int width, int height) {
  const Vec3 forward = normalized(target - eye);
  const Vec3 side = cross(forward, up);
  if (norm(side) < 1e-12) throw std::invalid_argument("look_at_camera: up parallel to view");
  const Vec3 x = normalized(side);
  const Vec3 y = cross(forward, x);  // image y points down
  Camera cam;
  cam.fx = cam.fy = focal;
  cam.cx = width * 0.5;
  cam.cy = height * 0.5;
  cam.width = width;
  cam.height = height;
  cam.rotation = Mat3::from_cols(x, y, forward);
  cam.position = eye;
  return cam;
}

RenderResult render(const MeshPair& pair, const Bvh& posed_bvh, const Field& field,
                    const Camera& camera, const RenderConfig& config) {
  if (config.samples_per_ray < 2)
    throw std::invalid_argument("render: samples_per_ray must be >= 2");
  if (config.h0 <= 0.0) throw std::invalid_argument("render: h0 must be > 0");
  const bool fixed_range = config.near_plane >= 0.0 && config.far_plane >= 0.0;
  if (fixed_range && config.near_plane >= config.far_plane)
    throw std::invalid_argument("render: near must be < far");
  if (camera.width <= 0 || camera.height <= 0 || camera.fx == 0.0 || camera.fy == 0.0)
    throw std::invalid_argument("render: invalid camera");

  const Projector projector(pair.posed, posed_bvh);
  const Aabb bounds = pair.posed.aabb().padded(config.h0);
  const int n = config.samples_per_ray;

  RenderResult result;
  result.image = Image(camera.width, camera.height);
  result.opacity.assign(static_cast<size_t>(camera.width) * camera.height, 0.0);
  std::vector<long long> row_fallbacks(camera.height, 0);
  std::vector<double> row_energy_err(camera.height, 0.0);

  parallel_for(camera.height, config.threads, [&](int py) {
    std::vector<RaySample> samples(n);
    std::vector<double> ticks(n + 1);
    for (int px = 0; px < camera.width; ++px) {
      const Vec3 dir = camera.pixel_direction(px, py);
      double t0 = 0.0, t1 = 0.0;
      bool hit;
      if (fixed_range) {
        t0 = config.near_plane;
        t1 = config.far_plane;
        hit = true;
      } else {
        hit = ray_aabb(camera.position, dir, bounds, t0, t1);
        if (t0 < 0.0) t0 = 0.0;
      }
      if (!hit || t1 <= t0) {
        result.image.at(px, py) = config.background;
        continue;
      }

      PixelRng rng{mix_seed(config.seed, px, py)};
      const double span = t1 - t0;
      for (int k = 0; k < n; ++k) ticks[k] = t0 + span * (k + rng.next01()) / n;
      ticks[n] = t1;

      for (int k = 0; k < n; ++k) {
        const Vec3 pos = camera.position + ticks[k] * dir;
        samples[k].delta = std::max(ticks[k + 1] - ticks[k], 1e-300);
        const auto projected = projector.project_within(pos, config.h0);
        if (!projected || std::abs(projected->height) > config.h0) {
          samples[k].radiance = {{0, 0, 0}, 0.0};
          continue;
        }
        if (projected->fallback) ++row_fallbacks[py];
        FieldQuery query;
        query.coord.canonical_pos =
            canonical_point(pair, projected->surface.face, projected->surface.bary);
        query.coord.height = projected->height;
        query.view = view_feature(dir, local_frame(pair.posed, projected->surface));
        query.face = projected->surface.face;
        query.fallback = projected->fallback;
        samples[k].radiance = field.eval(query);
      }

      const RayResult ray = composite_ray(samples, config.background);
      result.image.at(px, py) = ray.color;
      result.opacity[static_cast<size_t>(py) * camera.width + px] = ray.opacity;
      const double err = std::abs(ray.opacity + ray.transmittance - 1.0);
      if (err > row_energy_err[py]) row_energy_err[py] = err;
    }
  });

  double opacity_sum = 0.0;
  for (const double o : result.opacity) opacity_sum += o;
  result.mean_opacity = opacity_sum / static_cast<double>(result.opacity.size());
  for (int y = 0; y < camera.height; ++y) {
    result.fallback_count += row_fallbacks[y];
    if (row_energy_err[y] > result.energy_max_err) result.energy_max_err = row_energy_err[y];
  }
  return result;
}

}  // namespace saf
