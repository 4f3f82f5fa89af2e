#include "shelf/scene_gen.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <unordered_set>

namespace shelf {

std::string to_string(SizeClass s) { return s == SizeClass::Small ? "small" : "large"; }

SizeClass size_class_from_string(const std::string& s) {
  if (s == "small") return SizeClass::Small;
  if (s == "large") return SizeClass::Large;
  throw std::invalid_argument("unknown size class: " + s);
}

GridSpec default_grid_spec(SizeClass size_class) {
  GridSpec spec;
  spec.voxel_size = 0.02;
  spec.origin = {0.0, 0.0, 0.0};
  spec.dims = size_class == SizeClass::Small ? Vec3i{30, 20, 20} : Vec3i{50, 25, 25};
  return spec;
}

namespace {

void fill_walls(const GridSpec& spec, std::vector<Cell>& cells) {
  const Vec3i d = spec.dims;
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        bool wall = x == 0 || x == d.x - 1 || z == 0 || z == d.z - 1 || y == d.y - 1;
        // y == 0 is the open face; it stays free.
        cells[spec.flat({x, y, z})] = wall ? Cell::wall() : Cell::free();
      }
}

bool footprint_clear(const std::vector<int32_t>& fp, const std::vector<Cell>& cells) {
  for (int32_t idx : fp)
    if (!cells[idx].is_free()) return false;
  return true;
}

}  // namespace

RegionMask straight_corridor(const GroundTruthScene& gt) {
  const GridSpec& spec = gt.spec;
  std::unordered_set<int32_t> seen;
  RegionMask corridor;
  for (int32_t idx : gt.target().footprint) {
    Vec3i v = spec.unflat(idx);
    for (int y = v.y; y >= 0; --y) {
      int32_t c = spec.flat({v.x, y, v.z});
      if (seen.insert(c).second) corridor.voxels.push_back(c);
    }
  }
  std::sort(corridor.voxels.begin(), corridor.voxels.end());
  return corridor;
}

GroundTruthScene generate_scene(uint64_t seed, SizeClass size_class, int n_obstacles,
                                const SceneGenOptions& options) {
  if (n_obstacles < 0) throw std::invalid_argument("generate_scene: n_obstacles < 0");
  GroundTruthScene gt;
  gt.spec = default_grid_spec(size_class);
  gt.seed = seed;
  gt.size_class = to_string(size_class);
  gt.cells.assign(gt.spec.cell_count(), Cell::free());
  fill_walls(gt.spec, gt.cells);

  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x5851f42d4c957f2dull);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const GridSpec& spec = gt.spec;
  const double vs = spec.voxel_size;
  const Vec3d ext = spec.extent();
  const double floor_z = spec.origin.z + vs;           // top of the floor wall
  const double wall_margin = vs;                       // side/rear wall thickness

  int attempts = 0;
  auto budget_ok = [&]() { return attempts++ < options.max_attempts; };

  auto sample_shape = [&](bool is_target) -> Shape {
    if (is_target) {
      // Target: a slim upright cylinder, banana/bottle scale.
      double r = 0.02 + 0.015 * unit(rng);
      double h = 0.08 + 0.06 * unit(rng);
      return Cylinder{r, h};
    }
    double h = 0.08 + 0.12 * unit(rng);
    if (unit(rng) < 0.5) {
      double d = 0.04 + 0.06 * unit(rng);  // diameter
      return Cylinder{d * 0.5, h};
    }
    double w = 0.04 + 0.06 * unit(rng);
    double d = 0.04 + 0.06 * unit(rng);
    return Cuboid{w, d, h};
  };

  // Obstacles mostly crowd an annulus around the target so retrieval needs
  // genuine rearrangement; the rest scatter anywhere.
  std::optional<Vec3d> target_pos;

  auto try_place = [&](const Shape& shape, bool rear_half, SceneObject& out) -> bool {
    double h = std::visit([](const auto& s) { return s.h; }, shape);
    double rxy;
    if (std::holds_alternative<Cylinder>(shape)) {
      rxy = std::get<Cylinder>(shape).r;
    } else {
      const auto& c = std::get<Cuboid>(shape);
      rxy = 0.5 * std::sqrt(c.w * c.w + c.d * c.d);
    }
    double x_lo = spec.origin.x + wall_margin + rxy;
    double x_hi = spec.origin.x + ext.x - wall_margin - rxy;
    double y_lo = spec.origin.y + rxy + (rear_half ? ext.y * 0.5 : vs);
    double y_hi = spec.origin.y + ext.y - wall_margin - rxy;
    if (x_lo >= x_hi || y_lo >= y_hi) return false;
    Vec3d pos{x_lo + (x_hi - x_lo) * unit(rng), y_lo + (y_hi - y_lo) * unit(rng),
              floor_z + h * 0.5};
    if (!rear_half && target_pos && unit(rng) < 0.7) {
      double ang = unit(rng) * 2.0 * 3.141592653589793;
      double dist = 0.06 + 0.16 * unit(rng);
      pos.x = std::clamp(target_pos->x + std::cos(ang) * dist, x_lo, x_hi);
      pos.y = std::clamp(target_pos->y + std::sin(ang) * dist, y_lo, y_hi);
    }
    double yaw = std::holds_alternative<Cuboid>(shape) ? unit(rng) * 3.141592653589793 : 0.0;
    std::vector<int32_t> fp;
    try {
      fp = rasterize_object(shape, pos, yaw, spec);
    } catch (const std::out_of_range&) {
      return false;
    }
    if (fp.empty() || !footprint_clear(fp, gt.cells)) return false;
    out.shape = shape;
    out.position = pos;
    out.yaw = yaw;
    out.footprint = std::move(fp);
    return true;
  };

  auto stamp = [&](const SceneObject& obj) {
    for (int32_t idx : obj.footprint) gt.cells[idx] = Cell::occupied(obj.id);
  };
  auto erase = [&](const SceneObject& obj) {
    for (int32_t idx : obj.footprint) gt.cells[idx] = Cell::free();
  };

  while (true) {
    if (!budget_ok()) throw PlacementFailure("generate_scene: placement attempts exhausted");

    gt.objects.clear();
    fill_walls(spec, gt.cells);

    SceneObject target;
    target.id = 0;
    target_pos.reset();
    if (!try_place(sample_shape(true), /*rear_half=*/true, target)) continue;
    stamp(target);
    gt.objects.push_back(target);
    gt.target_id = 0;
    target_pos = target.position;

    bool ok = true;
    for (int i = 0; i < n_obstacles; ++i) {
      SceneObject obs;
      obs.id = int(gt.objects.size());
      bool placed = false;
      for (int t = 0; t < 50 && !placed; ++t) {
        if (!budget_ok()) throw PlacementFailure("generate_scene: placement attempts exhausted");
        placed = try_place(sample_shape(false), /*rear_half=*/false, obs);
      }
      if (!placed) {
        ok = false;
        break;
      }
      stamp(obs);
      gt.objects.push_back(obs);
    }
    if (!ok) continue;

    if (options.require_corridor_blocker && n_obstacles > 0) {
      RegionMask corridor = straight_corridor(gt);
      bool blocked = false;
      for (const auto& obj : gt.objects) {
        if (obj.id == gt.target_id) continue;
        blocked = std::ranges::any_of(obj.footprint, [&](int32_t idx) {
          return std::binary_search(corridor.voxels.begin(), corridor.voxels.end(), idx);
        });
        if (blocked) break;
      }
      if (!blocked) {
        // Drag the nearest obstacle into the corridor instead of resampling
        // the whole scene: pick the obstacle whose centroid is closest to the
        // corridor axis and retry its placement constrained to the corridor.
        SceneObject& cand = gt.objects[1 + int(unit(rng) * n_obstacles) % n_obstacles];
        erase(cand);
        Vec3d tpos = gt.target().position;
        bool moved = false;
        for (int t = 0; t < 80 && !moved; ++t) {
          if (!budget_ok()) throw PlacementFailure("generate_scene: placement attempts exhausted");
          double y_lo = spec.origin.y + 2 * vs;
          double y_hi = tpos.y - 2 * vs;
          if (y_lo >= y_hi) break;
          double h = std::visit([](const auto& s) { return s.h; }, cand.shape);
          Vec3d pos{tpos.x + (unit(rng) - 0.5) * 0.04, y_lo + (y_hi - y_lo) * unit(rng),
                    floor_z + h * 0.5};
          std::vector<int32_t> fp;
          try {
            fp = rasterize_object(cand.shape, pos, cand.yaw, spec);
          } catch (const std::out_of_range&) {
            continue;
          }
          if (fp.empty() || !footprint_clear(fp, gt.cells)) continue;
          cand.position = pos;
          cand.footprint = std::move(fp);
          moved = true;
        }
        if (!moved) continue;
        stamp(cand);
        RegionMask corridor2 = straight_corridor(gt);
        bool now_blocked = false;
        for (const auto& obj : gt.objects) {
          if (obj.id == gt.target_id) continue;
          now_blocked = std::ranges::any_of(obj.footprint, [&](int32_t idx) {
            return std::binary_search(corridor2.voxels.begin(), corridor2.voxels.end(), idx);
          });
          if (now_blocked) break;
        }
        if (!now_blocked) continue;
      }
    }
    return gt;
  }
}

}  // namespace shelf
