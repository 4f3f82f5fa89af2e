#include "shelf/grid.hpp"

#include <algorithm>
#include <cmath>

namespace shelf {

Vec3d SceneObject::centroid(const GridSpec& spec) const {
  Vec3d sum{0, 0, 0};
  for (int32_t idx : footprint) sum = sum + spec.center(spec.unflat(idx));
  return footprint.empty() ? position : sum / double(footprint.size());
}

RegionMask GroundTruthScene::interior() const {
  RegionMask m;
  for (int i = 0; i < spec.cell_count(); ++i)
    if (!cells[i].is_wall()) m.voxels.push_back(i);
  return m;
}

BeliefGrid BeliefGrid::make_unobserved(const GroundTruthScene& gt) {
  BeliefGrid b;
  b.spec = gt.spec;
  b.cells.assign(gt.spec.cell_count(), Cell::unobserved());
  b.observed_count = 0;
  b.direct_seen.assign(gt.objects.size(), 0);
  b.registered.assign(gt.objects.size(), 0);
  return b;
}

RegionMask BeliefGrid::unobserved_mask() const {
  RegionMask m;
  for (int i = 0; i < spec.cell_count(); ++i)
    if (cells[i].is_unobserved()) m.voxels.push_back(i);
  return m;
}

namespace {

bool center_in_shape(const Shape& shape, const Vec3d& position, double yaw, const Vec3d& p) {
  Vec3d d = p - position;
  if (std::abs(d.z) > std::visit([](const auto& s) { return s.h; }, shape) * 0.5) return false;
  if (std::holds_alternative<Cylinder>(shape)) {
    const auto& c = std::get<Cylinder>(shape);
    return d.x * d.x + d.y * d.y <= c.r * c.r;
  }
  const auto& c = std::get<Cuboid>(shape);
  double cs = std::cos(-yaw), sn = std::sin(-yaw);
  double lx = cs * d.x - sn * d.y;
  double ly = sn * d.x + cs * d.y;
  return std::abs(lx) <= c.w * 0.5 && std::abs(ly) <= c.d * 0.5;
}

}  // namespace

std::vector<int32_t> rasterize_object(const Shape& shape, const Vec3d& position, double yaw,
                                      const GridSpec& spec) {
  double rxy, h;
  if (std::holds_alternative<Cylinder>(shape)) {
    const auto& c = std::get<Cylinder>(shape);
    rxy = c.r;
    h = c.h;
  } else {
    const auto& c = std::get<Cuboid>(shape);
    rxy = 0.5 * std::sqrt(c.w * c.w + c.d * c.d);
    h = c.h;
  }
  Vec3d lo{position.x - rxy, position.y - rxy, position.z - h * 0.5};
  Vec3d hi{position.x + rxy, position.y + rxy, position.z + h * 0.5};
  Vec3d gmin = spec.origin;
  Vec3d gmax = spec.origin + spec.extent();
  if (lo.x < gmin.x || lo.y < gmin.y || lo.z < gmin.z || hi.x > gmax.x || hi.y > gmax.y ||
      hi.z > gmax.z) {
    throw std::out_of_range("rasterize_object: shape exits the grid");
  }

  Vec3i vlo = spec.voxel_at(lo);
  Vec3i vhi = spec.voxel_at(hi);
  auto clamp = [](int v, int lo_, int hi_) { return std::max(lo_, std::min(hi_, v)); };
  vlo = {clamp(vlo.x, 0, spec.dims.x - 1), clamp(vlo.y, 0, spec.dims.y - 1),
         clamp(vlo.z, 0, spec.dims.z - 1)};
  vhi = {clamp(vhi.x, 0, spec.dims.x - 1), clamp(vhi.y, 0, spec.dims.y - 1),
         clamp(vhi.z, 0, spec.dims.z - 1)};

  std::vector<int32_t> out;
  for (int z = vlo.z; z <= vhi.z; ++z)
    for (int y = vlo.y; y <= vhi.y; ++y)
      for (int x = vlo.x; x <= vhi.x; ++x) {
        Vec3i v{x, y, z};
        if (center_in_shape(shape, position, yaw, spec.center(v))) out.push_back(spec.flat(v));
      }
  std::sort(out.begin(), out.end());
  return out;
}

double coverage(const RegionMask& region, const BeliefGrid& belief) {
  if (region.empty()) throw std::invalid_argument("coverage: empty region");
  int observed = 0;
  for (int32_t idx : region.voxels)
    if (belief.cells[idx].observed()) ++observed;
  return double(observed) / double(region.size());
}

namespace {

// 26-connected flood fill over a membership bitmap.
std::vector<RegionMask> components_over(const GridSpec& spec, const std::vector<uint8_t>& member) {
  std::vector<uint8_t> seen(member.size(), 0);
  std::vector<RegionMask> out;
  std::vector<int32_t> stack;
  const int nx = spec.dims.x, ny = spec.dims.y, nz = spec.dims.z;
  for (int32_t start = 0; start < int32_t(member.size()); ++start) {
    if (!member[start] || seen[start]) continue;
    RegionMask comp;
    stack.clear();
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      int32_t idx = stack.back();
      stack.pop_back();
      comp.voxels.push_back(idx);
      Vec3i v = spec.unflat(idx);
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            int x = v.x + dx, y = v.y + dy, z = v.z + dz;
            if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) continue;
            int32_t n = idx + dx + nx * (dy + ny * dz);
            if (member[n] && !seen[n]) {
              seen[n] = 1;
              stack.push_back(n);
            }
          }
    }
    std::sort(comp.voxels.begin(), comp.voxels.end());
    out.push_back(std::move(comp));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RegionMask& a, const RegionMask& b) { return a.size() > b.size(); });
  return out;
}

}  // namespace

std::vector<RegionMask> grow_regions(const GridSpec& spec, const std::vector<Cell>& cells,
                                     const std::function<bool(Cell)>& predicate) {
  std::vector<uint8_t> member(cells.size(), 0);
  for (size_t i = 0; i < cells.size(); ++i) member[i] = predicate(cells[i]) ? 1 : 0;
  return components_over(spec, member);
}

std::vector<RegionMask> split_components(const GridSpec& spec, const std::vector<int32_t>& voxels) {
  std::vector<uint8_t> member(spec.cell_count(), 0);
  for (int32_t idx : voxels) member[idx] = 1;
  return components_over(spec, member);
}

Vec3d mask_centroid(const GridSpec& spec, const RegionMask& region) {
  Vec3d sum{0, 0, 0};
  for (int32_t idx : region.voxels) sum = sum + spec.center(spec.unflat(idx));
  return region.empty() ? sum : sum / double(region.size());
}

}  // namespace shelf
