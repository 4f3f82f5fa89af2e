#include "shelf/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shelf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Core grid walk. visit(flat_idx, voxel) returns false to stop (the voxel
// itself has already been visited).
template <typename Visit>
void traverse(const GridSpec& spec, const Vec3d& origin, const Vec3d& dir, double max_range,
              Visit&& visit) {
  const Vec3d gmin = spec.origin;
  const Vec3d gmax = spec.origin + spec.extent();

  double t0 = 0.0, t1 = max_range;
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  const double lo[3] = {gmin.x, gmin.y, gmin.z};
  const double hi[3] = {gmax.x, gmax.y, gmax.z};
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < lo[a] || o[a] > hi[a]) return;
      continue;
    }
    double ta = (lo[a] - o[a]) / d[a];
    double tb = (hi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 >= t1) return;

  Vec3d p = origin + dir * (t0 > 0.0 ? t0 + 1e-9 : 0.0);
  Vec3i v = spec.voxel_at(p);
  v.x = std::clamp(v.x, 0, spec.dims.x - 1);
  v.y = std::clamp(v.y, 0, spec.dims.y - 1);
  v.z = std::clamp(v.z, 0, spec.dims.z - 1);

  int step[3];
  double t_max[3], t_delta[3];
  const double vs = spec.voxel_size;
  int vi[3] = {v.x, v.y, v.z};
  const int dims[3] = {spec.dims.x, spec.dims.y, spec.dims.z};
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) {
      step[a] = 1;
      t_max[a] = (lo[a] + (vi[a] + 1) * vs - o[a]) / d[a];
      t_delta[a] = vs / d[a];
    } else if (d[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (lo[a] + vi[a] * vs - o[a]) / d[a];
      t_delta[a] = vs / -d[a];
    } else {
      step[a] = 0;
      t_max[a] = kInf;
      t_delta[a] = kInf;
    }
  }

  const int stride[3] = {1, spec.dims.x, spec.dims.x * spec.dims.y};
  int idx = vi[0] + spec.dims.x * (vi[1] + spec.dims.y * vi[2]);
  double t_entry = t0;
  while (t_entry < max_range) {
    if (!visit(idx, Vec3i{vi[0], vi[1], vi[2]})) return;
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    t_entry = t_max[axis];
    vi[axis] += step[axis];
    if (vi[axis] < 0 || vi[axis] >= dims[axis]) return;
    idx += step[axis] * stride[axis];
    t_max[axis] += t_delta[axis];
  }
}

}  // namespace

RayHit cast_ray(const GridSpec& spec, const std::vector<Cell>& cells, const Vec3d& origin,
                const Vec3d& dir, double max_range) {
  RayHit out;
  traverse(spec, origin, dir, max_range, [&](int idx, const Vec3i& v) {
    out.traversed.push_back(v);
    Cell c = cells[idx];
    if (c.is_occupied() || c.is_wall()) {
      out.hit = v;
      return false;
    }
    return true;
  });
  return out;
}

void camera_basis(const Vec3d& look_dir, Vec3d& right, Vec3d& up) {
  Vec3d up0{0.0, 0.0, 1.0};
  if (std::abs(look_dir.dot(up0)) > 0.99) up0 = {0.0, 1.0, 0.0};
  right = look_dir.cross(up0).normalized();
  up = right.cross(look_dir).normalized();
}

Vec3d pixel_ray(const Intrinsics& intr, const Vec3d& look_dir, const Vec3d& right, const Vec3d& up,
                int u, int v) {
  double tan_h = std::tan(intr.hfov * 0.5);
  double tan_v = std::tan(intr.vfov * 0.5);
  double cu = tan_h * (2.0 * (u + 0.5) / intr.rays_u - 1.0);
  double cv = tan_v * (2.0 * (v + 0.5) / intr.rays_v - 1.0);
  return (look_dir + right * cu + up * cv).normalized();
}

int apply_viewpoint(const GroundTruthScene& gt, BeliefGrid& belief, const Viewpoint& vp,
                    const Intrinsics& intr, double min_target_fraction) {
  const GridSpec& spec = gt.spec;
  Vec3i pv = spec.voxel_at(vp.position);
  if (spec.in_bounds(pv)) {
    Cell c = gt.cells[spec.flat(pv)];
    if (c.is_wall() || c.is_occupied())
      throw std::invalid_argument("apply_viewpoint: viewpoint inside solid cell");
  }

  Vec3d right, up;
  camera_basis(vp.look_dir, right, up);

  int newly = 0;
  auto mark = [&](int idx) {
    if (belief.cells[idx].is_unobserved()) {
      Cell truth = gt.cells[idx];
      belief.cells[idx] = truth;
      ++belief.observed_count;
      ++newly;
      if (truth.is_occupied()) ++belief.direct_seen[truth.object_id()];
    }
  };

  for (int v = 0; v < intr.rays_v; ++v) {
    for (int u = 0; u < intr.rays_u; ++u) {
      Vec3d dir = pixel_ray(intr, vp.look_dir, right, up, u, v);
      traverse(spec, vp.position, dir, intr.max_range, [&](int idx, const Vec3i&) {
        mark(idx);
        Cell c = gt.cells[idx];
        return !(c.is_occupied() || c.is_wall());
      });
    }
  }

  // Perfect-segmentation registration: reveal whole footprints.
  for (const auto& obj : gt.objects) {
    if (belief.registered[obj.id]) continue;
    bool trigger;
    if (obj.id == gt.target_id) {
      trigger = double(belief.direct_seen[obj.id]) >=
                min_target_fraction * double(obj.footprint.size()) - 1e-9;
    } else {
      trigger = belief.direct_seen[obj.id] > 0;
    }
    if (!trigger) continue;
    belief.registered[obj.id] = 1;
    for (int32_t idx : obj.footprint) {
      if (belief.cells[idx].is_unobserved()) {
        belief.cells[idx] = gt.cells[idx];
        ++belief.observed_count;
        ++newly;
      }
    }
  }
  return newly;
}

namespace {

int gain_impl(const BeliefGrid& belief, const Viewpoint& vp, const Intrinsics& intr,
              const std::vector<uint8_t>* region_bitmap, GainScratch* scratch) {
  GainScratch local;
  GainScratch& s = scratch ? *scratch : local;
  if (s.stamp.size() != size_t(belief.spec.cell_count())) {
    s.stamp.assign(belief.spec.cell_count(), 0);
    s.epoch = 0;
  }
  if (++s.epoch == 0) {  // wrapped
    std::fill(s.stamp.begin(), s.stamp.end(), 0);
    s.epoch = 1;
  }
  const uint32_t epoch = s.epoch;

  Vec3d right, up;
  camera_basis(vp.look_dir, right, up);

  int gain = 0;
  for (int v = 0; v < intr.rays_v; ++v) {
    for (int u = 0; u < intr.rays_u; ++u) {
      Vec3d dir = pixel_ray(intr, vp.look_dir, right, up, u, v);
      traverse(belief.spec, vp.position, dir, intr.max_range, [&](int idx, const Vec3i&) {
        Cell c = belief.cells[idx];
        if (c.is_occupied() || c.is_wall()) return false;  // known solid stops the ray
        if (c.is_unobserved() && s.stamp[idx] != epoch) {
          s.stamp[idx] = epoch;
          if (!region_bitmap || (*region_bitmap)[idx]) ++gain;
        }
        return true;  // Free and Unobserved are transparent
      });
    }
  }
  return gain;
}

}  // namespace

int frustum_gain(const BeliefGrid& belief, const Viewpoint& vp, const Intrinsics& intr,
                 GainScratch* scratch) {
  return gain_impl(belief, vp, intr, nullptr, scratch);
}

int region_gain(const BeliefGrid& belief, const Viewpoint& vp, const Intrinsics& intr,
                const std::vector<uint8_t>& region_bitmap, GainScratch* scratch) {
  return gain_impl(belief, vp, intr, &region_bitmap, scratch);
}

std::vector<int> score_viewpoints_serial(const BeliefGrid& belief,
                                         const std::vector<Viewpoint>& candidates,
                                         const Intrinsics& intr,
                                         const std::vector<uint8_t>& region_bitmap) {
  std::vector<int> scores(candidates.size(), 0);
  GainScratch scratch;
  const std::vector<uint8_t>* region = region_bitmap.empty() ? nullptr : &region_bitmap;
  for (size_t i = 0; i < candidates.size(); ++i)
    scores[i] = gain_impl(belief, candidates[i], intr, region, &scratch);
  return scores;
}

std::vector<int> score_viewpoints_parallel(const BeliefGrid& belief,
                                           const std::vector<Viewpoint>& candidates,
                                           const Intrinsics& intr,
                                           const std::vector<uint8_t>& region_bitmap) {
  std::vector<int> scores(candidates.size(), 0);
  const std::vector<uint8_t>* region = region_bitmap.empty() ? nullptr : &region_bitmap;
#pragma omp parallel
  {
    GainScratch scratch;
#pragma omp for schedule(dynamic)
    for (int i = 0; i < int(candidates.size()); ++i)
      scores[i] = gain_impl(belief, candidates[i], intr, region, &scratch);
  }
  return scores;
}

std::vector<int> score_viewpoints(const BeliefGrid& belief,
                                  const std::vector<Viewpoint>& candidates, const Intrinsics& intr,
                                  const std::vector<uint8_t>& region_bitmap) {
#ifdef _OPENMP
  if (candidates.size() > 1 && omp_get_max_threads() > 1)
    return score_viewpoints_parallel(belief, candidates, intr, region_bitmap);
#endif
  return score_viewpoints_serial(belief, candidates, intr, region_bitmap);
}

}  // namespace shelf
