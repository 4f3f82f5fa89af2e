#pragma once

#include <optional>
#include <vector>

#include "shelf/grid.hpp"

namespace shelf {

struct Intrinsics {
  double hfov = 70.0 * 3.141592653589793 / 180.0;
  double vfov = 55.0 * 3.141592653589793 / 180.0;
  int rays_u = 160;
  int rays_v = 120;
  double max_range = 1.5;
};

struct Viewpoint {
  Vec3d position;
  Vec3d look_dir;  // unit vector
  int id = -1;
};

struct RayHit {
  std::vector<Vec3i> traversed;  // includes the hit voxel when present
  std::optional<Vec3i> hit;
};

// Amanatides-Woo traversal of the segment [origin, origin + max_range*dir].
// A voxel is traversed if the ray enters it before max_range; the walk stops
// at (and includes) the first Occupied or Wall cell.
RayHit cast_ray(const GridSpec& spec, const std::vector<Cell>& cells, const Vec3d& origin,
                const Vec3d& dir, double max_range);

// Orthonormal camera basis from a look direction (right, up).
void camera_basis(const Vec3d& look_dir, Vec3d& right, Vec3d& up);

// Pinhole ray direction for pixel (u, v) with pixel-center sampling.
Vec3d pixel_ray(const Intrinsics& intr, const Vec3d& look_dir, const Vec3d& right, const Vec3d& up,
                int u, int v);

// Marks all frustum-ray traversed and hit voxels with their ground-truth
// state. An object registers (its whole footprint is revealed, simulating
// perfect segmentation) once rays directly hit at least one of its voxels;
// the target instead requires min_target_fraction of its footprint. Returns
// the number of cells that left Unobserved. Throws std::invalid_argument if
// the viewpoint sits inside a Wall or Occupied ground-truth voxel.
int apply_viewpoint(const GroundTruthScene& gt, BeliefGrid& belief, const Viewpoint& vp,
                    const Intrinsics& intr, double min_target_fraction = 0.3);

// Scratch space for gain scoring; reusable across calls, one per thread.
struct GainScratch {
  std::vector<uint32_t> stamp;
  uint32_t epoch = 0;
};

// Casts frustum rays against the belief with Unobserved treated as
// transparent; counts distinct Unobserved voxels traversed before each ray's
// first known-Occupied/Wall cell.
int frustum_gain(const BeliefGrid& belief, const Viewpoint& vp, const Intrinsics& intr,
                 GainScratch* scratch = nullptr);

// Same traversal, but counts only distinct unobserved voxels inside the
// region (used by region-specific sensing).
int region_gain(const BeliefGrid& belief, const Viewpoint& vp, const Intrinsics& intr,
                const std::vector<uint8_t>& region_bitmap, GainScratch* scratch = nullptr);

// Batch candidate scoring. region_bitmap empty => plain frustum gain.
// Serial reference and OpenMP kernel produce identical scores.
std::vector<int> score_viewpoints_serial(const BeliefGrid& belief,
                                         const std::vector<Viewpoint>& candidates,
                                         const Intrinsics& intr,
                                         const std::vector<uint8_t>& region_bitmap);
std::vector<int> score_viewpoints_parallel(const BeliefGrid& belief,
                                           const std::vector<Viewpoint>& candidates,
                                           const Intrinsics& intr,
                                           const std::vector<uint8_t>& region_bitmap);
std::vector<int> score_viewpoints(const BeliefGrid& belief,
                                  const std::vector<Viewpoint>& candidates, const Intrinsics& intr,
                                  const std::vector<uint8_t>& region_bitmap = {});

}  // namespace shelf
