#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shelf/grid.hpp"

namespace shelf {

struct GripperSpec {
  double width = 0.06, depth = 0.06, height = 0.06;  // box extents (x, y, z)
  int clearance = 1;                                 // sweep dilation, voxels
};

// Voxel offsets relative to a reference cell. Upright shapes decompose into
// an xy cross-section extruded over [z_lo, z_hi], which fit_mask exploits.
struct Footprint {
  std::vector<Vec3i> offsets;
  bool prism = false;
  std::vector<Vec3i> xy;  // cross-section offsets, z = 0
  int z_lo = 0, z_hi = 0;
};

Footprint make_footprint(std::vector<Vec3i> offsets);
Footprint box_footprint(double width, double depth, double height, double voxel_size);
Footprint gripper_footprint(const GripperSpec& g, double voxel_size);

// An object as the planner knows it: registered footprint plus bookkeeping.
struct KnownObject {
  int id = -1;
  bool is_target = false;
  Vec3i ref;                   // voxel containing the pose center
  Footprint offsets;           // footprint cells relative to ref
  Vec3d centroid;              // metric centroid of the footprint
};

KnownObject make_known_object(const SceneObject& obj, const GridSpec& spec, bool is_target);
std::vector<KnownObject> known_objects(const GroundTruthScene& gt, const BeliefGrid& belief);

// Gripper reference positions live on a lattice extended by `margin` cells
// beyond the open (-y) face; everything out there is free space.
struct PlanningGrid {
  GridSpec spec;
  int margin = 12;
  std::vector<uint8_t> solid;  // shelf cells only; y < 0 is implicitly free

  bool lattice_contains(const Vec3i& v) const {
    return v.x >= 0 && v.x < spec.dims.x && v.y >= -margin && v.y < spec.dims.y && v.z >= 0 &&
           v.z < spec.dims.z;
  }
  int lattice_size() const { return spec.dims.x * (spec.dims.y + margin) * spec.dims.z; }
  int lattice_flat(const Vec3i& v) const {
    return v.x + spec.dims.x * ((v.y + margin) + (spec.dims.y + margin) * v.z);
  }
  Vec3i lattice_unflat(int idx) const {
    int nx = spec.dims.x, nye = spec.dims.y + margin;
    return {idx % nx, (idx / nx) % nye - margin, idx / (nx * nye)};
  }
  bool cell_solid(const Vec3i& v) const {
    if (v.y < 0) return !(v.x >= 0 && v.x < spec.dims.x && v.z >= 0 && v.z < spec.dims.z);
    if (!spec.in_bounds(v)) return true;
    return solid[spec.flat(v)] != 0;
  }
};

// Which cell states block motion. Walls always do.
struct ObstacleRule {
  bool unobserved_solid = true;
  bool occupied_solid = true;
  std::vector<int> ignore_ids;  // sorted; occupied cells of these ids never block
};

PlanningGrid make_planning_grid(const GridSpec& spec, const std::vector<Cell>& cells,
                                const ObstacleRule& rule, int margin = 12);

// True where the footprint fits with its reference at the lattice cell.
std::vector<uint8_t> fit_mask(const PlanningGrid& grid, const Footprint& fp);
bool fits_at(const PlanningGrid& grid, const Footprint& fp, const Vec3i& ref);

// Fit mask for a gripper carrying an object rigidly at attach_delta
// (object ref - gripper ref), one shifted AND over the two part masks.
std::vector<uint8_t> carry_fit_mask(const PlanningGrid& grid, const Footprint& gripper_fp,
                                    const Footprint& object_fp, const Vec3i& attach_delta);

struct Path {
  std::vector<Vec3i> refs;  // consecutive refs differ by one 6-connected step
  int attached_object = -1;

  int steps() const { return refs.empty() ? 0 : int(refs.size()) - 1; }
  double cost(double voxel_size) const { return steps() * voxel_size; }
  Path reversed() const {
    Path p = *this;
    std::reverse(p.refs.begin(), p.refs.end());
    return p;
  }
};

// Shortest 6-connected lattice path by A* with a Euclidean heuristic and
// deterministic tie-breaking. Throws std::invalid_argument if the start
// does not fit; returns nullopt when the goal is unreachable.
std::optional<Path> plan_path(const PlanningGrid& grid, const Footprint& fp, const Vec3i& start,
                              const Vec3i& goal);

// Breadth-first reachability over a fit mask (6-connected), with parents for
// shortest-path extraction.
struct FloodResult {
  std::vector<uint8_t> reach;    // lattice-indexed
  std::vector<int32_t> parent;   // lattice flat index of predecessor, -1 at start
  Vec3i start;
};
FloodResult flood_fill(const PlanningGrid& grid, const std::vector<uint8_t>& fit,
                       const Vec3i& start, bool want_parents = true);
std::optional<Path> extract_path(const PlanningGrid& grid, const FloodResult& flood,
                                 const Vec3i& goal);

struct SweptVolume {
  std::vector<int32_t> voxels;  // sorted in-grid flat indices

  bool contains(int32_t idx) const {
    return std::binary_search(voxels.begin(), voxels.end(), idx);
  }
};

// Union of the footprint over all path positions, dilated by `clearance`
// (Chebyshev), clipped to the shelf grid.
SweptVolume swept_volume(const GridSpec& spec, const Path& path, const Footprint& fp,
                         int clearance);
SweptVolume merge_sweeps(const SweptVolume& a, const SweptVolume& b);
std::vector<int32_t> raw_sweep_cells(const GridSpec& spec, const Path& path, const Footprint& fp);

// Canonical gripper start pose outside the open face.
Vec3i staging_cell(const PlanningGrid& grid);

struct GraspCandidate {
  Vec3i gripper_ref;
  int lateral = 0;   // x offset from the object's reference column
  int height = 0;    // 0 = low, 1 = mid
};

// Frontal (-y approach) grasp poses: up to 5 lateral offsets x 2 heights
// around the object's reference column, discarding poses whose gripper box
// overlaps solid cells of `grid`.
std::vector<GraspCandidate> grasp_candidates(const KnownObject& obj, const PlanningGrid& grid,
                                             const GripperSpec& gripper);

// Combined gripper+object footprint for a rigid grasp, relative to the
// gripper reference. attach_delta = object ref - gripper ref.
Footprint combined_footprint(const Footprint& gripper_fp, const Footprint& object_fp,
                             const Vec3i& attach_delta);

struct PlacementCandidate {
  Vec3i ref;        // object reference cell
  double distance;  // metric displacement from the anchor
};

enum class PlacementRegion { OutsideForbidden, Anywhere };

struct PlacementQuery {
  const PlanningGrid* grid = nullptr;        // effective cells WITHOUT the object
  const std::vector<uint8_t>* forbidden = nullptr;  // shelf-grid bitmap (swept volume)
  const std::vector<uint8_t>* required_overlap = nullptr;  // shelf-grid bitmap, optional
  Footprint object_fp;
  Footprint gripper_fp;
  Vec3i attach_delta;      // object ref - gripper ref
  Vec3i current_ref;
  Vec3d anchor;
  int max_count = 3;
  PlacementRegion region = PlacementRegion::OutsideForbidden;
};

// Lattice placements where the object footprint sits on known-Free cells,
// honors the forbidden region, and the carried gripper+object can reach the
// pose from the open face. Sorted by ascending distance from the anchor.
std::vector<PlacementCandidate> feasible_placements(const PlacementQuery& q);

}  // namespace shelf
