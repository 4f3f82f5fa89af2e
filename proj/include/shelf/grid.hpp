#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "shelf/geometry.hpp"

namespace shelf {

// Dense axis-aligned voxel lattice. The shelf box interior is surrounded by
// Wall cells on every boundary face except the open (-y) face.
struct GridSpec {
  Vec3i dims{1, 1, 1};
  double voxel_size = 0.02;
  Vec3d origin{0.0, 0.0, 0.0};

  int cell_count() const { return dims.x * dims.y * dims.z; }
  bool in_bounds(const Vec3i& v) const {
    return v.x >= 0 && v.x < dims.x && v.y >= 0 && v.y < dims.y && v.z >= 0 && v.z < dims.z;
  }
  int flat(const Vec3i& v) const { return v.x + dims.x * (v.y + dims.y * v.z); }
  Vec3i unflat(int idx) const {
    int x = idx % dims.x;
    int y = (idx / dims.x) % dims.y;
    int z = idx / (dims.x * dims.y);
    return {x, y, z};
  }
  Vec3d center(const Vec3i& v) const {
    return {origin.x + (v.x + 0.5) * voxel_size,
            origin.y + (v.y + 0.5) * voxel_size,
            origin.z + (v.z + 0.5) * voxel_size};
  }
  Vec3i voxel_at(const Vec3d& p) const {
    return {int(std::floor((p.x - origin.x) / voxel_size)),
            int(std::floor((p.y - origin.y) / voxel_size)),
            int(std::floor((p.z - origin.z) / voxel_size))};
  }
  Vec3d extent() const {
    return {dims.x * voxel_size, dims.y * voxel_size, dims.z * voxel_size};
  }
  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.dims == b.dims && a.voxel_size == b.voxel_size && a.origin == b.origin;
  }
};

// Cell state, one of Unobserved / Free / Wall / Occupied(object id), packed
// into 16 bits so a Small shelf belief fits in 24 KB.
class Cell {
 public:
  Cell() : v_(kUnobserved) {}

  static Cell unobserved() { return Cell(kUnobserved); }
  static Cell free() { return Cell(kFree); }
  static Cell wall() { return Cell(kWall); }
  static Cell occupied(int object_id) { return Cell(int16_t(kOccupiedBase + object_id)); }

  bool is_unobserved() const { return v_ == kUnobserved; }
  bool is_free() const { return v_ == kFree; }
  bool is_wall() const { return v_ == kWall; }
  bool is_occupied() const { return v_ >= kOccupiedBase; }
  bool observed() const { return v_ != kUnobserved; }
  int object_id() const { return v_ - kOccupiedBase; }

  friend bool operator==(Cell a, Cell b) { return a.v_ == b.v_; }
  friend bool operator!=(Cell a, Cell b) { return a.v_ != b.v_; }

  int16_t raw() const { return v_; }
  static Cell from_raw(int16_t v) { return Cell(v); }

 private:
  explicit Cell(int16_t v) : v_(v) {}
  static constexpr int16_t kUnobserved = 0;
  static constexpr int16_t kFree = 1;
  static constexpr int16_t kWall = 2;
  static constexpr int16_t kOccupiedBase = 3;
  int16_t v_;
};

struct Cuboid {
  double w = 0.0, d = 0.0, h = 0.0;  // extents along x, y, z at yaw 0
};
struct Cylinder {
  double r = 0.0, h = 0.0;  // vertical axis
};
using Shape = std::variant<Cuboid, Cylinder>;

struct SceneObject {
  int id = -1;
  Shape shape;
  Vec3d position;   // shape center
  double yaw = 0.0; // rotation about z; cylinders are yaw-invariant
  std::vector<int32_t> footprint;  // sorted flat voxel indices

  Vec3d centroid(const GridSpec& spec) const;
};

struct RegionMask {
  std::vector<int32_t> voxels;  // sorted flat indices

  bool empty() const { return voxels.empty(); }
  size_t size() const { return voxels.size(); }
};

struct GroundTruthScene {
  GridSpec spec;
  std::vector<Cell> cells;  // no Unobserved entries
  std::vector<SceneObject> objects;
  int target_id = -1;
  uint64_t seed = 0;
  std::string size_class = "small";

  const SceneObject& target() const { return objects.at(target_id); }
  const SceneObject& object(int id) const { return objects.at(id); }
  bool is_movable(int id) const { return id != target_id; }
  RegionMask interior() const;  // all non-Wall cells
};

// Robot-known scene. Soundness invariant: every observed cell matches the
// ground truth. Objects become "registered" (full footprint revealed, the
// perfect-segmentation stand-in) once enough of them has been hit by rays:
// any voxel for obstacles, min_target_fraction of the footprint for the
// target.
struct BeliefGrid {
  GridSpec spec;
  std::vector<Cell> cells;
  int observed_count = 0;
  std::vector<int> direct_seen;       // per object id: voxels seen by rays
  std::vector<uint8_t> registered;    // per object id

  static BeliefGrid make_unobserved(const GroundTruthScene& gt);

  Cell at(const Vec3i& v) const { return cells[spec.flat(v)]; }
  bool is_registered(int id) const { return registered[id] != 0; }
  RegionMask unobserved_mask() const;
};

// Exact center-in-shape rasterization over the grid.
// Throws std::out_of_range if the shape's bounding box leaves the grid.
std::vector<int32_t> rasterize_object(const Shape& shape, const Vec3d& position, double yaw,
                                      const GridSpec& spec);

// Fraction of region voxels observed in the belief. Throws
// std::invalid_argument on an empty region.
double coverage(const RegionMask& region, const BeliefGrid& belief);

// Maximal 26-connected components of cells satisfying the predicate,
// sorted by descending size (ties: first-discovered in scan order).
std::vector<RegionMask> grow_regions(const GridSpec& spec, const std::vector<Cell>& cells,
                                     const std::function<bool(Cell)>& predicate);

// Connected components of an arbitrary voxel subset (26-connectivity).
std::vector<RegionMask> split_components(const GridSpec& spec, const std::vector<int32_t>& voxels);

Vec3d mask_centroid(const GridSpec& spec, const RegionMask& region);

}  // namespace shelf
