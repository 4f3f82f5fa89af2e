#include "shelf/gripper.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>

namespace shelf {

Footprint make_footprint(std::vector<Vec3i> offsets) {
  Footprint fp;
  fp.offsets = std::move(offsets);
  if (fp.offsets.empty()) return fp;

  // Detect an extruded cross-section: every (x, y) column spans the same
  // contiguous z range.
  std::vector<Vec3i> sorted = fp.offsets;
  std::sort(sorted.begin(), sorted.end(), [](const Vec3i& a, const Vec3i& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  });
  int z_lo = sorted.front().z;
  bool prism = true;
  std::vector<Vec3i> xy;
  size_t i = 0;
  int column_len = -1;
  while (i < sorted.size() && prism) {
    size_t j = i;
    while (j < sorted.size() && sorted[j].x == sorted[i].x && sorted[j].y == sorted[i].y) ++j;
    int len = int(j - i);
    if (column_len == -1) column_len = len;
    if (len != column_len || sorted[i].z != z_lo ||
        sorted[j - 1].z != z_lo + len - 1) {
      prism = false;
      break;
    }
    for (size_t k = i + 1; k < j; ++k)
      if (sorted[k].z != sorted[k - 1].z + 1) {
        prism = false;
        break;
      }
    xy.push_back({sorted[i].x, sorted[i].y, 0});
    i = j;
  }
  if (prism) {
    fp.prism = true;
    fp.xy = std::move(xy);
    fp.z_lo = z_lo;
    fp.z_hi = z_lo + column_len - 1;
  }
  return fp;
}

Footprint box_footprint(double width, double depth, double height, double voxel_size) {
  auto cells = [&](double extent) { return std::max(1, int(std::lround(extent / voxel_size))); };
  int nx = cells(width), ny = cells(depth), nz = cells(height);
  std::vector<Vec3i> offsets;
  for (int z = -(nz - 1) / 2; z <= nz / 2; ++z)
    for (int y = -(ny - 1) / 2; y <= ny / 2; ++y)
      for (int x = -(nx - 1) / 2; x <= nx / 2; ++x) offsets.push_back({x, y, z});
  return make_footprint(std::move(offsets));
}

Footprint gripper_footprint(const GripperSpec& g, double voxel_size) {
  return box_footprint(g.width, g.depth, g.height, voxel_size);
}

KnownObject make_known_object(const SceneObject& obj, const GridSpec& spec, bool is_target) {
  KnownObject k;
  k.id = obj.id;
  k.is_target = is_target;
  k.ref = spec.voxel_at(obj.position);
  std::vector<Vec3i> offsets;
  for (int32_t idx : obj.footprint) offsets.push_back(spec.unflat(idx) - k.ref);
  k.offsets = make_footprint(std::move(offsets));
  k.centroid = obj.centroid(spec);
  return k;
}

std::vector<KnownObject> known_objects(const GroundTruthScene& gt, const BeliefGrid& belief) {
  std::vector<KnownObject> out;
  for (const auto& obj : gt.objects)
    if (belief.is_registered(obj.id))
      out.push_back(make_known_object(obj, gt.spec, obj.id == gt.target_id));
  return out;
}

PlanningGrid make_planning_grid(const GridSpec& spec, const std::vector<Cell>& cells,
                                const ObstacleRule& rule, int margin) {
  PlanningGrid grid;
  grid.spec = spec;
  grid.margin = margin;
  grid.solid.assign(spec.cell_count(), 0);
  for (int i = 0; i < spec.cell_count(); ++i) {
    Cell c = cells[i];
    bool s = false;
    if (c.is_wall()) {
      s = true;
    } else if (c.is_unobserved()) {
      s = rule.unobserved_solid;
    } else if (c.is_occupied()) {
      s = rule.occupied_solid &&
          !std::binary_search(rule.ignore_ids.begin(), rule.ignore_ids.end(), c.object_id());
    }
    grid.solid[i] = s ? 1 : 0;
  }
  return grid;
}

bool fits_at(const PlanningGrid& grid, const Footprint& fp, const Vec3i& ref) {
  for (const Vec3i& off : fp.offsets) {
    Vec3i v = ref + off;
    if (!grid.lattice_contains(v) || grid.cell_solid(v)) return false;
  }
  return true;
}

namespace {

// base[p + (0,0,dz)] for all dz in [z_lo, z_hi], via per-column zero prefix
// sums; O(lattice) regardless of the window length.
std::vector<uint8_t> erode_z_window(const PlanningGrid& grid, const std::vector<uint8_t>& base,
                                    int z_lo, int z_hi) {
  const int nx = grid.spec.dims.x;
  const int nz = grid.spec.dims.z;
  const int nye = grid.spec.dims.y + grid.margin;
  const size_t stride_z = size_t(nx) * nye;

  std::vector<uint8_t> out(base.size(), 0);
  std::vector<int> zeros(nz + 1);
  for (int ye = 0; ye < nye; ++ye) {
    for (int x = 0; x < nx; ++x) {
      size_t col = size_t(ye) * nx + x;
      zeros[0] = 0;
      for (int z = 0; z < nz; ++z) zeros[z + 1] = zeros[z] + (base[col + z * stride_z] ? 0 : 1);
      for (int z = 0; z < nz; ++z) {
        int a = z + z_lo, b = z + z_hi;
        if (a < 0 || b >= nz) continue;
        if (zeros[b + 1] - zeros[a] == 0) out[col + z * stride_z] = 1;
      }
    }
  }
  return out;
}

// out[p] &= src[p + off] over the extended lattice; out-of-lattice reads 0.
void shifted_and(const PlanningGrid& grid, std::vector<uint8_t>& out,
                 const std::vector<uint8_t>& src, const Vec3i& off) {
  const int nx = grid.spec.dims.x;
  const int nz = grid.spec.dims.z;
  const int nye = grid.spec.dims.y + grid.margin;
  for (int z = 0; z < nz; ++z) {
    int sz = z + off.z;
    for (int ye = 0; ye < nye; ++ye) {
      uint8_t* row = out.data() + (size_t(z) * nye + ye) * nx;
      int sy = ye + off.y;
      if (sz < 0 || sz >= nz || sy < 0 || sy >= nye) {
        std::fill(row, row + nx, uint8_t(0));
        continue;
      }
      const uint8_t* s = src.data() + (size_t(sz) * nye + sy) * nx;
      int x_lo = std::max(0, -off.x);
      int x_hi = std::min(nx, nx - off.x);
      for (int x = 0; x < x_lo; ++x) row[x] = 0;
      for (int x = x_lo; x < x_hi; ++x) row[x] &= s[x + off.x];
      for (int x = std::max(x_lo, x_hi); x < nx; ++x) row[x] = 0;
    }
  }
}

std::vector<uint8_t> free_bitmap(const PlanningGrid& grid) {
  const int nx = grid.spec.dims.x;
  const int ny = grid.spec.dims.y;
  const int nz = grid.spec.dims.z;
  const int nye = ny + grid.margin;
  std::vector<uint8_t> free_ext(grid.lattice_size());
  for (int z = 0; z < nz; ++z)
    for (int ye = 0; ye < nye; ++ye) {
      uint8_t* row = free_ext.data() + (size_t(z) * nye + ye) * nx;
      int y = ye - grid.margin;
      if (y < 0) {
        std::fill(row, row + nx, uint8_t(1));
      } else {
        const uint8_t* solid = grid.solid.data() + (size_t(z) * ny + y) * nx;
        for (int x = 0; x < nx; ++x) row[x] = solid[x] ? 0 : 1;
      }
    }
  return free_ext;
}

}  // namespace

std::vector<uint8_t> fit_mask(const PlanningGrid& grid, const Footprint& fp) {
  std::vector<uint8_t> free_ext = free_bitmap(grid);
  if (fp.prism) {
    std::vector<uint8_t> column = erode_z_window(grid, free_ext, fp.z_lo, fp.z_hi);
    std::vector<uint8_t> fits(grid.lattice_size(), 1);
    for (const Vec3i& off : fp.xy) shifted_and(grid, fits, column, off);
    return fits;
  }
  std::vector<uint8_t> fits(grid.lattice_size(), 1);
  for (const Vec3i& off : fp.offsets) shifted_and(grid, fits, free_ext, off);
  return fits;
}

std::vector<uint8_t> carry_fit_mask(const PlanningGrid& grid, const Footprint& gripper_fp,
                                    const Footprint& object_fp, const Vec3i& attach_delta) {
  std::vector<uint8_t> fits = fit_mask(grid, gripper_fp);
  std::vector<uint8_t> obj = fit_mask(grid, object_fp);
  shifted_and(grid, fits, obj, attach_delta);
  return fits;
}

namespace {

const Vec3i kSteps[6] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};

}  // namespace

std::optional<Path> plan_path(const PlanningGrid& grid, const Footprint& fp, const Vec3i& start,
                              const Vec3i& goal) {
  if (!grid.lattice_contains(start) || !fits_at(grid, fp, start))
    throw std::invalid_argument("plan_path: start does not fit");
  if (!grid.lattice_contains(goal) || !fits_at(grid, fp, goal)) return std::nullopt;

  const int n = grid.lattice_size();
  std::vector<int32_t> g_cost(n, -1);
  std::vector<int32_t> parent(n, -1);

  auto heuristic = [&](const Vec3i& v) {
    Vec3i d = goal - v;
    return std::sqrt(double(d.x) * d.x + double(d.y) * d.y + double(d.z) * d.z);
  };

  struct QEntry {
    double f;
    int64_t seq;
    int32_t idx;
    bool operator>(const QEntry& o) const {
      if (f != o.f) return f > o.f;
      return seq > o.seq;  // FIFO among ties; neighbors pushed in axis order
    }
  };
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> open;
  int64_t seq = 0;

  int32_t start_idx = grid.lattice_flat(start);
  int32_t goal_idx = grid.lattice_flat(goal);
  g_cost[start_idx] = 0;
  open.push({heuristic(start), seq++, start_idx});
  std::vector<uint8_t> closed(n, 0);

  while (!open.empty()) {
    QEntry top = open.top();
    open.pop();
    if (closed[top.idx]) continue;
    closed[top.idx] = 1;
    if (top.idx == goal_idx) break;
    Vec3i v = grid.lattice_unflat(top.idx);
    for (const Vec3i& s : kSteps) {
      Vec3i nv = v + s;
      if (!grid.lattice_contains(nv)) continue;
      int32_t ni = grid.lattice_flat(nv);
      if (closed[ni]) continue;
      int32_t ng = g_cost[top.idx] + 1;
      if (g_cost[ni] != -1 && g_cost[ni] <= ng) continue;
      if (!fits_at(grid, fp, nv)) continue;
      g_cost[ni] = ng;
      parent[ni] = top.idx;
      open.push({double(ng) + heuristic(nv), seq++, ni});
    }
  }
  if (g_cost[goal_idx] == -1 || !closed[goal_idx]) return std::nullopt;

  Path path;
  for (int32_t at = goal_idx; at != -1; at = parent[at]) path.refs.push_back(grid.lattice_unflat(at));
  std::reverse(path.refs.begin(), path.refs.end());
  return path;
}

FloodResult flood_fill(const PlanningGrid& grid, const std::vector<uint8_t>& fit,
                       const Vec3i& start, bool want_parents) {
  FloodResult out;
  out.start = start;
  out.reach.assign(grid.lattice_size(), 0);
  if (want_parents) out.parent.assign(grid.lattice_size(), -1);
  if (!grid.lattice_contains(start)) return out;
  int32_t si = grid.lattice_flat(start);
  if (!fit[si]) return out;

  std::vector<int32_t> queue;
  queue.reserve(1024);
  queue.push_back(si);
  out.reach[si] = 1;
  size_t head = 0;
  while (head < queue.size()) {
    int32_t idx = queue[head++];
    Vec3i v = grid.lattice_unflat(idx);
    for (const Vec3i& s : kSteps) {
      Vec3i nv = v + s;
      if (!grid.lattice_contains(nv)) continue;
      int32_t ni = grid.lattice_flat(nv);
      if (out.reach[ni] || !fit[ni]) continue;
      out.reach[ni] = 1;
      if (want_parents) out.parent[ni] = idx;
      queue.push_back(ni);
    }
  }
  return out;
}

std::optional<Path> extract_path(const PlanningGrid& grid, const FloodResult& flood,
                                 const Vec3i& goal) {
  if (!grid.lattice_contains(goal)) return std::nullopt;
  int32_t gi = grid.lattice_flat(goal);
  if (!flood.reach[gi]) return std::nullopt;
  Path path;
  for (int32_t at = gi; at != -1; at = flood.parent[at]) path.refs.push_back(grid.lattice_unflat(at));
  std::reverse(path.refs.begin(), path.refs.end());
  return path;
}

std::vector<int32_t> raw_sweep_cells(const GridSpec& spec, const Path& path, const Footprint& fp) {
  std::vector<uint8_t> mark(spec.cell_count(), 0);
  for (const Vec3i& ref : path.refs)
    for (const Vec3i& off : fp.offsets) {
      Vec3i v = ref + off;
      if (spec.in_bounds(v)) mark[spec.flat(v)] = 1;
    }
  std::vector<int32_t> out;
  for (int i = 0; i < spec.cell_count(); ++i)
    if (mark[i]) out.push_back(i);
  return out;
}

SweptVolume swept_volume(const GridSpec& spec, const Path& path, const Footprint& fp,
                         int clearance) {
  std::vector<uint8_t> mark(spec.cell_count(), 0);
  for (const Vec3i& ref : path.refs)
    for (const Vec3i& off : fp.offsets) {
      Vec3i v = ref + off;
      if (spec.in_bounds(v)) mark[spec.flat(v)] = 1;
    }
  // Chebyshev dilation, one separable max pass per axis per ring.
  for (int c = 0; c < clearance; ++c) {
    std::vector<uint8_t> next = mark;
    const Vec3i d = spec.dims;
    for (int z = 0; z < d.z; ++z)
      for (int y = 0; y < d.y; ++y)
        for (int x = 0; x < d.x; ++x) {
          if (mark[spec.flat({x, y, z})]) continue;
          bool near = false;
          for (int dz = -1; dz <= 1 && !near; ++dz)
            for (int dy = -1; dy <= 1 && !near; ++dy)
              for (int dx = -1; dx <= 1 && !near; ++dx) {
                Vec3i n{x + dx, y + dy, z + dz};
                if (spec.in_bounds(n) && mark[spec.flat(n)]) near = true;
              }
          if (near) next[spec.flat({x, y, z})] = 1;
        }
    mark = std::move(next);
  }
  SweptVolume sv;
  for (int i = 0; i < spec.cell_count(); ++i)
    if (mark[i]) sv.voxels.push_back(i);
  return sv;
}

SweptVolume merge_sweeps(const SweptVolume& a, const SweptVolume& b) {
  SweptVolume out;
  out.voxels.reserve(a.voxels.size() + b.voxels.size());
  std::set_union(a.voxels.begin(), a.voxels.end(), b.voxels.begin(), b.voxels.end(),
                 std::back_inserter(out.voxels));
  return out;
}

Vec3i staging_cell(const PlanningGrid& grid) {
  return {grid.spec.dims.x / 2, -(grid.margin - 2), grid.spec.dims.z / 2};
}

std::vector<GraspCandidate> grasp_candidates(const KnownObject& obj, const PlanningGrid& grid,
                                             const GripperSpec& gripper) {
  Footprint grip = gripper_footprint(gripper, grid.spec.voxel_size);
  int grip_max_y = 0, grip_half_z = 0;
  for (const Vec3i& o : grip.offsets) {
    grip_max_y = std::max(grip_max_y, o.y);
    grip_half_z = std::max(grip_half_z, o.z);
  }

  int front_j = std::numeric_limits<int>::max();
  int zmin = std::numeric_limits<int>::max(), zmax = std::numeric_limits<int>::min();
  for (const Vec3i& o : obj.offsets.offsets) {
    front_j = std::min(front_j, obj.ref.y + o.y);
    zmin = std::min(zmin, obj.ref.z + o.z);
    zmax = std::max(zmax, obj.ref.z + o.z);
  }

  int z_low = zmin + grip_half_z;
  int z_mid = (zmin + zmax) / 2;
  std::vector<int> heights{z_low};
  if (z_mid != z_low) heights.push_back(z_mid);

  std::vector<GraspCandidate> out;
  const int laterals[5] = {0, -1, 1, -2, 2};
  for (size_t hi = 0; hi < heights.size(); ++hi) {
    for (int li = 0; li < 5; ++li) {
      GraspCandidate gc;
      gc.lateral = laterals[li];
      gc.height = int(hi);
      gc.gripper_ref = {obj.ref.x + laterals[li], front_j - 1 - grip_max_y, heights[hi]};
      if (!grid.lattice_contains(gc.gripper_ref)) continue;
      if (!fits_at(grid, grip, gc.gripper_ref)) continue;
      out.push_back(gc);
      if (out.size() >= 10) return out;
    }
  }
  return out;
}

Footprint combined_footprint(const Footprint& gripper_fp, const Footprint& object_fp,
                             const Vec3i& attach_delta) {
  Footprint fp = gripper_fp;
  std::vector<Vec3i> seen = gripper_fp.offsets;
  std::sort(seen.begin(), seen.end());
  for (const Vec3i& o : object_fp.offsets) {
    Vec3i off = o + attach_delta;
    if (!std::binary_search(seen.begin(), seen.end(), off)) fp.offsets.push_back(off);
  }
  return fp;
}

std::vector<PlacementCandidate> feasible_placements(const PlacementQuery& q) {
  const PlanningGrid& grid = *q.grid;
  const GridSpec& spec = grid.spec;
  const int nx = spec.dims.x, ny = spec.dims.y, nz = spec.dims.z;

  // Placement-ok bitmap over the shelf grid: erosion of the allowed-cell
  // bitmap by the object footprint.
  std::vector<uint8_t> allowed(spec.cell_count());
  for (int i = 0; i < spec.cell_count(); ++i) {
    bool a = !grid.solid[i];
    if (a && q.forbidden && q.region == PlacementRegion::OutsideForbidden)
      a = !(*q.forbidden)[i];
    allowed[i] = a ? 1 : 0;
  }
  std::vector<uint8_t> ok(spec.cell_count(), 1);
  for (const Vec3i& off : q.object_fp.offsets) {
    for (int z = 0; z < nz; ++z) {
      int sz = z + off.z;
      for (int y = 0; y < ny; ++y) {
        uint8_t* row = ok.data() + (size_t(z) * ny + y) * nx;
        int sy = y + off.y;
        if (sz < 0 || sz >= nz || sy < 0 || sy >= ny) {
          std::fill(row, row + nx, uint8_t(0));
          continue;
        }
        const uint8_t* src = allowed.data() + (size_t(sz) * ny + sy) * nx;
        int x_lo = std::max(0, -off.x);
        int x_hi = std::min(nx, nx - off.x);
        for (int x = 0; x < x_lo; ++x) row[x] = 0;
        for (int x = x_lo; x < x_hi; ++x) row[x] &= src[x + off.x];
        for (int x = std::max(x_lo, x_hi); x < nx; ++x) row[x] = 0;
      }
    }
  }

  // Reachability of the carried pose from the staging cell.
  std::vector<uint8_t> carry_fit = carry_fit_mask(grid, q.gripper_fp, q.object_fp, q.attach_delta);
  FloodResult flood = flood_fill(grid, carry_fit, staging_cell(grid), /*want_parents=*/false);

  auto touches = [&](const Vec3i& ref, const std::vector<uint8_t>& bitmap) {
    for (const Vec3i& off : q.object_fp.offsets) {
      Vec3i v = ref + off;
      if (spec.in_bounds(v) && bitmap[spec.flat(v)]) return true;
    }
    return false;
  };

  std::vector<PlacementCandidate> all;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        Vec3i ref{x, y, z};
        if (!ok[spec.flat(ref)] || ref == q.current_ref) continue;
        if (q.region == PlacementRegion::Anywhere && q.forbidden &&
            !touches(ref, *q.forbidden))
          continue;
        if (q.required_overlap && !touches(ref, *q.required_overlap)) continue;
        Vec3i grip = ref - q.attach_delta;
        if (!grid.lattice_contains(grip)) continue;
        if (!flood.reach[grid.lattice_flat(grip)]) continue;
        Vec3i delta = ref - q.current_ref;
        Vec3d moved{delta.x * spec.voxel_size, delta.y * spec.voxel_size,
                    delta.z * spec.voxel_size};
        all.push_back({ref, moved.norm()});
      }

  auto by_distance = [&](const PlacementCandidate& a, const PlacementCandidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return spec.flat(a.ref) < spec.flat(b.ref);
  };
  if (q.max_count < int(all.size())) {
    std::partial_sort(all.begin(), all.begin() + q.max_count, all.end(), by_distance);
    all.resize(q.max_count);
  } else {
    std::sort(all.begin(), all.end(), by_distance);
  }
  return all;
}

}  // namespace shelf
