#include "shelf/fas.hpp"

#include <algorithm>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shelf {

int promising_node(const SearchTree& tree) {
  if (tree.nodes.empty()) throw std::invalid_argument("promising_node: empty tree");
  int best = 0;
  for (int i = 1; i < int(tree.nodes.size()); ++i) {
    const TreeNode& n = tree.nodes[i];
    const TreeNode& b = tree.nodes[best];
    if (n.in_sweep_count != b.in_sweep_count) {
      if (n.in_sweep_count < b.in_sweep_count) best = i;
      continue;
    }
    double mean_n = n.visits > 0 ? n.total_value / n.visits : 0.0;
    double mean_b = b.visits > 0 ? b.total_value / b.visits : 0.0;
    if (mean_n > mean_b) best = i;  // equal means keep the lower id
  }
  return best;
}

namespace {

Vec3i node_delta(const TreeNode& node, int id) {
  for (const auto& [mid, d] : node.moves)
    if (mid == id) return d;
  return {0, 0, 0};
}

// Canonical frontal grasp geometry (lateral 0, low height) used to shape the
// carried footprint; collision state is up to the reachability flood.
Vec3i canonical_grasp_ref(const KnownObject& obj, const Footprint& grip) {
  int grip_max_y = 0, grip_half_z = 0;
  for (const Vec3i& o : grip.offsets) {
    grip_max_y = std::max(grip_max_y, o.y);
    grip_half_z = std::max(grip_half_z, o.z);
  }
  int front_j = std::numeric_limits<int>::max();
  int zmin = std::numeric_limits<int>::max();
  for (const Vec3i& o : obj.offsets.offsets) {
    front_j = std::min(front_j, obj.ref.y + o.y);
    zmin = std::min(zmin, obj.ref.z + o.z);
  }
  return {obj.ref.x, front_j - 1 - grip_max_y, zmin + grip_half_z};
}

}  // namespace

ClusterScore score_cluster(const RegionMask& cluster, const SearchTree& tree, int node_id,
                           const SearchContext& ctx) {
  const GridSpec& spec = ctx.spec;
  const TreeNode& node = tree.nodes[node_id];

  ClusterScore out;
  out.cluster = cluster;

  std::vector<uint8_t> cluster_bitmap(spec.cell_count(), 0);
  for (int32_t idx : cluster.voxels) cluster_bitmap[idx] = 1;

  Footprint grip = gripper_footprint(ctx.gripper, spec.voxel_size);

  // Movables still inside the sweep at this node's arrangement.
  for (const auto& obj : ctx.movables) {
    Vec3i delta = node_delta(node, obj.id);
    Vec3i cur_ref = obj.ref + delta;
    bool in_sweep = false;
    for (const Vec3i& off : obj.offsets.offsets) {
      Vec3i v = cur_ref + off;
      if (spec.in_bounds(v) && ctx.sweep_bitmap[spec.flat(v)]) {
        in_sweep = true;
        break;
      }
    }
    if (!in_sweep) continue;

    // Hypothesis world: node arrangement, the object removed (in hand), and
    // every cluster voxel assumed Free.
    std::vector<Cell> cells = ctx.belief->cells;
    for (const auto& m : ctx.movables)
      for (const Vec3i& off : m.offsets.offsets) cells[spec.flat(m.ref + off)] = Cell::free();
    for (const auto& m : ctx.movables) {
      if (m.id == obj.id) continue;
      Vec3i ref = m.ref + node_delta(node, m.id);
      for (const Vec3i& off : m.offsets.offsets) {
        Vec3i v = ref + off;
        if (spec.in_bounds(v)) cells[spec.flat(v)] = Cell::occupied(m.id);
      }
    }
    for (int32_t idx : cluster.voxels)
      if (cells[idx].is_unobserved()) cells[idx] = Cell::free();

    ObstacleRule rule;  // unknown and occupied solid
    PlanningGrid grid = make_planning_grid(spec, cells, rule);

    KnownObject cur = obj;
    cur.ref = cur_ref;
    cur.centroid = obj.centroid + Vec3d{delta.x * spec.voxel_size, delta.y * spec.voxel_size,
                                        delta.z * spec.voxel_size};
    Vec3i grasp = canonical_grasp_ref(cur, grip);

    PlacementQuery q;
    q.grid = &grid;
    q.forbidden = &ctx.sweep_bitmap;
    q.required_overlap = &cluster_bitmap;
    q.object_fp = cur.offsets;
    q.attach_delta = cur.ref - grasp;
    q.gripper_fp = grip;
    q.current_ref = cur.ref;
    q.anchor = cur.centroid;
    q.max_count = std::numeric_limits<int>::max();
    q.region = PlacementRegion::OutsideForbidden;
    int count = int(feasible_placements(q).size());
    if (count > 0) out.per_object[obj.id] = count;
    out.opened_regions += count;
  }
  return out;
}

FasReport select_and_sense(const GroundTruthScene& gt, BeliefGrid& belief, const SearchTree& tree,
                           const SearchContext& ctx, const SensingBudget& budget,
                           const Intrinsics& intr, std::mt19937_64& rng, int& next_viewpoint_id,
                           int rs_max_depth) {
  FasReport report;
  RegionMask unobserved = belief.unobserved_mask();
  if (unobserved.empty()) {
    report.nothing_unobserved = true;
    return report;
  }

  auto clusters = grow_regions(belief.spec, belief.cells,
                               [](Cell c) { return c.is_unobserved(); });
  report.promising = promising_node(tree);

  report.scores.resize(clusters.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < int(clusters.size()); ++i)
    report.scores[i] = score_cluster(clusters[i], tree, report.promising, ctx);

  int chosen = 0;
  for (int i = 1; i < int(report.scores.size()); ++i) {
    // Clusters come sorted by descending size, so a strict comparison keeps
    // the larger cluster and then the lower index on ties.
    if (report.scores[i].opened_regions > report.scores[chosen].opened_regions) chosen = i;
  }
  report.chosen_cluster = chosen;

  int vp_budget = budget.max_viewpoints;
  SensingReport sensed = rs_sense(gt, belief, clusters[chosen], vp_budget, budget, intr, rng,
                                  next_viewpoint_id, rs_max_depth);
  report.viewpoints = sensed.viewpoints;
  return report;
}

}  // namespace shelf
