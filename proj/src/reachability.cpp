#include "shelf/reachability.hpp"

#include <algorithm>

namespace shelf {

std::vector<int> blocking_set(const GroundTruthScene& gt, const BeliefGrid& belief,
                              const SweptVolume& sweep) {
  std::vector<int> out;
  for (const auto& obj : gt.objects) {
    if (obj.id == gt.target_id || !belief.is_registered(obj.id)) continue;
    for (int32_t idx : obj.footprint) {
      if (sweep.contains(idx)) {
        out.push_back(obj.id);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RetrievalPlanOutcome plan_retrieval(const GroundTruthScene& gt, const BeliefGrid& belief,
                                    const GripperSpec& gripper) {
  if (!belief.is_registered(gt.target_id)) return {std::nullopt, RetrievalError::TargetNotDetected};

  const GridSpec& spec = gt.spec;
  KnownObject target = make_known_object(gt.target(), spec, true);

  // Grasp poses collide only against walls and the target itself: movables
  // overlapping a grasp land inside the swept volume and get relocated, and
  // unobserved cells are sensed by SAS afterwards.
  ObstacleRule grasp_rule;
  grasp_rule.unobserved_solid = false;
  grasp_rule.occupied_solid = true;
  for (const auto& obj : gt.objects)
    if (obj.id != gt.target_id) grasp_rule.ignore_ids.push_back(obj.id);
  std::sort(grasp_rule.ignore_ids.begin(), grasp_rule.ignore_ids.end());
  PlanningGrid grasp_grid = make_planning_grid(spec, belief.cells, grasp_rule);

  auto grasps = grasp_candidates(target, grasp_grid, gripper);
  if (grasps.empty()) return {std::nullopt, RetrievalError::NoGraspFound};

  // Reach/retrieve paths ignore movables and unobserved space: walls only.
  ObstacleRule walls_only;
  walls_only.unobserved_solid = false;
  walls_only.occupied_solid = false;
  PlanningGrid walls_grid = make_planning_grid(spec, gt.cells, walls_only);

  Footprint grip = gripper_footprint(gripper, spec.voxel_size);
  Vec3i start = staging_cell(walls_grid);

  std::optional<ReachabilityResult> best;
  for (const auto& gc : grasps) {
    auto reach = plan_path(walls_grid, grip, start, gc.gripper_ref);
    if (!reach) continue;
    Vec3i attach_delta = target.ref - gc.gripper_ref;
    Footprint combined = combined_footprint(grip, target.offsets, attach_delta);
    Vec3i exit_goal{gc.gripper_ref.x, start.y, gc.gripper_ref.z};
    auto retrieve = plan_path(walls_grid, combined, gc.gripper_ref, exit_goal);
    if (!retrieve) continue;
    retrieve->attached_object = gt.target_id;

    SweptVolume reach_sweep = swept_volume(spec, *reach, grip, gripper.clearance);
    SweptVolume retrieve_sweep = swept_volume(spec, *retrieve, combined, gripper.clearance);
    SweptVolume sweep = merge_sweeps(reach_sweep, retrieve_sweep);
    if (best && sweep.voxels.size() >= best->target_sweep.voxels.size()) continue;

    ReachabilityResult r;
    r.grasp = gc;
    r.attach_delta = attach_delta;
    r.reach_path = *reach;
    r.retrieve_path = *retrieve;
    r.target_sweep = std::move(sweep);
    auto raw_reach = raw_sweep_cells(spec, *reach, grip);
    auto raw_retrieve = raw_sweep_cells(spec, *retrieve, combined);
    r.raw_sweep.clear();
    std::set_union(raw_reach.begin(), raw_reach.end(), raw_retrieve.begin(), raw_retrieve.end(),
                   std::back_inserter(r.raw_sweep));
    best = std::move(r);
  }
  if (!best) return {std::nullopt, RetrievalError::NoPath};

  best->blocking = blocking_set(gt, belief, best->target_sweep);

  // Pick paths per blocking object: walls and the target are solid, other
  // movables and unobserved space are ignored (their clearing is the
  // planner's job; unobserved cells get sensed by SAS).
  ObstacleRule pick_rule;
  pick_rule.unobserved_solid = false;
  pick_rule.occupied_solid = true;
  for (const auto& obj : gt.objects)
    if (obj.id != gt.target_id) pick_rule.ignore_ids.push_back(obj.id);
  std::sort(pick_rule.ignore_ids.begin(), pick_rule.ignore_ids.end());
  PlanningGrid pick_grid = make_planning_grid(spec, gt.cells, pick_rule);

  for (int id : best->blocking) {
    KnownObject obj = make_known_object(gt.object(id), spec, false);
    auto obj_grasps = grasp_candidates(obj, pick_grid, gripper);
    if (obj_grasps.empty()) continue;
    auto pick = plan_path(pick_grid, grip, start, obj_grasps.front().gripper_ref);
    if (!pick) continue;
    SweptVolume sweep = swept_volume(spec, *pick, grip, gripper.clearance);
    best->pick_paths.emplace(id, std::make_pair(std::move(*pick), std::move(sweep)));
  }
  return {std::move(best), RetrievalError::None};
}

SasReport sas(const GroundTruthScene& gt, BeliefGrid& belief, const ReachabilityResult& result,
              const SensingBudget& budget, const Intrinsics& intr, std::mt19937_64& rng,
              int& next_viewpoint_id, int rs_max_depth) {
  SasReport report;
  int vp_budget = budget.max_viewpoints;

  auto sense_volume = [&](const std::vector<int32_t>& voxels) {
    RegionMask unobs;
    for (int32_t idx : voxels)
      if (belief.cells[idx].is_unobserved()) unobs.voxels.push_back(idx);
    if (unobs.empty()) return;
    SensingReport r = rs_sense(gt, belief, unobs, vp_budget, budget, intr, rng, next_viewpoint_id,
                               rs_max_depth);
    report.viewpoints.insert(report.viewpoints.end(), r.viewpoints.begin(), r.viewpoints.end());
    if (!r.residual.empty()) report.residual = true;
  };

  sense_volume(result.target_sweep.voxels);
  for (const auto& [id, path_sweep] : result.pick_paths) sense_volume(path_sweep.second.voxels);

  report.updated_blocking = blocking_set(gt, belief, result.target_sweep);
  return report;
}

}  // namespace shelf
