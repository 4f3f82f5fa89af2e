#pragma once

#include <map>
#include <optional>

#include "shelf/gripper.hpp"
#include "shelf/sensing.hpp"

namespace shelf {

struct ReachabilityResult {
  GraspCandidate grasp;
  Vec3i attach_delta;          // target ref - gripper ref at the grasp
  Path reach_path;             // gripper only, staging -> grasp, walls only
  Path retrieve_path;          // gripper+target, grasp -> outside, walls only
  SweptVolume target_sweep;    // dilated union of reach and retrieve sweeps
  std::vector<int32_t> raw_sweep;  // undilated union, used for the observation gate
  std::vector<int> blocking;   // object ids intersecting target_sweep, ascending
  std::map<int, std::pair<Path, SweptVolume>> pick_paths;  // per blocking object
};

enum class RetrievalError { None, NoGraspFound, NoPath, TargetNotDetected };

struct RetrievalPlanOutcome {
  std::optional<ReachabilityResult> result;
  RetrievalError error = RetrievalError::None;
};

// f_orp: picks the grasp whose reach+retrieve swept volume is smallest
// (reach and retrieve are planned against walls only), then collects the
// movable objects whose footprints intersect that sweep together with
// per-object pick paths (walls + target solid, other movables ignored).
RetrievalPlanOutcome plan_retrieval(const GroundTruthScene& gt, const BeliefGrid& belief,
                                    const GripperSpec& gripper);

struct SasReport {
  std::vector<Viewpoint> viewpoints;
  std::vector<int> updated_blocking;  // O' after re-checking the belief
  bool residual = false;              // some sweep cells stayed unobserved
};

// Swept-volume active sensing: region-specific sensing of every unobserved
// part of the target sweep and of each blocking object's pick sweep, then
// recompute the blocking set against the updated belief.
SasReport sas(const GroundTruthScene& gt, BeliefGrid& belief, const ReachabilityResult& result,
              const SensingBudget& budget, const Intrinsics& intr, std::mt19937_64& rng,
              int& next_viewpoint_id, int rs_max_depth = 4);

// Movable ids whose registered footprints intersect the sweep, ascending.
std::vector<int> blocking_set(const GroundTruthScene& gt, const BeliefGrid& belief,
                              const SweptVolume& sweep);

}  // namespace shelf
