#pragma once

#include <optional>
#include <random>
#include <vector>

#include "shelf/camera.hpp"
#include "shelf/grid.hpp"

namespace shelf {

struct SensingBudget {
  int max_viewpoints = 20;
  int candidate_samples = 32;  // K candidates per greedy step
};

struct DetectionCriterion {
  double min_target_fraction = 0.3;
};

struct SensingReport {
  std::vector<Viewpoint> viewpoints;  // applied, in order
  bool detected = false;              // ias only
  bool stalled = false;               // zero-gain stop / CoverageStall
  RegionMask residual;                // rs_sense: region voxels left unobserved
};

// Candidate camera poses: a standoff band 0.05-0.40 m outside the open
// face, plus belief-Free interior voxels with a clear 26-neighborhood.
std::vector<int32_t> interior_camera_cells(const BeliefGrid& belief);
Viewpoint sample_viewpoint(std::mt19937_64& rng, const GridSpec& spec,
                           const std::vector<int32_t>& interior_cells,
                           const std::optional<Vec3d>& focus);

// Greedy target-detection sensing: sample K candidates, apply the highest
// frustum gain, stop once the target footprint coverage reaches the
// detection criterion. detected=false after budget exhaustion or two
// consecutive zero-gain rounds.
SensingReport ias_run(const GroundTruthScene& gt, BeliefGrid& belief, const SensingBudget& budget,
                      const DetectionCriterion& criterion, const Intrinsics& intr,
                      std::mt19937_64& rng, int& next_viewpoint_id);

// Recursive-greedy region-specific sensing: aim candidates at the region
// centroid, apply the one crossing the most unobserved region voxels, then
// split the remainder into clusters and recurse largest-first.
SensingReport rs_sense(const GroundTruthScene& gt, BeliefGrid& belief, const RegionMask& region,
                       int& viewpoint_budget, const SensingBudget& budget, const Intrinsics& intr,
                       std::mt19937_64& rng, int& next_viewpoint_id, int max_depth = 4);

// Dense sensing baseline: greedy frustum gain until interior coverage
// reaches the threshold or gain stalls twice in a row.
SensingReport dias_run(const GroundTruthScene& gt, BeliefGrid& belief, double threshold,
                       const SensingBudget& budget, const Intrinsics& intr, std::mt19937_64& rng,
                       int& next_viewpoint_id);

}  // namespace shelf
