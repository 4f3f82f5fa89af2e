#include "shelf/sensing.hpp"

#include <algorithm>
#include <cmath>

namespace shelf {

namespace {

constexpr double kStandoffNear = 0.05;
constexpr double kStandoffFar = 0.40;

std::vector<Viewpoint> sample_candidates(std::mt19937_64& rng, const BeliefGrid& belief,
                                         const std::optional<Vec3d>& focus, int count,
                                         int& next_id) {
  std::vector<int32_t> interior = interior_camera_cells(belief);
  std::vector<Viewpoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Viewpoint vp = sample_viewpoint(rng, belief.spec, interior, focus);
    vp.id = next_id + i;  // ids are assigned for the applied one only; kept for determinism
    out.push_back(vp);
  }
  return out;
}

int argmax_score(const std::vector<int>& scores) {
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = int(i);
  return best;
}

}  // namespace

std::vector<int32_t> interior_camera_cells(const BeliefGrid& belief) {
  const GridSpec& spec = belief.spec;
  std::vector<int32_t> cells;
  const Vec3i d = spec.dims;
  for (int z = 1; z < d.z - 1; ++z)
    for (int y = 0; y < d.y - 1; ++y)
      for (int x = 1; x < d.x - 1; ++x) {
        int idx = spec.flat({x, y, z});
        if (!belief.cells[idx].is_free()) continue;
        bool clear = true;
        for (int dz = -1; dz <= 1 && clear; ++dz)
          for (int dy = -1; dy <= 1 && clear; ++dy)
            for (int dx = -1; dx <= 1 && clear; ++dx) {
              Vec3i n{x + dx, y + dy, z + dz};
              if (n.y < 0) continue;  // open face: outside is free space
              if (!spec.in_bounds(n)) {
                clear = false;
                break;
              }
              Cell c = belief.cells[spec.flat(n)];
              if (!(c.is_free() || c.is_wall())) clear = false;
            }
        if (clear) cells.push_back(idx);
      }
  return cells;
}

Viewpoint sample_viewpoint(std::mt19937_64& rng, const GridSpec& spec,
                           const std::vector<int32_t>& interior_cells,
                           const std::optional<Vec3d>& focus) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vec3d ext = spec.extent();
  const double vs = spec.voxel_size;

  Vec3d pos;
  bool use_interior = !interior_cells.empty() && unit(rng) < 0.5;
  if (use_interior) {
    size_t pick = size_t(unit(rng) * double(interior_cells.size()));
    pick = std::min(pick, interior_cells.size() - 1);
    pos = spec.center(spec.unflat(interior_cells[pick]));
  } else {
    pos = {spec.origin.x + vs + unit(rng) * (ext.x - 2 * vs),
           spec.origin.y - kStandoffNear - unit(rng) * (kStandoffFar - kStandoffNear),
           spec.origin.z + vs + unit(rng) * (ext.z - 2 * vs)};
  }

  Vec3d aim;
  if (focus) {
    aim = *focus;
  } else {
    aim = {spec.origin.x + vs + unit(rng) * (ext.x - 2 * vs),
           spec.origin.y + unit(rng) * (ext.y - vs),
           spec.origin.z + vs + unit(rng) * (ext.z - 2 * vs)};
  }
  Vec3d dir = (aim - pos).normalized();
  if (dir.norm() == 0.0) dir = {0.0, 1.0, 0.0};
  return Viewpoint{pos, dir, -1};
}

SensingReport ias_run(const GroundTruthScene& gt, BeliefGrid& belief, const SensingBudget& budget,
                      const DetectionCriterion& criterion, const Intrinsics& intr,
                      std::mt19937_64& rng, int& next_viewpoint_id) {
  SensingReport report;
  RegionMask target_fp{gt.target().footprint};
  auto detected = [&]() {
    return coverage(target_fp, belief) >= criterion.min_target_fraction - 1e-12;
  };

  int zero_gain_rounds = 0;
  for (int step = 0; step < budget.max_viewpoints; ++step) {
    if (detected()) break;
    auto candidates = sample_candidates(rng, belief, std::nullopt, budget.candidate_samples,
                                        next_viewpoint_id);
    auto scores = score_viewpoints(belief, candidates, intr);
    int best = argmax_score(scores);
    if (scores[best] == 0) {
      if (++zero_gain_rounds >= 2) {
        report.stalled = true;
        break;
      }
      continue;
    }
    zero_gain_rounds = 0;
    Viewpoint vp = candidates[best];
    vp.id = next_viewpoint_id++;
    apply_viewpoint(gt, belief, vp, intr, criterion.min_target_fraction);
    report.viewpoints.push_back(vp);
  }
  report.detected = detected();
  return report;
}

SensingReport rs_sense(const GroundTruthScene& gt, BeliefGrid& belief, const RegionMask& region,
                       int& viewpoint_budget, const SensingBudget& budget, const Intrinsics& intr,
                       std::mt19937_64& rng, int& next_viewpoint_id, int max_depth) {
  SensingReport report;

  // Drop already-observed voxels up front.
  RegionMask pending;
  for (int32_t idx : region.voxels)
    if (belief.cells[idx].is_unobserved()) pending.voxels.push_back(idx);
  if (pending.empty()) return report;

  if (viewpoint_budget <= 0 || max_depth < 0) {
    report.residual = pending;
    report.stalled = true;
    return report;
  }

  std::vector<uint8_t> bitmap(belief.spec.cell_count(), 0);
  for (int32_t idx : pending.voxels) bitmap[idx] = 1;

  Vec3d focus = mask_centroid(belief.spec, pending);
  auto candidates =
      sample_candidates(rng, belief, focus, budget.candidate_samples, next_viewpoint_id);
  auto scores = score_viewpoints(belief, candidates, intr, bitmap);
  int best = argmax_score(scores);
  if (scores[best] == 0) {
    // No sampled pose can see any of the region; report the leftover.
    report.residual = pending;
    report.stalled = true;
    return report;
  }

  Viewpoint vp = candidates[best];
  vp.id = next_viewpoint_id++;
  apply_viewpoint(gt, belief, vp, intr);
  --viewpoint_budget;
  report.viewpoints.push_back(vp);

  RegionMask remaining;
  for (int32_t idx : pending.voxels)
    if (belief.cells[idx].is_unobserved()) remaining.voxels.push_back(idx);
  if (remaining.empty()) return report;

  auto clusters = split_components(belief.spec, remaining.voxels);
  for (const auto& cluster : clusters) {
    if (viewpoint_budget <= 0) {
      for (int32_t idx : cluster.voxels)
        if (belief.cells[idx].is_unobserved()) report.residual.voxels.push_back(idx);
      continue;
    }
    SensingReport sub = rs_sense(gt, belief, cluster, viewpoint_budget, budget, intr, rng,
                                 next_viewpoint_id, max_depth - 1);
    report.viewpoints.insert(report.viewpoints.end(), sub.viewpoints.begin(),
                             sub.viewpoints.end());
    report.residual.voxels.insert(report.residual.voxels.end(), sub.residual.voxels.begin(),
                                  sub.residual.voxels.end());
    report.stalled = report.stalled || sub.stalled;
  }
  std::sort(report.residual.voxels.begin(), report.residual.voxels.end());
  return report;
}

SensingReport dias_run(const GroundTruthScene& gt, BeliefGrid& belief, double threshold,
                       const SensingBudget& budget, const Intrinsics& intr, std::mt19937_64& rng,
                       int& next_viewpoint_id) {
  if (threshold <= 0.0 || threshold > 1.0)
    throw std::invalid_argument("dias_run: threshold out of (0, 1]");
  SensingReport report;
  RegionMask interior = gt.interior();

  int zero_gain_rounds = 0;
  while (coverage(interior, belief) < threshold) {
    auto candidates = sample_candidates(rng, belief, std::nullopt, budget.candidate_samples,
                                        next_viewpoint_id);
    auto scores = score_viewpoints(belief, candidates, intr);
    int best = argmax_score(scores);
    if (scores[best] == 0) {
      if (++zero_gain_rounds >= 2) {
        report.stalled = true;  // CoverageStall
        break;
      }
      continue;
    }
    zero_gain_rounds = 0;
    Viewpoint vp = candidates[best];
    vp.id = next_viewpoint_id++;
    apply_viewpoint(gt, belief, vp, intr);
    report.viewpoints.push_back(vp);
  }
  return report;
}

}  // namespace shelf
