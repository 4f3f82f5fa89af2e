#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "shelf/grid.hpp"

namespace shelf {

enum class SizeClass { Small, Large };

std::string to_string(SizeClass s);
SizeClass size_class_from_string(const std::string& s);

// Small shelf 0.60 x 0.40 x 0.40 m, Large 1.00 x 0.50 x 0.50 m, 0.02 m voxels.
GridSpec default_grid_spec(SizeClass size_class);

struct PlacementFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SceneGenOptions {
  int max_attempts = 10000;
  bool require_corridor_blocker = true;  // waived automatically when n_obstacles == 0
};

// Deterministic in (seed, size_class, n_obstacles). The target lands in the
// rear half of the shelf; obstacles are rejection-sampled with disjoint
// footprints and at least one obstacle straddles the straight pull-out
// corridor from the open face to the target.
GroundTruthScene generate_scene(uint64_t seed, SizeClass size_class, int n_obstacles,
                                const SceneGenOptions& options = {});

// Straight -y translation sweep of the target footprint out the open face.
RegionMask straight_corridor(const GroundTruthScene& gt);

}  // namespace shelf
