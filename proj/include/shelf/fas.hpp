#pragma once

#include <map>

#include "shelf/mcts.hpp"

namespace shelf {

struct ClusterScore {
  RegionMask cluster;
  int opened_regions = 0;
  std::map<int, int> per_object;  // object id -> placements opened
};

// Node minimizing the count of movables still intersecting the sweep;
// ties by highest mean value, then lowest node id.
int promising_node(const SearchTree& tree);

// Counts lattice placements the cluster would open for each movable still
// inside the sweep at the node's arrangement, assuming every cluster voxel
// turned out Free: the footprint must touch the cluster, sit on
// cluster-or-known-Free cells outside the sweep, and be reachable by the
// carried gripper+object from the open face.
ClusterScore score_cluster(const RegionMask& cluster, const SearchTree& tree, int node_id,
                           const SearchContext& ctx);

struct FasReport {
  std::vector<Viewpoint> viewpoints;
  std::vector<ClusterScore> scores;  // cluster order as produced by grow_regions
  int chosen_cluster = -1;
  int promising = -1;
  bool nothing_unobserved = false;
};

// Clusters the unobserved space, scores each cluster at the most promising
// failed-search node, and senses the winner (largest cluster when every
// score is zero).
FasReport select_and_sense(const GroundTruthScene& gt, BeliefGrid& belief, const SearchTree& tree,
                           const SearchContext& ctx, const SensingBudget& budget,
                           const Intrinsics& intr, std::mt19937_64& rng, int& next_viewpoint_id,
                           int rs_max_depth = 4);

}  // namespace shelf
