#pragma once

#include <memory>
#include <optional>
#include <string>

#include "shelf/reachability.hpp"

namespace shelf {

enum class PlannerMode { OR, SS };
enum class SearchStop { Success, Exhausted, IterationLimit, TimeLimit, InfeasibleRoot };

std::string to_string(PlannerMode m);
std::string to_string(SearchStop s);

struct SearchConfig {
  int branching = 3;          // placements per object per expansion
  double exploration_c = 1.0;
  double w_clear = 0.6;
  double w_dist = 0.2;
  double w_rollout = 0.4;
  double dist_norm = 6.0;     // 10 x shelf width, set by the caller
  int max_iterations = 1500;  // deterministic budget; binds before the clock
  double time_limit_s = 30.0;
  int fallback_scan = 24;     // in-sweep placement candidates to gate-test
};

struct EdgeAction {
  int object_id = -1;
  Vec3i from_ref, to_ref, grasp_ref;
  Vec3i attach_delta;
  double distance = 0.0;  // metric displacement of the object
  bool in_sweep = false;  // fallback placement inside the target sweep
  Path pick_path;         // gripper only, staging -> grasp
  Path transfer_path;     // gripper+object, grasp -> place
};

struct TreeNode {
  int id = 0;
  int parent = -1;
  int depth = 0;
  std::vector<std::pair<int, Vec3i>> moves;  // object id -> ref delta from original, sorted
  std::optional<EdgeAction> action;
  std::vector<int> children;
  int visits = 0;
  double total_value = 0.0;
  double cum_distance = 0.0;
  double cached_value = -1.0;
  int in_sweep_count = 0;
  bool success = false;
  bool dead_end = false;
  bool saturated = false;
  // lazy expansion bookkeeping
  bool actions_ready = false;
  size_t next_pending = 0;
};

struct SearchTree {
  std::vector<TreeNode> nodes;
};

struct Relocation {
  int object_id = -1;
  Vec3i from_ref, to_ref, grasp_ref, attach_delta;
  Vec3d pick_pose, place_pose;  // object centroids before/after
  Path pick_path, transfer_path;
};

struct RetrievalPlan {
  std::vector<Relocation> relocations;
  ReachabilityResult retrieval;  // frozen f_orp grasp and paths
};

struct SearchStats {
  int iterations = 0;
  int node_count = 0;
  double wall_s = 0.0;
  SearchStop reason = SearchStop::IterationLimit;
};

struct SearchOutcome {
  std::optional<RetrievalPlan> plan;
  SearchTree tree;
  SearchStats stats;
};

// Inputs assembled once per planning attempt.
struct SearchContext {
  GridSpec spec;
  const BeliefGrid* belief = nullptr;
  const ReachabilityResult* retrieval = nullptr;
  std::vector<KnownObject> movables;  // registered movables
  std::optional<KnownObject> target;
  std::vector<int> blocking;          // O
  GripperSpec gripper;
  std::vector<uint8_t> sweep_bitmap;  // dilated target sweep
  bool sweep_observed = false;        // undilated sweep has no unobserved cell
};

SearchContext make_search_context(const GroundTruthScene& gt, const BeliefGrid& belief,
                                  const ReachabilityResult& retrieval,
                                  const GripperSpec& gripper);

double ucb_score(double total_value, int visits, int parent_visits, double exploration_c);

class Mcts {
 public:
  Mcts(const SearchContext& ctx, const SearchConfig& config, PlannerMode mode);
  ~Mcts();

  SearchOutcome run();

  // Building blocks, exposed for tests.
  int select_child(int node_id) const;          // UCB over all children
  std::vector<int> expand(int node_id);         // realize every remaining action
  double evaluate_node(int node_id);            // clears/distance/rollout value
  void backprop(int node_id, double value);
  bool node_success(int node_id) const;
  const SearchTree& tree() const;
  RetrievalPlan plan_from(int node_id) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SearchOutcome search(const SearchContext& ctx, const SearchConfig& config, PlannerMode mode);

// Replays the plan's relocations and retrieval against the belief-derived
// world (unobserved solid); used as the sequential-feasibility check.
bool plan_feasible_on_belief(const SearchContext& ctx, const RetrievalPlan& plan);

std::string tree_to_json(const SearchTree& tree);

}  // namespace shelf
