#include "shelf/mcts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace shelf {

std::string to_string(PlannerMode m) { return m == PlannerMode::OR ? "or" : "ss"; }

std::string to_string(SearchStop s) {
  switch (s) {
    case SearchStop::Success: return "success";
    case SearchStop::Exhausted: return "exhausted";
    case SearchStop::IterationLimit: return "iteration_limit";
    case SearchStop::TimeLimit: return "time_limit";
    case SearchStop::InfeasibleRoot: return "infeasible_root";
  }
  return "?";
}

double ucb_score(double total_value, int visits, int parent_visits, double exploration_c) {
  if (visits == 0) return std::numeric_limits<double>::infinity();
  return total_value / visits +
         exploration_c * std::sqrt(2.0 * std::log(double(parent_visits)) / double(visits));
}

SearchContext make_search_context(const GroundTruthScene& gt, const BeliefGrid& belief,
                                  const ReachabilityResult& retrieval,
                                  const GripperSpec& gripper) {
  SearchContext ctx;
  ctx.spec = gt.spec;
  ctx.belief = &belief;
  ctx.retrieval = &retrieval;
  ctx.gripper = gripper;
  for (const auto& obj : gt.objects) {
    if (!belief.is_registered(obj.id)) continue;
    if (obj.id == gt.target_id) {
      ctx.target = make_known_object(obj, gt.spec, true);
    } else {
      ctx.movables.push_back(make_known_object(obj, gt.spec, false));
    }
  }
  ctx.blocking = retrieval.blocking;
  ctx.sweep_bitmap.assign(gt.spec.cell_count(), 0);
  for (int32_t idx : retrieval.target_sweep.voxels) ctx.sweep_bitmap[idx] = 1;
  ctx.sweep_observed = true;
  for (int32_t idx : retrieval.raw_sweep) {
    if (belief.cells[idx].is_unobserved()) {
      ctx.sweep_observed = false;
      break;
    }
  }
  return ctx;
}

namespace {

struct PendingAction {
  int object_id = -1;
  Vec3i to_ref;
  double distance = 0.0;
  bool in_sweep = false;
  Vec3i grasp_ref;
  Vec3i attach_delta;
};

struct Workspace {
  std::vector<Cell> cells;
  PlanningGrid grid;
  std::vector<uint8_t> grip_fit;
  FloodResult grip_flood;
};

using Moves = std::vector<std::pair<int, Vec3i>>;

Vec3i move_delta(const Moves& moves, int id) {
  for (const auto& [mid, d] : moves)
    if (mid == id) return d;
  return {0, 0, 0};
}

Moves with_move(const Moves& moves, int id, const Vec3i& delta) {
  Moves out;
  bool placed = false;
  for (const auto& m : moves) {
    if (m.first == id) {
      out.emplace_back(id, delta);
      placed = true;
    } else {
      out.push_back(m);
    }
  }
  if (!placed) {
    out.emplace_back(id, delta);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return out;
}

}  // namespace

struct Mcts::Impl {
  SearchContext ctx;
  SearchConfig config;
  PlannerMode mode;
  SearchTree tree;
  std::vector<std::vector<PendingAction>> pending;  // parallel to tree.nodes
  Footprint grip_fp;
  ObstacleRule solid_rule;  // everything unknown or occupied blocks

  // single-entry workspace cache (nodes are revisited in tight succession)
  int ws_node = -1;
  Workspace ws_cache;

  Impl(const SearchContext& c, const SearchConfig& cfg, PlannerMode m)
      : ctx(c), config(cfg), mode(m) {
    grip_fp = gripper_footprint(ctx.gripper, ctx.spec.voxel_size);
    solid_rule.unobserved_solid = true;
    solid_rule.occupied_solid = true;
  }

  const KnownObject* movable(int id) const {
    for (const auto& m : ctx.movables)
      if (m.id == id) return &m;
    return nullptr;
  }

  Vec3i current_ref(const Moves& moves, const KnownObject& obj) const {
    return obj.ref + move_delta(moves, obj.id);
  }

  Vec3d current_centroid(const Moves& moves, const KnownObject& obj) const {
    Vec3i d = move_delta(moves, obj.id);
    return obj.centroid + Vec3d{d.x * ctx.spec.voxel_size, d.y * ctx.spec.voxel_size,
                                d.z * ctx.spec.voxel_size};
  }

  std::vector<Cell> effective_cells(const Moves& moves, int exclude_id = -1) const {
    std::vector<Cell> cells = ctx.belief->cells;
    for (const auto& m : ctx.movables)
      for (const Vec3i& off : m.offsets.offsets) cells[ctx.spec.flat(m.ref + off)] = Cell::free();
    for (const auto& m : ctx.movables) {
      if (m.id == exclude_id) continue;
      Vec3i ref = current_ref(moves, m);
      for (const Vec3i& off : m.offsets.offsets) {
        Vec3i v = ref + off;
        if (ctx.spec.in_bounds(v)) cells[ctx.spec.flat(v)] = Cell::occupied(m.id);
      }
    }
    return cells;
  }

  Workspace build_workspace(const Moves& moves) const {
    Workspace ws;
    ws.cells = effective_cells(moves);
    ws.grid = make_planning_grid(ctx.spec, ws.cells, solid_rule);
    ws.grip_fit = fit_mask(ws.grid, grip_fp);
    ws.grip_flood = flood_fill(ws.grid, ws.grip_fit, staging_cell(ws.grid));
    return ws;
  }

  const Workspace& node_workspace(int node_id) {
    if (ws_node != node_id) {
      ws_cache = build_workspace(tree.nodes[node_id].moves);
      ws_node = node_id;
    }
    return ws_cache;
  }

  int count_in_sweep(const Moves& moves) const {
    int count = 0;
    for (const auto& m : ctx.movables) {
      Vec3i ref = current_ref(moves, m);
      for (const Vec3i& off : m.offsets.offsets) {
        Vec3i v = ref + off;
        if (ctx.spec.in_bounds(v) && ctx.sweep_bitmap[ctx.spec.flat(v)]) {
          ++count;
          break;
        }
      }
    }
    return count;
  }

  std::vector<int> in_sweep_ids(const Moves& moves) const {
    std::vector<int> out;
    for (const auto& m : ctx.movables) {
      Vec3i ref = current_ref(moves, m);
      for (const Vec3i& off : m.offsets.offsets) {
        Vec3i v = ref + off;
        if (ctx.spec.in_bounds(v) && ctx.sweep_bitmap[ctx.spec.flat(v)]) {
          out.push_back(m.id);
          break;
        }
      }
    }
    return out;
  }

  KnownObject at_current(const Moves& moves, const KnownObject& obj) const {
    KnownObject k = obj;
    k.ref = current_ref(moves, obj);
    k.centroid = current_centroid(moves, obj);
    return k;
  }

  // First grasp pose the gripper can actually reach under the workspace.
  std::optional<GraspCandidate> accessible_grasp(const Workspace& ws, const KnownObject& cur) const {
    for (const auto& gc : grasp_candidates(cur, ws.grid, ctx.gripper)) {
      if (ws.grip_flood.reach[ws.grid.lattice_flat(gc.gripper_ref)]) return gc;
    }
    return std::nullopt;
  }

  std::vector<PlacementCandidate> placements_for(const Moves& moves, const KnownObject& obj,
                                                 const GraspCandidate& grasp,
                                                 PlacementRegion region, int max_count) const {
    KnownObject cur = at_current(moves, obj);
    std::vector<Cell> cells = effective_cells(moves, obj.id);
    PlanningGrid grid = make_planning_grid(ctx.spec, cells, solid_rule);
    PlacementQuery q;
    q.grid = &grid;
    q.forbidden = &ctx.sweep_bitmap;
    q.object_fp = cur.offsets;
    q.attach_delta = cur.ref - grasp.gripper_ref;
    q.gripper_fp = grip_fp;
    q.current_ref = cur.ref;
    q.anchor = cur.centroid;
    q.max_count = max_count;
    q.region = region;
    return feasible_placements(q);
  }

  // Movables whose bodies cross the ghost pick path of an unreachable object
  // (path planned as if movables were absent).
  std::vector<int> pick_blockers(const Moves& moves, const KnownObject& obj) const {
    std::vector<Cell> cells = effective_cells(moves);
    ObstacleRule ghost;
    ghost.unobserved_solid = true;
    ghost.occupied_solid = true;
    for (const auto& m : ctx.movables) ghost.ignore_ids.push_back(m.id);
    std::sort(ghost.ignore_ids.begin(), ghost.ignore_ids.end());
    PlanningGrid grid = make_planning_grid(ctx.spec, cells, ghost);

    KnownObject cur = at_current(moves, obj);
    auto grasps = grasp_candidates(cur, grid, ctx.gripper);
    if (grasps.empty()) return {};
    auto path = plan_path(grid, grip_fp, staging_cell(grid), grasps.front().gripper_ref);
    if (!path) return {};

    auto cells_on_path = raw_sweep_cells(ctx.spec, *path, grip_fp);
    std::vector<uint8_t> on_path(ctx.spec.cell_count(), 0);
    for (int32_t idx : cells_on_path) on_path[idx] = 1;

    std::vector<int> blockers;
    for (const auto& m : ctx.movables) {
      if (m.id == obj.id) continue;
      Vec3i ref = current_ref(moves, m);
      for (const Vec3i& off : m.offsets.offsets) {
        Vec3i v = ref + off;
        if (ctx.spec.in_bounds(v) && on_path[ctx.spec.flat(v)]) {
          blockers.push_back(m.id);
          break;
        }
      }
    }
    return blockers;
  }

  void ensure_actions(int node_id) {
    TreeNode& node = tree.nodes[node_id];
    if (node.actions_ready) return;
    node.actions_ready = true;
    auto& list = pending[node_id];
    list.clear();

    const Workspace& ws = node_workspace(node_id);
    std::vector<int> sweep_ids = in_sweep_ids(node.moves);

    std::vector<std::pair<int, GraspCandidate>> accessible;
    std::vector<int> inaccessible;
    for (int id : sweep_ids) {
      const KnownObject* obj = movable(id);
      auto gc = accessible_grasp(ws, at_current(node.moves, *obj));
      if (gc) {
        accessible.emplace_back(id, *gc);
      } else {
        inaccessible.push_back(id);
      }
    }

    // Move set: accessible in-sweep objects, then accessible blockers of the
    // unreachable ones (dependency resolution).
    std::vector<std::pair<int, GraspCandidate>> move_set = accessible;
    auto in_move_set = [&](int id) {
      return std::ranges::any_of(move_set, [&](const auto& p) { return p.first == id; });
    };
    for (int id : inaccessible) {
      for (int b : pick_blockers(node.moves, *movable(id))) {
        if (in_move_set(b)) continue;
        auto gc = accessible_grasp(ws, at_current(node.moves, *movable(b)));
        if (gc) move_set.emplace_back(b, *gc);
      }
    }

    for (const auto& [id, gc] : move_set) {
      const KnownObject* obj = movable(id);
      KnownObject cur = at_current(node.moves, *obj);
      auto spots = placements_for(node.moves, *obj, gc, PlacementRegion::OutsideForbidden,
                                  config.branching);
      for (const auto& p : spots) {
        PendingAction a;
        a.object_id = id;
        a.to_ref = p.ref;
        a.distance = p.distance;
        a.in_sweep = false;
        a.grasp_ref = gc.gripper_ref;
        a.attach_delta = cur.ref - gc.gripper_ref;
        list.push_back(a);
      }
    }

    if (list.empty() && mode == PlannerMode::OR) {
      // In-sweep fallback: park an object inside the sweep when that opens a
      // pick path to a previously unreachable object.
      for (const auto& [id, gc] : accessible) {
        const KnownObject* obj = movable(id);
        KnownObject cur = at_current(node.moves, *obj);
        auto spots = placements_for(node.moves, *obj, gc, PlacementRegion::Anywhere,
                                    config.fallback_scan);
        int taken = 0;
        for (const auto& p : spots) {
          if (taken >= config.branching) break;
          Moves hyp = with_move(node.moves, id, p.ref - obj->ref);
          Workspace hw = build_workspace(hyp);
          bool unlocks = false;
          for (int other : inaccessible) {
            if (other == id) continue;
            if (accessible_grasp(hw, at_current(hyp, *movable(other)))) {
              unlocks = true;
              break;
            }
          }
          if (!unlocks) continue;
          PendingAction a;
          a.object_id = id;
          a.to_ref = p.ref;
          a.distance = p.distance;
          a.in_sweep = true;
          a.grasp_ref = gc.gripper_ref;
          a.attach_delta = cur.ref - gc.gripper_ref;
          list.push_back(a);
          ++taken;
        }
      }
    }
  }

  bool path_fits(const PlanningGrid& grid, const Footprint& fp, const Path& path) const {
    return std::ranges::all_of(path.refs,
                               [&](const Vec3i& r) { return fits_at(grid, fp, r); });
  }

  int create_child(int node_id, const PendingAction& a) {
    const KnownObject* obj = movable(a.object_id);
    const Moves& moves = tree.nodes[node_id].moves;
    KnownObject cur = at_current(moves, *obj);

    const Workspace& ws = node_workspace(node_id);
    auto pick = extract_path(ws.grid, ws.grip_flood, a.grasp_ref);
    if (!pick) return -1;

    // Transfer with the object in hand; its own cells are vacated.
    std::vector<Cell> carry_cells = effective_cells(moves, a.object_id);
    PlanningGrid carry_grid = make_planning_grid(ctx.spec, carry_cells, solid_rule);
    Vec3i place_grip = a.to_ref - a.attach_delta;
    std::vector<uint8_t> carry_fit =
        carry_fit_mask(carry_grid, grip_fp, cur.offsets, a.attach_delta);
    FloodResult carry_flood = flood_fill(carry_grid, carry_fit, a.grasp_ref);
    auto transfer = extract_path(carry_grid, carry_flood, place_grip);
    if (!transfer) return -1;
    transfer->attached_object = a.object_id;

    Moves child_moves = with_move(moves, a.object_id, a.to_ref - obj->ref);

    // Retract: the gripper reverses its path through the updated scene.
    std::vector<Cell> after_cells = effective_cells(child_moves);
    PlanningGrid after_grid = make_planning_grid(ctx.spec, after_cells, solid_rule);
    if (!path_fits(after_grid, grip_fp, transfer->reversed())) return -1;
    if (!path_fits(after_grid, grip_fp, pick->reversed())) return -1;

    TreeNode child;
    child.id = int(tree.nodes.size());
    child.parent = node_id;
    child.depth = tree.nodes[node_id].depth + 1;
    child.moves = std::move(child_moves);
    EdgeAction act;
    act.object_id = a.object_id;
    act.from_ref = cur.ref;
    act.to_ref = a.to_ref;
    act.grasp_ref = a.grasp_ref;
    act.attach_delta = a.attach_delta;
    act.distance = a.distance;
    act.in_sweep = a.in_sweep;
    act.pick_path = std::move(*pick);
    act.transfer_path = std::move(*transfer);
    child.action = std::move(act);
    child.cum_distance = tree.nodes[node_id].cum_distance + a.distance;
    child.in_sweep_count = count_in_sweep(child.moves);
    child.success = child.in_sweep_count == 0 && ctx.sweep_observed;
    tree.nodes[node_id].children.push_back(child.id);
    tree.nodes.push_back(std::move(child));
    pending.emplace_back();
    return int(tree.nodes.size()) - 1;
  }

  double evaluate(int node_id) {
    TreeNode& node = tree.nodes[node_id];
    if (node.cached_value >= 0.0) return node.cached_value;

    const int total = int(ctx.blocking.size());
    double cleared_frac =
        total == 0 ? 1.0 : double(total - node.in_sweep_count) / double(total);
    double dist_pen = std::min(1.0, node.cum_distance / config.dist_norm);

    // Greedy rollout: nearest accessible in-sweep object to its nearest
    // outside placement, up to |O| moves.
    Moves scratch = node.moves;
    for (int step = 0; step < total; ++step) {
      std::vector<int> ids = in_sweep_ids(scratch);
      if (ids.empty()) break;
      Workspace ws = build_workspace(scratch);
      std::vector<std::pair<double, int>> order;
      for (int id : ids) order.emplace_back(current_centroid(scratch, *movable(id)).y, id);
      std::sort(order.begin(), order.end());
      bool moved = false;
      for (const auto& [y, id] : order) {
        const KnownObject* obj = movable(id);
        auto gc = accessible_grasp(ws, at_current(scratch, *obj));
        if (!gc) continue;
        auto spots = placements_for(scratch, *obj, *gc, PlacementRegion::OutsideForbidden, 1);
        if (spots.empty()) continue;
        scratch = with_move(scratch, id, spots.front().ref - obj->ref);
        moved = true;
        break;
      }
      if (!moved) break;
    }
    double rollout_frac =
        total == 0 ? 1.0 : double(total - count_in_sweep(scratch)) / double(total);

    double value = config.w_clear * cleared_frac - config.w_dist * dist_pen +
                   config.w_rollout * rollout_frac;
    node.cached_value = std::clamp(value, 0.0, 1.0);
    return node.cached_value;
  }

  void backpropagate(int node_id, double value) {
    for (int at = node_id; at != -1; at = tree.nodes[at].parent) {
      tree.nodes[at].visits += 1;
      tree.nodes[at].total_value += value;
    }
  }

  void update_saturation(int node_id) {
    for (int at = node_id; at != -1; at = tree.nodes[at].parent) {
      TreeNode& n = tree.nodes[at];
      if (n.success || n.dead_end) {
        n.saturated = true;
        continue;
      }
      if (!n.actions_ready || n.next_pending < pending[at].size()) {
        n.saturated = false;
        continue;
      }
      if (n.children.empty()) {
        n.dead_end = true;
        n.saturated = true;
        continue;
      }
      n.saturated = std::ranges::all_of(n.children,
                                        [&](int c) { return tree.nodes[c].saturated; });
    }
  }

  int select_unsaturated(int node_id) const {
    const TreeNode& node = tree.nodes[node_id];
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c : node.children) {
      const TreeNode& child = tree.nodes[c];
      if (child.saturated) continue;
      double s = ucb_score(child.total_value, child.visits, node.visits, config.exploration_c);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    return best;
  }

  // Walk from the root to the node this iteration will evaluate, creating at
  // most one new child on the way. Indexed access throughout: create_child
  // grows the node vector.
  int descend() {
    int at = 0;
    while (true) {
      if (tree.nodes[at].success || tree.nodes[at].dead_end) return at;
      ensure_actions(at);
      while (tree.nodes[at].next_pending < pending[at].size()) {
        PendingAction act = pending[at][tree.nodes[at].next_pending];
        tree.nodes[at].next_pending += 1;
        int child = create_child(at, act);
        if (child != -1) return child;
      }
      if (tree.nodes[at].children.empty()) {
        tree.nodes[at].dead_end = true;
        return at;
      }
      int next = select_unsaturated(at);
      if (next == -1) return at;  // fully saturated subtree; re-backprop below
      at = next;
    }
  }

  bool root_invariants_ok() const {
    std::vector<int8_t> owner(ctx.spec.cell_count(), -1);
    for (size_t i = 0; i < ctx.movables.size(); ++i) {
      for (const Vec3i& off : ctx.movables[i].offsets.offsets) {
        Vec3i v = ctx.movables[i].ref + off;
        if (!ctx.spec.in_bounds(v)) return false;
        int idx = ctx.spec.flat(v);
        Cell c = ctx.belief->cells[idx];
        if (c.is_wall()) return false;
        if (owner[idx] != -1) return false;
        owner[idx] = int8_t(i);
      }
    }
    return true;
  }

  SearchOutcome run() {
    auto t0 = std::chrono::steady_clock::now();
    SearchOutcome out;

    tree.nodes.clear();
    pending.clear();
    ws_node = -1;
    TreeNode root;
    root.id = 0;
    root.in_sweep_count = count_in_sweep({});
    root.success = root.in_sweep_count == 0 && ctx.sweep_observed;
    tree.nodes.push_back(root);
    pending.emplace_back();

    auto finish = [&](SearchStop reason, std::optional<int> success_node) {
      out.stats.reason = reason;
      out.stats.node_count = int(tree.nodes.size());
      out.stats.wall_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (success_node) out.plan = plan_from_node(*success_node);
      out.tree = tree;
      return out;
    };

    if (!root_invariants_ok()) return finish(SearchStop::InfeasibleRoot, std::nullopt);
    if (tree.nodes[0].success) return finish(SearchStop::Success, 0);

    while (out.stats.iterations < config.max_iterations) {
      double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (elapsed > config.time_limit_s) return finish(SearchStop::TimeLimit, std::nullopt);
      if (tree.nodes[0].saturated) return finish(SearchStop::Exhausted, std::nullopt);

      out.stats.iterations += 1;
      int at = descend();
      double value = evaluate(at);
      backpropagate(at, value);
      update_saturation(at);
      if (tree.nodes[at].success) return finish(SearchStop::Success, at);
    }
    return finish(SearchStop::IterationLimit, std::nullopt);
  }

  RetrievalPlan plan_from_node(int node_id) const {
    RetrievalPlan plan;
    plan.retrieval = *ctx.retrieval;
    std::vector<const TreeNode*> chain;
    for (int at = node_id; at != -1; at = tree.nodes[at].parent) chain.push_back(&tree.nodes[at]);
    std::reverse(chain.begin(), chain.end());
    Moves moves;
    for (const TreeNode* n : chain) {
      if (!n->action) continue;
      const EdgeAction& a = *n->action;
      const KnownObject* obj = movable(a.object_id);
      Relocation r;
      r.object_id = a.object_id;
      r.from_ref = a.from_ref;
      r.to_ref = a.to_ref;
      r.grasp_ref = a.grasp_ref;
      r.attach_delta = a.attach_delta;
      r.pick_pose = current_centroid(moves, *obj);
      Vec3i d = a.to_ref - a.from_ref;
      r.place_pose = r.pick_pose + Vec3d{d.x * ctx.spec.voxel_size, d.y * ctx.spec.voxel_size,
                                         d.z * ctx.spec.voxel_size};
      r.pick_path = a.pick_path;
      r.transfer_path = a.transfer_path;
      plan.relocations.push_back(std::move(r));
      moves = with_move(moves, a.object_id, a.to_ref - obj->ref);
    }
    return plan;
  }
};

Mcts::Mcts(const SearchContext& ctx, const SearchConfig& config, PlannerMode mode)
    : impl_(std::make_unique<Impl>(ctx, config, mode)) {
  TreeNode root;
  root.id = 0;
  root.in_sweep_count = impl_->count_in_sweep({});
  root.success = root.in_sweep_count == 0 && ctx.sweep_observed;
  impl_->tree.nodes.push_back(root);
  impl_->pending.emplace_back();
}

Mcts::~Mcts() = default;

SearchOutcome Mcts::run() { return impl_->run(); }

int Mcts::select_child(int node_id) const {
  const TreeNode& node = impl_->tree.nodes[node_id];
  if (node.children.empty()) throw std::invalid_argument("select_child: no children");
  int best = node.children.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c : node.children) {
    const TreeNode& child = impl_->tree.nodes[c];
    double s = ucb_score(child.total_value, child.visits, node.visits, impl_->config.exploration_c);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

std::vector<int> Mcts::expand(int node_id) {
  impl_->ensure_actions(node_id);
  std::vector<int> created;
  while (impl_->tree.nodes[node_id].next_pending < impl_->pending[node_id].size()) {
    PendingAction act = impl_->pending[node_id][impl_->tree.nodes[node_id].next_pending];
    impl_->tree.nodes[node_id].next_pending += 1;
    int child = impl_->create_child(node_id, act);
    if (child != -1) created.push_back(child);
  }
  if (impl_->tree.nodes[node_id].children.empty()) impl_->tree.nodes[node_id].dead_end = true;
  impl_->update_saturation(node_id);
  return created;
}

double Mcts::evaluate_node(int node_id) { return impl_->evaluate(node_id); }

void Mcts::backprop(int node_id, double value) { impl_->backpropagate(node_id, value); }

bool Mcts::node_success(int node_id) const { return impl_->tree.nodes[node_id].success; }

const SearchTree& Mcts::tree() const { return impl_->tree; }

RetrievalPlan Mcts::plan_from(int node_id) const { return impl_->plan_from_node(node_id); }

SearchOutcome search(const SearchContext& ctx, const SearchConfig& config, PlannerMode mode) {
  Mcts mcts(ctx, config, mode);
  return mcts.run();
}

bool plan_feasible_on_belief(const SearchContext& ctx, const RetrievalPlan& plan) {
  // Replay through the same collision model the planner used.
  const GridSpec& spec = ctx.spec;
  std::vector<Cell> cells = ctx.belief->cells;
  ObstacleRule rule;  // all solid
  Footprint grip = gripper_footprint(ctx.gripper, spec.voxel_size);

  std::unordered_map<int, Vec3i> refs;
  std::unordered_map<int, const KnownObject*> objs;
  for (const auto& m : ctx.movables) {
    refs[m.id] = m.ref;
    objs[m.id] = &m;
  }

  auto rebuild = [&](int exclude) {
    cells = ctx.belief->cells;
    for (const auto& m : ctx.movables)
      for (const Vec3i& off : m.offsets.offsets) cells[spec.flat(m.ref + off)] = Cell::free();
    for (const auto& m : ctx.movables) {
      if (m.id == exclude) continue;
      Vec3i ref = refs[m.id];
      for (const Vec3i& off : m.offsets.offsets) {
        Vec3i v = ref + off;
        if (spec.in_bounds(v)) cells[spec.flat(v)] = Cell::occupied(m.id);
      }
    }
  };

  auto path_ok = [&](const Path& path, const Footprint& fp, int exclude) {
    rebuild(exclude);
    PlanningGrid grid = make_planning_grid(spec, cells, rule);
    return std::ranges::all_of(path.refs, [&](const Vec3i& r) { return fits_at(grid, fp, r); });
  };

  for (const auto& r : plan.relocations) {
    const KnownObject* obj = objs.count(r.object_id) ? objs[r.object_id] : nullptr;
    if (!obj) return false;
    if (!path_ok(r.pick_path, grip, -1)) return false;
    Footprint combined = combined_footprint(grip, obj->offsets, r.attach_delta);
    if (!path_ok(r.transfer_path, combined, r.object_id)) return false;
    refs[r.object_id] = r.to_ref;
    if (!path_ok(r.transfer_path.reversed(), grip, -1)) return false;
    if (!path_ok(r.pick_path.reversed(), grip, -1)) return false;
  }
  if (ctx.target) {
    if (!path_ok(plan.retrieval.reach_path, grip, -1)) return false;
    // Target leaves with the gripper; its cells vacate.
    rebuild(-1);
    for (const Vec3i& off : ctx.target->offsets.offsets) {
      Vec3i v = ctx.target->ref + off;
      if (spec.in_bounds(v)) cells[spec.flat(v)] = Cell::free();
    }
    PlanningGrid grid = make_planning_grid(spec, cells, rule);
    Footprint combined =
        combined_footprint(grip, ctx.target->offsets, plan.retrieval.attach_delta);
    if (!std::ranges::all_of(plan.retrieval.retrieve_path.refs,
                             [&](const Vec3i& ref) { return fits_at(grid, combined, ref); }))
      return false;
  }
  return true;
}

std::string tree_to_json(const SearchTree& tree) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (i) os << ",";
    os << "{\"id\":" << n.id << ",\"parent\":" << n.parent << ",\"visits\":" << n.visits
       << ",\"value\":" << n.total_value << ",\"in_sweep\":" << n.in_sweep_count
       << ",\"success\":" << (n.success ? "true" : "false")
       << ",\"dead_end\":" << (n.dead_end ? "true" : "false");
    if (n.action) {
      os << ",\"object\":" << n.action->object_id << ",\"from\":[" << n.action->from_ref.x << ","
         << n.action->from_ref.y << "," << n.action->from_ref.z << "],\"to\":["
         << n.action->to_ref.x << "," << n.action->to_ref.y << "," << n.action->to_ref.z << "]";
    }
    os << "}";
  }
  os << "]";
  return os.str();
}

}  // namespace shelf
