#include "shelf/episode.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "shelf/trace_io.hpp"

namespace shelf {

std::string to_string(SensingMode m) {
  switch (m) {
    case SensingMode::MAS: return "mas";
    case SensingMode::IAS_SAS: return "ias_sas";
    case SensingMode::IAS_FAS: return "ias_fas";
    case SensingMode::IAS: return "ias";
    case SensingMode::DIAS: return "dias";
  }
  return "?";
}

SensingMode sensing_mode_from_string(const std::string& s) {
  if (s == "mas") return SensingMode::MAS;
  if (s == "ias_sas" || s == "ias+sas") return SensingMode::IAS_SAS;
  if (s == "ias_fas" || s == "ias+fas") return SensingMode::IAS_FAS;
  if (s == "ias") return SensingMode::IAS;
  if (s == "dias") return SensingMode::DIAS;
  throw std::invalid_argument("unknown sensing mode: " + s);
}

PlannerMode planner_mode_from_string(const std::string& s) {
  if (s == "or") return PlannerMode::OR;
  if (s == "ss") return PlannerMode::SS;
  throw std::invalid_argument("unknown planner mode: " + s);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

EpisodeResult run_episode(const GroundTruthScene& gt, const EpisodeConfig& config) {
  auto t_total = Clock::now();

  EpisodeResult res;
  res.seed = config.seed;
  res.size_class = config.size_class;
  res.n_obstacles = config.n_obstacles;
  res.sensing = config.sensing;
  res.planner = config.planner;

  BeliefGrid belief = BeliefGrid::make_unobserved(gt);
  std::mt19937_64 rng(config.seed * 0x2545f4914f6cdd1dull + 0x9e3779b97f4a7c15ull);
  int next_vp_id = 0;

  TraceWriter trace(res.trace);
  trace.episode_start(gt, config);

  SearchConfig search_cfg = config.search;
  if (search_cfg.dist_norm <= 0.0) search_cfg.dist_norm = 10.0 * gt.spec.extent().x;
  search_cfg.time_limit_s = config.attempt_time_limit_s;

  auto finish = [&](const char* outcome) {
    res.viewpoints = res.ias_viewpoints + res.sas_viewpoints + res.fas_viewpoints;
    res.total_time_s = seconds_since(t_total);
    trace.episode_end(res, outcome);
    return res;
  };

  // Initial sensing: detect the target (IAS) or densely cover the scene
  // (DIAS baseline).
  if (config.sensing == SensingMode::DIAS) {
    SensingReport r = dias_run(gt, belief, config.dias_threshold, config.budget,
                               config.intrinsics, rng, next_vp_id);
    for (const auto& vp : r.viewpoints) trace.viewpoint("dias", vp);
    res.ias_viewpoints += int(r.viewpoints.size());
    RegionMask target_fp{gt.target().footprint};
    res.detected = coverage(target_fp, belief) >= config.criterion.min_target_fraction - 1e-12;
  } else {
    SensingReport r = ias_run(gt, belief, config.budget, config.criterion, config.intrinsics,
                              rng, next_vp_id);
    for (const auto& vp : r.viewpoints) trace.viewpoint("ias", vp);
    res.ias_viewpoints += int(r.viewpoints.size());
    res.detected = r.detected;
  }
  trace.detection(res.detected);
  if (!res.detected) return finish("detection_failure");

  auto t_plan = Clock::now();
  RetrievalPlanOutcome orp = plan_retrieval(gt, belief, config.gripper);
  res.planning_time_s += seconds_since(t_plan);
  if (!orp.result) {
    trace.reachability_failed(orp.error);
    return finish("reachability_failure");
  }
  const ReachabilityResult& reach = *orp.result;
  trace.reachability(gt.spec, reach);

  if (config.sensing == SensingMode::MAS || config.sensing == SensingMode::IAS_SAS) {
    SasReport r = sas(gt, belief, reach, config.budget, config.intrinsics, rng, next_vp_id,
                      config.rs_max_depth);
    for (const auto& vp : r.viewpoints) trace.viewpoint("sas", vp);
    res.sas_viewpoints += int(r.viewpoints.size());
    trace.sas_done(r.updated_blocking, r.residual);
  }

  const bool fas_enabled =
      config.sensing == SensingMode::MAS || config.sensing == SensingMode::IAS_FAS;

  std::optional<RetrievalPlan> plan;
  while (res.attempts < config.max_attempts) {
    res.attempts += 1;
    SearchContext ctx = make_search_context(gt, belief, reach, config.gripper);
    ctx.blocking = blocking_set(gt, belief, reach.target_sweep);

    auto t_search = Clock::now();
    SearchOutcome outcome = search(ctx, search_cfg, config.planner);
    res.planning_time_s += seconds_since(t_search);
    trace.attempt(res.attempts, ctx, outcome);

    if (outcome.plan) {
      plan = std::move(outcome.plan);
      break;
    }
    if (!fas_enabled) break;

    int observed_before = belief.observed_count;
    FasReport fas_report = select_and_sense(gt, belief, outcome.tree, ctx, config.budget,
                                            config.intrinsics, rng, next_vp_id,
                                            config.rs_max_depth);
    for (const auto& vp : fas_report.viewpoints) trace.viewpoint("fas", vp);
    res.fas_viewpoints += int(fas_report.viewpoints.size());
    trace.fas(gt.spec, fas_report);
    if (fas_report.nothing_unobserved) return finish("scene_fully_observed");
    if (belief.observed_count == observed_before) return finish("sensing_stalled");
  }

  if (!plan) return finish("planning_failure");
  res.plan_found = true;
  res.plan = plan;
  res.objects_moved = int(plan->relocations.size());
  for (const auto& r : plan->relocations)
    res.relocation_distance_m += distance(r.pick_pose, r.place_pose);

  ValidityReport replay = replay_plan(gt, *plan, config.gripper);
  res.replay_ok = replay.ok && replay.target_exited;
  res.success = res.replay_ok;
  trace.replay(replay);
  return finish(res.success ? "success" : "replay_failure");
}

ValidityReport replay_plan(const GroundTruthScene& gt, const RetrievalPlan& plan,
                           const GripperSpec& gripper) {
  const GridSpec& spec = gt.spec;
  ValidityReport report;

  // True world with movable poses tracked as the plan executes.
  std::vector<Cell> base = gt.cells;
  for (const auto& obj : gt.objects)
    for (int32_t idx : obj.footprint) base[idx] = Cell::free();

  std::unordered_map<int, Vec3i> refs;      // current reference cell
  std::unordered_map<int, Footprint> fps;   // offsets
  for (const auto& obj : gt.objects) {
    KnownObject k = make_known_object(obj, spec, obj.id == gt.target_id);
    refs[obj.id] = k.ref;
    fps[obj.id] = k.offsets;
  }

  auto world_cells = [&](int exclude) {
    std::vector<Cell> cells = base;
    for (const auto& obj : gt.objects) {
      if (obj.id == exclude) continue;
      const Footprint& fp = fps[obj.id];
      Vec3i ref = refs[obj.id];
      for (const Vec3i& off : fp.offsets) {
        Vec3i v = ref + off;
        if (spec.in_bounds(v)) cells[spec.flat(v)] = Cell::occupied(obj.id);
      }
    }
    return cells;
  };

  ObstacleRule rule;  // the true world has no unobserved cells
  Footprint grip = gripper_footprint(gripper, spec.voxel_size);

  auto check_path = [&](const Path& path, const Footprint& fp, int exclude, int step,
                        const std::string& phase) {
    std::vector<Cell> cells = world_cells(exclude);
    PlanningGrid grid = make_planning_grid(spec, cells, rule);
    for (size_t i = 0; i < path.refs.size(); ++i) {
      if (!fits_at(grid, fp, path.refs[i])) {
        report.ok = false;
        report.step = step;
        report.phase = phase;
        std::ostringstream os;
        os << "collision at path position " << i;
        report.reason = os.str();
        return false;
      }
    }
    return true;
  };

  for (size_t i = 0; i < plan.relocations.size(); ++i) {
    const Relocation& r = plan.relocations[i];
    if (!fps.count(r.object_id)) {
      report.ok = false;
      report.step = int(i);
      report.phase = "pick";
      report.reason = "unknown object";
      return report;
    }
    if (!check_path(r.pick_path, grip, -1, int(i), "pick")) return report;
    Footprint combined = combined_footprint(grip, fps[r.object_id], r.attach_delta);
    if (!check_path(r.transfer_path, combined, r.object_id, int(i), "transfer")) return report;
    refs[r.object_id] = r.to_ref;
    if (!check_path(r.transfer_path.reversed(), grip, -1, int(i), "retract")) return report;
    if (!check_path(r.pick_path.reversed(), grip, -1, int(i), "retract")) return report;
  }

  const ReachabilityResult& ret = plan.retrieval;
  if (!check_path(ret.reach_path, grip, -1, -2, "reach")) return report;
  Footprint target_combined = combined_footprint(grip, fps[gt.target_id], ret.attach_delta);
  if (!check_path(ret.retrieve_path, target_combined, gt.target_id, -2, "retrieve"))
    return report;

  if (ret.retrieve_path.refs.empty()) {
    report.ok = false;
    report.phase = "retrieve";
    report.reason = "empty retrieve path";
    return report;
  }
  Vec3i final_ref = ret.retrieve_path.refs.back();
  bool outside = true;
  for (const Vec3i& off : target_combined.offsets)
    if ((final_ref + off).y >= 0) outside = false;
  report.target_exited = outside;
  if (!outside) {
    report.ok = false;
    report.phase = "retrieve";
    report.reason = "target did not exit the open face";
  }
  return report;
}

namespace {

Stat make_stat(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / double(xs.size());
  double var = 0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(var / double(xs.size())) : 0.0;
  return s;
}

}  // namespace

MetricsTable aggregate(const std::vector<EpisodeResult>& results) {
  if (results.empty()) throw std::invalid_argument("aggregate: no results");
  std::vector<std::pair<SensingMode, PlannerMode>> keys;
  for (const auto& r : results) {
    std::pair<SensingMode, PlannerMode> k{r.sensing, r.planner};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }

  MetricsTable table;
  for (const auto& [sensing, planner] : keys) {
    MetricsRow row;
    row.sensing = sensing;
    row.planner = planner;
    std::vector<double> time_total, time_planner, viewpoints, attempts, moved, reloc;
    for (const auto& r : results) {
      if (r.sensing != sensing || r.planner != planner) continue;
      row.episodes += 1;
      if (r.success) {
        row.successes += 1;
        moved.push_back(double(r.objects_moved));
        reloc.push_back(r.relocation_distance_m * 100.0);
      }
      time_total.push_back(r.total_time_s);
      time_planner.push_back(r.planning_time_s);
      viewpoints.push_back(double(r.viewpoints));
      attempts.push_back(double(r.attempts));
    }
    row.sr = row.episodes > 0 ? 100.0 * row.successes / row.episodes : 0.0;
    row.time_total_s = make_stat(time_total);
    row.time_planner_s = make_stat(time_planner);
    row.viewpoints = make_stat(viewpoints);
    row.attempts = make_stat(attempts);
    row.objects_moved = make_stat(moved);
    row.relocation_cm = make_stat(reloc);
    table.rows.push_back(row);
  }
  return table;
}

std::string metrics_to_csv(const MetricsTable& table) {
  std::ostringstream os;
  os << "method,planner,episodes,SR (%),time (sec) mean,time (sec) std,"
        "planner time (sec) mean,planner time (sec) std,"
        "# viewpoints mean,# viewpoints std,# attempts mean,# attempts std,"
        "# objects moved mean,# objects moved std,"
        "relocation distance (cm) mean,relocation distance (cm) std\n";
  for (const auto& r : table.rows) {
    os << to_string(r.sensing) << "," << to_string(r.planner) << "," << r.episodes << ","
       << r.sr << "," << r.time_total_s.mean << "," << r.time_total_s.stddev << ","
       << r.time_planner_s.mean << "," << r.time_planner_s.stddev << "," << r.viewpoints.mean
       << "," << r.viewpoints.stddev << "," << r.attempts.mean << "," << r.attempts.stddev << ","
       << r.objects_moved.mean << "," << r.objects_moved.stddev << "," << r.relocation_cm.mean
       << "," << r.relocation_cm.stddev << "\n";
  }
  return os.str();
}

}  // namespace shelf
