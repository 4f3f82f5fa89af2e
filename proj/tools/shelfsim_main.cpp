#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "shelf/bench.hpp"
#include "shelf/scene_io.hpp"
#include "shelf/snapshot.hpp"
#include "shelf/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;

void apply_config_json(shelf::EpisodeConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config " + path);
  json j = json::parse(f);
  if (j.contains("rays_u")) cfg.intrinsics.rays_u = j["rays_u"];
  if (j.contains("rays_v")) cfg.intrinsics.rays_v = j["rays_v"];
  if (j.contains("hfov_deg")) cfg.intrinsics.hfov = double(j["hfov_deg"]) * M_PI / 180.0;
  if (j.contains("vfov_deg")) cfg.intrinsics.vfov = double(j["vfov_deg"]) * M_PI / 180.0;
  if (j.contains("max_range")) cfg.intrinsics.max_range = j["max_range"];
  if (j.contains("max_viewpoints")) cfg.budget.max_viewpoints = j["max_viewpoints"];
  if (j.contains("candidate_samples")) cfg.budget.candidate_samples = j["candidate_samples"];
  if (j.contains("min_target_fraction")) cfg.criterion.min_target_fraction = j["min_target_fraction"];
  if (j.contains("gripper_width")) cfg.gripper.width = j["gripper_width"];
  if (j.contains("gripper_depth")) cfg.gripper.depth = j["gripper_depth"];
  if (j.contains("gripper_height")) cfg.gripper.height = j["gripper_height"];
  if (j.contains("clearance")) cfg.gripper.clearance = j["clearance"];
  if (j.contains("branching")) cfg.search.branching = j["branching"];
  if (j.contains("exploration_c")) cfg.search.exploration_c = j["exploration_c"];
  if (j.contains("w_clear")) cfg.search.w_clear = j["w_clear"];
  if (j.contains("w_dist")) cfg.search.w_dist = j["w_dist"];
  if (j.contains("w_rollout")) cfg.search.w_rollout = j["w_rollout"];
  if (j.contains("dist_norm")) cfg.search.dist_norm = j["dist_norm"];
  if (j.contains("max_iterations")) cfg.search.max_iterations = j["max_iterations"];
  if (j.contains("attempt_time_limit")) cfg.attempt_time_limit_s = j["attempt_time_limit"];
  if (j.contains("dias_threshold")) cfg.dias_threshold = j["dias_threshold"];
  if (j.contains("rs_max_depth")) cfg.rs_max_depth = j["rs_max_depth"];
  if (j.contains("max_attempts")) cfg.max_attempts = j["max_attempts"];
}

struct CommonFlags {
  std::string config_path;
  uint64_t seed = 0;
  std::string size = "small";
  int obstacles = 6;
  std::string sensing = "mas";
  std::string planner = "or";
  int max_iterations = -1;
  double time_limit = -1;
  int rays_u = -1, rays_v = -1;
  int max_viewpoints = -1, candidate_samples = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file with parameter overrides");
  cmd->add_option("--seed", f.seed, "scene RNG seed");
  cmd->add_option("--size", f.size, "small|large")->check(CLI::IsMember({"small", "large"}));
  cmd->add_option("--obstacles", f.obstacles, "number of non-target objects");
  cmd->add_option("--sensing", f.sensing, "mas|ias_sas|ias_fas|ias|dias");
  cmd->add_option("--planner", f.planner, "or|ss");
  cmd->add_option("--max-iterations", f.max_iterations, "search iteration budget");
  cmd->add_option("--time-limit", f.time_limit, "per-attempt wall clock budget (s)");
  cmd->add_option("--rays-u", f.rays_u, "camera ray grid width");
  cmd->add_option("--rays-v", f.rays_v, "camera ray grid height");
  cmd->add_option("--max-viewpoints", f.max_viewpoints, "viewpoint budget per sensing call");
  cmd->add_option("--candidate-samples", f.candidate_samples, "candidates per greedy step");
}

shelf::EpisodeConfig build_config(const CommonFlags& f) {
  shelf::EpisodeConfig cfg;
  if (!f.config_path.empty()) apply_config_json(cfg, f.config_path);
  cfg.seed = f.seed;
  cfg.size_class = shelf::size_class_from_string(f.size);
  cfg.n_obstacles = f.obstacles;
  cfg.sensing = shelf::sensing_mode_from_string(f.sensing);
  cfg.planner = shelf::planner_mode_from_string(f.planner);
  if (f.max_iterations > 0) cfg.search.max_iterations = f.max_iterations;
  if (f.time_limit > 0) cfg.attempt_time_limit_s = f.time_limit;
  if (f.rays_u > 0) cfg.intrinsics.rays_u = f.rays_u;
  if (f.rays_v > 0) cfg.intrinsics.rays_v = f.rays_v;
  if (f.max_viewpoints > 0) cfg.budget.max_viewpoints = f.max_viewpoints;
  if (f.candidate_samples > 0) cfg.budget.candidate_samples = f.candidate_samples;
  return cfg;
}

json result_metadata(const shelf::EpisodeResult& r) {
  return {{"seed", r.seed},
          {"size_class", shelf::to_string(r.size_class)},
          {"n_obstacles", r.n_obstacles},
          {"sensing", shelf::to_string(r.sensing)},
          {"planner", shelf::to_string(r.planner)},
          {"success", r.success},
          {"attempts", r.attempts},
          {"viewpoints", r.viewpoints},
          {"objects_moved", r.objects_moved},
          {"relocation_distance_m", r.relocation_distance_m},
          {"time_s", r.total_time_s},
          {"planner_time_s", r.planning_time_s}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confined-shelf object retrieval simulator"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate scene files");
  uint64_t gen_from = 0, gen_to = 0;
  std::string gen_size = "small";
  int gen_obstacles = 6;
  std::string gen_out = "scenes";
  gen->add_option("--from", gen_from, "first seed");
  gen->add_option("--to", gen_to, "last seed (inclusive)");
  gen->add_option("--size", gen_size, "small|large")->check(CLI::IsMember({"small", "large"}));
  gen->add_option("--obstacles", gen_obstacles, "number of non-target objects");
  gen->add_option("--out", gen_out, "output directory");

  // run
  auto* run = app.add_subcommand("run", "run a single episode");
  CommonFlags run_flags;
  add_common(run, run_flags);
  std::string run_scene_path, run_trace_out = "trace.jsonl", run_snapshot_prefix;
  run->add_option("--scene", run_scene_path, "scene file (overrides --seed/--size/--obstacles)");
  run->add_option("--trace", run_trace_out, "trace output path");
  run->add_option("--snapshot", run_snapshot_prefix, "also render final belief snapshots");

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark manifest");
  CommonFlags bench_flags;
  add_common(bench, bench_flags);
  std::string bench_manifest_path, bench_out = "bench_out";
  int bench_workers = 0;
  bool bench_no_traces = false;
  bench->add_option("--manifest", bench_manifest_path, "manifest JSON (default: 100 scenes)");
  bench->add_option("--out", bench_out, "output directory");
  bench->add_option("--workers", bench_workers, "episode worker threads (0 = OpenMP default)");
  bench->add_flag("--no-traces", bench_no_traces, "skip per-episode trace files");

  // snapshot
  auto* snap = app.add_subcommand("snapshot", "render scene or trace-step snapshots");
  std::string snap_scene_path, snap_trace_path, snap_out = "snap";
  int snap_step = -1;
  snap->add_option("--scene", snap_scene_path, "scene file to render");
  snap->add_option("--trace", snap_trace_path, "episode trace to replay");
  snap->add_option("--step", snap_step, "number of trace viewpoints to apply (default: all)");
  snap->add_option("--out", snap_out, "output file prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (gen_to < gen_from) {
        std::cerr << "gen: --to must be >= --from\n";
        return kExitUsage;
      }
      fs::create_directories(gen_out);
      for (uint64_t seed = gen_from; seed <= gen_to; ++seed) {
        auto gt = shelf::generate_scene(seed, shelf::size_class_from_string(gen_size),
                                        gen_obstacles);
        std::ostringstream name;
        name << gen_out << "/scene_" << seed << ".json";
        shelf::save_scene(gt, name.str());
        std::cout << name.str() << "\n";
      }
      return kExitOk;
    }

    if (run->parsed()) {
      shelf::EpisodeConfig cfg = build_config(run_flags);
      shelf::GroundTruthScene gt;
      if (!run_scene_path.empty()) {
        gt = shelf::load_scene(run_scene_path);
        cfg.seed = gt.seed;
        cfg.size_class = shelf::size_class_from_string(gt.size_class);
        cfg.n_obstacles = int(gt.objects.size()) - 1;
      } else {
        gt = shelf::generate_scene(cfg.seed, cfg.size_class, cfg.n_obstacles);
      }
      shelf::EpisodeResult res = shelf::run_episode(gt, cfg);
      shelf::write_trace_file(run_trace_out, res.trace);
      std::cout << result_metadata(res).dump(2) << "\n";
      if (!run_snapshot_prefix.empty()) {
        shelf::TraceView view = shelf::parse_trace(res.trace);
        shelf::BeliefGrid belief = shelf::BeliefGrid::make_unobserved(view.scene);
        for (const auto& vp : view.viewpoints)
          shelf::apply_viewpoint(view.scene, belief, vp, view.intrinsics,
                                 view.min_target_fraction);
        shelf::render_snapshot(view.scene.spec, belief.cells,
                               view.sweep.empty() ? nullptr : &view.sweep, run_snapshot_prefix);
      }
      return kExitOk;
    }

    if (bench->parsed()) {
      shelf::EpisodeConfig cfg = build_config(bench_flags);
      shelf::Manifest manifest = bench_manifest_path.empty()
                                     ? shelf::default_manifest()
                                     : shelf::load_manifest(bench_manifest_path);
      fs::create_directories(bench_out);
      auto results = shelf::run_benchmark(manifest, cfg, bench_workers);

      if (!bench_no_traces) {
        for (const auto& r : results) {
          std::ostringstream name;
          name << bench_out << "/trace_" << shelf::to_string(r.sensing) << "_"
               << shelf::to_string(r.planner) << "_seed" << r.seed << ".jsonl";
          shelf::write_trace_file(name.str(), r.trace);
        }
      }
      json meta = json::array();
      for (const auto& r : results) meta.push_back(result_metadata(r));
      std::ofstream mf(bench_out + "/episodes.json");
      mf << meta.dump(2) << "\n";

      shelf::MetricsTable table = shelf::aggregate(results);
      std::ofstream tf(bench_out + "/metrics.csv");
      tf << shelf::metrics_to_csv(table);
      std::cout << shelf::metrics_to_csv(table);
      return kExitOk;
    }

    if (snap->parsed()) {
      if (snap_scene_path.empty() == snap_trace_path.empty()) {
        std::cerr << "snapshot: pass exactly one of --scene or --trace\n";
        return kExitUsage;
      }
      if (!snap_scene_path.empty()) {
        auto gt = shelf::load_scene(snap_scene_path);
        for (const auto& f : shelf::render_snapshot(gt.spec, gt.cells, nullptr, snap_out))
          std::cout << f << "\n";
        return kExitOk;
      }
      auto lines = shelf::read_trace_file(snap_trace_path);
      shelf::TraceView view = shelf::parse_trace(lines);
      int steps = snap_step < 0 ? int(view.viewpoints.size()) : snap_step;
      if (steps > int(view.viewpoints.size())) {
        std::cerr << "snapshot: step " << steps << " out of range (trace has "
                  << view.viewpoints.size() << " viewpoints)\n";
        return kExitUsage;
      }
      shelf::BeliefGrid belief = shelf::BeliefGrid::make_unobserved(view.scene);
      for (int i = 0; i < steps; ++i)
        shelf::apply_viewpoint(view.scene, belief, view.viewpoints[i], view.intrinsics,
                               view.min_target_fraction);
      for (const auto& f : shelf::render_snapshot(view.scene.spec, belief.cells,
                                                  view.sweep.empty() ? nullptr : &view.sweep,
                                                  snap_out))
        std::cout << f << "\n";
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
