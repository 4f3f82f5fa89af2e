#include "shelf/trace_io.hpp"

#include <fstream>
#include <json.hpp>

#include "shelf/scene_io.hpp"

namespace shelf {

using nlohmann::json;

namespace {

json vec3d_json(const Vec3d& v) { return {v.x, v.y, v.z}; }

}  // namespace

void TraceWriter::episode_start(const GroundTruthScene& gt, const EpisodeConfig& config) {
  json j;
  j["event"] = "episode_start";
  j["seed"] = config.seed;
  j["size_class"] = to_string(config.size_class);
  j["n_obstacles"] = config.n_obstacles;
  j["sensing"] = to_string(config.sensing);
  j["planner"] = to_string(config.planner);
  j["scene"] = json::parse(scene_to_json(gt));
  j["intrinsics"] = {{"hfov", config.intrinsics.hfov},
                     {"vfov", config.intrinsics.vfov},
                     {"rays_u", config.intrinsics.rays_u},
                     {"rays_v", config.intrinsics.rays_v},
                     {"max_range", config.intrinsics.max_range}};
  j["min_target_fraction"] = config.criterion.min_target_fraction;
  sink_.push_back(j.dump());
}

void TraceWriter::viewpoint(const std::string& phase, const Viewpoint& vp) {
  json j;
  j["event"] = "viewpoint";
  j["phase"] = phase;
  j["id"] = vp.id;
  j["position"] = vec3d_json(vp.position);
  j["look"] = vec3d_json(vp.look_dir);
  sink_.push_back(j.dump());
}

void TraceWriter::detection(bool detected) {
  json j;
  j["event"] = "detection";
  j["detected"] = detected;
  sink_.push_back(j.dump());
}

void TraceWriter::reachability(const GridSpec& spec, const ReachabilityResult& reach) {
  (void)spec;
  json j;
  j["event"] = "reachability";
  j["grasp"] = {reach.grasp.gripper_ref.x, reach.grasp.gripper_ref.y, reach.grasp.gripper_ref.z};
  j["sweep_voxels"] = reach.target_sweep.voxels.size();
  j["sweep"] = reach.target_sweep.voxels;
  j["raw_sweep_voxels"] = reach.raw_sweep.size();
  j["blocking"] = reach.blocking;
  sink_.push_back(j.dump());
}

void TraceWriter::reachability_failed(RetrievalError error) {
  json j;
  j["event"] = "reachability";
  j["failed"] = error == RetrievalError::NoGraspFound  ? "no_grasp"
                : error == RetrievalError::NoPath      ? "no_path"
                                                       : "target_not_detected";
  sink_.push_back(j.dump());
}

void TraceWriter::sas_done(const std::vector<int>& updated_blocking, bool residual) {
  json j;
  j["event"] = "sas";
  j["blocking"] = updated_blocking;
  j["residual"] = residual;
  sink_.push_back(j.dump());
}

void TraceWriter::attempt(int index, const SearchContext& ctx, const SearchOutcome& outcome) {
  json j;
  j["event"] = "attempt";
  j["index"] = index;
  j["blocking"] = ctx.blocking;
  j["sweep_observed"] = ctx.sweep_observed;
  j["iterations"] = outcome.stats.iterations;
  j["nodes"] = outcome.stats.node_count;
  j["stop"] = to_string(outcome.stats.reason);
  j["plan_found"] = outcome.plan.has_value();
  if (outcome.plan) {
    json moves = json::array();
    for (const auto& r : outcome.plan->relocations) {
      moves.push_back({{"object", r.object_id},
                       {"from", {r.from_ref.x, r.from_ref.y, r.from_ref.z}},
                       {"to", {r.to_ref.x, r.to_ref.y, r.to_ref.z}}});
    }
    j["relocations"] = moves;
  }
  sink_.push_back(j.dump());
}

void TraceWriter::fas(const GridSpec& spec, const FasReport& report) {
  (void)spec;
  json j;
  j["event"] = "fas";
  j["promising_node"] = report.promising;
  json scores = json::array();
  for (const auto& s : report.scores)
    scores.push_back({{"voxels", s.cluster.size()}, {"score", s.opened_regions}});
  j["clusters"] = scores;
  j["chosen"] = report.chosen_cluster;
  j["nothing_unobserved"] = report.nothing_unobserved;
  sink_.push_back(j.dump());
}

void TraceWriter::replay(const ValidityReport& report) {
  json j;
  j["event"] = "replay";
  j["ok"] = report.ok;
  j["target_exited"] = report.target_exited;
  if (!report.ok) {
    j["step"] = report.step;
    j["phase"] = report.phase;
    j["reason"] = report.reason;
  }
  sink_.push_back(j.dump());
}

void TraceWriter::episode_end(const EpisodeResult& result, const std::string& outcome) {
  json j;
  j["event"] = "episode_end";
  j["outcome"] = outcome;
  j["success"] = result.success;
  j["attempts"] = result.attempts;
  j["viewpoints"] = result.ias_viewpoints + result.sas_viewpoints + result.fas_viewpoints;
  j["objects_moved"] = result.objects_moved;
  j["relocation_distance_m"] = result.relocation_distance_m;
  sink_.push_back(j.dump());
}

TraceView parse_trace(const std::vector<std::string>& lines) {
  TraceView view;
  bool have_header = false;
  for (const auto& line : lines) {
    json j = json::parse(line);
    std::string event = j.at("event");
    if (event == "episode_start") {
      view.scene = scene_from_json(j.at("scene").dump());
      view.intrinsics.hfov = j["intrinsics"]["hfov"];
      view.intrinsics.vfov = j["intrinsics"]["vfov"];
      view.intrinsics.rays_u = j["intrinsics"]["rays_u"];
      view.intrinsics.rays_v = j["intrinsics"]["rays_v"];
      view.intrinsics.max_range = j["intrinsics"]["max_range"];
      view.min_target_fraction = j.value("min_target_fraction", 0.3);
      have_header = true;
    } else if (event == "viewpoint") {
      Viewpoint vp;
      vp.id = j.at("id");
      vp.position = {j["position"][0], j["position"][1], j["position"][2]};
      vp.look_dir = {j["look"][0], j["look"][1], j["look"][2]};
      view.viewpoints.push_back(vp);
    } else if (event == "reachability" && j.contains("sweep")) {
      view.sweep = j["sweep"].get<std::vector<int32_t>>();
    }
  }
  if (!have_header) throw std::runtime_error("trace has no episode_start event");
  return view;
}

std::vector<std::string> read_trace_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

void write_trace_file(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  for (const auto& line : lines) f << line << "\n";
}

}  // namespace shelf
