#pragma once

#include <optional>
#include <string>

#include "shelf/fas.hpp"
#include "shelf/scene_gen.hpp"

namespace shelf {

enum class SensingMode { MAS, IAS_SAS, IAS_FAS, IAS, DIAS };

std::string to_string(SensingMode m);
SensingMode sensing_mode_from_string(const std::string& s);
PlannerMode planner_mode_from_string(const std::string& s);

struct EpisodeConfig {
  uint64_t seed = 0;
  SizeClass size_class = SizeClass::Small;
  int n_obstacles = 6;
  SensingMode sensing = SensingMode::MAS;
  PlannerMode planner = PlannerMode::OR;

  Intrinsics intrinsics;
  SensingBudget budget;
  DetectionCriterion criterion;
  GripperSpec gripper;
  SearchConfig search;          // dist_norm <= 0 derives 10 x shelf width
  double dias_threshold = 0.95;
  int rs_max_depth = 4;
  int max_attempts = 40;        // FAS loop safety valve
  double attempt_time_limit_s = 30.0;
};

struct EpisodeResult {
  uint64_t seed = 0;
  SizeClass size_class = SizeClass::Small;
  int n_obstacles = 0;
  SensingMode sensing = SensingMode::MAS;
  PlannerMode planner = PlannerMode::OR;

  bool success = false;
  bool plan_found = false;
  bool replay_ok = false;
  bool detected = false;
  int attempts = 0;
  int viewpoints = 0;
  int ias_viewpoints = 0, sas_viewpoints = 0, fas_viewpoints = 0;
  int objects_moved = 0;
  double relocation_distance_m = 0.0;
  double planning_time_s = 0.0;  // retrieval planning + tree search
  double total_time_s = 0.0;     // includes sensing computation

  std::vector<std::string> trace;  // JSON lines, wall-clock free
  std::optional<RetrievalPlan> plan;
};

// Algorithm outer loop: sensing, reachability planning, swept-volume
// sensing, the search/feedback cycle, and ground-truth replay validation.
EpisodeResult run_episode(const GroundTruthScene& gt, const EpisodeConfig& config);

struct ValidityReport {
  bool ok = true;
  bool target_exited = false;
  int step = -1;           // relocation index, or -2 for the retrieval phase
  std::string phase;       // pick / transfer / place / retract / reach / retrieve
  std::string reason;
};

// Simulates the plan against the ground truth: every path step is collision
// checked against true occupancy (excluding the carried object), object
// poses update as actions execute, and success requires the target leaving
// through the open face.
ValidityReport replay_plan(const GroundTruthScene& gt, const RetrievalPlan& plan,
                           const GripperSpec& gripper);

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;
};

struct MetricsRow {
  SensingMode sensing;
  PlannerMode planner;
  int episodes = 0;
  int successes = 0;
  double sr = 0.0;  // percent
  Stat time_total_s, time_planner_s, viewpoints, attempts;
  Stat objects_moved, relocation_cm;  // over successful episodes
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
};

MetricsTable aggregate(const std::vector<EpisodeResult>& results);
std::string metrics_to_csv(const MetricsTable& table);

}  // namespace shelf
