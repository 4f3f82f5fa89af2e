#pragma once

#include <string>
#include <vector>

#include "shelf/episode.hpp"

namespace shelf {

// Appends one JSON object per event to the episode trace. Events carry no
// wall-clock content so reruns produce byte-identical traces.
class TraceWriter {
 public:
  explicit TraceWriter(std::vector<std::string>& sink) : sink_(sink) {}

  void episode_start(const GroundTruthScene& gt, const EpisodeConfig& config);
  void viewpoint(const std::string& phase, const Viewpoint& vp);
  void detection(bool detected);
  void reachability(const GridSpec& spec, const ReachabilityResult& reach);
  void reachability_failed(RetrievalError error);
  void sas_done(const std::vector<int>& updated_blocking, bool residual);
  void attempt(int index, const SearchContext& ctx, const SearchOutcome& outcome);
  void fas(const GridSpec& spec, const FasReport& report);
  void replay(const ValidityReport& report);
  void episode_end(const EpisodeResult& result, const std::string& outcome);

 private:
  std::vector<std::string>& sink_;
};

// Re-simulation support for snapshots: scene and intrinsics from the trace
// header, applied viewpoints up to a step index.
struct TraceView {
  GroundTruthScene scene;
  Intrinsics intrinsics;
  double min_target_fraction = 0.3;
  std::vector<Viewpoint> viewpoints;
  std::vector<int32_t> sweep;  // dilated target sweep, if planning ran
};

TraceView parse_trace(const std::vector<std::string>& lines);
std::vector<std::string> read_trace_file(const std::string& path);
void write_trace_file(const std::string& path, const std::vector<std::string>& lines);

}  // namespace shelf
