#pragma once

#include "shelf/episode.hpp"

namespace shelf {

struct ManifestEntry {
  uint64_t seed = 0;
  SizeClass size_class = SizeClass::Small;
  int n_obstacles = 6;
};

struct Manifest {
  std::vector<ManifestEntry> scenes;
  std::vector<std::pair<SensingMode, PlannerMode>> configs;
};

// Seeds 0..99, sizes alternating small/large, 5-8 obstacles per scene, one
// row per Table-I sensing mode.
Manifest default_manifest();

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);
Manifest load_manifest(const std::string& path);

// Runs every scene x config combination. Episodes parallelize across
// OpenMP workers; results are index-ordered and independent of scheduling.
std::vector<EpisodeResult> run_benchmark(const Manifest& manifest, const EpisodeConfig& base,
                                         int workers);

}  // namespace shelf
