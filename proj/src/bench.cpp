#include "shelf/bench.hpp"

#include <fstream>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shelf {

using nlohmann::json;

Manifest default_manifest() {
  Manifest m;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    ManifestEntry e;
    e.seed = seed;
    e.size_class = seed % 2 == 0 ? SizeClass::Small : SizeClass::Large;
    e.n_obstacles = 5 + int((seed * 2654435761ull >> 7) % 4);
    m.scenes.push_back(e);
  }
  m.configs = {{SensingMode::MAS, PlannerMode::OR},
               {SensingMode::IAS_FAS, PlannerMode::OR},
               {SensingMode::IAS_SAS, PlannerMode::OR},
               {SensingMode::DIAS, PlannerMode::OR},
               {SensingMode::IAS, PlannerMode::OR}};
  return m;
}

std::string manifest_to_json(const Manifest& m) {
  json j;
  j["scenes"] = json::array();
  for (const auto& e : m.scenes)
    j["scenes"].push_back({{"seed", e.seed},
                           {"size_class", to_string(e.size_class)},
                           {"n_obstacles", e.n_obstacles}});
  j["configs"] = json::array();
  for (const auto& [s, p] : m.configs)
    j["configs"].push_back({{"sensing", to_string(s)}, {"planner", to_string(p)}});
  return j.dump(2);
}

Manifest manifest_from_json(const std::string& text) {
  json j = json::parse(text);
  Manifest m;
  for (const auto& je : j.at("scenes")) {
    ManifestEntry e;
    e.seed = je.at("seed");
    e.size_class = size_class_from_string(je.at("size_class"));
    e.n_obstacles = je.at("n_obstacles");
    m.scenes.push_back(e);
  }
  for (const auto& jc : j.at("configs"))
    m.configs.emplace_back(sensing_mode_from_string(jc.at("sensing")),
                           planner_mode_from_string(jc.at("planner")));
  if (m.scenes.empty() || m.configs.empty())
    throw std::invalid_argument("manifest needs scenes and configs");
  {
    std::vector<uint64_t> seeds;
    for (const auto& e : m.scenes) seeds.push_back(e.seed);
    std::sort(seeds.begin(), seeds.end());
    if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end())
      throw std::invalid_argument("manifest seeds must be unique");
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return manifest_from_json(text);
}

std::vector<EpisodeResult> run_benchmark(const Manifest& manifest, const EpisodeConfig& base,
                                         int workers) {
  std::vector<GroundTruthScene> scenes;
  scenes.reserve(manifest.scenes.size());
  for (const auto& e : manifest.scenes)
    scenes.push_back(generate_scene(e.seed, e.size_class, e.n_obstacles));

  const int jobs = int(manifest.scenes.size() * manifest.configs.size());
  std::vector<EpisodeResult> results(jobs);

#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif

#pragma omp parallel for schedule(dynamic)
  for (int job = 0; job < jobs; ++job) {
    int scene_idx = job / int(manifest.configs.size());
    int config_idx = job % int(manifest.configs.size());
    const ManifestEntry& e = manifest.scenes[scene_idx];
    EpisodeConfig cfg = base;
    cfg.seed = e.seed;
    cfg.size_class = e.size_class;
    cfg.n_obstacles = e.n_obstacles;
    cfg.sensing = manifest.configs[config_idx].first;
    cfg.planner = manifest.configs[config_idx].second;
    results[job] = run_episode(scenes[scene_idx], cfg);
  }
  return results;
}

}  // namespace shelf
