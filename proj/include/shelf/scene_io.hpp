#pragma once

#include <string>

#include "shelf/grid.hpp"

namespace shelf {

// Scene files are JSON: grid spec, objects (id, shape, pose), target id and
// generator seed. save/load round-trip losslessly.
std::string scene_to_json(const GroundTruthScene& gt);
GroundTruthScene scene_from_json(const std::string& text);

void save_scene(const GroundTruthScene& gt, const std::string& path);
GroundTruthScene load_scene(const std::string& path);

// RegionMask export: flat list of (i, j, k) triples.
std::string region_to_json(const GridSpec& spec, const RegionMask& region);

}  // namespace shelf
