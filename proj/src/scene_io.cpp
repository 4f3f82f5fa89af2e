#include "shelf/scene_io.hpp"

#include <fstream>
#include <json.hpp>

#include "shelf/scene_gen.hpp"

namespace shelf {

using nlohmann::json;

namespace {

json shape_to_json(const Shape& s) {
  if (std::holds_alternative<Cylinder>(s)) {
    const auto& c = std::get<Cylinder>(s);
    return {{"type", "cylinder"}, {"r", c.r}, {"h", c.h}};
  }
  const auto& c = std::get<Cuboid>(s);
  return {{"type", "cuboid"}, {"w", c.w}, {"d", c.d}, {"h", c.h}};
}

Shape shape_from_json(const json& j) {
  std::string type = j.at("type");
  if (type == "cylinder") return Cylinder{j.at("r"), j.at("h")};
  if (type == "cuboid") return Cuboid{j.at("w"), j.at("d"), j.at("h")};
  throw std::invalid_argument("unknown shape type: " + type);
}

}  // namespace

std::string scene_to_json(const GroundTruthScene& gt) {
  json j;
  j["grid"] = {{"dims", {gt.spec.dims.x, gt.spec.dims.y, gt.spec.dims.z}},
               {"voxel_size", gt.spec.voxel_size},
               {"origin", {gt.spec.origin.x, gt.spec.origin.y, gt.spec.origin.z}}};
  j["seed"] = gt.seed;
  j["size_class"] = gt.size_class;
  j["target_id"] = gt.target_id;
  j["objects"] = json::array();
  for (const auto& obj : gt.objects) {
    j["objects"].push_back({{"id", obj.id},
                            {"shape", shape_to_json(obj.shape)},
                            {"position", {obj.position.x, obj.position.y, obj.position.z}},
                            {"yaw", obj.yaw}});
  }
  return j.dump(2);
}

GroundTruthScene scene_from_json(const std::string& text) {
  json j = json::parse(text);
  GroundTruthScene gt;
  auto& g = j.at("grid");
  gt.spec.dims = {g.at("dims")[0], g.at("dims")[1], g.at("dims")[2]};
  gt.spec.voxel_size = g.at("voxel_size");
  gt.spec.origin = {g.at("origin")[0], g.at("origin")[1], g.at("origin")[2]};
  gt.seed = j.value("seed", 0ull);
  gt.size_class = j.value("size_class", "small");
  gt.target_id = j.at("target_id");

  gt.cells.assign(gt.spec.cell_count(), Cell::free());
  const Vec3i d = gt.spec.dims;
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        bool wall = x == 0 || x == d.x - 1 || z == 0 || z == d.z - 1 || y == d.y - 1;
        if (wall) gt.cells[gt.spec.flat({x, y, z})] = Cell::wall();
      }

  for (const auto& jo : j.at("objects")) {
    SceneObject obj;
    obj.id = jo.at("id");
    obj.shape = shape_from_json(jo.at("shape"));
    obj.position = {jo.at("position")[0], jo.at("position")[1], jo.at("position")[2]};
    obj.yaw = jo.at("yaw");
    obj.footprint = rasterize_object(obj.shape, obj.position, obj.yaw, gt.spec);
    for (int32_t idx : obj.footprint) gt.cells[idx] = Cell::occupied(obj.id);
    gt.objects.push_back(std::move(obj));
  }
  return gt;
}

void save_scene(const GroundTruthScene& gt, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << scene_to_json(gt) << "\n";
}

GroundTruthScene load_scene(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return scene_from_json(text);
}

std::string region_to_json(const GridSpec& spec, const RegionMask& region) {
  json j = json::array();
  for (int32_t idx : region.voxels) {
    Vec3i v = spec.unflat(idx);
    j.push_back({v.x, v.y, v.z});
  }
  return j.dump();
}

}  // namespace shelf
