#include "shelf/snapshot.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace shelf {

namespace {

using Rgb = std::array<uint8_t, 3>;

Rgb cell_color(Cell c, int target_id) {
  if (c.is_unobserved()) return {70, 70, 70};
  if (c.is_free()) return {245, 245, 245};
  if (c.is_wall()) return {15, 15, 15};
  int id = c.object_id();
  if (id == target_id) return {220, 40, 40};
  static const Rgb palette[] = {{60, 120, 216}, {70, 180, 90},  {230, 160, 40},
                                {150, 90, 200}, {40, 190, 190}, {200, 100, 150},
                                {130, 130, 60}, {90, 90, 230}};
  return palette[id % 8];
}

Rgb blend_sweep(Rgb base) {
  return {uint8_t((base[0] + 255) / 2), uint8_t((base[1] + 140) / 2), uint8_t(base[2] / 2)};
}

void write_ppm(const std::string& path, int w, int h, const std::vector<Rgb>& px) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "P6\n" << w << " " << h << "\n255\n";
  for (const Rgb& p : px) f.write(reinterpret_cast<const char*>(p.data()), 3);
}

}  // namespace

std::vector<std::string> render_snapshot(const GridSpec& spec, const std::vector<Cell>& cells,
                                         const std::vector<int32_t>* sweep,
                                         const std::string& out_prefix, int scale) {
  std::vector<uint8_t> sweep_bitmap(spec.cell_count(), 0);
  if (sweep)
    for (int32_t idx : *sweep) sweep_bitmap[idx] = 1;

  // The target id is not carried by the cell array; use the hottest palette
  // only when callers pass it via occupied ids. Target id 0 by convention.
  const int target_id = 0;
  std::vector<std::string> written;

  auto paint = [&](int w, int h, auto color_at, const std::string& path) {
    std::vector<Rgb> px(size_t(w) * h * scale * scale);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        Rgb c = color_at(x, y);
        for (int sy = 0; sy < scale; ++sy)
          for (int sx = 0; sx < scale; ++sx) {
            int py = (h - 1 - y) * scale + sy;  // +y up in the image
            int pxi = x * scale + sx;
            px[size_t(py) * w * scale + pxi] = c;
          }
      }
    write_ppm(path, w * scale, h * scale, px);
    written.push_back(path);
  };

  for (int z = 0; z < spec.dims.z; ++z) {
    std::ostringstream name;
    name << out_prefix << "_z" << (z < 10 ? "0" : "") << z << ".ppm";
    paint(
        spec.dims.x, spec.dims.y,
        [&](int x, int y) {
          int idx = spec.flat({x, y, z});
          Rgb c = cell_color(cells[idx], target_id);
          if (sweep_bitmap[idx]) c = blend_sweep(c);
          return c;
        },
        name.str());
  }

  // Top-down projection: the most salient state in each column wins.
  paint(
      spec.dims.x, spec.dims.y,
      [&](int x, int y) {
        int rank_best = -1;
        Rgb best{0, 0, 0};
        bool swept = false;
        for (int z = 0; z < spec.dims.z; ++z) {
          int idx = spec.flat({x, y, z});
          Cell c = cells[idx];
          int rank = c.is_occupied() ? 3 : c.is_unobserved() ? 2 : c.is_wall() ? 1 : 0;
          if (rank > rank_best) {
            rank_best = rank;
            best = cell_color(c, target_id);
          }
          if (sweep_bitmap[idx]) swept = true;
        }
        return swept ? blend_sweep(best) : best;
      },
      out_prefix + "_proj.ppm");

  return written;
}

}  // namespace shelf
