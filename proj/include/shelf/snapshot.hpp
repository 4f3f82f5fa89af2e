#pragma once

#include <string>
#include <vector>

#include "shelf/grid.hpp"

namespace shelf {

// Writes one PPM per z-slice plus a top-down projection, coloring
// Unobserved / Free / Wall / Occupied-by-id cells with an optional swept
// volume overlay. Returns the list of files written.
std::vector<std::string> render_snapshot(const GridSpec& spec, const std::vector<Cell>& cells,
                                         const std::vector<int32_t>* sweep,
                                         const std::string& out_prefix, int scale = 10);

}  // namespace shelf
